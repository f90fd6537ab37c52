#include "stratafill/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stratafill {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double FillerProfile::g_iter(double delta, int m) const {
    double d = delta;
    for (int i = 0; i < m; ++i) d = g(d);
    return d;
}

StraightChain straighten(const DiscreteChain& c, const Metric& metric) {
    StraightChain out;
    out.verts = c;
    out.max_simplex_diameter = fineness(c, metric);
    out.valid = out.max_simplex_diameter <= kPi / 2.0;
    if (!out.valid)
        throw OpError(ErrorCode::FINENESS_EXCEEDED,
                      "simplex diameter > pi/2 has no unique geodesic extension");
    return out;
}

DiscreteChain discretize(const StraightChain& c) { return c.verts; }

DiscreteChain strip_null_terms(const DiscreteChain& c) {
    DiscreteChain out(c.dimension());
    for (const auto& [s, a] : c.terms()) {
        DiscreteChain one(c.dimension());
        one.add(s, 1);
        if (!boundary(one).is_zero()) out.add(s, a);
    }
    return out;
}

PointId select_cone_apex(std::span<const PointId> support, PointStore& store,
                         std::span<const PointId> extra_candidates) {
    if (support.empty())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "apex selection over empty support");

    std::vector<PointId> candidates(support.begin(), support.end());
    candidates.insert(candidates.end(), extra_candidates.begin(), extra_candidates.end());

    // Normalized support mean (cached in the store), when it does not collapse.
    try {
        candidates.push_back(store.append_barycenter(support));
    } catch (const OpError&) {
        // balanced support: no mean candidate
    }
    // Coordinate axes (cached).
    for (int ax = 0; ax < store.ambient_dim(); ++ax)
        for (int sgn : {1, -1}) candidates.push_back(store.axis_point(ax, sgn));

    double best = kPi + 1.0;
    PointId best_id = candidates.front();
    for (PointId cand : candidates) {
        double worst = 0.0;
        for (PointId s : support) worst = std::max(worst, store.distance(cand, s));
        if (worst < best - 1e-15 || (std::abs(worst - best) <= 1e-15 && cand < best_id)) {
            best = worst;
            best_id = cand;
        }
    }
    // Margin against antipodal collapse of cone edges.
    if (best > kPi - 0.05)
        throw OpError(ErrorCode::FILL_FAILED, "no cone apex avoids the support's antipodes");
    return best_id;
}

PointId select_cone_apex_on_latitude(std::span<const PointId> support, PointId center,
                                     double radius, PointStore& store) {
    if (support.empty())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "apex selection over empty support");
    std::vector<PointId> candidates(support.begin(), support.end());
    // Latitude projections of the support mean and the coordinate axes; all
    // cached in the store so replays agree.
    auto try_lat = [&](PointId p) {
        PointId one[1] = {p};
        try {
            candidates.push_back(store.append_latitude_barycenter(one, center, radius));
        } catch (const OpError&) {
            // on the axis: no candidate
        }
    };
    try {
        try_lat(store.append_barycenter(support));
    } catch (const OpError&) {
    }
    for (int ax = 0; ax < store.ambient_dim(); ++ax)
        for (int sgn : {1, -1}) try_lat(store.axis_point(ax, sgn));

    double best = kPi + 1.0;
    PointId best_id = candidates.front();
    for (PointId cand : candidates) {
        double worst = 0.0;
        for (PointId s : support) worst = std::max(worst, store.distance(cand, s));
        if (worst < best - 1e-15 || (std::abs(worst - best) <= 1e-15 && cand < best_id)) {
            best = worst;
            best_id = cand;
        }
    }
    double intrinsic_cap = kPi * std::sin(radius);
    if (best > intrinsic_cap - 0.02 * std::sin(radius))
        throw OpError(ErrorCode::FILL_FAILED, "no latitude apex avoids the support's antipodes");
    return best_id;
}

namespace {

/// Hash grid over ambient coordinates for nearest-kept rejection; cell edge
/// equals the chordal separation radius, so neighbours live in the 3^dim
/// adjacent cells.
class SeparationGrid {
  public:
    SeparationGrid(int dim, double geodesic_sep)
        : dim_(dim), min_dot_(std::cos(geodesic_sep)),
          cell_(std::max(2.0 * std::sin(geodesic_sep / 2.0), 1e-9)) {}

    bool try_insert(std::span<const double> v) {
        long long key[kMaxAmbientDim];
        for (int i = 0; i < dim_; ++i)
            key[i] = static_cast<long long>(std::floor(v[i] / cell_));
        // scan neighbours
        long long probe[kMaxAmbientDim];
        if (occupied(v, key, probe, 0)) return false;
        cells_[pack(key)].push_back({v.begin(), v.end()});
        return true;
    }

  private:
    bool occupied(std::span<const double> v, const long long* base, long long* probe,
                  int axis) const {
        if (axis == dim_) {
            auto it = cells_.find(pack(probe));
            if (it == cells_.end()) return false;
            for (const auto& k : it->second)
                if (dot(k, v) >= min_dot_) return true;
            return false;
        }
        for (long long d = -1; d <= 1; ++d) {
            probe[axis] = base[axis] + d;
            if (occupied(v, base, probe, axis + 1)) return true;
        }
        return false;
    }

    std::uint64_t pack(const long long* key) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int i = 0; i < dim_; ++i) {
            h ^= static_cast<std::uint64_t>(key[i]);
            h *= 1099511628211ull;
        }
        return h;
    }

    int dim_;
    double min_dot_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::vector<double>>> cells_;
};

double sphere_measure(int dim) {
    // Surface measure of S^{dim-1}.
    switch (dim) {
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        case 4: return 2.0 * kPi * kPi;
        default: return 2.0 * std::pow(kPi, dim / 2.0);
    }
}

}  // namespace

std::vector<PointId> sample_net(double eps,
                                const std::function<bool(std::span<const double>)>& region,
                                std::uint64_t seed, PointStore& store) {
    if (eps <= 0.0) throw OpError(ErrorCode::PRECONDITION_FAILED, "sample_net requires eps > 0");
    const int dim = store.ambient_dim();

    // Candidate stream roughly (eps/4)-dense, so greedy eps/2-separation
    // yields an eps-cover of the region.
    double cell = std::min(eps / 4.0, kPi / 4.0);
    std::size_t want = static_cast<std::size_t>(
        std::ceil(30.0 * sphere_measure(dim) / std::pow(cell, dim - 1)));
    want = std::min<std::size_t>(want, 30000000);

    Rng rng(seed);
    SeparationGrid grid(dim, eps / 2.0);
    std::vector<PointId> net;

    std::vector<double> v(dim);
    for (std::size_t it = 0; it < want; ++it) {
        // Gaussian direction via Box-Muller on the deterministic stream.
        for (int i = 0; i < dim; i += 2) {
            double u1 = rng.next_double();
            double u2 = rng.next_double();
            u1 = std::max(u1, 1e-300);
            double r = std::sqrt(-2.0 * std::log(u1));
            v[i] = r * std::cos(2.0 * kPi * u2);
            if (i + 1 < dim) v[i + 1] = r * std::sin(2.0 * kPi * u2);
        }
        double n = norm(v);
        if (n < 1e-12) continue;
        for (int i = 0; i < dim; ++i) v[i] /= n;
        if (region && !region(v)) continue;
        if (!grid.try_insert(v)) continue;
        net.push_back(store.append_unit(v));
    }
    if (net.size() < 2 && !region)
        throw OpError(ErrorCode::FILL_FAILED, "net sampling produced fewer than 2 points");
    return net;
}

}  // namespace stratafill
