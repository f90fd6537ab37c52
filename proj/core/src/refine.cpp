#include <algorithm>
#include <cmath>

#include "stratafill/pipeline.hpp"

namespace stratafill {

int f1_of(int n, const FillerProfile& profile) {
    double k = profile.k_fill;
    return static_cast<int>(2.0 * k * std::max<double>(n, 2.0 * k));
}

int f3_of(int n, int k, const FillerProfile& profile) {
    int m = n;
    for (int i = 0; i < k; ++i) m = f1_of(m, profile);
    return m;
}

int f4_of(int n, int k, const FillerProfile& profile) { return f1_of(f3_of(n, k, profile), profile); }

double h_of(double r, const FillerProfile& profile) {
    return StratumFillModuli::h_modulus(r, profile.k_fill);
}

double locality_h_upper(double r, int k, const FillerProfile& profile) {
    double ri = 0.0;
    for (int i = 0; i < k; ++i) ri = h_of(r + 2.0 * ri, profile) + ri;
    return ri;
}

double locality_h_prime(double r, int k, const FillerProfile& profile) {
    double R = r + locality_h_upper(r, k, profile);
    for (int i = 0; i < k; ++i) R = h_of(r + 2.0 * R, profile) + R;
    return R;
}

RefineOperator::RefineOperator(const BallFamily& family, PointStore& store, int n, double delta,
                               int top_degree, const FillerProfile& profile, int schedule_n)
    : family_(&family), store_(&store), n_(n), delta_(delta), top_(top_degree),
      profile_(profile) {
    int sched_base = schedule_n > 0 ? schedule_n : n;
    // Stratum ladder n_i = f1^{(i)}(n); delta ladder descending from the top
    // degree via the стратum filler's required input fineness, computed for
    // the (possibly shifted) schedule strata m_i = f1^{(i)}(schedule_n).
    stratum_sched_.resize(top_ + 1);
    stratum_sched_[0] = n_;
    for (int i = 1; i <= top_; ++i) stratum_sched_[i] = f1_of(stratum_sched_[i - 1], profile_);

    std::vector<int> m_sched(top_ + 1);
    m_sched[0] = sched_base;
    for (int i = 1; i <= top_; ++i) m_sched[i] = f1_of(m_sched[i - 1], profile_);

    delta_sched_.resize(top_ + 1);
    moduli_.resize(top_ + 1);
    delta_sched_[top_] = delta_;
    for (int i = top_; i >= 1; --i) {
        moduli_[i] = stratum_fill_moduli(*family_, m_sched[i - 1], delta_sched_[i], *store_,
                                         profile_);
        delta_sched_[i - 1] = moduli_[i].g1;
    }
    memo_.resize(top_ + 1);
}

double RefineOperator::input_fineness_bound(int degree) const { return delta_sched_.at(degree); }

double RefineOperator::locality_bound(double r, int degree) const {
    return locality_h_upper(r, degree, profile_);
}

DiscreteChain RefineOperator::apply_simplex(const DiscreteSimplex& s, int dim) {
    if (dim == 0) {
        DiscreteChain out(0);
        out.add(s, 1);
        return out;
    }
    auto& memo = memo_.at(dim);
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;

    DiscreteChain bd(dim - 1);
    for (std::size_t i = 0; i < s.verts.size(); ++i)
        bd += apply_simplex(s.face(i), dim - 1) * Integer((i % 2 == 0) ? 1 : -1);

    Metric metric(*store_);
    DiscreteChain result(dim);
    DiscreteChain plain_bd(dim - 1);
    {
        DiscreteChain one(dim);
        one.add(s, 1);
        plain_bd = boundary(one);
    }
    if (bd == plain_bd && simplex_diameter(s, metric) <= delta_sched_[dim] * (1.0 + 1e-12)) {
        // The simplex is already fine and its refined boundary is untouched.
        result.add(s, 1);
    } else {
        StratumFillModuli mods = stratum_fill_moduli(*family_, stratum_sched_[dim - 1],
                                                     delta_sched_[dim], *store_, profile_);
        // The schedule guarantees the input fineness; moduli recomputed at the
        // true stratum are no stricter than the schedule's m-based ones.
        auto fill = stratum_fill(bd, stratum_sched_[dim - 1], delta_sched_[dim], *family_,
                                 *store_, profile_, &mods);
        result = fill.filler;
    }
    return memo.emplace(s, std::move(result)).first->second;
}

DiscreteChain RefineOperator::apply(const DiscreteChain& c) {
    if (c.dimension() > top_)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "degree above the operator's top degree");
    if (c.dimension() < 0) return c;
    DiscreteChain out(c.dimension());
    for (const auto& [s, a] : c.terms()) out += apply_simplex(s, c.dimension()) * a;
    return out;
}

DiscreteChain refine_bridge(RefineOperator& upper, RefineOperator& lower,
                            const std::map<PointId, PointId>& vmap, const DiscreteChain& cycle) {
    // H_i sigma = fill((phi_upper_i - phi_lower_i T - H_{i-1} d) sigma), built
    // over the face complex of the cycle; the scheduled deltas keep each fill
    // admissible.
    const int dim = cycle.dimension();
    PointStore& store = upper.store();

    auto map_simplex = [&](const DiscreteSimplex& s) {
        DiscreteSimplex t;
        t.verts.reserve(s.verts.size());
        for (PointId v : s.verts) t.verts.push_back(vmap.at(v));
        return t;
    };

    // Bottom-up over the face complex of the cycle.
    FaceComplex<PointId> fc = face_complex(cycle);
    std::vector<std::vector<DiscreteSimplex>> by_dim(dim + 1);
    for (const auto& s : fc.generators) by_dim[s.dim()].push_back(s);

    std::vector<std::map<DiscreteSimplex, DiscreteChain>> h(dim + 1);
    for (int d = 0; d <= dim; ++d) {
        for (const auto& s : by_dim[d]) {
            DiscreteChain sigma = upper.apply_simplex(s, d);
            {
                DiscreteChain lower_arg(d);
                lower_arg.add(map_simplex(s), 1);
                sigma -= lower.apply(lower_arg);
            }
            if (d >= 1) {
                for (std::size_t i = 0; i < s.verts.size(); ++i) {
                    const DiscreteChain& hf = h[d - 1].at(s.face(i));
                    sigma -= hf * Integer((i % 2 == 0) ? 1 : -1);
                }
            }
            DiscreteChain filled(d + 1);
            if (!sigma.is_zero()) {
                // Operators must be built with top_degree >= dim + 1 so the
                // schedule covers the homotopy's fill targets.
                auto fill = stratum_fill(sigma, upper.stratum_at(d), upper.delta_at(d + 1),
                                         upper.family(), store, upper.profile());
                filled = fill.filler;
            }
            h[d].emplace(s, std::move(filled));
        }
    }

    DiscreteChain out(dim + 1);
    for (const auto& [s, a] : cycle.terms()) out += h[dim].at(s) * a;

    DiscreteChain mapped(dim);
    for (const auto& [s, a] : cycle.terms()) {
        DiscreteSimplex t = map_simplex(s);
        mapped.add(t, a);
    }
    if (!(boundary(out) == upper.apply(cycle) - lower.apply(mapped)))
        throw OpError(ErrorCode::FILL_FAILED, "bridge homotopy boundary mismatch");
    return out;
}

DiscreteChain related_homotopy(const DiscreteChain& c, const SimplexChainMap& relate) {
    const int dim = c.dimension();
    FaceComplex<PointId> fc = face_complex(c);
    std::vector<std::vector<DiscreteSimplex>> by_dim(dim + 1);
    for (const auto& s : fc.generators)
        if (s.dim() >= 0) by_dim[s.dim()].push_back(s);

    // H_i sigma = cone over (id - T - H_{i-1} d) sigma from one of its
    // vertices; cones add no points, so fineness is bounded by the spread of
    // sigma together with its T-image.
    std::vector<std::map<DiscreteSimplex, DiscreteChain>> h(dim + 1);
    DiscreteChain image(dim);
    for (int d = 0; d <= dim; ++d) {
        for (const auto& s : by_dim[d]) {
            DiscreteChain sigma(d);
            sigma.add(s, 1);
            sigma -= relate(s, d);
            if (d >= 1)
                for (std::size_t i = 0; i < s.verts.size(); ++i)
                    sigma -= h[d - 1].at(s.face(i)) * Integer((i % 2 == 0) ? 1 : -1);
            DiscreteChain coned(d + 1);
            if (!sigma.is_zero()) {
                auto supp = support(sigma);
                coned = cone(supp.front(), sigma);
            }
            h[d].emplace(s, std::move(coned));
        }
    }

    DiscreteChain out(dim + 1);
    for (const auto& [s, a] : c.terms()) {
        out += h[dim].at(s) * a;
        image += relate(s, dim) * a;
    }
    if (!(boundary(out) == c - image))
        throw OpError(ErrorCode::FILL_FAILED, "related homotopy boundary mismatch");
    return out;
}

DiscreteChain related_homotopy(const DiscreteChain& c, const std::map<PointId, PointId>& vmap) {
    return related_homotopy(c, [&](const DiscreteSimplex& s, int d) {
        DiscreteChain out(d);
        DiscreteSimplex t;
        t.verts.reserve(s.verts.size());
        for (PointId v : s.verts) t.verts.push_back(vmap.at(v));
        out.add(t, 1);
        return out;
    });
}

}  // namespace stratafill
