#include <algorithm>
#include <cmath>
#include <map>

#include "stratafill/sphere.hpp"

namespace stratafill {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTol = 1e-12;

void require_fillable_cycle(const DiscreteChain& c, double delta, const FillerProfile& profile) {
    if (c.dimension() < 0)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "filler input must have dimension >= 0");
    if (!is_reduced(c))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "filler input must be a reduced chain");
    if (!boundary(c).is_zero())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "filler input must be a cycle");
    if (delta <= 0.0) throw OpError(ErrorCode::PRECONDITION_FAILED, "delta must be positive");
    (void)profile;
}

void require_fineness(const DiscreteChain& c, double bound, const Metric& metric) {
    if (fineness(c, metric) > bound * (1.0 + 1e-9) + 1e-15)
        throw OpError(ErrorCode::FINENESS_EXCEEDED, "input cycle is not g(delta)-fine");
}

/// Prism chain of a vertex map T: H[v0..vn] = sum_i (-1)^i [v0..vi, Tvi..Tvn].
/// Satisfies dH + Hd = T - id exactly; on cycles, d(Hc) = T(c) - c.
DiscreteChain prism_chain(const DiscreteChain& c, const std::map<PointId, PointId>& vmap) {
    DiscreteChain out(c.dimension() + 1);
    if (c.dimension() < 0) return out;
    for (const auto& [s, a] : c.terms()) {
        const auto& v = s.verts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            DiscreteSimplex t;
            t.verts.reserve(v.size() + 1);
            for (std::size_t j = 0; j <= i; ++j) t.verts.push_back(v[j]);
            for (std::size_t j = i; j < v.size(); ++j) t.verts.push_back(vmap.at(v[j]));
            out.add(t, (i % 2 == 0) ? a : -a);
        }
    }
    return out;
}

DiscreteChain map_vertices(const DiscreteChain& c, const std::map<PointId, PointId>& vmap) {
    DiscreteChain out(c.dimension());
    for (const auto& [s, a] : c.terms()) {
        DiscreteSimplex t;
        t.verts.reserve(s.verts.size());
        for (PointId v : s.verts) t.verts.push_back(vmap.at(v));
        out.add(t, a);
    }
    return out;
}

void verify_boundary(const DiscreteChain& d, const DiscreteChain& c, const char* who) {
    if (!(boundary(d) == c)) throw OpError(ErrorCode::FILL_FAILED, std::string(who) + ": boundary mismatch");
}

}  // namespace

DiscreteChain fill_cycle(const DiscreteChain& c, double delta, PointStore& store,
                         const FillerProfile& profile, std::span<const PointId> apex_candidates) {
    require_fillable_cycle(c, delta, profile);
    Metric metric(store);
    if (c.dimension() > store.ambient_dim() - 2)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "cycle dimension exceeds k");
    if (c.is_zero()) return DiscreteChain(c.dimension() + 1);
    require_fineness(c, profile.g(delta), metric);

    auto supp = support(c);
    double diam = metric.diameter(supp);
    PointId apex;
    if (diam < kPi / 4.0) {
        apex = supp.front();  // lowest index
    } else {
        apex = select_cone_apex(supp, store, apex_candidates);
    }
    DiscreteChain raw = cone(apex, c);

    FaceComplex<PointId> frozen = face_complex(c);
    SubdivideOptions opts;
    opts.frozen = &frozen;
    DiscreteChain d = strip_null_terms(relative_subdivide_chain(raw, delta, store, metric, opts));
    verify_boundary(d, c, "fill_cycle");
    return d;
}

DiscreteChain fill_in_ball(const DiscreteChain& c, PointId p, double r2, double delta,
                           PointStore& store, const FillerProfile& profile) {
    require_fillable_cycle(c, delta, profile);
    Metric metric(store);
    if (c.dimension() > store.ambient_dim() - 2)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "cycle dimension exceeds k");
    if (r2 <= 0.0 || r2 >= kPi / (2.0 * profile.k_fill))
        throw OpError(ErrorCode::PRECONDITION_FAILED,
                      "fill_in_ball requires 0 < r2 < pi/(2*k_fill)");
    if (c.is_zero()) return DiscreteChain(c.dimension() + 1);
    for (PointId v : support(c))
        if (store.distance(p, v) > r2 + kTol)
            throw OpError(ErrorCode::SUPPORT_OUTSIDE_BALL, "cycle leaves B(p, r2)");
    require_fineness(c, profile.g(delta), metric);

    // Cone from the centre: caps are closed under normalized averaging, so the
    // whole subdivision stays inside B(p, r2).
    DiscreteChain raw = cone(p, c);
    FaceComplex<PointId> frozen = face_complex(c);
    SubdivideOptions opts;
    opts.frozen = &frozen;
    DiscreteChain d = strip_null_terms(relative_subdivide_chain(raw, delta, store, metric, opts));
    verify_boundary(d, c, "fill_in_ball");
    for (PointId v : support(d))
        if (store.distance(p, v) > profile.k_fill * r2 + kTol)
            throw OpError(ErrorCode::FILL_FAILED, "fill_in_ball left the enlarged ball");
    return d;
}

DiscreteChain fill_in_annulus(const DiscreteChain& c, PointId p, double r1, double r2,
                              double delta, PointStore& store, const FillerProfile& profile) {
    require_fillable_cycle(c, delta, profile);
    Metric metric(store);
    if (c.dimension() >= store.ambient_dim() - 2)
        throw OpError(ErrorCode::PRECONDITION_FAILED,
                      "fill_in_annulus requires cycle dimension < k");
    if (!(delta <= r1 && r1 < r2))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need delta <= r1 < r2");
    if (profile.k_fill * r2 > kPi / 2.0)
        throw OpError(ErrorCode::PRECONDITION_FAILED,
                      "fill_in_annulus requires k_fill * r2 <= pi/2");
    if (c.is_zero()) return DiscreteChain(c.dimension() + 1);
    for (PointId v : support(c)) {
        double d = store.distance(p, v);
        if (d < r1 - kTol || d > r2 + kTol)
            throw OpError(ErrorCode::SUPPORT_OUTSIDE_ANNULUS, "cycle leaves A(p; r1, r2)");
    }
    require_fineness(c, profile.g(delta), metric);

    auto supp = support(c);
    double diam = metric.diameter(supp);
    const double k = profile.k_fill;

    DiscreteChain raw(c.dimension() + 1);
    std::optional<LatitudePolicy> latitude;

    if (diam <= r1 / 2.0) {
        // Local cone: stays within B(x0, diam), clear of the K-shrunk hole.
        raw = cone(supp.front(), c);
    } else {
        // March the cycle onto the latitude sphere at the geometric mean
        // radius in multiplicatively short stages, bridge with prisms, and
        // cone within the latitude sphere. Short stages keep every prism
        // simplex small relative to its distance from p, which is what keeps
        // barycenters out of the K-shrunk hole.
        double rm = std::sqrt(r1 * r2);
        int stages = std::max(1, static_cast<int>(std::ceil(12.0 * std::abs(std::log(r2 / r1)))));

        std::map<PointId, double> radius_of;
        for (PointId q : supp) radius_of[q] = store.distance(p, q);

        std::vector<std::map<PointId, PointId>> layer(stages + 1);
        for (PointId q : supp) layer[0][q] = q;
        for (int j = 1; j <= stages; ++j) {
            double a = static_cast<double>(j) / stages;
            for (PointId q : supp) {
                double t = radius_of[q];
                double rho = (t < 1e-15) ? rm : std::exp((1.0 - a) * std::log(t) + a * std::log(rm));
                layer[j][q] = (std::abs(rho - t) < 1e-15) ? q : store.append_radial_point(p, q, rho);
            }
        }

        // Telescoping prisms between consecutive layers.
        DiscreteChain cur = c;
        for (int j = 1; j <= stages; ++j) {
            std::map<PointId, PointId> step;
            for (PointId q : supp) step[layer[j - 1][q]] = layer[j][q];
            raw -= prism_chain(cur, step);
            cur = map_vertices(cur, step);
        }
        // cur now lives on the latitude sphere; fill it there.
        auto lat_supp = support(cur);
        PointId apex = select_cone_apex_on_latitude(lat_supp, p, rm, store);
        raw += cone(apex, cur);
        latitude = LatitudePolicy{p, rm, 1e-9};
    }
    verify_boundary(raw, c, "fill_in_annulus(raw)");

    FaceComplex<PointId> frozen = face_complex(c);
    SubdivideOptions opts;
    opts.frozen = &frozen;
    opts.latitude = latitude;
    DiscreteChain d = strip_null_terms(relative_subdivide_chain(raw, delta, store, metric, opts));
    verify_boundary(d, c, "fill_in_annulus");
    for (PointId v : support(d)) {
        double dist = store.distance(p, v);
        if (dist < r1 / k - kTol || dist > k * r2 + kTol)
            throw OpError(ErrorCode::FILL_FAILED, "fill_in_annulus left the enlarged annulus");
    }
    return d;
}

}  // namespace stratafill
