#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratafill/detour.hpp"

namespace stratafill {

namespace {
constexpr double kPi = 3.14159265358979323846;

void orthonormal_frame(const PointStore& store, PointId p, std::vector<std::vector<double>>& frame) {
    // Gram-Schmidt the coordinate axes against p.
    const int dim = store.ambient_dim();
    auto pc = store.coords(p);
    frame.clear();
    for (int ax = 0; ax < dim && static_cast<int>(frame.size()) < dim - 1; ++ax) {
        std::vector<double> v(dim, 0.0);
        v[ax] = 1.0;
        double along = dot(v, pc);
        for (int i = 0; i < dim; ++i) v[i] -= along * pc[i];
        for (const auto& u : frame) {
            double a = dot(v, u);
            for (int i = 0; i < dim; ++i) v[i] -= a * u[i];
        }
        double n = norm(v);
        if (n < 1e-9) continue;
        for (int i = 0; i < dim; ++i) v[i] /= n;
        frame.push_back(std::move(v));
    }
}

PointId latitude_point(PointStore& store, PointId p, double radius,
                       std::span<const double> unit_dir) {
    auto pc = store.coords(p);
    std::vector<double> v(store.ambient_dim());
    for (int i = 0; i < store.ambient_dim(); ++i)
        v[i] = std::cos(radius) * pc[i] + std::sin(radius) * unit_dir[i];
    return store.append_unit(v);
}

/// Fine polygon on the latitude circle around p (ambient dimension 3).
DiscreteChain circle_cycle(PointStore& store, PointId p, double radius, double max_edge) {
    std::vector<std::vector<double>> frame;
    orthonormal_frame(store, p, frame);
    int t = std::max(4, static_cast<int>(std::ceil(2.0 * kPi * std::sin(radius) / max_edge)) + 1);
    std::vector<PointId> verts;
    for (int i = 0; i < t; ++i) {
        double th = 2.0 * kPi * i / t;
        std::vector<double> dir(store.ambient_dim());
        for (int d = 0; d < store.ambient_dim(); ++d)
            dir[d] = std::cos(th) * frame[0][d] + std::sin(th) * frame[1][d];
        verts.push_back(latitude_point(store, p, radius, dir));
    }
    DiscreteChain c(1);
    for (int i = 0; i < t; ++i) {
        DiscreteSimplex s;
        s.verts = {verts[i], verts[(i + 1) % t]};
        c.add(s, 1);
    }
    return c;
}

/// Octahedral 2-cycle on the latitude 2-sphere around p (ambient dimension 4),
/// refined on the latitude sphere to the requested fineness.
DiscreteChain sphere_cycle(PointStore& store, const Metric& metric, PointId p, double radius,
                           double max_edge) {
    std::vector<std::vector<double>> frame;
    orthonormal_frame(store, p, frame);
    std::vector<PointId> plus(3), minus(3);
    for (int i = 0; i < 3; ++i) {
        plus[i] = latitude_point(store, p, radius, frame[i]);
        std::vector<double> neg(store.ambient_dim());
        for (int d = 0; d < store.ambient_dim(); ++d) neg[d] = -frame[i][d];
        minus[i] = latitude_point(store, p, radius, neg);
    }
    DiscreteChain c(2);
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) {
                DiscreteSimplex s;
                s.verts = {s1 > 0 ? plus[0] : minus[0], s2 > 0 ? plus[1] : minus[1],
                           s3 > 0 ? plus[2] : minus[2]};
                c.add(s, s1 * s2 * s3);
            }
    SubdivideOptions opts;
    opts.latitude = LatitudePolicy{p, radius, 1e-9};
    return relative_subdivide_chain(c, max_edge, store, metric, opts);
}

DiscreteChain projection_prism(const DiscreteChain& c, const std::map<PointId, PointId>& vmap) {
    DiscreteChain out(c.dimension() + 1);
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

}  // namespace

RepresentedClass represent_class(const std::vector<std::size_t>& parabolic_indices,
                                 int class_index, double delta, const BallFamily& f,
                                 PointStore& store, const FillerProfile& profile) {
    Metric metric(store);
    const double K = profile.k_fill;
    const int k = store.ambient_dim() - 2;
    if (k != 1 && k != 2)
        throw OpError(ErrorCode::UNSUPPORTED_DIMENSION, "represent_class supports k = 1 or 2");
    if (parabolic_indices.empty())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need a nonempty puncture set");
    if (delta <= 0.0) throw OpError(ErrorCode::PRECONDITION_FAILED, "delta must be positive");

    RepresentedClass out;
    out.class_index = class_index;

    const std::size_t t = parabolic_indices.size();
    if (t == 1) {
        // Punctured sphere: H_k vanishes, the zero chain represents the class.
        out.disc = DiscreteChain(k);
        out.cycle = StraightChain{};
        out.cycle.verts = out.disc;
        out.stratum = 1;
        out.derivation.push_back("single puncture: H_k(S - F) = 0, zero representative");
        return out;
    }
    if (class_index < 0 || class_index + 1 >= static_cast<int>(t))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "class index out of range (0..|F|-2)");

    // D-spheres around the punctures carry all the homology of S - F.
    double min_sep = kPi;
    for (std::size_t a = 0; a < t; ++a)
        for (std::size_t b = a + 1; b < t; ++b)
            min_sep = std::min(min_sep, store.distance(f.balls[parabolic_indices[a]].center,
                                                       f.balls[parabolic_indices[b]].center));
    double d_sphere = min_sep / 3.0;
    double delta_eff = std::min(delta, d_sphere / 6.0);

    // Stratum choice: the detour homotopy must stay D/3 clear of the spheres.
    double margin = d_sphere / 3.0 - delta_eff / 3.0;
    int big_n = static_cast<int>(std::ceil(2.0 * K * (4.0 * K * K + 8.0 * K) * kPi / margin));
    big_n = std::max(big_n, static_cast<int>(4.0 * K * K));

    double r_threshold = approx_radius(f, big_n, delta_eff / 3.0, store, store);
    double r_bar = r_threshold / big_n;
    BallSelection sel;
    sel.scale = static_cast<double>(big_n) / (2.0 * K);
    for (std::size_t i = 0; i < f.balls.size(); ++i)
        if (f.family_radius(i) / big_n >= r_bar - 1e-18 && f.family_radius(i) >= f.cutoff)
            sel.indices.push_back(i);

    double delta_bar = delta_eff / 3.0;
    int m = 0;
    if (!sel.indices.empty()) {
        double rmax = sel.max_radius(f), rmin = sel.min_radius(f);
        m = 1 + static_cast<int>(std::floor(std::log(rmax / rmin) / std::log(K) + 1e-12));
        delta_bar = std::min(delta_eff / 3.0, 2.0 * K * r_bar);
    }
    double fine_in = profile.g_iter(delta_bar, m + 1);

    {
        std::ostringstream os;
        os << "D=" << d_sphere << " delta_eff=" << delta_eff << " N=" << big_n
           << " r_bar=" << r_bar << " m=" << m << " delta_bar=" << delta_bar
           << " input_fineness=" << fine_in;
        out.derivation.push_back(os.str());
    }

    PointId center = f.balls[parabolic_indices[class_index]].center;
    DiscreteChain c = (k == 1) ? circle_cycle(store, center, d_sphere, fine_in)
                               : sphere_cycle(store, metric, center, d_sphere, fine_in);
    if (!boundary(c).is_zero())
        throw OpError(ErrorCode::FILL_FAILED, "generator construction is not a cycle");

    DiscreteChain c_detoured = c;
    DiscreteChain e(k + 1);
    if (!sel.indices.empty()) {
        DetourReport rep = general_detour(c, f, sel, delta_bar, true, store, profile);
        if (!rep.ok()) throw OpError(ErrorCode::FILL_FAILED, "detour postcondition failed");
        c_detoured = rep.output;
        e = *rep.homotopy;
    }

    // Project onto the stratum; the prism corrects the homotopy witness.
    std::map<PointId, PointId> vmap;
    for (PointId v : support(c_detoured)) {
        if (stratum_membership(f, store, v, big_n)) {
            vmap[v] = v;
        } else {
            auto [w, moved] = stratum_witness(f, store, v, big_n);
            if (moved > delta_eff / 3.0)
                throw OpError(ErrorCode::TOO_FAR, "projection exceeds delta/3");
            vmap[v] = w;
        }
    }
    DiscreteChain c_final(k);
    for (const auto& [s, a] : c_detoured.terms()) {
        DiscreteSimplex s2;
        for (PointId v : s.verts) s2.verts.push_back(vmap.at(v));
        c_final.add(s2, a);
    }
    e -= projection_prism(c_detoured, vmap);

    if (!(boundary(e) == c - c_final))
        throw OpError(ErrorCode::FILL_FAILED, "homotopy witness boundary mismatch");

    // The witness must stay clear of every puncture, which certifies that the
    // class is unchanged in S - F.
    double worst = kPi;
    for (PointId v : support(e))
        for (std::size_t idx : parabolic_indices)
            worst = std::min(worst, store.distance(f.balls[idx].center, v));
    if (!e.is_zero() && worst <= 0.0)
        throw OpError(ErrorCode::FILL_FAILED, "homotopy witness touches a puncture");
    {
        std::ostringstream os;
        os << "witness_clearance=" << worst << " (needs > 0)";
        out.derivation.push_back(os.str());
    }

    for (PointId v : support(c_final))
        if (!stratum_membership(f, store, v, big_n))
            throw OpError(ErrorCode::FILL_FAILED, "representative leaves the stratum");
    if (fineness(c_final, metric) > delta * (1.0 + 1e-9))
        throw OpError(ErrorCode::FILL_FAILED, "representative is not delta-fine");

    out.disc = c_final;
    out.cycle = straighten(c_final, metric);
    out.stratum = big_n;
    return out;
}

}  // namespace stratafill
