#include "stratafill/detour.hpp"

#include <algorithm>
#include <cmath>

namespace stratafill {

namespace {
constexpr double kTol = 1e-12;

double dist_to_support(const PointStore& store, PointId x, std::span<const PointId> supp) {
    double d = std::numeric_limits<double>::infinity();
    for (PointId s : supp) d = std::min(d, store.distance(x, s));
    return d;
}
}  // namespace

double BallSelection::max_radius(const BallFamily& f) const {
    double r = 0.0;
    for (std::size_t i = 0; i < indices.size(); ++i) r = std::max(r, radius(f, i));
    return r;
}

double BallSelection::min_radius(const BallFamily& f) const {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < indices.size(); ++i) r = std::min(r, radius(f, i));
    return r;
}

ChainSplit chain_split(const DiscreteChain& d, const BallFamily& f, const BallSelection& sel,
                       const PointStore& store) {
    // Doubled balls must be pairwise disjoint for the grouping to be
    // well-defined.
    for (std::size_t a = 0; a < sel.indices.size(); ++a)
        for (std::size_t b = a + 1; b < sel.indices.size(); ++b) {
            double da = store.distance(f.balls[sel.indices[a]].center,
                                       f.balls[sel.indices[b]].center);
            if (da <= 2.0 * (sel.radius(f, a) + sel.radius(f, b)))
                throw OpError(ErrorCode::PRECONDITION_FAILED,
                              "chain_split requires pairwise disjoint doubled balls");
        }

    ChainSplit split;
    split.outside = DiscreteChain(d.dimension());
    for (const auto& [s, a] : d.terms()) {
        bool placed = false;
        for (std::size_t i = 0; i < sel.indices.size() && !placed; ++i) {
            PointId p = f.balls[sel.indices[i]].center;
            double r2 = 2.0 * sel.radius(f, i);
            bool inside = true;
            for (PointId v : s.verts)
                if (store.distance(p, v) > r2 + kTol) {
                    inside = false;
                    break;
                }
            if (inside) {
                auto it = split.per_ball.find(i);
                if (it == split.per_ball.end())
                    it = split.per_ball.emplace(i, DiscreteChain(d.dimension())).first;
                it->second.add(s, a);
                placed = true;
            }
        }
        if (!placed) split.outside.add(s, a);
    }
    return split;
}

DetourReport disjoint_detour(const DiscreteChain& d, const BallFamily& f,
                             const BallSelection& sel, double delta, bool want_homotopy,
                             PointStore& store, const FillerProfile& profile) {
    Metric metric(store);
    const double K = profile.k_fill;
    const int k = store.ambient_dim() - 2;

    if (d.dimension() < 1 || d.dimension() > k)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "disjoint_detour needs 1 <= dim <= k");
    if (sel.indices.empty() || delta <= 0.0 || delta > sel.min_radius(f) * (1.0 + 1e-12))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need 0 < delta <= min radius");
    double need = want_homotopy ? profile.g(profile.g(delta)) : profile.g(delta);
    if (fineness(d, metric) > need * (1.0 + 1e-9))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "input chain is not fine enough");
    for (std::size_t a = 0; a < sel.indices.size(); ++a)
        for (std::size_t b = a + 1; b < sel.indices.size(); ++b) {
            double dist = store.distance(f.balls[sel.indices[a]].center,
                                         f.balls[sel.indices[b]].center);
            if (dist <= 2.0 * K * (sel.radius(f, a) + sel.radius(f, b)))
                throw OpError(ErrorCode::PRECONDITION_FAILED,
                              "2K-enlarged balls are not pairwise disjoint");
        }
    DiscreteChain bd = boundary(d);
    for (PointId v : support(bd))
        for (std::size_t i = 0; i < sel.indices.size(); ++i)
            if (store.distance(f.balls[sel.indices[i]].center, v) < sel.radius(f, i) - kTol)
                throw OpError(ErrorCode::PRECONDITION_FAILED,
                              "boundary support meets a selected ball");

    ChainSplit split = chain_split(d, f, sel, store);

    DetourReport rep;
    rep.input = d;
    rep.delta = delta;
    rep.bands = 1;

    auto supp_d = support(d);
    DiscreteChain out = split.outside;
    DiscreteChain homotopy(d.dimension() + 1);
    double fill_delta = want_homotopy ? profile.g(delta) : delta;

    for (auto& [pos, d_ball] : split.per_ball) {
        PointId p = f.balls[sel.indices[pos]].center;
        double r = sel.radius(f, pos);

        // Balls whose K-shrinking misses the chain are left alone.
        bool touches = false;
        for (PointId v : support(d_ball))
            if (store.distance(p, v) < r / K) {
                touches = true;
                break;
            }
        DiscreteChain bd_ball = boundary(d_ball);
        if (!touches || bd_ball.is_zero()) {
            out += d_ball;
            continue;
        }
        DiscreteChain filled = fill_in_annulus(bd_ball, p, r, 2.0 * r, fill_delta, store, profile);
        out += filled;
        if (want_homotopy) {
            DiscreteChain diff = d_ball - filled;
            homotopy += fill_in_ball(diff, p, 2.0 * K * r, delta, store, profile);
        }
    }

    rep.output = out;
    if (want_homotopy) rep.homotopy = homotopy;

    // Conclusion (1): delta-fine with the same boundary.
    {
        DetourCheck c{"fineness", false, fineness(out, metric), delta};
        c.pass = c.measured <= delta * (1.0 + 1e-9);
        rep.checks.push_back(c);
        DetourCheck b{"boundary", boundary(out) == bd, 0.0, 0.0};
        rep.checks.push_back(b);
    }
    // Conclusion (2): clear of the K-shrunk balls.
    {
        double worst = std::numeric_limits<double>::infinity();
        for (PointId v : support(out))
            for (std::size_t i = 0; i < sel.indices.size(); ++i) {
                double margin = store.distance(f.balls[sel.indices[i]].center, v) -
                                sel.radius(f, i) / K;
                worst = std::min(worst, margin);
            }
        DetourCheck c{"clear_of_shrunk_balls", worst >= -kTol, worst, 0.0};
        rep.checks.push_back(c);
    }
    // Conclusion (3): coincides with d outside the 2K-enlarged balls.
    {
        DiscreteChain diff = d - out;
        bool inside = true;
        for (PointId v : support(diff)) {
            bool in_some = false;
            for (std::size_t i = 0; i < sel.indices.size(); ++i)
                if (store.distance(f.balls[sel.indices[i]].center, v) <=
                    2.0 * K * sel.radius(f, i) + kTol) {
                    in_some = true;
                    break;
                }
            if (!in_some) {
                inside = false;
                break;
            }
        }
        rep.checks.push_back({"coincide_outside_2K", inside, 0.0, 0.0});
    }
    // Conclusion (4): diameter growth.
    {
        double din = chain_diameter(d, metric);
        double dout = chain_diameter(out, metric);
        double bound = din + 4.0 * K * std::sqrt(sel.max_radius(f));
        DetourCheck c{"diameter", dout <= bound * (1.0 + 1e-9), dout, bound};
        rep.checks.push_back(c);
    }
    // Conclusion (5): homotopy witness.
    if (want_homotopy) {
        DetourCheck c{"homotopy_boundary", boundary(homotopy) == d - out, 0.0, 0.0};
        rep.checks.push_back(c);
        DetourCheck fin{"homotopy_fineness", false, fineness(homotopy, metric), delta};
        fin.pass = fin.measured <= delta * (1.0 + 1e-9);
        rep.checks.push_back(fin);
        bool inside = true;
        for (PointId v : support(homotopy)) {
            bool in_some = false;
            for (std::size_t i = 0; i < sel.indices.size(); ++i)
                if (store.distance(f.balls[sel.indices[i]].center, v) <=
                    2.0 * K * K * sel.radius(f, i) + kTol) {
                    in_some = true;
                    break;
                }
            if (!in_some) {
                inside = false;
                break;
            }
        }
        rep.checks.push_back({"homotopy_support", inside, 0.0, 0.0});
    }
    (void)supp_d;
    return rep;
}

DetourReport general_detour(const DiscreteChain& d, const BallFamily& f, const BallSelection& sel,
                            double delta, bool want_homotopy, PointStore& store,
                            const FillerProfile& profile) {
    Metric metric(store);
    const double K = profile.k_fill;
    const int k = store.ambient_dim() - 2;

    if (d.dimension() < 1 || d.dimension() > k)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "general_detour needs 1 <= dim <= k");
    if (sel.scale < 2.0 * K - 1e-12)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "general_detour requires N >= 2K");
    if (sel.indices.empty())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "empty ball selection");
    double r_max = sel.max_radius(f), r_min = sel.min_radius(f);
    if (delta <= 0.0 || delta > r_min * (1.0 + 1e-12))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need 0 < delta <= min radius");

    int m = 1 + static_cast<int>(std::floor(std::log(r_max / r_min) / std::log(K) + 1e-12));
    double need = profile.g_iter(delta, want_homotopy ? m + 1 : m);
    if (fineness(d, metric) > need * (1.0 + 1e-9))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "input chain is not fine enough");
    DiscreteChain bd = boundary(d);
    for (PointId v : support(bd))
        for (std::size_t i = 0; i < sel.indices.size(); ++i)
            if (store.distance(f.balls[sel.indices[i]].center, v) < sel.radius(f, i) - kTol)
                throw OpError(ErrorCode::PRECONDITION_FAILED,
                              "boundary support meets a selected ball");

    // Radius bands: band i collects radii in (r_max/K^i, r_max/K^{i-1}].
    std::vector<BallSelection> bands(m);
    for (int i = 0; i < m; ++i) bands[i].scale = sel.scale;
    for (std::size_t pos = 0; pos < sel.indices.size(); ++pos) {
        double r = sel.radius(f, pos);
        int band = static_cast<int>(std::floor(std::log(r_max / r) / std::log(K) + 1e-12));
        band = std::clamp(band, 0, m - 1);
        bands[band].indices.push_back(sel.indices[pos]);
    }
    // The separation axiom makes the 2K-enlarged bands pairwise disjoint;
    // re-check and report the axiom violation otherwise.
    for (const auto& band : bands)
        for (std::size_t a = 0; a < band.indices.size(); ++a)
            for (std::size_t b = a + 1; b < band.indices.size(); ++b) {
                double dist =
                    store.distance(f.balls[band.indices[a]].center, f.balls[band.indices[b]].center);
                double ra = f.family_radius(band.indices[a]) / band.scale;
                double rb = f.family_radius(band.indices[b]) / band.scale;
                if (dist <= 2.0 * K * (ra + rb))
                    throw OpError(ErrorCode::BAND_NOT_DISJOINT,
                                  "band not 2K-disjoint: separation axiom violated upstream");
            }

    DetourReport rep;
    rep.input = d;
    rep.delta = delta;
    rep.bands = m;

    DiscreteChain cur = d;
    DiscreteChain homotopy(d.dimension() + 1);
    for (int i = 0; i < m; ++i) {
        if (bands[i].indices.empty()) continue;
        double stage_delta = profile.g_iter(delta, m - i - 1);
        DetourReport stage =
            disjoint_detour(cur, f, bands[i], stage_delta, want_homotopy, store, profile);
        if (want_homotopy) homotopy += *stage.homotopy;
        cur = stage.output;
    }
    rep.output = cur;
    if (want_homotopy) rep.homotopy = homotopy;

    auto supp_in = support(d);

    // Conclusion (1).
    {
        DetourCheck c{"fineness", false, fineness(cur, metric), delta};
        c.pass = c.measured <= delta * (1.0 + 1e-9);
        rep.checks.push_back(c);
        rep.checks.push_back({"boundary", boundary(cur) == bd, 0.0, 0.0});
    }
    // Conclusion (2): clear of the 2K-shrunk balls.
    {
        double worst = std::numeric_limits<double>::infinity();
        for (PointId v : support(cur))
            for (std::size_t i = 0; i < sel.indices.size(); ++i) {
                double margin = store.distance(f.balls[sel.indices[i]].center, v) -
                                sel.radius(f, i) / (2.0 * K);
                worst = std::min(worst, margin);
            }
        rep.checks.push_back({"clear_of_shrunk_balls", worst >= -kTol, worst, 0.0});
    }
    // Conclusion (3): support stays within 8K r_max of the input support.
    {
        double worst = 0.0;
        for (PointId v : support(cur)) worst = std::max(worst, dist_to_support(store, v, supp_in));
        double bound = 8.0 * K * r_max;
        rep.checks.push_back({"support_neighbourhood", worst <= bound * (1.0 + 1e-9), worst, bound});
    }
    // Conclusion (4): diameter growth (only when the boundary is nonzero).
    if (!bd.is_zero()) {
        double din = chain_diameter(d, metric);
        double dout = chain_diameter(cur, metric);
        double bound = din + 8.0 * K * std::sqrt(2.0 * K * din);
        rep.checks.push_back({"diameter", dout <= bound * (1.0 + 1e-9), dout, bound});
    }
    // Conclusion (5).
    if (want_homotopy) {
        rep.checks.push_back({"homotopy_boundary", boundary(homotopy) == d - cur, 0.0, 0.0});
        DetourCheck fin{"homotopy_fineness", false, fineness(homotopy, metric), delta};
        fin.pass = fin.measured <= delta * (1.0 + 1e-9);
        rep.checks.push_back(fin);
        double worst = 0.0;
        for (PointId v : support(homotopy))
            worst = std::max(worst, dist_to_support(store, v, supp_in));
        double bound = (4.0 * K * K + 8.0 * K) * r_max;
        rep.checks.push_back(
            {"homotopy_neighbourhood", worst <= bound * (1.0 + 1e-9), worst, bound});
    }
    return rep;
}

double StratumFillModuli::h_modulus(double r, double k_fill) {
    return r + k_fill * std::sqrt(r) + 16.0 * k_fill * k_fill * std::pow(r, 0.25);
}

StratumFillModuli stratum_fill_moduli(const BallFamily& f, int n, double delta, PointStore& store,
                                      const FillerProfile& profile) {
    if (n < 1 || delta <= 0.0)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need n >= 1 and delta > 0");
    const double K = profile.k_fill;
    StratumFillModuli mod;
    mod.n = n;
    mod.delta = delta;
    mod.big_n = static_cast<int>(2.0 * K * std::max<double>(n, 2.0 * K));

    double r_threshold = approx_radius(f, mod.big_n, delta / 3.0, store, store);
    mod.r_bar = r_threshold / mod.big_n;
    for (std::size_t i = 0; i < f.balls.size(); ++i)
        if (f.family_radius(i) / mod.big_n >= mod.r_bar - 1e-18 &&
            f.family_radius(i) >= f.cutoff)
            mod.detoured.push_back(i);

    if (mod.detoured.empty()) {
        mod.m = 0;
        mod.delta_bar = delta / 3.0;
    } else {
        double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
        for (std::size_t i : mod.detoured) {
            rmax = std::max(rmax, f.family_radius(i) / mod.big_n);
            rmin = std::min(rmin, f.family_radius(i) / mod.big_n);
        }
        mod.m = 1 + static_cast<int>(std::floor(std::log(rmax / rmin) / std::log(K) + 1e-12));
        mod.delta_bar = std::min(delta / 3.0, 2.0 * K * mod.r_bar);
    }
    mod.g1 = profile.g_iter(mod.delta_bar, mod.m + 1);
    return mod;
}

StratumFillResult stratum_fill(const DiscreteChain& c, int n, double delta, const BallFamily& f,
                               PointStore& store, const FillerProfile& profile,
                               const StratumFillModuli* precomputed) {
    Metric metric(store);
    const double K = profile.k_fill;
    const int k = store.ambient_dim() - 2;
    if (c.dimension() < 0 || c.dimension() >= k)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "stratum_fill needs 0 <= dim < k");
    if (!is_reduced(c) || !boundary(c).is_zero())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "stratum_fill input must be a reduced cycle");
    for (PointId v : support(c))
        if (!stratum_membership(f, store, v, n))
            throw OpError(ErrorCode::PRECONDITION_FAILED, "cycle support leaves the stratum");

    StratumFillResult res;
    res.moduli = precomputed ? *precomputed : stratum_fill_moduli(f, n, delta, store, profile);
    const StratumFillModuli& mod = res.moduli;
    if (fineness(c, metric) > mod.g1 * (1.0 + 1e-9))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "cycle is not g1(delta, n)-fine");

    if (c.is_zero()) {
        res.filler = DiscreteChain(c.dimension() + 1);
        return res;
    }

    double diam = chain_diameter(c, metric);
    if (diam < delta) {
        // Small cycle: the cone from a support vertex stays in X_n.
        res.filler = strip_null_terms(cone(support(c).front(), c));
        return res;
    }

    // Fill in the sphere, detour off the finitely many balls the density
    // threshold keeps, then project onto the stratum.
    DiscreteChain d1 = fill_cycle(c, profile.g_iter(mod.delta_bar, mod.m), store, profile);

    DiscreteChain d2(0);
    if (!mod.detoured.empty()) {
        BallSelection detour_sel;
        detour_sel.indices = mod.detoured;
        detour_sel.scale = static_cast<double>(mod.big_n) / (2.0 * K);
        DetourReport rep =
            general_detour(d1, f, detour_sel, mod.delta_bar, false, store, profile);
        if (!rep.ok()) throw OpError(ErrorCode::FILL_FAILED, "detour postcondition failed");
        d2 = rep.output;
    } else {
        d2 = d1;
    }

    res.filler = project_to_stratum(d2, mod.big_n, delta / 3.0, f, store);
    if (!(boundary(res.filler) == c))
        throw OpError(ErrorCode::FILL_FAILED, "stratum filler boundary mismatch");
    return res;
}

}  // namespace stratafill
