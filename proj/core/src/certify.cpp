#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratafill/pipeline.hpp"
#include "stratafill/rng.hpp"

namespace stratafill {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CoverTower::CoverTower(const Cover& base, const BallFamily& family,
                       std::span<const StratumNet> strata, PointStore& store, int k,
                       const FillerProfile& profile)
    : base_(&base), family_(&family), store_(&store) {
    bars_.reserve(k + 2);
    bars_.push_back(base);
    for (int i = 0; i <= k; ++i) {
        supers_.push_back(build_super_refinement(bars_.back()));
        locals_.push_back(build_local_fill_cover(supers_.back(), family, strata, store, profile));
        // Double super-refinement of the staged local cover; the smallest
        // stage epsilon is the natural radius scale to start shrinking from.
        double hint = std::numeric_limits<double>::infinity();
        for (const auto& m : locals_.back().meta)
            for (double e : m.eps) hint = std::min(hint, e);
        Cover mid = build_super_refinement_hint(locals_.back().cover, hint / 4.0);
        bars_.push_back(build_super_refinement(mid));
    }
}

const Cover& CoverTower::finest() const { return bars_.back(); }

SubdivisionCertificate refine_with_cover(const DiscreteChain& c, CoverTower& tower, int n,
                                         double delta) {
    PointStore& store = tower.store();
    Metric metric(store);
    const BallFamily& family = tower.family();
    const FillerProfile profile;
    const int k = store.ambient_dim() - 2;
    const int degree = c.dimension();
    if (degree > k)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "refine_with_cover needs degree <= k");
    if (!is_fine(c, tower.finest()))
        throw OpError(ErrorCode::PRECONDITION_FAILED, "input chain is not fine for the tower top");

    SubdivisionCertificate cert;
    cert.input = c;
    cert.delta = delta;

    // Degree schedules: strata through the local-fill growth f4, deltas
    // backwards through the local fills' eta thresholds.
    std::vector<int> n_sched(degree + 1);
    n_sched[0] = n;
    for (int i = 1; i <= degree; ++i) n_sched[i] = f4_of(n_sched[i - 1], k, profile);
    std::vector<double> d_sched(degree + 1);
    d_sched[degree] = delta;
    for (int i = degree; i >= 1; --i) {
        // g2 of the rung used at step i: the minimum admissible eta over the
        // rung's local sets at the step's stratum level.
        int rung = k - (i - 1);
        int n_level = static_cast<int>(tower.local(rung).strata.size()) - 1;
        d_sched[i - 1] = tiny_fill_threshold_min(tower.local(rung), d_sched[i], n_level, profile);
    }

    std::vector<std::map<DiscreteSimplex, DiscreteChain>> phi(degree + 1);
    std::vector<std::map<DiscreteSimplex, DiscreteChain>> hom(degree + 1);

    // phi_0 = identity; phi_{i+1} sigma fills phi_i(d sigma) inside the rung's
    // local cover; tininess of supp(phi sigma) u supp(sigma) for the bar cover
    // is asserted as the induction invariant.
    std::function<DiscreteChain(const DiscreteSimplex&, int)> apply_phi =
        [&](const DiscreteSimplex& s, int dim) -> DiscreteChain {
        if (dim == 0) {
            DiscreteChain out(0);
            out.add(s, 1);
            return out;
        }
        auto it = phi[dim].find(s);
        if (it != phi[dim].end()) return it->second;

        DiscreteChain bd(dim - 1);
        for (std::size_t i = 0; i < s.verts.size(); ++i)
            bd += apply_phi(s.face(i), dim - 1) * Integer((i % 2 == 0) ? 1 : -1);

        DiscreteChain plain_bd(dim - 1);
        {
            DiscreteChain one(dim);
            one.add(s, 1);
            plain_bd = boundary(one);
        }
        DiscreteChain result(dim);
        int rung = k - (dim - 1);
        if (bd == plain_bd && simplex_diameter(s, metric) <= d_sched[dim] * (1.0 + 1e-12)) {
            result.add(s, 1);
        } else {
            auto fill = tiny_cycle_fill(bd, d_sched[dim], tower.local(rung), family, store,
                                        profile);
            result = fill.filler;
        }
        // Induction invariant: phi(sigma) together with sigma is tiny for the
        // bar cover one level down.
        std::vector<PointId> pts = support(result);
        for (PointId v : s.verts) pts.push_back(v);
        if (!is_tiny(pts, tower.bar(rung)))
            throw OpError(ErrorCode::TOWER_FAILED, "subdivision invariant: image not bar-tiny");
        return phi[dim].emplace(s, std::move(result)).first->second;
    };

    std::function<DiscreteChain(const DiscreteSimplex&, int)> apply_h =
        [&](const DiscreteSimplex& s, int dim) -> DiscreteChain {
        if (dim == 0) return DiscreteChain(1);  // phi_0 = id
        auto it = hom[dim].find(s);
        if (it != hom[dim].end()) return it->second;

        DiscreteChain xi = apply_phi(s, dim);
        xi.add(s, -1);
        for (std::size_t i = 0; i < s.verts.size(); ++i)
            xi -= apply_h(s.face(i), dim - 1) * Integer((i % 2 == 0) ? 1 : -1);

        DiscreteChain result(dim + 1);
        if (!xi.is_zero()) {
            auto supp = support(xi);
            int rung = k - dim;
            if (rung >= 0 && !is_tiny(supp, tower.bar(rung)))
                throw OpError(ErrorCode::TOWER_FAILED, "homotopy invariant: chain not bar-tiny");
            result = cone(supp.front(), xi);
        }
        return hom[dim].emplace(s, std::move(result)).first->second;
    };

    DiscreteChain out(degree);
    DiscreteChain h_out(degree + 1);
    for (const auto& [s, a] : c.terms()) {
        out += apply_phi(s, degree) * a;
        h_out += apply_h(s, degree) * a;
    }
    cert.output = out;
    cert.homotopy = h_out;

    // Exactness and cover-fineness audits.
    cert.chain_map_ok = true;
    if (!c.is_zero() && boundary(c).is_zero()) {
        DiscreteChain lhs = boundary(out);
        cert.chain_map_ok = lhs.is_zero();
    }
    DiscreteChain defect = boundary(h_out) + [&] {
        DiscreteChain hd(degree);
        DiscreteChain bc = boundary(c);
        if (bc.dimension() >= 0 && !bc.is_zero() && bc.dimension() <= degree - 1) {
            for (const auto& [s, a] : bc.terms()) hd += apply_h(s, degree - 1) * a;
        }
        return hd;
    }();
    cert.homotopy_ok = (defect == out - c);
    cert.output_fineness = fineness(out, metric);
    cert.output_fine_for_target =
        is_fine(out, tower.base()) && cert.output_fineness <= delta * (1.0 + 1e-9) &&
        is_fine(h_out, tower.base());
    {
        std::ostringstream os;
        os << "n_sched:";
        for (int v : n_sched) os << ' ' << v;
        os << " d_sched:";
        for (double v : d_sched) os << ' ' << v;
        cert.notes.push_back(os.str());
    }
    if (!cert.homotopy_ok || !cert.chain_map_ok)
        throw OpError(ErrorCode::FILL_FAILED, "subdivision certificate failed exactness");
    return cert;
}

namespace {

/// Random fine loop: fresh points around a circle of random axis and radius;
/// anchored near the net but generated at the requested fineness.
DiscreteChain sample_polygon(std::span<const PointId> net, double step, double loop_radius,
                             Rng& rng, PointStore& store) {
    const int dim = store.ambient_dim();
    std::vector<double> a(dim), b(dim), axis(dim);
    auto anchor = store.coords(net[rng.below(net.size())]);
    for (int i = 0; i < dim; ++i) axis[i] = anchor[i];
    // orthonormal pair spanning the loop plane
    for (int i = 0; i < dim; ++i) a[i] = rng.uniform(-1.0, 1.0);
    double aa = dot(a, axis);
    for (int i = 0; i < dim; ++i) a[i] -= aa * axis[i];
    double na = norm(a);
    if (na < 1e-9) return DiscreteChain(1);
    for (int i = 0; i < dim; ++i) a[i] /= na;
    for (int i = 0; i < dim; ++i) b[i] = rng.uniform(-1.0, 1.0);
    double b_ax = dot(b, axis), b_a = dot(b, a);
    for (int i = 0; i < dim; ++i) b[i] -= b_ax * axis[i] + b_a * a[i];
    double nb = norm(b);
    if (nb < 1e-9) return DiscreteChain(1);
    for (int i = 0; i < dim; ++i) b[i] /= nb;

    double circ = 2.0 * kPi * std::sin(loop_radius);
    int hops = std::max(4, static_cast<int>(std::ceil(circ / (0.8 * step))));
    std::vector<PointId> loop;
    for (int t = 0; t < hops; ++t) {
        double th = 2.0 * kPi * t / hops;
        std::vector<double> v(dim);
        for (int i = 0; i < dim; ++i)
            v[i] = std::cos(loop_radius) * axis[i] +
                   std::sin(loop_radius) * (std::cos(th) * a[i] + std::sin(th) * b[i]);
        loop.push_back(store.append_unit(v));
    }
    DiscreteChain c(1);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        DiscreteSimplex s;
        s.verts = {loop[i], loop[(i + 1) % loop.size()]};
        if (s.verts[0] != s.verts[1]) c.add(s, 1);
    }
    return c;
}

/// Boundary of a small straight patch: a fine geodesic triangle's boundary,
/// subdivided to the requested fineness.
DiscreteChain sample_patch_boundary(std::span<const PointId> net, double step, double size,
                                    Rng& rng, PointStore& store, const Metric& metric) {
    PointId a = net[rng.below(net.size())];
    const int dim = store.ambient_dim();
    std::vector<double> d1(dim), d2(dim);
    auto ac = store.coords(a);
    for (int i = 0; i < dim; ++i) d1[i] = rng.uniform(-1.0, 1.0);
    double along = dot(d1, ac);
    for (int i = 0; i < dim; ++i) d1[i] -= along * ac[i];
    double n1 = norm(d1);
    if (n1 < 1e-9) return DiscreteChain(1);
    for (int i = 0; i < dim; ++i) d1[i] = ac[i] * std::cos(size) + std::sin(size) * d1[i] / n1;
    for (int i = 0; i < dim; ++i) d2[i] = rng.uniform(-1.0, 1.0);
    double a2 = dot(d2, ac);
    for (int i = 0; i < dim; ++i) d2[i] -= a2 * ac[i];
    double n2 = norm(d2);
    if (n2 < 1e-9) return DiscreteChain(1);
    for (int i = 0; i < dim; ++i) d2[i] = ac[i] * std::cos(size) + std::sin(size) * d2[i] / n2;

    PointId b = store.append_unit(d1), c = store.append_unit(d2);
    DiscreteChain tri(2);
    tri.add(DiscreteSimplex{a, b, c}, 1);
    DiscreteChain ring = boundary(tri);
    if (fineness(ring, metric) <= step) return ring;
    SubdivideOptions opts;  // no frozen cells: subdivide the cycle itself
    return relative_subdivide_chain(ring, step, store, metric, opts);
}

}  // namespace

DACheckReport da_check(const Cover& target, CoverTower& tower, const BallFamily& family,
                       std::span<const StratumNet> strata, int degree, int samples,
                       std::uint64_t seed, PointStore& store, const FillerProfile& profile) {
    const int k = store.ambient_dim() - 2;
    if (degree < 1 || degree >= k)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "da_check needs 1 <= degree < k");
    Metric metric(store);
    DACheckReport rep;
    rep.degree = degree;
    rep.samples = samples;
    rep.seed = seed;

    const Cover& fine_cover = tower.finest();
    const int n = strata.empty() ? 1 : strata.front().n;

    // Required fineness for the pipeline entry and the final fill target via
    // the proposition's recipe: delta := g1(lambda, f2(n)).
    std::vector<int> n_sched = {n};
    for (int i = 1; i <= degree; ++i) n_sched.push_back(f4_of(n_sched.back(), k, profile));
    int f2n = n_sched.back();
    double lambda = lebesgue_number(target);
    StratumFillModuli fill_mods = stratum_fill_moduli(family, f2n, lambda, store, profile);
    double entry_fineness = std::min(fill_mods.g1 / 8.0, lebesgue_number(fine_cover) * 0.9);
    {
        std::ostringstream os;
        os << "lambda=" << lambda << " f2(n)=" << f2n << " g1=" << fill_mods.g1
           << " entry_fineness=" << entry_fineness;
        rep.notes.push_back(os.str());
    }

    Rng rng(seed);
    const auto& net = strata.empty() ? target.net : strata.front().points;

    int made = 0, guard = 0;
    while (made < samples && guard < samples * 50) {
        ++guard;
        DiscreteChain c(1);
        std::string sampler;
        switch (rng.below(3)) {
            case 0:
                c = sample_patch_boundary(net, entry_fineness * 0.9,
                                          entry_fineness * (1.5 + rng.next_double()), rng, store,
                                          metric);
                sampler = "patch_boundary";
                break;
            default: {
                double loop_radius = entry_fineness * (2.0 + 6.0 * rng.next_double());
                c = sample_polygon(net, entry_fineness * 0.9, loop_radius, rng, store);
                sampler = "polygon";
                break;
            }
        }
        if (c.is_zero()) continue;
        if (!boundary(c).is_zero()) continue;
        if (fineness(c, metric) > entry_fineness) continue;
        if (!is_fine(c, fine_cover)) continue;  // the sampler's own fineness filter
        bool on_stratum = true;
        for (PointId v : support(c))
            if (!stratum_membership(family, store, v, n)) on_stratum = false;
        if (!on_stratum) continue;

        DACycleOutcome oc;
        oc.cycle = c;
        oc.sampler = sampler;
        try {
            SubdivisionCertificate cert = refine_with_cover(c, tower, n, fill_mods.g1);
            auto fill =
                stratum_fill(cert.output, f2n, lambda, family, store, profile, &fill_mods);
            DiscreteChain witness = fill.filler - cert.homotopy;
            bool exact = boundary(witness) == c;
            bool fine_ok = is_fine(witness, target);
            oc.witness = witness;
            oc.pass = exact && fine_ok;
            if (!exact) oc.note = "boundary mismatch";
            else if (!fine_ok) oc.note = "witness not target-fine";
        } catch (const OpError& e) {
            oc.pass = false;
            oc.note = e.what();
        }
        rep.outcomes.push_back(std::move(oc));
        if (rep.outcomes.back().pass) ++rep.passed;
        ++made;
    }
    return rep;
}

NonvanishCertificate nonvanishing_certificate(const std::vector<std::size_t>& punctures,
                                              double delta, std::uint64_t seed,
                                              const BallFamily& family,
                                              std::span<const PointId> net, PointStore& store,
                                              const FillerProfile& profile,
                                              std::size_t boundary_search_budget) {
    const int k = store.ambient_dim() - 2;
    if (k != 1 && k != 2)
        throw OpError(ErrorCode::UNSUPPORTED_DIMENSION, "nonvanishing needs k in {1, 2}");
    if (punctures.empty())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need a nonempty puncture set");
    (void)seed;

    NonvanishCertificate cert;
    cert.punctures = punctures;
    cert.k = k;
    cert.expected_rank = punctures.size() - 1;

    if (punctures.size() == 1) {
        cert.rank = 0;
        cert.notes.push_back("single puncture: H_k(S - F) = 0");
        return cert;
    }

    // Convex cover of S - F restricted to the working net.
    std::vector<PointId> forbidden;
    for (std::size_t i : punctures) forbidden.push_back(family.balls[i].center);
    Cover u_cover = convex_cover(store, net, forbidden, kPi / 2.0, &family);
    cert.u_cover = u_cover;

    // Tower O2 << O1 << O and the final refinement O'.
    Cover o1 = build_super_refinement(u_cover);
    Cover o2 = build_super_refinement(o1);
    Cover o_fine = build_super_refinement(o2);

    // Representatives, delta capped so they are O'-fine via the Lebesgue
    // number of the fine cover.
    double lam = lebesgue_number(o_fine);
    double delta_eff = std::min(delta, 0.9 * lam);

    NerveComplex nerve_o1 = nerve(o1, k + 1);
    HomologyBasisQ basis = homology_basis(nerve_o1, k);

    // Parent map O2 -> O1 evaluated geometrically on off-net points.
    auto parent_of = [&](PointId x) -> std::uint32_t {
        Bits un(o2.net.size());
        bool any = false;
        for (const auto& s : o2.sets)
            if (o2.member(s, x)) {
                un |= s.bits;
                any = true;
            }
        if (!any) throw OpError(ErrorCode::WELLDEF_FAILED, "point not covered by O2");
        for (const auto& t : o1.sets)
            if (un.is_subset_of(t.bits) && o1.member(t, x)) return t.id;
        throw OpError(ErrorCode::WELLDEF_FAILED, "no parent set for a representative vertex");
    };

    IntMatrix classes(basis.cycles.cols(), cert.expected_rank);
    for (std::size_t j = 0; j < cert.expected_rank; ++j) {
        RepresentedClass rep =
            represent_class(punctures, static_cast<int>(j), delta_eff, family, store, profile);
        if (!is_fine(rep.disc, o_fine))
            throw OpError(ErrorCode::FILL_FAILED, "representative is not fine for O'");

        // Map into the nerve of O1 through the parent map.
        NerveChain image(k);
        for (const auto& [s, a] : rep.disc.terms()) {
            NerveSimplex t;
            for (PointId v : s.verts) t.verts.push_back(SetId{parent_of(v)});
            image.add(t, a);
        }
        auto vec = chain_to_vector(nerve_o1, image);
        auto coords = basis.class_coordinates(vec);
        if (!coords)
            throw OpError(ErrorCode::WELLDEF_FAILED, "image is not a cycle class in N(O1)");
        Integer denom = 1;
        for (const auto& q : *coords) denom = denom / gcd(denom, denominator(q)) * denominator(q);
        for (std::size_t i = 0; i < coords->size(); ++i)
            classes.at(i, j) = numerator((*coords)[i] * Rational(denom));
        cert.representatives.push_back(std::move(rep));
    }
    cert.class_matrix = classes;
    cert.rank = bareiss_rank(classes);

    if (cert.rank > cert.expected_rank)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "rank exceeds |F| - 1: impossible");

    // Convex-cover verification: look for a U-fine bounding chain of each
    // representative over a band-limited tiny-simplex complex; finding one
    // would make the class singularly trivial.
    cert.boundary_search_done = true;
    for (const auto& rep : cert.representatives) {
        if (rep.disc.is_zero()) continue;
        auto supp = support(rep.disc);
        std::vector<PointId> band(supp.begin(), supp.end());
        double band_radius = 3.0 * delta_eff;
        for (PointId p : net) {
            double d = std::numeric_limits<double>::infinity();
            for (PointId s : supp) d = std::min(d, store.distance(p, s));
            if (d < band_radius) band.push_back(p);
        }
        std::sort(band.begin(), band.end());
        band.erase(std::unique(band.begin(), band.end()), band.end());
        Cover band_cover = restrict_cover(u_cover, band);
        NerveComplex complex;
        try {
            complex = tiny_simplex_complex(band_cover, k + 1, boundary_search_budget);
        } catch (const OpError& e) {
            if (e.code() == ErrorCode::COMPLEX_TOO_LARGE) {
                cert.boundary_search_done = false;
                cert.notes.push_back("boundary search above budget: rank-only certificate");
                break;
            }
            throw;
        }
        // Vector of the representative in the band complex.
        std::vector<Integer> v(complex.count(k), 0);
        bool representable = true;
        for (const auto& [s, a] : rep.disc.terms()) {
            std::vector<std::uint32_t> tup;
            for (PointId p : s.verts) {
                auto it = std::lower_bound(band.begin(), band.end(), p);
                tup.push_back(static_cast<std::uint32_t>(it - band.begin()));
            }
            int sign = 1;
            for (std::size_t i = 0; i + 1 < tup.size(); ++i)
                for (std::size_t t = 0; t + 1 < tup.size() - i; ++t)
                    if (tup[t] > tup[t + 1]) {
                        std::swap(tup[t], tup[t + 1]);
                        sign = -sign;
                    }
            try {
                v[complex.index_of(k, tup)] += a * sign;
            } catch (const OpError&) {
                representable = false;
                break;
            }
        }
        if (!representable) {
            cert.notes.push_back("representative simplices exceed the band complex: skipped");
            continue;
        }
        IntMatrix bk1 = complex.boundary_matrix(k + 1);
        std::vector<Rational> rhs(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = Rational(v[i]);
        auto sol = solve_rational(bk1, rhs);
        if (sol) {
            cert.notes.push_back("WARNING: representative bounds a U-fine chain in the band");
        } else {
            cert.notes.push_back("no U-fine bounding chain in the band (evidence of nonzero class)");
        }
    }
    return cert;
}

}  // namespace stratafill
