#include <doctest.h>

#include "stratafill/sphere.hpp"
#include "test_helpers.hpp"

using namespace stratafill;
using namespace stratafill::testing;

TEST_CASE("straighten and discretize") {
    PointStore store(3);
    Rng rng(3);
    auto pts = random_points(store, 16, rng);
    Metric metric(store);

    // Degenerate simplex straightens to a constant simplex.
    DiscreteChain degen(1);
    degen.add(DiscreteSimplex{pts[0], pts[0]}, 1);
    StraightChain sd = straighten(degen, metric);
    CHECK(sd.valid);
    CHECK(discretize(sd) == degen);

    // Any fine chain straightens with identical vertices; disc o straighten = id.
    for (int it = 0; it < 50; ++it) {
        DiscreteChain c = random_chain(pts, 2, 4, rng);
        if (fineness(c, metric) > kPi / 2.0) continue;
        CHECK(discretize(straighten(c, metric)) == c);
    }

    // An antipodal edge is rejected.
    double n_c[3] = {0, 0, 1}, s_c[3] = {0, 0, -1};
    PointId n = store.append_unit(n_c), s = store.append_unit(s_c);
    DiscreteChain anti(1);
    anti.add(DiscreteSimplex{n, s}, 1);
    CHECK_THROWS_AS((void)straighten(anti, metric), OpError);

    // discretize is linear and kills nothing.
    DiscreteChain a = random_chain(pts, 1, 4, rng);
    DiscreteChain b = random_chain(pts, 1, 4, rng);
    if (fineness(a, metric) <= kPi / 2 && fineness(b, metric) <= kPi / 2) {
        StraightChain sa = straighten(a, metric), sb = straighten(b, metric);
        CHECK(discretize(sa) + discretize(sb) == a + b);
    }
    CHECK(discretize(StraightChain{}).is_zero());
}

TEST_CASE("relative subdivision: boundary preserved, fineness reached") {
    PointStore store(3);
    Metric metric(store);
    // A cone over a fine polygon: large interior simplices, tiny boundary.
    double axis[3] = {0, 0, 1};
    DiscreteChain ring = polygon_cycle(store, axis, 0.7, 48);
    double north_c[3] = {0, 0, 1};
    PointId north = store.append_unit(north_c);
    DiscreteChain fan = cone(north, ring);

    StraightChain st = straighten(fan, metric);
    DiscreteChain bd = boundary(fan);
    CHECK(bd == ring);
    double floor = 2.0 * fineness(bd, metric);

    // Below the floor: rejected.
    CHECK_THROWS_AS((void)relative_subdivide(st, floor * 0.4, store), OpError);

    // At a reachable target: same boundary cells, fineness bound met.
    StraightChain sub = relative_subdivide(st, std::max(floor, 0.25), store);
    CHECK(boundary(sub.verts) == bd);
    CHECK(fineness(sub.verts, Metric(store)) <= std::max(floor, 0.25));
    CHECK(sub.verts.num_terms() > fan.num_terms());

    // Already finer than target: unchanged.
    StraightChain same = relative_subdivide(sub, kPi, store);
    CHECK(same.verts == sub.verts);
}

TEST_CASE("subdivision is a chain map on random chains") {
    PointStore store(3);
    Rng rng(5);
    Metric metric(store);
    for (int it = 0; it < 20; ++it) {
        auto pts = random_points(store, 6, rng);
        DiscreteChain c = random_chain(pts, 2, 3, rng);
        DiscreteChain bd = boundary(c);
        auto frozen = face_complex(bd);
        SubdivideOptions opts;
        opts.frozen = &frozen;
        double target = std::max(1.2, 2.0 * fineness(bd, metric));
        DiscreteChain sub = relative_subdivide_chain(c, target, store, metric, opts);
        CHECK(boundary(sub) == bd);
        CHECK(fineness(sub, metric) <= target * (1 + 1e-12));
    }
}

TEST_CASE("sample_net covers and separates") {
    PointStore store(3);
    auto net = sample_net(kPi, nullptr, 42, store);
    CHECK(net.size() >= 2);

    auto fine = sample_net(0.35, nullptr, 42, store);
    // pairwise separation >= eps/2
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (std::size_t j = i + 1; j < fine.size(); ++j)
            CHECK(store.distance(fine[i], fine[j]) >= 0.35 / 2 - 1e-12);
    // covering radius verified against a 10x finer probe stream
    Rng rng(99);
    auto probes = random_points(store, 2000, rng);
    double worst = 0;
    for (PointId q : probes) {
        double best = kPi;
        for (PointId p : fine) best = std::min(best, store.distance(q, p));
        worst = std::max(worst, best);
    }
    CHECK(worst <= 0.35);

    // Region restriction: a single cap keeps all net points inside.
    double cap_c[3] = {0, 0, 1};
    auto in_cap = [&](std::span<const double> v) { return v[2] > 0.5; };
    auto capped = sample_net(0.25, in_cap, 7, store);
    (void)cap_c;
    for (PointId p : capped) CHECK(store.coords(p)[2] > 0.5);
}

TEST_CASE("fill_cycle: two-point cycle, small triangle, equatorial cycle") {
    PointStore store(3);
    Metric metric(store);
    FillerProfile prof;

    // c = [a] - [b] at distance 0.1, delta 0.2: a one-edge filler.
    double a_c[3] = {1, 0, 0};
    double b_c[3] = {std::cos(0.1), std::sin(0.1), 0};
    PointId a = store.append_unit(a_c), b = store.append_unit(b_c);
    DiscreteChain c0(0);
    c0.add(DiscreteSimplex{a}, 1);
    c0.add(DiscreteSimplex{b}, -1);
    DiscreteChain d0 = fill_cycle(c0, 0.2, store, prof);
    CHECK(boundary(d0) == c0);
    CHECK(fineness(d0, metric) == doctest::Approx(0.1));
    CHECK(d0.num_terms() == 1);

    // Boundary of a small straight triangle, delta = fineness(c).
    double p_c[3] = {std::cos(0.15), 0, std::sin(0.15)};
    PointId p = store.append_unit(p_c);
    DiscreteChain tri(2);
    tri.add(DiscreteSimplex{a, b, p}, 1);
    DiscreteChain c1 = boundary(tri);
    double delta = fineness(c1, metric);
    DiscreteChain d1 = fill_cycle(c1, 2.0 * fineness(c1, metric), store, prof);
    CHECK(boundary(d1) == c1);
    CHECK(fineness(d1, metric) <= 2.0 * delta + 1e-12);

    // A fine equatorial cycle on S^2 at delta = 0.2.
    double axis[3] = {0, 0, 1};
    DiscreteChain eq = polygon_cycle(store, axis, kPi / 2, 80);
    DiscreteChain d2 = fill_cycle(eq, 0.2, store, prof);
    CHECK(boundary(d2) == eq);
    CHECK(fineness(d2, metric) <= 0.2 * (1 + 1e-9));
    CHECK(chain_diameter(d2, metric) <= kPi);

    // Fineness precondition is enforced.
    CHECK_THROWS_AS((void)fill_cycle(eq, 0.05, store, prof), OpError);
}

TEST_CASE("fill_in_ball keeps the cap and matches boundaries") {
    PointStore store(3);
    Metric metric(store);
    FillerProfile prof;
    double p_c[3] = {0, 0, 1};
    PointId p = store.append_unit(p_c);

    double r2 = 0.15;
    double axis[3] = {0, 0, 1};
    DiscreteChain ring = polygon_cycle(store, axis, 0.1, 24);
    DiscreteChain d = fill_in_ball(ring, p, r2, 0.06, store, prof);
    CHECK(boundary(d) == ring);
    CHECK(fineness(d, metric) <= 0.06 * (1 + 1e-9));
    for (PointId v : support(d)) CHECK(store.distance(p, v) <= prof.k_fill * r2 + 1e-12);
    // convexity: the cone from the centre actually stays in the small cap
    for (PointId v : support(d)) CHECK(store.distance(p, v) <= r2 + 1e-12);

    CHECK(fill_in_ball(DiscreteChain(1), p, r2, 0.06, store, prof).is_zero());

    // Two points in the cap: a path through the cap.
    auto q1 = store.append_radial_point(p, support(ring).front(), 0.12);
    auto q2 = store.append_radial_point(p, support(ring).back(), 0.05);
    DiscreteChain pair(0);
    pair.add(DiscreteSimplex{q1}, 1);
    pair.add(DiscreteSimplex{q2}, -1);
    DiscreteChain dp = fill_in_ball(pair, p, r2, 0.06, store, prof);
    CHECK(boundary(dp) == pair);
    for (PointId v : support(dp)) CHECK(store.distance(p, v) <= r2 + 1e-12);

    // Support outside the ball is rejected.
    double far_c[3] = {1, 0, 0};
    PointId far = store.append_unit(far_c);
    DiscreteChain bad(0);
    bad.add(DiscreteSimplex{far}, 1);
    bad.add(DiscreteSimplex{q1}, -1);
    CHECK_THROWS_AS((void)fill_in_ball(bad, p, r2, 0.06, store, prof), OpError);
}

TEST_CASE("fill_in_annulus: containment in the enlarged annulus") {
    PointStore store(3);
    Metric metric(store);
    FillerProfile prof;
    double p_c[3] = {0, 0, 1};
    PointId p = store.append_unit(p_c);

    double r1 = 0.02, r2 = 0.04;

    // A 0-cycle on one latitude circle with a small gap.
    double axis[3] = {0, 0, 1};
    DiscreteChain ring = polygon_cycle(store, axis, 0.03, 40);
    auto verts = support(ring);
    DiscreteChain pair(0);
    pair.add(DiscreteSimplex{verts[0]}, 1);
    pair.add(DiscreteSimplex{verts[2]}, -1);
    DiscreteChain d = fill_in_annulus(pair, p, r1, r2, 0.02, store, prof);
    CHECK(boundary(d) == pair);
    for (PointId v : support(d)) {
        double dist = store.distance(p, v);
        CHECK(dist >= r1 / prof.k_fill - 1e-12);
        CHECK(dist <= prof.k_fill * r2 + 1e-12);
    }

    // The whole latitude circle as a 0-cycle spread around the annulus.
    DiscreteChain spread(0);
    spread.add(DiscreteSimplex{verts[0]}, 1);
    spread.add(DiscreteSimplex{verts[verts.size() / 2]}, -1);
    DiscreteChain d2 = fill_in_annulus(spread, p, r1, r2, 0.02, store, prof);
    CHECK(boundary(d2) == spread);
    for (PointId v : support(d2)) {
        double dist = store.distance(p, v);
        CHECK(dist >= r1 / prof.k_fill - 1e-12);
        CHECK(dist <= prof.k_fill * r2 + 1e-12);
    }

    // Zero cycle fills to zero.
    CHECK(fill_in_annulus(DiscreteChain(0), p, r1, r2, 0.02, store, prof).is_zero());

    // Dimension = k is rejected in the annulus filler.
    DiscreteChain dim1 = polygon_cycle(store, axis, 0.03, 40);
    CHECK_THROWS_AS((void)fill_in_annulus(dim1, p, r1, r2, 0.02, store, prof), OpError);
}

TEST_CASE("annulus filler on S^3 fills 1-cycles around the hole") {
    PointStore store(4);
    Metric metric(store);
    FillerProfile prof;
    double p_c[4] = {0, 0, 0, 1};
    PointId p = store.append_unit(p_c);

    double r1 = 0.02, r2 = 0.04;
    // 1-cycle living on the latitude 2-sphere at radius ~0.03 around p.
    double axis[4] = {0, 0, 1, 0};
    (void)axis;
    // Build a small polygon at constant distance 0.03 from p.
    std::vector<PointId> verts;
    int hops = 60;
    for (int t = 0; t < hops; ++t) {
        double th = 2 * kPi * t / hops;
        double v[4] = {std::sin(0.03) * std::cos(th), std::sin(0.03) * std::sin(th), 0,
                       std::cos(0.03)};
        verts.push_back(store.append_unit(v));
    }
    DiscreteChain c(1);
    for (int t = 0; t < hops; ++t) {
        DiscreteSimplex s;
        s.verts = {verts[t], verts[(t + 1) % hops]};
        c.add(s, 1);
    }
    REQUIRE(boundary(c).is_zero());
    REQUIRE(fineness(c, metric) <= 0.02 / 2);

    DiscreteChain d = fill_in_annulus(c, p, r1, r2, 0.02, store, prof);
    CHECK(boundary(d) == c);
    CHECK(fineness(d, metric) <= 0.02 * (1 + 1e-9));
    for (PointId v : support(d)) {
        double dist = store.distance(p, v);
        CHECK(dist >= r1 / prof.k_fill - 1e-12);
        CHECK(dist <= prof.k_fill * r2 + 1e-12);
    }
}
