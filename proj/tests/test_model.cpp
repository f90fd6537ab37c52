#include <doctest.h>

#include "stratafill/model.hpp"
#include "test_helpers.hpp"

using namespace stratafill;
using namespace stratafill::testing;

TEST_CASE("build_family: disjoint antipodal pair and hierarchical packing") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 2;
    params.base_radius = 0.008 * 162.0;  // family radius 0.008
    params.seed = 5;
    BallFamily fam = build_family(params, store);
    CHECK(fam.balls.size() == 2);
    CHECK(validate_separation(fam, store).ok());
    // disjoint mode: the doubled-K enlargements are separated
    double d = store.distance(fam.balls[0].center, fam.balls[1].center);
    CHECK(d > 2.0 * 2.0 * fam.K * (fam.family_radius(0) + fam.family_radius(1)));

    FamilyParams two;
    two.levels = 2;
    two.count_per_level = 3;
    two.base_radius = 1.2;
    two.seed = 9;
    BallFamily hier = build_family(two, store);
    CHECK(hier.balls.size() == 6);
    CHECK(validate_separation(hier, store).ok());
    CHECK(hier.min_family_radius() < hier.max_family_radius());
}

TEST_CASE("packing failure when same-level balls are forced to intersect") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 2000;  // cannot pack this many separated balls
    params.base_radius = 1.4;
    params.retry_budget = 500;
    params.seed = 1;
    CHECK_THROWS_AS((void)build_family(params, store), OpError);
}

TEST_CASE("validate_separation flags equal intersecting balls") {
    PointStore store(3);
    BallFamily fam;
    double a_c[3] = {1, 0, 0};
    double b_c[3] = {std::cos(1e-4), std::sin(1e-4), 0};
    fam.balls.push_back({store.append_unit(a_c), 0.5, 0});
    fam.balls.push_back({store.append_unit(b_c), 0.5, 0});
    auto rep = validate_separation(fam, store);
    CHECK(!rep.ok());
    CHECK(rep.violations.size() == 1);
    CHECK(rep.violations[0].ratio == doctest::Approx(1.0));
}

TEST_CASE("stratum membership thresholds and monotonicity") {
    PointStore store(3);
    BallFamily fam;
    double p_c[3] = {0, 0, 1};
    PointId p = store.append_unit(p_c);
    fam.balls.push_back({p, 0.03 * 162.0, 0});  // family radius 0.03

    PointId x = store.append_radial_point(p, store.append_unit(std::vector<double>{1, 0, 0}), 0.02);
    CHECK(store.distance(p, x) == doctest::Approx(0.02));
    CHECK(!stratum_membership(fam, store, x, 1));  // threshold 0.03
    CHECK(stratum_membership(fam, store, x, 2));   // threshold 0.015

    double anti_c[3] = {0, 0, -1};
    PointId anti = store.append_unit(anti_c);
    for (int n = 1; n <= 8; ++n) CHECK(stratum_membership(fam, store, anti, n));
    for (int n = 1; n <= 8; ++n) CHECK(!stratum_membership(fam, store, p, n));

    // Monotone strata on random samples.
    Rng rng(31);
    auto pts = random_points(store, 200, rng);
    for (PointId q : pts)
        for (int n = 1; n < 6; ++n)
            if (stratum_membership(fam, store, q, n)) CHECK(stratum_membership(fam, store, q, n + 1));
}

TEST_CASE("stratum nets sample only members") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 2;
    params.base_radius = 1.2;
    params.seed = 21;
    BallFamily fam = build_family(params, store);
    StratumNet net = sample_stratum_net(fam, 2, 0.4, 77, store);
    CHECK(net.points.size() > 10);
    for (PointId p : net.points) CHECK(stratum_membership(fam, store, p, 2));
}

TEST_CASE("approx_radius: single ball, large eps, monotone direction") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 1;
    params.base_radius = 0.9;
    params.seed = 4;
    BallFamily fam = build_family(params, store);

    // eps below the ball's depth: the ball itself is the threshold.
    double depth = fam.family_radius(0);
    double r = approx_radius(fam, 1, depth * 0.1, store, store);
    CHECK(r == doctest::Approx(fam.family_radius(0)));

    // eps above every depth: nothing needs to be removed.
    double free_r = approx_radius(fam, 1, 0.5, store, store);
    CHECK(free_r > fam.max_family_radius());

    // Two-scale family with eps between the small and the large depths: the
    // threshold stops at the large radius.
    FamilyParams two;
    two.levels = 2;
    two.count_per_level = 2;
    two.base_radius = 1.2;
    two.seed = 8;
    BallFamily hier = build_family(two, store);
    double mid_eps = 0.3 * hier.max_family_radius();
    double big_eps = approx_radius(hier, 1, mid_eps, store, store);
    CHECK(big_eps == doctest::Approx(hier.max_family_radius()));

    // Density threshold grows with eps (coarser service radius allowed).
    double r1 = approx_radius(hier, 2, 1e-7, store, store);
    double r2 = approx_radius(hier, 2, 0.2, store, store);
    CHECK(r1 <= r2 + 1e-18);
}

TEST_CASE("project_to_stratum: identity on members, boundary commutes") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 2;
    params.base_radius = 1.2;
    params.seed = 13;
    BallFamily fam = build_family(params, store);
    Metric metric(store);

    Rng rng(37);
    auto pts = random_points(store, 60, rng);
    std::vector<PointId> members;
    for (PointId p : pts)
        if (stratum_membership(fam, store, p, 1)) members.push_back(p);
    REQUIRE(members.size() >= 8);

    DiscreteChain c = random_chain(members, 1, 5, rng);
    DiscreteChain proj = project_to_stratum(c, 1, 0.1, fam, store);
    CHECK(proj == c);  // already in the stratum

    // A vertex pushed slightly into a ball moves by at most eps and the
    // projection commutes with the boundary.
    PointId center = fam.balls[0].center;
    double thr = fam.family_radius(0);
    PointId inside = store.append_radial_point(center, members[0], thr * 0.7);
    DiscreteChain edge(1);
    edge.add(DiscreteSimplex{inside, members[0]}, 1);
    double eps = thr * 0.5;
    DiscreteChain pe = project_to_stratum(edge, 1, eps, fam, store);
    CHECK(boundary(pe) == project_to_stratum(boundary(edge), 1, eps, fam, store));
    CHECK(fineness(pe, metric) <= fineness(edge, metric) + 2 * eps + 1e-12);
    for (PointId v : support(pe)) CHECK(stratum_membership(fam, store, v, 1));

    // Too far: a point at the centre cannot exit within a tiny eps.
    DiscreteChain deep(0);
    deep.add(DiscreteSimplex{center}, 1);
    CHECK_THROWS_AS((void)project_to_stratum(deep, 1, thr * 0.01, fam, store), OpError);
}
