#include <doctest.h>

#include "stratafill/cover.hpp"
#include "test_helpers.hpp"

using namespace stratafill;
using namespace stratafill::testing;

namespace {

struct Fixture {
    PointStore store{3};
    std::vector<PointId> net;
    Fixture(double eps = 0.35, std::uint64_t seed = 2) {
        net = sample_net(eps, nullptr, seed, store);
    }
};

}  // namespace

TEST_CASE("refinement with witness spouse map") {
    Fixture fx;
    Cover coarse = make_ball_cover(fx.store, fx.net, 0.9);
    // Halved-radius balls at the same centres refine the original cover.
    std::vector<PointId> centers;
    for (const auto& s : coarse.sets) centers.push_back(s.anchor);
    Cover fine = make_ball_cover_at(fx.store, fx.net, centers, 0.45);
    CHECK(coarse.covers_net());

    auto self = is_refinement(coarse, coarse);
    CHECK(self.holds);
    for (std::size_t i = 0; i < coarse.sets.size(); ++i) CHECK(self.spouse[i] == i);

    auto ref = is_refinement(fine, coarse);
    CHECK(ref.holds);

    auto wrong = is_refinement(coarse, fine);
    CHECK(!wrong.holds);
}

TEST_CASE("super refinement predicate") {
    Fixture fx;
    Cover coarse = make_ball_cover(fx.store, fx.net, 1.1);
    Cover whole = make_whole_space_cover(fx.store, fx.net);

    // The whole space is a parent of everything.
    auto any = is_super_refinement(coarse, whole);
    CHECK(any.holds);

    // A generic ball cover is typically not a super-refinement of itself.
    auto self = is_super_refinement(coarse, coarse);
    CHECK(!self.holds);

    // Shrunk balls super-refine when 2r stays under the Lebesgue depth.
    Cover fine = build_super_refinement(coarse);
    auto ok = is_super_refinement(fine, coarse);
    CHECK(ok.holds);
}

TEST_CASE("lebesgue numbers: single set and two caps") {
    Fixture fx(0.25, 3);
    Cover whole = make_whole_space_cover(fx.store, fx.net);
    CHECK(lebesgue_number(whole) == doctest::Approx(kPi));

    // Two antipodal caps of radius 2pi/3: lambda >= pi/6 (up to net effects).
    Cover caps;
    caps.store = &fx.store;
    caps.net = fx.net;
    std::sort(caps.net.begin(), caps.net.end());
    for (int i = 0; i < 2; ++i) {
        OpenSet s;
        s.id = i;
        s.kind = OpenSet::Kind::Ball;
        s.center = {0, 0, i == 0 ? 1.0 : -1.0};
        s.radius = 2.0 * kPi / 3.0;
        caps.sets.push_back(std::move(s));
    }
    caps.rebuild_bits();
    REQUIRE(caps.covers_net());
    double lam = lebesgue_number(caps);
    CHECK(lam >= kPi / 6.0 - 1e-9);
    CHECK(lam <= kPi / 3.0);
}

TEST_CASE("tiny and fine predicates") {
    Fixture fx;
    Cover cover = make_ball_cover(fx.store, fx.net, 0.7);

    // Singletons are tiny; a simplex spanning two far sets is not.
    for (PointId p : fx.net) {
        std::vector<PointId> single{p};
        CHECK(is_tiny(single, cover));
    }
    // A pair of nearly antipodal points is not tiny for radius-0.7 balls.
    PointId a = fx.net[0];
    PointId far = a;
    double best = 0;
    for (PointId p : fx.net) {
        double d = fx.store.distance(a, p);
        if (d > best) {
            best = d;
            far = p;
        }
    }
    std::vector<PointId> pair{a, far};
    CHECK(!is_tiny(pair, cover));

    CHECK(is_fine(DiscreteChain(1), cover));  // zero chain is vacuously fine
}

TEST_CASE("family maps: defining containments and induced chain maps") {
    Fixture fx;
    Cover coarse = make_ball_cover(fx.store, fx.net, 1.1);
    Cover mid = build_super_refinement(coarse);
    Cover fine = build_super_refinement(mid);
    Rng rng(19);

    // child: f(O) in O for all O.
    FamilyMap child = make_family_map(FamilyMapKind::Child, mid, coarse);
    for (std::size_t i = 0; i < mid.sets.size(); ++i)
        CHECK(mid.member(mid.sets[i], child.set_to_point[i]));

    // spouse: O' inside f(O').
    FamilyMap spouse = make_family_map(FamilyMapKind::Spouse, mid, coarse);
    for (std::size_t i = 0; i < mid.sets.size(); ++i) {
        const OpenSet* target = nullptr;
        for (const auto& s : coarse.sets)
            if (s.id == spouse.set_to_set[i]) target = &s;
        REQUIRE(target != nullptr);
        CHECK(mid.sets[i].bits.is_subset_of(target->bits));
    }

    // parent: f(x) contains every mid-set through x.
    FamilyMap parent = make_family_map(FamilyMapKind::Parent, mid, coarse);
    for (std::size_t i = 0; i < mid.net.size(); ++i) {
        Bits un(mid.net.size());
        for (const auto& s : mid.sets)
            if (s.bits.test(i)) un |= s.bits;
        const OpenSet* target = nullptr;
        for (const auto& s : coarse.sets)
            if (s.id == parent.point_to_set[i]) target = &s;
        CHECK(un.is_subset_of(target->bits));
    }

    // Parent on a non-super-refinement fails.
    CHECK_THROWS_AS((void)make_family_map(FamilyMapKind::Parent, coarse, coarse), OpError);

    // Induced maps commute with the boundary exactly.
    for (int it = 0; it < 50; ++it) {
        NerveChain c(1);
        // random nerve-ish chain: pairs of intersecting mid-sets
        for (int t = 0; t < 4; ++t) {
            std::uint32_t i = static_cast<std::uint32_t>(rng.below(mid.sets.size()));
            for (std::uint32_t j = 0; j < mid.sets.size(); ++j) {
                if (j == i) continue;
                if ((mid.sets[i].bits & mid.sets[j].bits).any()) {
                    c.add(NerveSimplex{SetId{i}, SetId{j}}, 1 + static_cast<int>(rng.below(3)));
                    break;
                }
            }
        }
        if (c.is_zero()) continue;
        CHECK(boundary(apply_spouse(spouse, c)) == apply_spouse(spouse, boundary(c)));
        CHECK(boundary(apply_child(child, c)) == apply_child(child, boundary(c)));
        // child image lands tiny in the coarse cover
        for (const auto& [s, a] : apply_child(child, c).terms()) CHECK(is_tiny(s.verts, coarse));
    }

    // Sibling map: fine-fine chains land coarse-fine.
    FamilyMap sibling = make_family_map(FamilyMapKind::Sibling, mid, coarse);
    std::vector<PointId> net_members = mid.net;
    for (int it = 0; it < 30; ++it) {
        // random mid-tiny simplex: points from one set
        const OpenSet& s = mid.sets[rng.below(mid.sets.size())];
        std::vector<PointId> members;
        for (std::size_t i = 0; i < mid.net.size(); ++i)
            if (s.bits.test(i)) members.push_back(mid.net[i]);
        if (members.size() < 2) continue;
        DiscreteChain c(1);
        c.add(DiscreteSimplex{members[rng.below(members.size())],
                              members[rng.below(members.size())]},
              1);
        DiscreteChain img = apply_sibling(sibling, c);
        CHECK(boundary(img) == apply_sibling(sibling, boundary(c)));
        CHECK(is_fine(img, coarse));
    }
}

TEST_CASE("prism homotopies: exact dH + Hd = g - f") {
    Fixture fx;
    Cover coarse = make_ball_cover(fx.store, fx.net, 1.1);
    Cover mid = build_super_refinement(coarse);
    Rng rng(23);

    FamilyMap f = make_family_map(FamilyMapKind::Child, mid, coarse);
    // A second child map: highest-index member instead of lowest.
    FamilyMap g = f;
    for (std::size_t i = 0; i < mid.sets.size(); ++i) {
        for (std::size_t pos = mid.net.size(); pos-- > 0;)
            if (mid.sets[i].bits.test(pos)) {
                g.set_to_point[i] = mid.net[pos];
                break;
            }
    }

    for (int it = 0; it < 100; ++it) {
        NerveChain c(1);
        for (int t = 0; t < 3; ++t) {
            std::uint32_t i = static_cast<std::uint32_t>(rng.below(mid.sets.size()));
            for (std::uint32_t j = 0; j < mid.sets.size(); ++j) {
                if ((mid.sets[i].bits & mid.sets[j].bits).any() && i != j) {
                    c.add(NerveSimplex{SetId{i}, SetId{j}}, 1);
                    break;
                }
            }
        }
        if (c.is_zero()) continue;
        DiscreteChain lhs = boundary(homotopy_child(f, g, c)) + homotopy_child(f, g, boundary(c));
        DiscreteChain rhs = apply_child(g, c) - apply_child(f, c);
        CHECK(lhs == rhs);
    }

    // f = g gives a homotopy with zero defect.
    for (int it = 0; it < 20; ++it) {
        NerveChain c(0);
        c.add(NerveSimplex{SetId{static_cast<std::uint32_t>(rng.below(mid.sets.size()))}}, 1);
        DiscreteChain lhs = boundary(homotopy_child(f, f, c)) + homotopy_child(f, f, boundary(c));
        CHECK(lhs.is_zero());
    }
}

TEST_CASE("super_union_bound on a verified double tower") {
    Fixture fx;
    // Hand-built tower: balls around every net point with radii 2.0 / 0.9 /
    // 0.4, so neighbouring fine sets genuinely share net points.
    auto make_everywhere = [&](double radius) {
        return make_ball_cover_at(fx.store, fx.net, fx.net, radius);
    };
    Cover coarse = make_everywhere(2.0);
    Cover mid = make_everywhere(0.9);
    Cover fine = make_everywhere(0.4);
    REQUIRE(is_super_refinement(mid, coarse).holds);
    REQUIRE(is_super_refinement(fine, mid).holds);

    // Singleton collections always succeed.
    std::vector<std::uint32_t> single{fine.sets.front().id};
    CHECK_NOTHROW((void)super_union_bound(fine, mid, coarse, single));

    // Pairwise-intersecting pairs and triples must find a containing set.
    int tested = 0;
    for (std::uint32_t i = 0; i < fine.sets.size() && tested < 25; ++i)
        for (std::uint32_t j = i + 1; j < fine.sets.size() && tested < 25; ++j) {
            if (!(fine.sets[i].bits & fine.sets[j].bits).any()) continue;
            std::vector<std::uint32_t> pair{i, j};
            CHECK_NOTHROW((void)super_union_bound(fine, mid, coarse, pair));
            ++tested;
        }
    CHECK(tested > 0);
}

TEST_CASE("limit cover: plain construction and super-refining variant") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 2;
    params.base_radius = 1.2;
    params.seed = 44;
    BallFamily fam = build_family(params, store);

    std::vector<StratumNet> strata;
    for (int n : {1, 2, 4, 8}) strata.push_back(sample_stratum_net(fam, n, 0.5, 101 + n, store));

    // Plain construction with one epsilon per level.
    std::vector<double> eps = {0.55, 0.45, 0.35, 0.3};
    LimitCover lc = build_limit_cover(fam, store, strata, eps);
    CHECK(lc.u_cover.covers_net());
    CHECK(lc.v_cover.covers_net());
    CHECK(lc.u_cover.sets.size() == lc.v_cover.sets.size());
    // V-sets respect their stratum floor.
    for (const auto& s : lc.v_cover.sets) {
        if (s.stratum_floor <= 1) continue;
        int excluded = lc.v_cover.strata_indices[s.stratum_floor - 2];
        for (std::size_t i = 0; i < lc.v_cover.net.size(); ++i)
            if (s.bits.test(i))
                CHECK(!stratum_membership(fam, store, lc.v_cover.net[i], excluded));
    }

    // Super-refining variant against a coarse target on the same universe.
    Cover target = make_ball_cover(store, lc.u_cover.net, 1.2, &fam);
    LimitCover super = build_limit_cover_super(fam, store, strata, target);
    auto w = is_super_refinement(super.v_cover, target);
    CHECK(w.holds);

    // Negative control: a generic cover is not a super-refinement of itself.
    auto self = is_super_refinement(target, target);
    CHECK(!self.holds);
}
