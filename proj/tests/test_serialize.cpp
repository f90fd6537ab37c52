#include <doctest.h>

#include "stratafill/serialize.hpp"
#include "test_helpers.hpp"

using namespace stratafill;
using namespace stratafill::testing;

TEST_CASE("chain serialization round trip") {
    PointStore store(3);
    Rng rng(4);
    auto pts = random_points(store, 12, rng);
    DiscreteChain c = random_chain(pts, 2, 6, rng);

    PointTable table;
    table.add_chain(c);
    Json j;
    j["points"] = table.to_json(store);
    j["chain"] = chain_to_json(c, table);

    PointStore fresh(3);
    auto remap = PointTable::load(j["points"], fresh);
    DiscreteChain back = chain_from_json(j["chain"], remap);
    CHECK(back.dimension() == c.dimension());
    CHECK(back.num_terms() == c.num_terms());
    // Coordinates survive the %.17g round trip bit-exactly.
    for (PointId v : support(c)) {
        PointId w = remap[table.index_of(v)];
        for (int i = 0; i < 3; ++i) CHECK(store.coords(v)[i] == fresh.coords(w)[i]);
    }
}

TEST_CASE("family serialization round trip") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 2;
    params.count_per_level = 2;
    params.base_radius = 1.1;
    params.seed = 77;
    BallFamily fam = build_family(params, store);

    Json j = family_to_json(fam, store);
    PointStore fresh(3);
    BallFamily back = family_from_json(j, fresh);
    CHECK(back.balls.size() == fam.balls.size());
    CHECK(back.M == fam.M);
    for (std::size_t i = 0; i < fam.balls.size(); ++i) {
        CHECK(back.balls[i].r_p == fam.balls[i].r_p);
        for (int d = 0; d < 3; ++d)
            CHECK(fresh.coords(back.balls[i].center)[d] == store.coords(fam.balls[i].center)[d]);
    }
}

TEST_CASE("deterministic serialization of detour reports") {
    PointStore store(3);
    double fr = 0.004;
    BallFamily fam;
    double p_c[3] = {0, 0, 1};
    fam.balls.push_back({store.append_unit(p_c), fr * fam.M, 0});
    BallSelection sel;
    sel.indices = {0};
    sel.scale = 1.0;

    double a_c[3] = {std::sin(0.05), 0, std::cos(0.05)};
    double b_c[3] = {-std::sin(0.05), 0.001, std::cos(0.05)};
    PointId a = store.append_unit(a_c), b = store.append_unit(b_c);
    double total = store.distance(a, b);
    std::vector<PointId> verts{a};
    int hops = static_cast<int>(std::ceil(total / (fr / 4)));
    for (int i = 1; i < hops; ++i)
        verts.push_back(store.append_radial_point(a, b, total * i / hops));
    verts.push_back(b);
    DiscreteChain d(1);
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        DiscreteSimplex s;
        s.verts = {verts[i], verts[i + 1]};
        d.add(s, 1);
    }

    DetourReport rep = disjoint_detour(d, fam, sel, fr, false, store);
    std::string once = detour_report_to_json(rep, store).dump();
    std::string twice = detour_report_to_json(rep, store).dump();
    CHECK(once == twice);
}

TEST_CASE("nonvanish certificate re-verifies from serialized data alone") {
    PointStore store(3);
    FamilyParams params;
    params.levels = 1;
    params.count_per_level = 3;
    params.base_radius = 1.2;
    params.seed = 10;
    params.spacing = 2.0;
    BallFamily fam = build_family(params, store);
    auto net = sample_net(0.3, nullptr, 6, store);

    NonvanishCertificate cert = nonvanishing_certificate({0, 1, 2}, 0.25, 3, fam, net, store);
    CHECK(cert.expected_rank == 2);
    CHECK(cert.rank == 2);

    Json j = nonvanish_to_json(cert, fam, cert.u_cover, store);
    NonvanishReverify rv = reverify_nonvanish(j);
    CHECK(rv.ok);
    CHECK(rv.rank == cert.rank);
}
