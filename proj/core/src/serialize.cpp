#include "stratafill/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace stratafill {

std::string format_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void PointTable::add(PointId p) {
    if (index_.emplace(p, static_cast<std::uint32_t>(order_.size())).second) order_.push_back(p);
}

void PointTable::add_chain(const DiscreteChain& c) {
    for (const auto& [s, a] : c.terms())
        for (PointId v : s.verts) add(v);
}

std::uint32_t PointTable::index_of(PointId p) const {
    auto it = index_.find(p);
    if (it == index_.end())
        throw OpError(ErrorCode::IO_ERROR, "point not registered in the table");
    return it->second;
}

Json PointTable::to_json(const PointStore& store) const {
    Json pts = Json::array();
    for (PointId p : order_) {
        Json coords = Json::array();
        for (double v : store.coords(p)) coords.push_back(format_coord(v));
        pts.push_back(coords);
    }
    return pts;
}

std::vector<PointId> PointTable::load(const Json& j, PointStore& store) {
    std::vector<PointId> remap;
    for (const auto& coords : j) {
        std::vector<double> v;
        for (const auto& c : coords) v.push_back(std::stod(c.get<std::string>()));
        remap.push_back(store.append_exact_unit(v));
    }
    return remap;
}

Json chain_to_json(const DiscreteChain& c, const PointTable& table) {
    Json out;
    out["dimension"] = c.dimension();
    Json terms = Json::array();
    for (const auto& [s, a] : c.terms()) {
        Json t;
        Json verts = Json::array();
        for (PointId v : s.verts) verts.push_back(table.index_of(v));
        t["vertices"] = verts;
        t["coeff"] = a.str();
        terms.push_back(t);
    }
    out["terms"] = terms;
    return out;
}

DiscreteChain chain_from_json(const Json& j, const std::vector<PointId>& remap) {
    DiscreteChain c(j.at("dimension").get<int>());
    for (const auto& t : j.at("terms")) {
        DiscreteSimplex s;
        for (const auto& v : t.at("vertices")) s.verts.push_back(remap.at(v.get<std::size_t>()));
        c.add(s, Integer(t.at("coeff").get<std::string>()));
    }
    return c;
}

Json family_to_json(const BallFamily& f, const PointStore& store) {
    Json out;
    out["K"] = f.K;
    out["M"] = f.M;
    out["cutoff"] = format_coord(f.cutoff);
    out["params"] = {{"levels", f.params.levels},
                     {"base_radius", format_coord(f.params.base_radius)},
                     {"ratio", format_coord(f.params.ratio)},
                     {"count_per_level", f.params.count_per_level},
                     {"seed", f.params.seed},
                     {"spacing", format_coord(f.params.spacing)},
                     {"nest", f.params.nest}};
    Json balls = Json::array();
    for (const auto& b : f.balls) {
        Json e;
        Json coords = Json::array();
        for (double v : store.coords(b.center)) coords.push_back(format_coord(v));
        e["center"] = coords;
        e["r_p"] = format_coord(b.r_p);
        e["level"] = b.level;
        balls.push_back(e);
    }
    out["balls"] = balls;
    return out;
}

BallFamily family_from_json(const Json& j, PointStore& store) {
    BallFamily f;
    f.K = j.at("K").get<double>();
    f.M = j.at("M").get<double>();
    f.cutoff = std::stod(j.at("cutoff").get<std::string>());
    const auto& p = j.at("params");
    f.params.levels = p.at("levels").get<int>();
    f.params.base_radius = std::stod(p.at("base_radius").get<std::string>());
    f.params.ratio = std::stod(p.at("ratio").get<std::string>());
    f.params.count_per_level = p.at("count_per_level").get<int>();
    f.params.seed = p.at("seed").get<std::uint64_t>();
    f.params.spacing = std::stod(p.at("spacing").get<std::string>());
    f.params.nest = p.at("nest").get<bool>();
    for (const auto& e : j.at("balls")) {
        BallEntry b;
        std::vector<double> coords;
        for (const auto& c : e.at("center")) coords.push_back(std::stod(c.get<std::string>()));
        b.center = store.append_exact_unit(coords);
        b.r_p = std::stod(e.at("r_p").get<std::string>());
        b.level = e.at("level").get<int>();
        f.balls.push_back(b);
    }
    return f;
}

Json separation_report_to_json(const SeparationReport& rep) {
    Json out;
    out["pairs_checked"] = rep.pairs_checked;
    out["ok"] = rep.ok();
    Json v = Json::array();
    for (const auto& viol : rep.violations)
        v.push_back({{"a", viol.a},
                     {"b", viol.b},
                     {"distance", format_coord(viol.distance)},
                     {"ratio", format_coord(viol.ratio)}});
    out["violations"] = v;
    return out;
}

Json detour_report_to_json(const DetourReport& rep, const PointStore& store) {
    Json out;
    out["delta"] = format_coord(rep.delta);
    out["bands"] = rep.bands;
    out["ok"] = rep.ok();
    PointTable table;
    table.add_chain(rep.input);
    table.add_chain(rep.output);
    if (rep.homotopy) table.add_chain(*rep.homotopy);
    out["points"] = table.to_json(store);
    out["input"] = chain_to_json(rep.input, table);
    out["output"] = chain_to_json(rep.output, table);
    if (rep.homotopy) out["homotopy"] = chain_to_json(*rep.homotopy, table);
    Json checks = Json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"measured", format_coord(c.measured)},
                          {"bound", format_coord(c.bound)}});
    out["checks"] = checks;
    return out;
}

Json homology_to_json(const HomologyGroups& h) {
    Json out;
    out["reduced"] = h.reduced;
    Json degs = Json::array();
    for (const auto& d : h.degrees) {
        Json e;
        e["betti"] = d.betti;
        Json tors = Json::array();
        for (const auto& t : d.torsion) tors.push_back(t.str());
        e["torsion"] = tors;
        degs.push_back(e);
    }
    out["degrees"] = degs;
    return out;
}

Json matrix_to_json(const IntMatrix& m) {
    Json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m.at(i, j).str());
        rows.push_back(r);
    }
    out["entries"] = rows;
    return out;
}

IntMatrix matrix_from_json(const Json& j) {
    IntMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto& rows = j.at("entries");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < m.cols(); ++c)
            m.at(i, c) = Integer(rows[i][c].get<std::string>());
    return m;
}

Json da_report_to_json(const DACheckReport& rep, const PointStore& store) {
    Json out;
    out["degree"] = rep.degree;
    out["samples"] = rep.samples;
    out["passed"] = rep.passed;
    out["seed"] = rep.seed;
    out["notes"] = rep.notes;
    Json ocs = Json::array();
    for (const auto& oc : rep.outcomes) {
        PointTable table;
        table.add_chain(oc.cycle);
        table.add_chain(oc.witness);
        Json e;
        e["pass"] = oc.pass;
        e["sampler"] = oc.sampler;
        e["note"] = oc.note;
        e["points"] = table.to_json(store);
        e["cycle"] = chain_to_json(oc.cycle, table);
        e["witness"] = chain_to_json(oc.witness, table);
        ocs.push_back(e);
    }
    out["outcomes"] = ocs;
    return out;
}

Json cover_to_json(const Cover& cover, const PointTable& table) {
    Json out;
    Json net = Json::array();
    for (PointId p : cover.net) net.push_back(table.index_of(p));
    out["net"] = net;
    Json sets = Json::array();
    for (const auto& s : cover.sets) {
        Json e;
        e["id"] = s.id;
        switch (s.kind) {
            case OpenSet::Kind::Ball: {
                e["kind"] = "ball";
                Json c = Json::array();
                for (double v : s.center) c.push_back(format_coord(v));
                e["center"] = c;
                e["radius"] = format_coord(s.radius);
                break;
            }
            case OpenSet::Kind::Explicit: {
                e["kind"] = "explicit";
                Json mem = Json::array();
                for (PointId p : s.members) mem.push_back(table.index_of(p));
                e["members"] = mem;
                break;
            }
            case OpenSet::Kind::Staged:
                throw OpError(ErrorCode::IO_ERROR, "staged sets serialize via their cover builder");
        }
        e["stratum_floor"] = s.stratum_floor;
        Json bits = Json::array();
        for (std::size_t i = 0; i < cover.net.size(); ++i)
            if (s.bits.test(i)) bits.push_back(i);
        e["member_positions"] = bits;
        sets.push_back(e);
    }
    out["sets"] = sets;
    return out;
}

Json nonvanish_to_json(const NonvanishCertificate& cert, const BallFamily& family,
                       const Cover& u_cover, const PointStore& store) {
    Json out;
    out["schema"] = "stratafill.nonvanish.v1";
    out["k"] = cert.k;
    out["rank"] = cert.rank;
    out["expected_rank"] = cert.expected_rank;
    out["boundary_search_done"] = cert.boundary_search_done;
    out["notes"] = cert.notes;
    out["family"] = family_to_json(family, store);
    Json punct = Json::array();
    for (std::size_t i : cert.punctures) punct.push_back(i);
    out["punctures"] = punct;

    PointTable table;
    for (PointId p : u_cover.net) table.add(p);
    for (const auto& rep : cert.representatives) table.add_chain(rep.disc);
    out["points"] = table.to_json(store);
    out["u_cover"] = cover_to_json(u_cover, table);
    Json reps = Json::array();
    for (const auto& rep : cert.representatives) {
        Json e;
        e["class_index"] = rep.class_index;
        e["stratum"] = rep.stratum;
        e["cycle"] = chain_to_json(rep.disc, table);
        e["derivation"] = rep.derivation;
        reps.push_back(e);
    }
    out["representatives"] = reps;
    out["class_matrix"] = matrix_to_json(cert.class_matrix);
    return out;
}

NonvanishReverify reverify_nonvanish(const Json& j) {
    NonvanishReverify out;
    out.stored_rank = j.at("rank").get<std::size_t>();
    const int k = j.at("k").get<int>();

    PointStore store(k + 2);
    BallFamily family = family_from_json(j.at("family"), store);
    std::vector<PointId> remap = PointTable::load(j.at("points"), store);

    // Rebuild the convex cover from descriptors on the serialized net.
    Cover u_cover;
    u_cover.store = &store;
    u_cover.family = &family;
    for (const auto& idx : j.at("u_cover").at("net"))
        u_cover.net.push_back(remap.at(idx.get<std::size_t>()));
    std::sort(u_cover.net.begin(), u_cover.net.end());
    for (const auto& e : j.at("u_cover").at("sets")) {
        OpenSet s;
        s.id = e.at("id").get<std::uint32_t>();
        if (e.at("kind").get<std::string>() != "ball")
            throw OpError(ErrorCode::IO_ERROR, "nonvanish cover must be ball-shaped");
        s.kind = OpenSet::Kind::Ball;
        for (const auto& c : e.at("center"))
            s.center.push_back(std::stod(c.get<std::string>()));
        s.radius = std::stod(e.at("radius").get<std::string>());
        s.stratum_floor = e.at("stratum_floor").get<int>();
        u_cover.sets.push_back(std::move(s));
    }
    u_cover.rebuild_bits();

    Cover o1 = build_super_refinement(u_cover);
    Cover o2 = build_super_refinement(o1);
    NerveComplex nerve_o1 = nerve(o1, k + 1);
    HomologyBasisQ basis = homology_basis(nerve_o1, k);

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

    const auto& reps = j.at("representatives");
    IntMatrix classes(basis.cycles.cols(), reps.size());
    std::size_t col = 0;
    for (const auto& e : reps) {
        DiscreteChain disc = chain_from_json(e.at("cycle"), remap);
        if (disc.is_zero()) {
            ++col;
            continue;
        }
        NerveChain image(k);
        for (const auto& [s, a] : disc.terms()) {
            NerveSimplex t;
            for (PointId v : s.verts) t.verts.push_back(SetId{parent_of(v)});
            image.add(t, a);
        }
        auto vec = chain_to_vector(nerve_o1, image);
        auto coords = basis.class_coordinates(vec);
        if (!coords) {
            out.notes.push_back("image is not a cycle class in the rebuilt nerve");
            out.ok = false;
            return out;
        }
        Integer denom = 1;
        for (const auto& q : *coords) denom = denom / gcd(denom, denominator(q)) * denominator(q);
        for (std::size_t i = 0; i < coords->size(); ++i)
            classes.at(i, col) = numerator((*coords)[i] * Rational(denom));
        ++col;
    }
    out.rank = bareiss_rank(classes);
    out.ok = out.rank == out.stored_rank;
    return out;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OpError(ErrorCode::IO_ERROR, "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw OpError(ErrorCode::IO_ERROR, std::string("parse error: ") + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream outf(path);
    if (!outf) throw OpError(ErrorCode::IO_ERROR, "cannot open " + path + " for writing");
    outf << j.dump(2) << "\n";
}

}  // namespace stratafill
