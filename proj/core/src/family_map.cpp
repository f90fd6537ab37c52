#include <algorithm>

#include "stratafill/cover.hpp"

namespace stratafill {

namespace {

const OpenSet& set_by_id(const Cover& c, std::uint32_t id) {
    for (const auto& s : c.sets)
        if (s.id == id) return s;
    throw OpError(ErrorCode::PRECONDITION_FAILED, "unknown set id");
}

PointId lowest_member(const Cover& c, const OpenSet& s) {
    for (std::size_t i = 0; i < c.net.size(); ++i)
        if (s.bits.test(i)) return c.net[i];
    throw OpError(ErrorCode::NO_VALID_MAP, "cover set is empty on the net");
}

[[noreturn]] void bad_simplex(const char* what) {
    throw OpError(ErrorCode::WELLDEF_FAILED, what);
}

/// H[a0..an] = sum_i (-1)^i [F(a0)..F(a_i), G(a_i)..G(a_n)], the prism chain
/// between two vertex-level maps; dH + Hd = G_* - F_* holds exactly.
template <class InId, class OutId, class FFn, class GFn, class CheckFn>
Chain<OutId> prism(const Chain<InId>& c, FFn&& f, GFn&& g, CheckFn&& check) {
    Chain<OutId> out(c.dimension() + 1);
    if (c.dimension() < 0) return out;
    for (const auto& [s, a] : c.terms()) {
        const auto& v = s.verts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            Simplex<OutId> t;
            t.verts.reserve(v.size() + 1);
            for (std::size_t j = 0; j <= i; ++j) t.verts.push_back(f(v[j]));
            for (std::size_t j = i; j < v.size(); ++j) t.verts.push_back(g(v[j]));
            check(t);
            out.add(t, (i % 2 == 0) ? a : -a);
        }
    }
    return out;
}

template <class InId, class OutId, class FFn, class CheckFn>
Chain<OutId> vertex_map(const Chain<InId>& c, FFn&& f, CheckFn&& check) {
    Chain<OutId> out(c.dimension());
    for (const auto& [s, a] : c.terms()) {
        Simplex<OutId> t;
        t.verts.reserve(s.verts.size());
        for (const auto& v : s.verts) t.verts.push_back(f(v));
        check(t);
        out.add(t, a);
    }
    return out;
}

}  // namespace

FamilyMap make_family_map(FamilyMapKind kind, const Cover& fine, const Cover& coarse,
                          const FamilyMapOptions& options) {
    FamilyMap m;
    m.kind = kind;
    m.fine = &fine;
    m.coarse = &coarse;
    switch (kind) {
        case FamilyMapKind::Child: {
            // f(O) in O for every set of the fine cover.
            m.set_to_point.reserve(fine.sets.size());
            for (const auto& s : fine.sets) m.set_to_point.push_back(lowest_member(fine, s));
            break;
        }
        case FamilyMapKind::Spouse: {
            auto w = is_refinement(fine, coarse);
            if (!w.holds)
                throw OpError(ErrorCode::NO_VALID_MAP, "not a refinement: no spouse map exists");
            m.set_to_set = std::move(w.spouse);
            break;
        }
        case FamilyMapKind::Parent: {
            auto w = is_super_refinement(fine, coarse);
            if (!w.holds)
                throw OpError(ErrorCode::NO_VALID_MAP,
                              "not a super-refinement: no parent map exists");
            m.point_to_set = std::move(w.parent);
            break;
        }
        case FamilyMapKind::Sibling: {
            // Parent into `via` (or coarse), then child of that cover.
            const Cover& mid = options.via ? *options.via : coarse;
            auto w = is_super_refinement(fine, mid);
            if (!w.holds)
                throw OpError(ErrorCode::NO_VALID_MAP,
                              "not a super-refinement: no sibling map exists");
            m.point_to_point.resize(fine.net.size());
            for (std::size_t i = 0; i < fine.net.size(); ++i)
                m.point_to_point[i] = lowest_member(mid, set_by_id(mid, w.parent[i]));
            break;
        }
    }
    return m;
}

NerveChain apply_spouse(const FamilyMap& m, const NerveChain& c) {
    if (m.kind != FamilyMapKind::Spouse)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "not a spouse map");
    return vertex_map<SetId, SetId>(
        c, [&](SetId s) { return SetId{m.set_to_set.at(s.v)}; },
        [&](const NerveSimplex& t) {
            Bits common = set_by_id(*m.coarse, t.verts.front().v).bits;
            for (const auto& v : t.verts) common &= set_by_id(*m.coarse, v.v).bits;
            if (common.none()) bad_simplex("spouse image tuple has empty intersection");
        });
}

DiscreteChain apply_child(const FamilyMap& m, const NerveChain& c) {
    if (m.kind != FamilyMapKind::Child)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "not a child map");
    return vertex_map<SetId, PointId>(
        c, [&](SetId s) { return m.set_to_point.at(s.v); },
        [&](const DiscreteSimplex& t) {
            if (!is_tiny(t.verts, *m.coarse)) bad_simplex("child image simplex is not tiny");
        });
}

NerveChain apply_parent(const FamilyMap& m, const DiscreteChain& c) {
    if (m.kind != FamilyMapKind::Parent)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "not a parent map");
    return vertex_map<PointId, SetId>(
        c, [&](PointId p) { return SetId{m.point_to_set.at(m.fine->net_position(p))}; },
        [&](const NerveSimplex& t) {
            Bits common = set_by_id(*m.coarse, t.verts.front().v).bits;
            for (const auto& v : t.verts) common &= set_by_id(*m.coarse, v.v).bits;
            if (common.none()) bad_simplex("parent image tuple has empty intersection");
        });
}

DiscreteChain apply_sibling(const FamilyMap& m, const DiscreteChain& c) {
    if (m.kind != FamilyMapKind::Sibling)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "not a sibling map");
    return vertex_map<PointId, PointId>(
        c, [&](PointId p) { return m.point_to_point.at(m.fine->net_position(p)); },
        [&](const DiscreteSimplex& t) {
            if (!is_tiny(t.verts, *m.coarse)) bad_simplex("sibling image simplex is not tiny");
        });
}

namespace {
void require_same_shape(const FamilyMap& f, const FamilyMap& g) {
    if (f.kind != g.kind || f.fine != g.fine || f.coarse != g.coarse)
        throw OpError(ErrorCode::PRECONDITION_FAILED,
                      "homotopy requires two maps of the same kind and covers");
}
}  // namespace

NerveChain homotopy_spouse(const FamilyMap& f, const FamilyMap& g, const NerveChain& c) {
    require_same_shape(f, g);
    return prism<SetId, SetId>(
        c, [&](SetId s) { return SetId{f.set_to_set.at(s.v)}; },
        [&](SetId s) { return SetId{g.set_to_set.at(s.v)}; },
        [&](const NerveSimplex& t) {
            Bits common = set_by_id(*f.coarse, t.verts.front().v).bits;
            for (const auto& v : t.verts) common &= set_by_id(*f.coarse, v.v).bits;
            if (common.none()) bad_simplex("spouse prism tuple has empty intersection");
        });
}

DiscreteChain homotopy_child(const FamilyMap& f, const FamilyMap& g, const NerveChain& c) {
    require_same_shape(f, g);
    return prism<SetId, PointId>(
        c, [&](SetId s) { return f.set_to_point.at(s.v); },
        [&](SetId s) { return g.set_to_point.at(s.v); },
        [&](const DiscreteSimplex& t) {
            if (!is_tiny(t.verts, *f.coarse)) bad_simplex("child prism simplex is not tiny");
        });
}

NerveChain homotopy_parent(const FamilyMap& f, const FamilyMap& g, const DiscreteChain& c) {
    require_same_shape(f, g);
    return prism<PointId, SetId>(
        c, [&](PointId p) { return SetId{f.point_to_set.at(f.fine->net_position(p))}; },
        [&](PointId p) { return SetId{g.point_to_set.at(g.fine->net_position(p))}; },
        [&](const NerveSimplex& t) {
            Bits common = set_by_id(*f.coarse, t.verts.front().v).bits;
            for (const auto& v : t.verts) common &= set_by_id(*f.coarse, v.v).bits;
            if (common.none()) bad_simplex("parent prism tuple has empty intersection");
        });
}

DiscreteChain homotopy_sibling(const FamilyMap& f, const FamilyMap& g, const DiscreteChain& c) {
    require_same_shape(f, g);
    return prism<PointId, PointId>(
        c, [&](PointId p) { return f.point_to_point.at(f.fine->net_position(p)); },
        [&](PointId p) { return g.point_to_point.at(g.fine->net_position(p)); },
        [&](const DiscreteSimplex& t) {
            if (!is_tiny(t.verts, *f.coarse)) bad_simplex("sibling prism simplex is not tiny");
        });
}

}  // namespace stratafill
