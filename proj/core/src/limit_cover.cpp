#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "stratafill/cover.hpp"

namespace stratafill {

namespace {

struct Universe {
    std::vector<PointId> points;          // sorted
    std::vector<int> level;               // per point: 0-based stratum level
    std::vector<std::vector<PointId>> by_level;
};

Universe build_universe(const BallFamily& family, const PointStore& store,
                        std::span<const StratumNet> strata) {
    Universe u;
    std::set<PointId> all;
    for (const auto& s : strata) all.insert(s.points.begin(), s.points.end());
    u.by_level.resize(strata.size());
    for (PointId p : all) {
        int lvl = -1;
        for (std::size_t j = 0; j < strata.size(); ++j) {
            if (stratum_membership(family, store, p, strata[j].n)) {
                lvl = static_cast<int>(j);
                break;
            }
        }
        if (lvl < 0) continue;  // beyond the truncation
        u.points.push_back(p);
        u.level.push_back(lvl);
        u.by_level[lvl].push_back(p);
    }
    return u;
}

std::vector<std::vector<PointId>> pick_anchors(const PointStore& store, const Universe& u,
                                               std::span<const double> eps) {
    // Greedy: within each level, keep a point unless an earlier anchor of the
    // same level already covers it at that level's epsilon.
    std::vector<std::vector<PointId>> anchors(u.by_level.size());
    for (std::size_t lvl = 0; lvl < u.by_level.size(); ++lvl) {
        for (PointId p : u.by_level[lvl]) {
            bool covered = false;
            for (PointId a : anchors[lvl])
                if (store.distance(a, p) < eps[lvl]) {
                    covered = true;
                    break;
                }
            if (!covered) anchors[lvl].push_back(p);
        }
    }
    return anchors;
}

/// Grow the staged member lists of one set through all stages.
void grow_stages(const PointStore& store, const Universe& u, OpenSet& s,
                 std::span<const double> eps, int last_level) {
    int k = s.level;
    s.stage_members.clear();
    s.stage_eps.clear();
    for (int n = k; n <= last_level; ++n) {
        double e = eps[n];
        std::vector<PointId> members;
        if (n == k) {
            for (std::size_t i = 0; i < u.points.size(); ++i)
                if (u.level[i] <= n && store.distance(s.anchor, u.points[i]) < e)
                    members.push_back(u.points[i]);
        } else {
            const auto& prev = s.stage_members.back();
            for (std::size_t i = 0; i < u.points.size(); ++i) {
                if (u.level[i] > n) continue;
                PointId p = u.points[i];
                for (PointId q : prev) {
                    if (store.distance(p, q) < e) {
                        members.push_back(p);
                        break;
                    }
                }
            }
        }
        s.stage_members.push_back(std::move(members));
        s.stage_eps.push_back(e);
    }
}

LimitCover assemble(const BallFamily& family, const PointStore& store,
                    std::span<const StratumNet> strata, const Universe& u,
                    const std::vector<std::vector<PointId>>& anchors,
                    std::span<const double> eps, std::span<const double> eta) {
    LimitCover out;
    out.eps.assign(eps.begin(), eps.end());
    out.eta.assign(eta.begin(), eta.end());
    out.anchors = anchors;

    Cover base;
    base.store = &store;
    base.family = &family;
    for (const auto& s : strata) base.strata_indices.push_back(s.n);
    base.net = u.points;

    std::uint32_t id = 0;
    int last = static_cast<int>(strata.size()) - 1;
    for (std::size_t lvl = 0; lvl < anchors.size(); ++lvl) {
        for (PointId a : anchors[lvl]) {
            OpenSet s;
            s.id = id++;
            s.kind = OpenSet::Kind::Staged;
            s.anchor = a;
            s.level = static_cast<int>(lvl);
            s.first_stage = static_cast<int>(lvl);
            grow_stages(store, u, s, eps, last);
            base.sets.push_back(std::move(s));
        }
    }
    base.rebuild_bits();
    out.u_cover = base;

    out.v_cover = base;
    for (auto& s : out.v_cover.sets) s.stratum_floor = s.level + 1;
    out.v_cover.rebuild_bits();
    return out;
}

}  // namespace

LimitCover build_limit_cover(const BallFamily& family, const PointStore& store,
                             std::span<const StratumNet> strata, std::span<const double> eps_seq) {
    if (strata.empty()) throw OpError(ErrorCode::PRECONDITION_FAILED, "no strata given");
    if (eps_seq.size() != strata.size())
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need one epsilon per stratum level");
    Universe u = build_universe(family, store, strata);
    auto anchors = pick_anchors(store, u, eps_seq);
    std::vector<double> eta(eps_seq.size(), 0.0);
    return assemble(family, store, strata, u, anchors, eps_seq, eta);
}

LimitCover build_limit_cover_super(const BallFamily& family, const PointStore& store,
                                   std::span<const StratumNet> strata, const Cover& target,
                                   int max_retries) {
    if (strata.empty()) throw OpError(ErrorCode::PRECONDITION_FAILED, "no strata given");
    Universe u = build_universe(family, store, strata);
    if (target.net != u.points)
        throw OpError(ErrorCode::PRECONDITION_FAILED,
                      "target cover must live on the strata universe net");

    const std::size_t levels = strata.size();

    // Subnets X_{n_0} <= ... for the per-level Lebesgue numbers.
    std::vector<std::vector<PointId>> subnet(levels);
    for (std::size_t j = 0; j < levels; ++j)
        for (std::size_t i = 0; i < u.points.size(); ++i)
            if (u.level[i] <= static_cast<int>(j)) subnet[j].push_back(u.points[i]);

    std::vector<double> lambda(levels);
    for (std::size_t j = 0; j < levels; ++j) lambda[j] = lebesgue_number(target, subnet[j]);

    double scale = 1.0;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        std::vector<double> eps(levels, 0.0), eta(levels, 0.0);
        eps[0] = scale * lambda[0] / 10.0;
        eta[0] = scale * lambda[0] / 5.0;

        Universe uu = u;
        auto anchors = pick_anchors(store, uu, eps);

        // Incremental build with the good-set registry driving the deltas.
        struct SetState {
            OpenSet set;
        };
        std::vector<SetState> sets;
        std::uint32_t id = 0;
        for (std::size_t lvl = 0; lvl < anchors.size(); ++lvl)
            for (PointId a : anchors[lvl]) {
                SetState st;
                st.set.id = id++;
                st.set.kind = OpenSet::Kind::Staged;
                st.set.anchor = a;
                st.set.level = static_cast<int>(lvl);
                st.set.first_stage = static_cast<int>(lvl);
                sets.push_back(std::move(st));
            }

        auto members_at = [&](const SetState& st, int n) -> const std::vector<PointId>* {
            int idx = n - st.set.level;
            if (idx < 0 || idx >= static_cast<int>(st.set.stage_members.size())) return nullptr;
            return &st.set.stage_members[idx];
        };

        // Registry: realized pointwise-intersecting collections and their
        // certified containing target set.
        std::map<std::vector<std::uint32_t>, std::uint32_t> registry;
        bool failed = false;

        auto grow_one_stage = [&](int n) {
            for (auto& st : sets) {
                if (st.set.level > n) continue;
                double e = eps[n];
                std::vector<PointId> members;
                if (st.set.level == n) {
                    for (std::size_t i = 0; i < uu.points.size(); ++i)
                        if (uu.level[i] <= n && store.distance(st.set.anchor, uu.points[i]) < e)
                            members.push_back(uu.points[i]);
                } else {
                    const auto* prev = members_at(st, n - 1);
                    for (std::size_t i = 0; i < uu.points.size(); ++i) {
                        if (uu.level[i] > n) continue;
                        PointId p = uu.points[i];
                        for (PointId q : *prev)
                            if (store.distance(p, q) < e) {
                                members.push_back(p);
                                break;
                            }
                    }
                }
                st.set.stage_members.push_back(std::move(members));
                st.set.stage_eps.push_back(e);
            }
        };

        auto update_registry = [&](int n) -> double {
            // For each universe point realize the collection of sets whose
            // stage-n members contain it, certify a containing target set,
            // and return the smallest separation from certified unions to the
            // complement of their target set in the next subnet.
            std::map<PointId, std::size_t> pos;
            for (std::size_t i = 0; i < uu.points.size(); ++i) pos[uu.points[i]] = i;

            std::vector<Bits> stage_bits(sets.size(), Bits(uu.points.size()));
            for (std::size_t s = 0; s < sets.size(); ++s) {
                const auto* m = members_at(sets[s], n);
                if (!m) continue;
                for (PointId p : *m) stage_bits[s].set(pos[p]);
            }
            for (std::size_t i = 0; i < uu.points.size(); ++i) {
                if (uu.level[i] > n) continue;
                std::vector<std::uint32_t> J;
                for (std::size_t s = 0; s < sets.size(); ++s)
                    if (stage_bits[s].test(i)) J.push_back(sets[s].set.id);
                if (J.empty() || registry.count(J)) continue;
                Bits un(uu.points.size());
                for (std::uint32_t sid : J) un |= stage_bits[sid];
                bool found = false;
                for (const auto& o : target.sets)
                    if (un.is_subset_of(o.bits)) {
                        registry.emplace(J, o.id);
                        found = true;
                        break;
                    }
                if (!found) {
                    failed = true;
                    return 0.0;
                }
            }
            // Separation from the next subnet's complement of each target set.
            double delta = std::numeric_limits<double>::infinity();
            if (n + 1 >= static_cast<int>(levels)) return delta;
            for (const auto& [J, oid] : registry) {
                const OpenSet* target_set = nullptr;
                for (const auto& o : target.sets)
                    if (o.id == oid) target_set = &o;
                for (std::uint32_t sid : J) {
                    const auto* m = members_at(sets[sid], n);
                    if (!m) continue;
                    for (PointId p : *m)
                        for (PointId y : subnet[n + 1])
                            if (!target.member(*target_set, y))
                                delta = std::min(delta, store.distance(p, y));
                }
            }
            return delta;
        };

        grow_one_stage(0);
        for (int n = 0; n + 1 < static_cast<int>(levels) && !failed; ++n) {
            double delta = update_registry(n);
            if (failed) break;
            double bound = std::min({lambda[n + 1], eta[n], delta});
            eps[n + 1] = bound / 10.0;
            eta[n + 1] = bound / 5.0;
            grow_one_stage(n + 1);
        }
        if (!failed) update_registry(static_cast<int>(levels) - 1);

        if (!failed) {
            LimitCover out =
                assemble(family, store, strata, uu, anchors, eps, eta);
            out.retries = attempt;
            auto w = is_super_refinement(out.v_cover, target);
            if (w.holds) return out;
        }
        scale /= 2.0;
    }
    throw OpError(ErrorCode::TOWER_FAILED,
                  "limit cover construction failed to super-refine the target");
}

Cover build_super_refinement_hint(const Cover& target, double radius_hint, int max_halvings) {
    double radius = radius_hint;
    for (int i = 0; i < max_halvings; ++i) {
        Cover cand = make_ball_cover(*target.store, target.net, radius, target.family);
        cand.strata_indices = target.strata_indices;
        if (cand.covers_net()) {
            auto w = is_super_refinement(cand, target);
            if (w.holds) return cand;
        }
        radius /= 2.0;
    }
    throw OpError(ErrorCode::TOWER_FAILED, "could not build a super-refinement by shrinking");
}

Cover build_super_refinement(const Cover& target, int max_halvings) {
    // Lebesgue scans are cheap for ball covers (analytic depth); staged covers
    // go through the hint overload instead.
    for (const auto& s : target.sets)
        if (s.kind != OpenSet::Kind::Ball)
            throw OpError(ErrorCode::PRECONDITION_FAILED,
                          "use the radius-hint overload for non-ball covers");
    double lambda = lebesgue_number(target);
    return build_super_refinement_hint(target, lambda / 4.0, max_halvings);
}

}  // namespace stratafill
