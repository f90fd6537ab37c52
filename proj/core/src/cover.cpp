#include "stratafill/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stratafill {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::size_t Cover::net_position(PointId p) const {
    auto it = std::lower_bound(net.begin(), net.end(), p);
    if (it == net.end() || *it != p)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "point is not on the cover's net");
    return static_cast<std::size_t>(it - net.begin());
}

bool Cover::on_net(PointId p) const {
    auto it = std::lower_bound(net.begin(), net.end(), p);
    return it != net.end() && *it == p;
}

bool Cover::member(const OpenSet& s, PointId x) const {
    if (s.stratum_floor > 1) {
        // Sets of shape U - X_{floor-1}: floor is the 1-based level of the
        // generating point, so level >= 2 excludes the previous stratum.
        if (!family)
            throw OpError(ErrorCode::PRECONDITION_FAILED, "stratum floor needs a ball family");
        int idx = s.stratum_floor - 2;
        int stratum = strata_indices.empty() ? idx + 1 : strata_indices.at(idx);
        if (stratum_membership(*family, *store, x, stratum)) return false;
    }
    switch (s.kind) {
        case OpenSet::Kind::Ball:
            return store->distance_to(x, {s.center.data(), s.center.size()}) <
                   s.radius * (1.0 - 1e-15);
        case OpenSet::Kind::Explicit:
            return std::binary_search(s.members.begin(), s.members.end(), x);
        case OpenSet::Kind::Staged: {
            if (!family)
                throw OpError(ErrorCode::PRECONDITION_FAILED, "staged set needs a ball family");
            for (std::size_t stage = 0; stage < s.stage_members.size(); ++stage) {
                int level_index = s.first_stage + static_cast<int>(stage);
                int stratum = strata_indices.at(level_index);
                if (!stratum_membership(*family, *store, x, stratum)) continue;
                double eps = s.stage_eps[stage];
                if (stage == 0) {
                    if (store->distance(s.anchor, x) < eps) return true;
                } else {
                    for (PointId prev : s.stage_members[stage - 1])
                        if (store->distance(prev, x) < eps) return true;
                }
            }
            return false;
        }
    }
    return false;
}

bool Cover::covers_net() const {
    for (std::size_t i = 0; i < net.size(); ++i) {
        bool found = false;
        for (const auto& s : sets)
            if (s.bits.test(i)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

void Cover::rebuild_bits() {
    for (auto& s : sets) {
        s.bits.resize(net.size());
        s.bits.reset();
        for (std::size_t i = 0; i < net.size(); ++i)
            if (member(s, net[i])) s.bits.set(i);
    }
}

Cover make_ball_cover_at(const PointStore& store, std::span<const PointId> net,
                         std::span<const PointId> centers, double radius,
                         const BallFamily* family) {
    Cover cover;
    cover.store = &store;
    cover.family = family;
    cover.net.assign(net.begin(), net.end());
    std::sort(cover.net.begin(), cover.net.end());
    std::uint32_t id = 0;
    for (PointId c : centers) {
        OpenSet s;
        s.id = id++;
        s.kind = OpenSet::Kind::Ball;
        auto cc = store.coords(c);
        s.center.assign(cc.begin(), cc.end());
        s.radius = radius;
        s.anchor = c;
        cover.sets.push_back(std::move(s));
    }
    cover.rebuild_bits();
    return cover;
}

Cover make_ball_cover(const PointStore& store, std::span<const PointId> net, double radius,
                      const BallFamily* family) {
    // Greedy centre selection by net order: add a centre whenever the point is
    // not yet well inside a chosen ball. The quarter-radius margin keeps every
    // net point strictly inside some ball.
    std::vector<PointId> centers;
    const double keep = 0.75 * radius;
    for (PointId p : net) {
        bool covered = false;
        for (PointId c : centers)
            if (store.distance(p, c) < keep) {
                covered = true;
                break;
            }
        if (!covered) centers.push_back(p);
    }
    return make_ball_cover_at(store, net, centers, radius, family);
}

Cover make_whole_space_cover(const PointStore& store, std::span<const PointId> net,
                             const BallFamily* family) {
    Cover cover;
    cover.store = &store;
    cover.family = family;
    cover.net.assign(net.begin(), net.end());
    std::sort(cover.net.begin(), cover.net.end());
    OpenSet s;
    s.id = 0;
    s.kind = OpenSet::Kind::Ball;
    std::vector<double> c(store.ambient_dim(), 0.0);
    c[0] = 1.0;
    s.center = c;
    s.radius = 2.0 * kPi;  // everything
    cover.sets.push_back(std::move(s));
    cover.rebuild_bits();
    return cover;
}

Cover restrict_cover(const Cover& cover, std::span<const PointId> net) {
    Cover out = cover;
    out.net.assign(net.begin(), net.end());
    std::sort(out.net.begin(), out.net.end());
    out.rebuild_bits();
    // Drop sets that became empty on the new net.
    std::vector<OpenSet> kept;
    std::uint32_t id = 0;
    for (auto& s : out.sets)
        if (s.bits.any()) {
            s.id = id++;
            kept.push_back(std::move(s));
        }
    out.sets = std::move(kept);
    return out;
}

Cover convex_cover(const PointStore& store, std::span<const PointId> net,
                   std::span<const PointId> forbidden, double max_diam,
                   const BallFamily* family) {
    if (max_diam <= 0.0 || max_diam > kPi / 2.0)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "convex_cover needs 0 < max_diam <= pi/2");

    auto dist_to_f = [&](PointId p) {
        double d = std::numeric_limits<double>::infinity();
        for (PointId f : forbidden) d = std::min(d, store.distance(p, f));
        return d;
    };

    // Universe: net minus the forbidden points themselves.
    std::vector<PointId> universe;
    for (PointId p : net) {
        bool is_f = false;
        for (PointId f : forbidden)
            if (f == p || store.distance(p, f) < 1e-14) is_f = true;
        if (!is_f) universe.push_back(p);
    }

    // Candidate balls: radius capped by half the max diameter and by half the
    // distance to F, so no ball contains (or reaches) a forbidden point.
    struct Cand {
        PointId center;
        double radius;
    };
    std::vector<Cand> cands;
    cands.reserve(universe.size());
    for (PointId p : universe) {
        double r = std::min(max_diam / 2.0, 0.49 * dist_to_f(p));
        if (r > 1e-12) cands.push_back({p, r});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.radius != b.radius) return a.radius > b.radius;
        return a.center < b.center;
    });

    // Greedy: keep a ball when its centre region is not yet well covered.
    std::vector<Cand> chosen;
    for (const auto& c : cands) {
        bool covered = false;
        for (const auto& k : chosen)
            if (store.distance(c.center, k.center) < 0.5 * k.radius) {
                covered = true;
                break;
            }
        if (!covered) chosen.push_back(c);
    }

    Cover cover;
    cover.store = &store;
    cover.family = family;
    cover.net = universe;
    std::sort(cover.net.begin(), cover.net.end());
    std::uint32_t id = 0;
    for (const auto& c : chosen) {
        OpenSet s;
        s.id = id++;
        s.kind = OpenSet::Kind::Ball;
        auto cc = store.coords(c.center);
        s.center.assign(cc.begin(), cc.end());
        s.radius = c.radius;
        s.anchor = c.center;
        cover.sets.push_back(std::move(s));
    }
    cover.rebuild_bits();
    if (!cover.covers_net())
        throw OpError(ErrorCode::FILL_FAILED, "convex cover failed to cover the net");
    return cover;
}

bool is_tiny(std::span<const PointId> points, const Cover& cover, std::uint32_t* witness_set) {
    for (const auto& s : cover.sets) {
        bool all = true;
        for (PointId p : points)
            if (!cover.member(s, p)) {
                all = false;
                break;
            }
        if (all) {
            if (witness_set) *witness_set = s.id;
            return true;
        }
    }
    return false;
}

bool is_tiny(std::span<const PointId> points, const Cover& cover) {
    return is_tiny(points, cover, nullptr);
}

bool is_fine(const DiscreteChain& c, const Cover& cover) {
    for (const auto& [s, a] : c.terms())
        if (!is_tiny(s.verts, cover)) return false;
    return true;
}

namespace {
void require_shared_net(const Cover& a, const Cover& b) {
    if (a.net != b.net)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "covers do not share a net");
}
}  // namespace

RefinementWitness is_refinement(const Cover& fine, const Cover& coarse) {
    require_shared_net(fine, coarse);
    RefinementWitness w;
    w.spouse.resize(fine.sets.size());
    for (std::size_t i = 0; i < fine.sets.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < coarse.sets.size(); ++j) {
            if (fine.sets[i].bits.is_subset_of(coarse.sets[j].bits)) {
                w.spouse[i] = coarse.sets[j].id;
                found = true;
                break;
            }
        }
        if (!found) {
            w.holds = false;
            w.failing_set = fine.sets[i].id;
            return w;
        }
    }
    w.holds = true;
    return w;
}

SuperRefinementWitness is_super_refinement(const Cover& fine, const Cover& coarse) {
    require_shared_net(fine, coarse);
    SuperRefinementWitness w;
    w.parent.resize(fine.net.size());
    for (std::size_t i = 0; i < fine.net.size(); ++i) {
        Bits un(fine.net.size());
        for (const auto& s : fine.sets)
            if (s.bits.test(i)) un |= s.bits;
        bool found = false;
        for (std::size_t j = 0; j < coarse.sets.size(); ++j) {
            if (un.is_subset_of(coarse.sets[j].bits)) {
                w.parent[i] = coarse.sets[j].id;
                found = true;
                break;
            }
        }
        if (!found) {
            w.holds = false;
            w.failing_point = fine.net[i];
            return w;
        }
    }
    w.holds = true;
    return w;
}

double lebesgue_number(const Cover& cover) { return lebesgue_number(cover, cover.net); }

double lebesgue_number(const Cover& cover, std::span<const PointId> subnet) {
    const auto& store = *cover.store;
    double lambda = std::numeric_limits<double>::infinity();
    for (PointId x : subnet) {
        double best = 0.0;
        for (const auto& s : cover.sets) {
            if (!cover.member(s, x)) continue;
            double depth;
            if (s.kind == OpenSet::Kind::Ball) {
                // Analytic depth: the geodesic ball of this radius around x
                // is inside the set, so this underestimates the net depth.
                depth = s.radius - store.distance_to(x, {s.center.data(), s.center.size()});
                if (s.stratum_floor > 1) {
                    int idx = s.stratum_floor - 2;
                    int stratum =
                        cover.strata_indices.empty() ? idx + 1 : cover.strata_indices.at(idx);
                    for (PointId y : subnet)
                        if (stratum_membership(*cover.family, store, y, stratum))
                            depth = std::min(depth, store.distance(x, y));
                }
            } else {
                // Net-decided depth: nearest subnet point outside the set.
                depth = std::numeric_limits<double>::infinity();
                for (PointId y : subnet)
                    if (!cover.member(s, y)) depth = std::min(depth, store.distance(x, y));
            }
            best = std::max(best, depth);
        }
        if (best <= 0.0)
            throw OpError(ErrorCode::PRECONDITION_FAILED, "cover does not cover the net");
        lambda = std::min(lambda, best);
    }
    if (subnet.empty()) return 0.0;
    return std::min(lambda, kPi);  // the sphere's diameter caps every depth
}

std::uint32_t super_union_bound(const Cover& finest, const Cover& middle, const Cover& coarse,
                                std::span<const std::uint32_t> set_ids) {
    if (set_ids.empty()) throw OpError(ErrorCode::PRECONDITION_FAILED, "empty collection");
    require_shared_net(finest, middle);
    require_shared_net(middle, coarse);

    auto find_set = [](const Cover& c, std::uint32_t id) -> const OpenSet& {
        for (const auto& s : c.sets)
            if (s.id == id) return s;
        throw OpError(ErrorCode::PRECONDITION_FAILED, "unknown set id");
    };

    // For each member, find a middle-cover set containing it together with
    // the first member; all those middle sets share the first member's points,
    // so some coarse set contains their union.
    const OpenSet& first = find_set(finest, set_ids.front());
    Bits mid_union(middle.net.size());
    for (std::uint32_t id : set_ids) {
        const OpenSet& s = find_set(finest, id);
        Bits pair = first.bits | s.bits;
        bool found = false;
        for (const auto& m : middle.sets) {
            if (pair.is_subset_of(m.bits)) {
                mid_union |= m.bits;
                found = true;
                break;
            }
        }
        if (!found)
            throw OpError(ErrorCode::NOT_FOUND,
                          "no middle set contains the pair union (invalid certificates?)");
    }
    for (const auto& o : coarse.sets)
        if (mid_union.is_subset_of(o.bits)) return o.id;
    throw OpError(ErrorCode::NOT_FOUND, "no coarse set contains the union (invalid certificates?)");
}

}  // namespace stratafill
