#ifndef STRATAFILL_COVER_HPP
#define STRATAFILL_COVER_HPP

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratafill/chain.hpp"
#include "stratafill/geometry.hpp"
#include "stratafill/model.hpp"

namespace stratafill {

using Bits = boost::dynamic_bitset<>;

/// An open set over the working net. Ball-shaped and staged sets keep an
/// intensional descriptor so membership of points created later (fill
/// barycenters, detour points) stays decidable; every combinatorial predicate
/// is decided on the net through the cached bitset.
struct OpenSet {
    enum class Kind { Ball, Explicit, Staged };

    std::uint32_t id = 0;
    Kind kind = Kind::Ball;

    // Ball descriptor.
    std::vector<double> center;
    double radius = 0.0;

    /// Sets of shape U - X_{floor-1}; 0 or 1 means no restriction.
    int stratum_floor = 0;

    // Staged descriptor (limit-cover sets): stage s covers the stratum with
    // index first_stage + s; members grow by eps-neighbourhood steps.
    int first_stage = 0;
    std::vector<std::vector<PointId>> stage_members;
    std::vector<double> stage_eps;

    // Explicit descriptor.
    std::vector<PointId> members;

    Bits bits;  // membership over the cover's net positions

    // Provenance (generating point / level for limit covers).
    PointId anchor = 0;
    int level = 0;
};

/// A finite open cover of the working net.
struct Cover {
    const PointStore* store = nullptr;
    const BallFamily* family = nullptr;  // needed by stratum floors and stages
    std::vector<int> strata_indices;     // stage s corresponds to X_{strata_indices[s]}
    std::vector<PointId> net;
    std::vector<OpenSet> sets;

    std::size_t net_position(PointId p) const;
    bool on_net(PointId p) const;

    /// Geometric membership; decidable for arbitrary store points.
    bool member(const OpenSet& s, PointId x) const;
    bool member(std::size_t set_index, PointId x) const { return member(sets[set_index], x); }

    /// Every net point belongs to at least one set.
    bool covers_net() const;

    void rebuild_bits();
};

/// Cover of the net by equal-radius balls centred on a subset of net points;
/// centres are chosen greedily so the balls cover the net.
Cover make_ball_cover(const PointStore& store, std::span<const PointId> net, double radius,
                      const BallFamily* family = nullptr);

/// Like make_ball_cover with explicitly given centres.
Cover make_ball_cover_at(const PointStore& store, std::span<const PointId> net,
                         std::span<const PointId> centers, double radius,
                         const BallFamily* family = nullptr);

/// Single-set cover of the whole net (the coarsest cover).
Cover make_whole_space_cover(const PointStore& store, std::span<const PointId> net,
                             const BallFamily* family = nullptr);

/// Rebuild the same descriptors over a different net (cover restriction).
Cover restrict_cover(const Cover& cover, std::span<const PointId> net);

/// Finite cover of S - F by open geodesic balls of diameter <= max_diam, none
/// containing a point of F.
Cover convex_cover(const PointStore& store, std::span<const PointId> net,
                   std::span<const PointId> forbidden, double max_diam,
                   const BallFamily* family = nullptr);

bool is_tiny(std::span<const PointId> points, const Cover& cover);
bool is_tiny(std::span<const PointId> points, const Cover& cover, std::uint32_t* witness_set);
bool is_fine(const DiscreteChain& c, const Cover& cover);

struct RefinementWitness {
    bool holds = false;
    std::vector<std::uint32_t> spouse;  // per source set: smallest containing target id
    std::uint32_t failing_set = 0;
};

/// Every O'-set is contained in some O-set (decided on the net bits).
RefinementWitness is_refinement(const Cover& fine, const Cover& coarse);

struct SuperRefinementWitness {
    bool holds = false;
    std::vector<std::uint32_t> parent;  // per net position
    PointId failing_point = 0;
};

/// For each net point, the union of all O'-sets through it lies in one O-set.
SuperRefinementWitness is_super_refinement(const Cover& fine, const Cover& coarse);

/// Largest lambda such that every net ball of radius lambda lies in a cover
/// set, computed as min over net points of max over containing sets of the
/// containment depth.
double lebesgue_number(const Cover& cover);
double lebesgue_number(const Cover& cover, std::span<const PointId> subnet);

enum class FamilyMapKind { Child, Spouse, Parent, Sibling };

/// One of the four selection maps between covers and points. Child and spouse
/// are indexed by source-set id; parent and sibling are defined on net
/// positions of the fine cover's net.
struct FamilyMap {
    FamilyMapKind kind = FamilyMapKind::Child;
    const Cover* fine = nullptr;    // O' (or O'' for sibling)
    const Cover* coarse = nullptr;  // O
    std::vector<PointId> set_to_point;
    std::vector<std::uint32_t> set_to_set;
    std::vector<std::uint32_t> point_to_set;
    std::vector<PointId> point_to_point;
};

struct FamilyMapOptions {
    /// For sibling maps: the intermediate cover the parent map lands in.
    const Cover* via = nullptr;
};

/// Deterministic construction (lowest admissible index); re-verifies the
/// defining containments and errors with NO_VALID_MAP when the required
/// refinement relation fails.
FamilyMap make_family_map(FamilyMapKind kind, const Cover& fine, const Cover& coarse,
                          const FamilyMapOptions& options = {});

/// Vertex-wise application of a family map, with per-simplex well-definedness
/// re-checked (WELLDEF_FAILED names the offending simplex).
NerveChain apply_spouse(const FamilyMap& m, const NerveChain& c);
DiscreteChain apply_child(const FamilyMap& m, const NerveChain& c);
NerveChain apply_parent(const FamilyMap& m, const DiscreteChain& c);
DiscreteChain apply_sibling(const FamilyMap& m, const DiscreteChain& c);

/// Prism chain homotopy between two same-kind family maps:
/// H[a0..an] = sum_i (-1)^i [f a0 .. f ai, g ai .. g an].
NerveChain homotopy_spouse(const FamilyMap& f, const FamilyMap& g, const NerveChain& c);
DiscreteChain homotopy_child(const FamilyMap& f, const FamilyMap& g, const NerveChain& c);
NerveChain homotopy_parent(const FamilyMap& f, const FamilyMap& g, const DiscreteChain& c);
DiscreteChain homotopy_sibling(const FamilyMap& f, const FamilyMap& g, const DiscreteChain& c);

/// For a verified double super-refinement O'' << O' << O and pairwise
/// intersecting O''-sets, an O-set containing them all. NOT_FOUND signals an
/// invalid certificate chain.
std::uint32_t super_union_bound(const Cover& finest, const Cover& middle, const Cover& coarse,
                                std::span<const std::uint32_t> set_ids);

/// Limit-cover construction over a truncated stratum tower.
struct LimitCover {
    Cover u_cover;  // the U_p sets
    Cover v_cover;  // V_p = U_p - X_{level-1}
    std::vector<double> eps;
    std::vector<double> eta;
    std::vector<std::vector<PointId>> anchors;  // per level
    int retries = 0;
};

/// Plain construction with a given epsilon sequence (one per stratum level).
LimitCover build_limit_cover(const BallFamily& family, const PointStore& store,
                             std::span<const StratumNet> strata, std::span<const double> eps_seq);

/// Super-refining variant: epsilons are chosen numerically so the emitted
/// V-cover super-refines the target (halving retries, then TOWER_FAILED).
LimitCover build_limit_cover_super(const BallFamily& family, const PointStore& store,
                                   std::span<const StratumNet> strata, const Cover& target,
                                   int max_retries = 12);

/// Shrinking construction of a super-refinement of `target` by small balls on
/// a denser net; radius halving until is_super_refinement certifies, then
/// TOWER_FAILED. Returns the certified cover. The plain overload derives the
/// starting radius from the Lebesgue number (ball covers only); the hint
/// overload starts from the given radius and works for any cover.
Cover build_super_refinement(const Cover& target, int max_halvings = 16);
Cover build_super_refinement_hint(const Cover& target, double radius_hint, int max_halvings = 16);

}  // namespace stratafill

#endif
