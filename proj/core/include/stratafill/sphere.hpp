#ifndef STRATAFILL_SPHERE_HPP
#define STRATAFILL_SPHERE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stratafill/chain.hpp"
#include "stratafill/geometry.hpp"
#include "stratafill/rng.hpp"

namespace stratafill {

/// Constants realizing the sphere fillers' contract: boundaries are matched
/// exactly, fineness targets are met whenever the input is g(delta)-fine, and
/// supports stay inside the K-enlarged annulus/ball.
struct FillerProfile {
    double k_fill = 9.0;

    /// Fineness modulus: a cycle must be g(delta)-fine to be fillable at
    /// fineness delta. Forced by the subdivision floor of 2x the boundary
    /// fineness.
    double g(double delta) const { return delta / 2.0; }

    /// m-fold composition g^(m).
    double g_iter(double delta, int m) const;
};

/// An integer chain of geodesic simplices. The vertex tuples are the whole
/// data; the simplex maps are the unique geodesic extensions, which exist
/// when the vertex-set diameter is at most pi/2.
struct StraightChain {
    DiscreteChain verts{0};
    double max_simplex_diameter = 0.0;
    bool valid = true;  // every simplex diameter <= pi/2

    int dimension() const { return verts.dimension(); }
    bool is_zero() const { return verts.is_zero(); }
};

/// Wraps a chain as a straight chain. Errors with FINENESS_EXCEEDED when some
/// simplex has diameter > pi/2 (no unique geodesic extension).
StraightChain straighten(const DiscreteChain& c, const Metric& metric);

/// Vertex-tuple extraction; linear, and a left inverse of straighten.
DiscreteChain discretize(const StraightChain& c);

/// Barycenters of simplices lying entirely on the latitude sphere
/// {x : d(center, x) = radius} are computed within that sphere, so
/// subdivision never leaves it.
struct LatitudePolicy {
    PointId center = 0;
    double radius = 0.0;
    double tol = 1e-9;
};

struct SubdivideOptions {
    const FaceComplex<PointId>* frozen = nullptr;  // boundary cells to keep verbatim
    std::optional<LatitudePolicy> latitude;
    int max_rounds = 200;
};

/// Iterated relative barycentric subdivision: returns a chain with exactly the
/// same boundary whose fineness is <= target. Simplices in the frozen complex
/// (and everything already below target) are kept verbatim; other simplices
/// are replaced by cones over the subdivided boundary from their barycenter.
DiscreteChain relative_subdivide_chain(const DiscreteChain& c, double target, PointStore& store,
                                       const Metric& metric, const SubdivideOptions& opts);

/// Public form on straight chains; errors with TARGET_TOO_FINE when
/// target < 2 * fineness(boundary(c)) (the subdivision floor).
StraightChain relative_subdivide(const StraightChain& c, double target, PointStore& store);

/// Drop terms whose boundary is the zero chain (e.g. [b,b]); the result has
/// the same boundary and no worse fineness/diameter.
DiscreteChain strip_null_terms(const DiscreteChain& c);

/// Apex for coning a large cycle: the candidate minimizing the maximum
/// distance to the support (equivalently, farthest from the support's
/// antipodal set), ties broken by lowest point index. Candidates are the
/// support itself, its normalized mean, the coordinate axes, and any extra
/// points supplied by the caller (e.g. a working net).
PointId select_cone_apex(std::span<const PointId> support, PointStore& store,
                         std::span<const PointId> extra_candidates = {});

/// Same, constrained to a latitude sphere; candidates are projected onto it.
PointId select_cone_apex_on_latitude(std::span<const PointId> support, PointId center,
                                     double radius, PointStore& store);

/// Deterministic seeded epsilon-net of the region: every region point of a
/// dense probe stream lies within eps of a net point and net points are
/// pairwise >= eps/2 apart. The region predicate sees unit coordinates.
std::vector<PointId> sample_net(double eps,
                                const std::function<bool(std::span<const double>)>& region,
                                std::uint64_t seed, PointStore& store);

/// Reduced-cycle fillers (round-sphere filling contract).
/// fill_cycle: i <= k; requires fineness(c) <= g(delta). Boundary matched
/// exactly; fineness(d) <= delta; diam(d) <= k_fill * sqrt(diam(c)) for
/// diam(c) <= 1 and <= pi always.
DiscreteChain fill_cycle(const DiscreteChain& c, double delta, PointStore& store,
                         const FillerProfile& profile = {},
                         std::span<const PointId> apex_candidates = {});

/// fill_in_annulus: i < k; support in A(p; r1, r2), delta <= r1 < r2,
/// k_fill * r2 <= pi/2. Result supported in A(p; r1/k_fill, k_fill*r2).
DiscreteChain fill_in_annulus(const DiscreteChain& c, PointId p, double r1, double r2,
                              double delta, PointStore& store, const FillerProfile& profile = {});

/// fill_in_ball: i <= k; support in B(p, r2), r2 < pi/(2*k_fill). Result
/// supported in B(p, k_fill*r2).
DiscreteChain fill_in_ball(const DiscreteChain& c, PointId p, double r2, double delta,
                           PointStore& store, const FillerProfile& profile = {});

}  // namespace stratafill

#endif
