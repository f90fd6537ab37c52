#ifndef STRATAFILL_MODEL_HPP
#define STRATAFILL_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stratafill/chain.hpp"
#include "stratafill/geometry.hpp"
#include "stratafill/sphere.hpp"

namespace stratafill {

/// One parabolic point with its characteristic radius r_p. The working ball
/// family consists of the balls B(p, r_p / M).
struct BallEntry {
    PointId center = 0;
    double r_p = 0.0;
    int level = 0;
};

struct FamilyParams {
    int levels = 1;
    double base_radius = 0.5;
    double ratio = 1.0 / 6561.0;  // must be <= 1/K^4
    int count_per_level = 2;
    std::uint64_t seed = 1;
    /// Extra spacing factor between same-level balls (in units of 2K*radius);
    /// > 1 gives the pairwise-disjoint "disjoint mode".
    double spacing = 1.25;
    /// When true, deeper levels are planted inside the previous level's balls
    /// (hierarchical packing); otherwise placed anywhere admissible.
    bool nest = true;
    int retry_budget = 4000;
};

/// Parabolic ball family with constants (K, M), M >= 2K^2, satisfying the
/// separation axiom: intersecting family balls have radius ratio >= K^4.
struct BallFamily {
    std::vector<BallEntry> balls;
    double K = 9.0;
    double M = 162.0;  // 2*K^2
    double cutoff = 0.0;  // radii below this are treated as absent
    FamilyParams params;

    /// Radius of the i-th family ball B(p, r_p/M).
    double family_radius(std::size_t i) const { return balls[i].r_p / M; }
    double max_family_radius() const;
    double min_family_radius() const;
};

struct SeparationReport {
    struct Violation {
        std::size_t a = 0, b = 0;
        double distance = 0.0, ratio = 0.0;
    };
    std::vector<Violation> violations;
    std::size_t pairs_checked = 0;
    bool ok() const { return violations.empty(); }
};

/// Synthetic packing satisfying the separation axiom, built by rejection
/// sampling. Throws PACKING_FAILED when the retry budget runs out.
BallFamily build_family(const FamilyParams& params, PointStore& store);

/// Exhaustive pairwise re-check of the separation axiom.
SeparationReport validate_separation(const BallFamily& f, const PointStore& store);

/// X_n membership: dist(x, p) >= r_p / (M*n) for every parabolic p.
bool stratum_membership(const BallFamily& f, const PointStore& store, PointId x, int n);
bool stratum_membership_coords(const BallFamily& f, const PointStore& store,
                               std::span<const double> x, int n);

/// Smallest n <= max_n with x in X_n, or max_n + 1 when there is none.
int stratum_level(const BallFamily& f, const PointStore& store, PointId x, int max_n);

/// Finite epsilon-sample of a stratum.
struct StratumNet {
    int n = 1;
    double eps = 0.0;
    std::vector<PointId> points;
};

StratumNet sample_stratum_net(const BallFamily& f, int n, double eps, std::uint64_t seed,
                              PointStore& store);

/// Largest radius threshold r (from the family's radius list) such that X_n is
/// eps-dense in the complement of the (1/n)-scaled balls of radius >= r,
/// verified against a deterministic probe stream. Radii below the family
/// cutoff are treated as absent.
double approx_radius(const BallFamily& f, int n, double eps, const PointStore& store_in,
                     PointStore& store);

/// Vertex-wise projection onto X_n: points already in X_n stay fixed, others
/// move to the nearest witness (stratum net point or analytic push-out).
/// Errors with TOO_FAR when a vertex needs to move more than eps.
DiscreteChain project_to_stratum(const DiscreteChain& c, int n, double eps, const BallFamily& f,
                                 PointStore& store, const StratumNet* net = nullptr);

/// Push-out witness: nearest point of X_n to x obtained by iteratively
/// exiting the violated balls; returns the witness and the distance moved.
std::pair<PointId, double> stratum_witness(const BallFamily& f, PointStore& store, PointId x,
                                           int n);

}  // namespace stratafill

#endif
