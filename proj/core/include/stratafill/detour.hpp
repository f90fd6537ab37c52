#ifndef STRATAFILL_DETOUR_HPP
#define STRATAFILL_DETOUR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratafill/model.hpp"
#include "stratafill/sphere.hpp"

namespace stratafill {

/// A finite subfamily of the (1/N)-scaled parabolic balls.
struct BallSelection {
    std::vector<std::size_t> indices;  // into family.balls
    double scale = 1.0;                // N: selected radii are r_p/(M*N)

    double radius(const BallFamily& f, std::size_t sel_pos) const {
        return f.family_radius(indices[sel_pos]) / scale;
    }
    double max_radius(const BallFamily& f) const;
    double min_radius(const BallFamily& f) const;
};

struct DetourCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
};

struct DetourReport {
    DiscreteChain input{0};
    DiscreteChain output{0};
    std::optional<DiscreteChain> homotopy;
    std::vector<DetourCheck> checks;
    double delta = 0.0;
    int bands = 0;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Split d into the part clear of the doubled balls and the parts whose
/// simplices sit entirely inside one 2B (well-defined when the doubled balls
/// are pairwise disjoint).
struct ChainSplit {
    DiscreteChain outside{0};
    std::map<std::size_t, DiscreteChain> per_ball;  // keyed by selection position
};
ChainSplit chain_split(const DiscreteChain& d, const BallFamily& f, const BallSelection& sel,
                       const PointStore& store);

/// Reroute d off a family of balls whose 2K-enlargements are pairwise
/// disjoint; boundary is preserved exactly. Preconditions follow the filling
/// contract: fineness(d) <= g(delta) (g(g(delta)) with a homotopy),
/// delta <= min radius, boundary support clear of the balls, 1 <= dim <= k.
DetourReport disjoint_detour(const DiscreteChain& d, const BallFamily& f,
                             const BallSelection& sel, double delta, bool want_homotopy,
                             PointStore& store, const FillerProfile& profile = {});

/// Detour around an arbitrary selection by splitting it into radius bands
/// (factor-K intervals) and detouring band by band, coarsest first.
DetourReport general_detour(const DiscreteChain& d, const BallFamily& f, const BallSelection& sel,
                            double delta, bool want_homotopy, PointStore& store,
                            const FillerProfile& profile = {});

/// All moduli the stratum filler derives from its inputs; exposed so callers
/// can compute the required input fineness g1 before building cycles.
struct StratumFillModuli {
    int n = 1;
    double delta = 0.0;
    int big_n = 0;        // f1(n) = 2K (n v 2K)
    double r_bar = 0.0;   // density threshold from approx_radius, (1/N)-scaled
    int m = 0;            // band count of the detoured subfamily
    double delta_bar = 0.0;
    double g1 = 0.0;      // required input fineness
    std::vector<std::size_t> detoured;  // family indices with radius >= r_bar

    static double h_modulus(double r, double k_fill);
};

StratumFillModuli stratum_fill_moduli(const BallFamily& f, int n, double delta, PointStore& store,
                                      const FillerProfile& profile = {});

struct StratumFillResult {
    DiscreteChain filler{0};
    StratumFillModuli moduli;
};

/// Fill a reduced cycle supported in X_n by a chain in X_{f1(n)} with
/// fineness <= delta and diameter <= h(diam(c)). Requires dim(c) < k and
/// fineness(c) <= g1(delta, n).
StratumFillResult stratum_fill(const DiscreteChain& c, int n, double delta, const BallFamily& f,
                               PointStore& store, const FillerProfile& profile = {},
                               const StratumFillModuli* precomputed = nullptr);

/// Measured-modulus bookkeeping for detour/fill experiments.
struct ModulusTable {
    std::vector<std::pair<double, double>> h_samples;  // (diam in, diam out)
    std::vector<std::pair<int, int>> f1_samples;       // (n, f1(n))
    double k_fill = 9.0;
};

/// A straight cycle representing a chosen generator of H_k(S - F) whose
/// vertex chain is delta-fine and supported in a fixed stratum X_N.
struct RepresentedClass {
    StraightChain cycle;
    DiscreteChain disc{0};
    int stratum = 0;
    int class_index = 0;
    std::vector<std::string> derivation;  // how N was computed
};

/// For F a set of family centers (by family index) and k = ambient-2 in
/// {1, 2}: representative cycles around the punctures. class_index selects the
/// generator (0 .. |F|-2); |F| = 1 yields the zero class.
RepresentedClass represent_class(const std::vector<std::size_t>& parabolic_indices,
                                 int class_index, double delta, const BallFamily& f,
                                 PointStore& store, const FillerProfile& profile = {});

}  // namespace stratafill

#endif
