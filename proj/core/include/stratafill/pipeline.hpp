#ifndef STRATAFILL_PIPELINE_HPP
#define STRATAFILL_PIPELINE_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stratafill/cover.hpp"
#include "stratafill/detour.hpp"
#include "stratafill/nerve.hpp"

namespace stratafill {

/// The subdivision chain map phi^{delta,n}: fills boundaries degree by degree
/// through the stratum filler, memoized per simplex so d(phi c) = phi(d c)
/// holds exactly across calls.
class RefineOperator {
  public:
    /// top_degree bounds the degrees the operator will be asked for (<= k).
    /// The delta/stratum schedules are derived from the filler moduli; pass
    /// schedule_n > n to share a coarser operator's schedule (the bridge
    /// homotopy needs the shifted schedule).
    RefineOperator(const BallFamily& family, PointStore& store, int n, double delta,
                   int top_degree, const FillerProfile& profile = {}, int schedule_n = -1);

    DiscreteChain apply(const DiscreteChain& c);
    DiscreteChain apply_simplex(const DiscreteSimplex& s, int dim);

    double delta_at(int degree) const { return delta_sched_.at(degree); }
    int stratum_at(int degree) const { return stratum_sched_.at(degree); }
    int base_stratum() const { return n_; }
    double input_fineness_bound(int degree) const;

    /// Neighbourhood-locality modulus H(r) of the construction.
    double locality_bound(double r, int degree) const;

    const BallFamily& family() const { return *family_; }
    PointStore& store() const { return *store_; }
    const FillerProfile& profile() const { return profile_; }

  private:
    const BallFamily* family_;
    PointStore* store_;
    int n_;
    double delta_;
    int top_;
    FillerProfile profile_;
    std::vector<double> delta_sched_;
    std::vector<int> stratum_sched_;
    std::vector<StratumFillModuli> moduli_;
    std::vector<std::map<DiscreteSimplex, DiscreteChain>> memo_;
};

/// Bridge homotopy between phi^{delta,n+1} and phi^{delta,n} o T for a vertex
/// map T with bounded displacement: returns H(c) with
/// d(H c) = phi_upper(c) - phi_lower(T c) for cycles c.
DiscreteChain refine_bridge(RefineOperator& upper, RefineOperator& lower,
                            const std::map<PointId, PointId>& vmap, const DiscreteChain& cycle);

/// Cone-based homotopy for related cycles: for a chain map T on the face
/// complex of the cycle c, a chain d with d(d) = c - T(c). When c is
/// delta-fine and T moves supports by at most delta, d is 3*delta-fine and
/// supported within delta of supp(c) (measured by the caller).
using SimplexChainMap = std::function<DiscreteChain(const DiscreteSimplex&, int dim)>;
DiscreteChain related_homotopy(const DiscreteChain& c, const SimplexChainMap& relate);

/// Vertex-map convenience overload.
DiscreteChain related_homotopy(const DiscreteChain& c, const std::map<PointId, PointId>& vmap);

/// The local-fill cover: one staged set U_x - X_{level-1} per chosen centre,
/// each tuned so fine cycles inside it fill tiny-ly within its target set.
struct LocalFillCover {
    Cover cover;
    struct SetMeta {
        PointId x = 0;
        int level = 0;                 // 0-based index into strata
        std::uint32_t target_set = 0;  // O_x in the target cover
        std::vector<double> eps;       // stage epsilons (from level on)
        std::vector<double> clearance;  // per stage: distance to net - O_x
    };
    std::vector<SetMeta> meta;
    const Cover* target = nullptr;
    std::vector<int> strata;  // stratum indices n_0 < n_1 < ...
};

/// Largest admissible input fineness for filling inside the given local set
/// at the requested output fineness (the lemma's eta/g2 threshold).
double tiny_fill_threshold(const LocalFillCover& lfc, std::size_t set_index, double delta,
                           int n_level, const FillerProfile& profile = {});

/// Minimum threshold over all local sets: the g2 modulus of the whole cover.
double tiny_fill_threshold_min(const LocalFillCover& lfc, double delta, int n_level,
                               const FillerProfile& profile = {});

LocalFillCover build_local_fill_cover(const Cover& target, const BallFamily& family,
                                      std::span<const StratumNet> strata, PointStore& store,
                                      const FillerProfile& profile = {});

/// Composition ladder of the stratum-growth moduli.
int f1_of(int n, const FillerProfile& profile = {});
int f3_of(int n, int k, const FillerProfile& profile = {});
int f4_of(int n, int k, const FillerProfile& profile = {});
double h_of(double r, const FillerProfile& profile = {});
double locality_h_upper(double r, int k, const FillerProfile& profile = {});   // H(r)
double locality_h_prime(double r, int k, const FillerProfile& profile = {});   // H'(r)

struct TinyFillResult {
    DiscreteChain filler{0};
    std::uint32_t containing_target_set = 0;
    double eta = 0.0;  // the fineness threshold the input was checked against
    int stratum = 0;   // f4-level stratum the filler lives in
};

/// Fill a fine cycle contained in one local-fill set by a chain that is tiny
/// for the target cover (the containing set is recorded).
TinyFillResult tiny_cycle_fill(const DiscreteChain& c, double delta, const LocalFillCover& lfc,
                               const BallFamily& family, PointStore& store,
                               const FillerProfile& profile = {});

/// Certificate of one subdivision-with-cover run.
struct SubdivisionCertificate {
    DiscreteChain input{0};
    DiscreteChain output{0};
    DiscreteChain homotopy{0};
    bool chain_map_ok = false;
    bool homotopy_ok = false;
    bool output_fine_for_target = false;
    double output_fineness = 0.0;
    double delta = 0.0;
    std::vector<std::string> notes;
};

/// The cover tower for subdivision-with-cover: per rung a super-refinement, a
/// local-fill cover, and a double super-refinement.
class CoverTower {
  public:
    CoverTower(const Cover& base, const BallFamily& family, std::span<const StratumNet> strata,
               PointStore& store, int k, const FillerProfile& profile = {});

    const Cover& finest() const;  // the O' the tower exposes
    const Cover& base() const { return *base_; }
    int rungs() const { return static_cast<int>(locals_.size()); }

    const Cover& bar(int i) const { return bars_.at(i); }            // Obar_i
    const Cover& super(int i) const { return supers_.at(i); }        // O_i
    const LocalFillCover& local(int i) const { return locals_.at(i); }

    const BallFamily& family() const { return *family_; }
    PointStore& store() const { return *store_; }

  private:
    const Cover* base_;
    const BallFamily* family_;
    PointStore* store_;
    std::vector<Cover> bars_;
    std::vector<Cover> supers_;
    std::vector<LocalFillCover> locals_;
};

/// Subdivide an O'-fine chain into a target-cover-fine, delta-fine chain with
/// an exact prism homotopy back to the input (both target-cover fine).
SubdivisionCertificate refine_with_cover(const DiscreteChain& c, CoverTower& tower, int n,
                                         double delta);

struct DACycleOutcome {
    DiscreteChain cycle{1};
    DiscreteChain witness{2};
    bool pass = false;
    std::string sampler;
    std::string note;
};

struct DACheckReport {
    int degree = 1;
    int samples = 0;
    int passed = 0;
    std::uint64_t seed = 0;
    std::vector<DACycleOutcome> outcomes;
    std::vector<std::string> notes;
};

/// Sample fine cycles, run them through the subdivision + stratum-fill
/// pipeline and verify each witness is target-cover fine with exact boundary.
DACheckReport da_check(const Cover& target, CoverTower& tower, const BallFamily& family,
                       std::span<const StratumNet> strata, int degree, int samples,
                       std::uint64_t seed, PointStore& store,
                       const FillerProfile& profile = {});

struct NonvanishCertificate {
    std::vector<std::size_t> punctures;  // family ball indices
    int k = 1;
    std::size_t rank = 0;
    std::size_t expected_rank = 0;
    IntMatrix class_matrix;              // classes of represented cycles in H_k(N(O_1))
    std::vector<RepresentedClass> representatives;
    Cover u_cover;                       // the convex cover the classes were paired against
    bool boundary_search_done = false;   // convex-cover verification ran within budget
    std::vector<std::string> notes;
};

NonvanishCertificate nonvanishing_certificate(const std::vector<std::size_t>& punctures,
                                              double delta, std::uint64_t seed,
                                              const BallFamily& family,
                                              std::span<const PointId> net, PointStore& store,
                                              const FillerProfile& profile = {},
                                              std::size_t boundary_search_budget = 200000);

}  // namespace stratafill

#endif
