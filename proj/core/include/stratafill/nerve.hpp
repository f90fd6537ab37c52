#ifndef STRATAFILL_NERVE_HPP
#define STRATAFILL_NERVE_HPP

#include <cstdint>
#include <vector>

#include "stratafill/cover.hpp"
#include "stratafill/snf.hpp"

namespace stratafill {

/// Finite simplicial complex on uint32 vertex labels, stored as sorted
/// nondegenerate vertex tuples per dimension. For a nerve the labels are cover
/// set indices; discrete complexes at a scale use net positions.
struct NerveComplex {
    int max_dim = 0;
    std::vector<std::vector<std::vector<std::uint32_t>>> simplices;  // [dim][i] = tuple

    std::size_t count(int dim) const {
        return (dim < 0 || dim > max_dim) ? 0 : simplices[dim].size();
    }

    /// Index of a sorted tuple in its dimension's list; throws if absent.
    std::size_t index_of(int dim, const std::vector<std::uint32_t>& tuple) const;

    /// Boundary matrix C_dim -> C_{dim-1} (alternating signs on sorted
    /// tuples). dim = 0 gives the zero map (or the augmentation when
    /// `augmented`).
    IntMatrix boundary_matrix(int dim, bool augmented = false) const;
};

/// Nerve of a cover: a tuple of sets spans a simplex iff the intersection of
/// their members is nonempty on the net.
NerveComplex nerve(const Cover& cover, int max_dim);

/// The complex of cover-tiny simplices on the net (vertices = net positions).
/// Errors with COMPLEX_TOO_LARGE above the simplex budget.
NerveComplex tiny_simplex_complex(const Cover& cover, int max_dim,
                                  std::size_t budget = 2000000);

enum class Coefficients { IntegersZ, RationalsQ, PrimeField };

struct HomologyGroups {
    struct Degree {
        std::size_t betti = 0;
        std::vector<Integer> torsion;  // nontrivial invariant factors
    };
    std::vector<Degree> degrees;
    bool reduced = false;
};

/// Betti numbers and torsion per degree up to max_dim. Integral mode
/// cross-checks the SNF ranks against the fraction-free rank oracle.
HomologyGroups homology(const NerveComplex& complex, Coefficients coeffs = Coefficients::IntegersZ,
                        int prime = 0, bool reduced = false);

/// Discrete homology at a scale: homology of the cover-fine chain complex on
/// net points.
HomologyGroups discrete_homology_at_scale(const Cover& cover, int max_dim,
                                          std::size_t budget = 2000000);

/// A rational basis of H_degree with machinery to express classes in it.
struct HomologyBasisQ {
    int degree = 0;
    IntMatrix cycles;      // columns: representative cycles (C_degree coordinates)
    IntMatrix boundaries;  // boundary image generators (C_degree coordinates)

    /// Coordinates of a cycle's class in the basis; empty when the vector is
    /// not a cycle in the span (should not happen for genuine cycles).
    std::optional<std::vector<Rational>> class_coordinates(
        const std::vector<Integer>& cycle_vec) const;
};

HomologyBasisQ homology_basis(const NerveComplex& complex, int degree);

/// Matrix of the spouse-induced map on rational homology in one degree,
/// columns indexed by the source basis.
IntMatrix induced_on_homology_num(const FamilyMap& spouse, const NerveComplex& source,
                                  const NerveComplex& target, int degree,
                                  std::vector<Integer>* denominators = nullptr);

/// Image of a nerve chain under a spouse map in the sorted nondegenerate
/// basis (degenerate images vanish, permutations contribute their sign).
std::vector<Integer> map_nerve_cycle(const FamilyMap& spouse, const NerveComplex& source,
                                     const NerveComplex& target, int degree,
                                     const std::vector<Integer>& vec);

/// Vector of a nerve chain in a complex's sorted basis.
std::vector<Integer> chain_to_vector(const NerveComplex& complex, const NerveChain& c);
NerveChain vector_to_chain(const NerveComplex& complex, int degree,
                           const std::vector<Integer>& v);

}  // namespace stratafill

#endif
