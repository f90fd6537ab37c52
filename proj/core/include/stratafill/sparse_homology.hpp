#ifndef STRATAFILL_SPARSE_HOMOLOGY_HPP
#define STRATAFILL_SPARSE_HOMOLOGY_HPP

#include <optional>
#include <vector>

#include "stratafill/integer.hpp"

namespace stratafill {

/// Sparse column over the rationals: sorted (row, coeff) pairs, coeff != 0.
using SparseCol = std::vector<std::pair<std::uint32_t, Rational>>;

SparseCol sparse_axpy(const SparseCol& x, const Rational& a, const SparseCol& y);

/// Left-to-right column reduction with a low-row pivot lookup; the workhorse
/// for ranks, kernels and quotient bases of geometric boundary matrices whose
/// columns have O(1) entries.
class SparseReduction {
  public:
    explicit SparseReduction(std::size_t rows) : rows_(rows) {}

    /// Reduce a column against the stored pivots; returns the residue.
    SparseCol reduce(SparseCol col) const;

    /// Reduce and, if the residue is nonzero, store it as a new pivot.
    /// Returns true when the column added a pivot (i.e. was independent).
    bool add_column(SparseCol col);

    /// Reduce and report the coefficients alpha_i of the stored pivot columns
    /// used, so that col = sum_i alpha_i * pivot_i + residue.
    SparseCol reduce_with_coefficients(SparseCol col, std::vector<Rational>* coeffs) const;

    std::size_t rank() const { return pivots_.size(); }
    const std::vector<SparseCol>& pivots() const { return pivots_; }

  private:
    std::size_t rows_;
    std::vector<SparseCol> pivots_;            // reduced, distinct lows
    std::vector<std::int64_t> low_to_pivot_ =  // row -> pivot index
        {};

    void ensure_lookup();
    std::int64_t pivot_with_low(std::uint32_t row) const;
};

/// Homology basis of a chain complex at degree d over the rationals, from
/// sparse boundary columns. `boundary_d` maps degree-d chains down (columns
/// indexed by d-simplices), `boundary_up` maps degree-(d+1) chains down into
/// degree d.
struct SparseHomologyBasis {
    std::size_t dim_chains = 0;
    std::vector<SparseCol> classes;  // representative cycles, one per basis class
    SparseReduction boundary_reduction{0};
    SparseReduction class_reduction{0};  // boundaries + classes, for coordinates

    std::size_t betti() const { return classes.size(); }

    /// Coordinates of a cycle's class in the basis; nullopt if the vector is
    /// not a cycle-span member (genuine cycles always succeed).
    std::optional<std::vector<Rational>> class_coordinates(const SparseCol& cycle) const;
};

SparseHomologyBasis sparse_homology_basis(std::size_t n_down, std::size_t n_d,
                                          const std::vector<SparseCol>& boundary_d,
                                          const std::vector<SparseCol>& boundary_up);

}  // namespace stratafill

#endif
