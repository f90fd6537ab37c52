#ifndef STRATAFILL_SNF_HPP
#define STRATAFILL_SNF_HPP

#include <optional>
#include <vector>

#include "stratafill/integer.hpp"

namespace stratafill {

/// Dense matrix of arbitrary-precision integers.
class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static IntMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const Integer& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    IntMatrix operator*(const IntMatrix& o) const;
    bool operator==(const IntMatrix& o) const = default;

    IntMatrix transposed() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Integer> a_;
};

/// Diagonalization U*A*V = D with unimodular U, V and invariant factors
/// d1 | d2 | ... The certificates are re-verified by multiplication.
struct SmithNormalForm {
    std::vector<Integer> factors;  // nonzero invariant factors
    IntMatrix U, V;                // unimodular transforms
    std::size_t rank() const { return factors.size(); }

    /// Re-multiplies U*A*V and compares against diag(factors).
    bool verify(const IntMatrix& A) const;
};

/// Pivot-magnitude-controlled elementary reduction; exact.
SmithNormalForm smith_normal_form(const IntMatrix& A);

/// Rank over the rationals by fraction-free (Bareiss) elimination; the
/// independent oracle for the SNF rank.
std::size_t bareiss_rank(IntMatrix A);

/// Determinant by fraction-free elimination (square matrices).
Integer bareiss_determinant(IntMatrix A);

/// gcd of all j x j minors, 0 if all vanish. Exponential in size; intended
/// for the determinant-divisor oracle on small matrices.
Integer minor_gcd(const IntMatrix& A, std::size_t j);

/// Solve A x = b over the integers via SNF; empty when no integer solution.
std::optional<std::vector<Integer>> solve_integer(const IntMatrix& A,
                                                  const std::vector<Integer>& b);

/// Solve A x = b over the rationals; empty when inconsistent.
std::optional<std::vector<Rational>> solve_rational(const IntMatrix& A,
                                                    const std::vector<Rational>& b);

}  // namespace stratafill

#endif
