#include "stratafill/snf.hpp"

#include <algorithm>
#include <functional>

#include "stratafill/errors.hpp"

namespace stratafill {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw OpError(ErrorCode::DIMENSION_MISMATCH, "matrix product shapes");
    IntMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Integer& aik = at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) {
                const Integer& bkj = o.at(k, j);
                if (bkj != 0) r.at(i, j) += aik * bkj;
            }
        }
    return r;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

bool SmithNormalForm::verify(const IntMatrix& A) const {
    IntMatrix d = U * A * V;
    if (d.rows() != A.rows() || d.cols() != A.cols()) return false;
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            Integer want = (i == j && i < factors.size()) ? factors[i] : Integer(0);
            if (d.at(i, j) != want) return false;
        }
    for (std::size_t i = 0; i + 1 < factors.size(); ++i)
        if (factors[i + 1] % factors[i] != 0) return false;
    return true;
}

SmithNormalForm smith_normal_form(const IntMatrix& A) {
    const std::size_t m = A.rows(), n = A.cols();
    IntMatrix D = A;
    IntMatrix U = IntMatrix::identity(m);
    IntMatrix V = IntMatrix::identity(n);

    auto swap_rows = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < n; ++j) std::swap(D.at(a, j), D.at(b, j));
        for (std::size_t j = 0; j < m; ++j) std::swap(U.at(a, j), U.at(b, j));
    };
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < m; ++i) std::swap(D.at(i, a), D.at(i, b));
        for (std::size_t i = 0; i < n; ++i) std::swap(V.at(i, a), V.at(i, b));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, const Integer& f) {
        if (f == 0) return;
        for (std::size_t j = 0; j < n; ++j) D.at(dst, j) += f * D.at(src, j);
        for (std::size_t j = 0; j < m; ++j) U.at(dst, j) += f * U.at(src, j);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, const Integer& f) {
        if (f == 0) return;
        for (std::size_t i = 0; i < m; ++i) D.at(i, dst) += f * D.at(i, src);
        for (std::size_t i = 0; i < n; ++i) V.at(i, dst) += f * V.at(i, src);
    };
    auto negate_row = [&](std::size_t r) {
        for (std::size_t j = 0; j < n; ++j) D.at(r, j) = -D.at(r, j);
        for (std::size_t j = 0; j < m; ++j) U.at(r, j) = -U.at(r, j);
    };

    std::size_t t = 0;
    const std::size_t lim = std::min(m, n);
    while (t < lim) {
        // Pivot: smallest nonzero magnitude in the trailing block, which keeps
        // intermediate entries from blowing up.
        std::size_t pi = t, pj = t;
        Integer best = 0;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                const Integer& x = D.at(i, j);
                if (x == 0) continue;
                Integer ax = abs(x);
                if (best == 0 || ax < best) {
                    best = ax;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        swap_rows(t, pi);
        swap_cols(t, pj);
        if (D.at(t, t) < 0) negate_row(t);

        bool clean = true;
        for (std::size_t i = t + 1; i < m; ++i) {
            Integer q = D.at(i, t) / D.at(t, t);
            add_row(i, t, -q);
            if (D.at(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < n; ++j) {
            Integer q = D.at(t, j) / D.at(t, t);
            add_col(j, t, -q);
            if (D.at(t, j) != 0) clean = false;
        }
        if (!clean) continue;  // residues became new, smaller pivot candidates

        // Divisibility: fold any non-multiple into the pivot position.
        bool divides_all = true;
        for (std::size_t i = t + 1; i < m && divides_all; ++i)
            for (std::size_t j = t + 1; j < n; ++j)
                if (D.at(i, j) % D.at(t, t) != 0) {
                    add_row(t, i, 1);
                    divides_all = false;
                    break;
                }
        if (!divides_all) continue;
        ++t;
    }

    SmithNormalForm out;
    out.U = std::move(U);
    out.V = std::move(V);
    for (std::size_t i = 0; i < lim; ++i) {
        if (D.at(i, i) == 0) break;
        out.factors.push_back(D.at(i, i));
    }
    return out;
}

std::size_t bareiss_rank(IntMatrix A) {
    const std::size_t m = A.rows(), n = A.cols();
    Integer prev = 1;
    std::size_t rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t p = row;
        while (p < m && A.at(p, col) == 0) ++p;
        if (p == m) continue;
        if (p != row)
            for (std::size_t j = 0; j < n; ++j) std::swap(A.at(p, j), A.at(row, j));
        for (std::size_t i = row + 1; i < m; ++i) {
            for (std::size_t j = col + 1; j < n; ++j) {
                Integer num = A.at(row, col) * A.at(i, j) - A.at(i, col) * A.at(row, j);
                A.at(i, j) = num / prev;  // exact by the Bareiss identity
            }
            A.at(i, col) = 0;
        }
        prev = A.at(row, col);
        ++row;
        ++rank;
    }
    return rank;
}

Integer bareiss_determinant(IntMatrix A) {
    if (A.rows() != A.cols())
        throw OpError(ErrorCode::DIMENSION_MISMATCH, "determinant of non-square matrix");
    const std::size_t n = A.rows();
    if (n == 0) return 1;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (A.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && A.at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(A.at(p, j), A.at(k, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                A.at(i, j) = (A.at(k, k) * A.at(i, j) - A.at(i, k) * A.at(k, j)) / prev;
        prev = A.at(k, k);
    }
    return sign > 0 ? A.at(n - 1, n - 1) : -A.at(n - 1, n - 1);
}

namespace {
void minors_rec(const IntMatrix& A, std::size_t j, std::size_t start, std::vector<std::size_t>& rows,
                std::vector<std::size_t>& cols_scratch, Integer& g) {
    if (rows.size() == j) {
        // gcd over all column subsets for this row subset
        std::vector<std::size_t> cols;
        std::function<void(std::size_t)> rec_cols = [&](std::size_t cstart) {
            if (cols.size() == j) {
                IntMatrix sub(j, j);
                for (std::size_t r = 0; r < j; ++r)
                    for (std::size_t c = 0; c < j; ++c) sub.at(r, c) = A.at(rows[r], cols[c]);
                g = gcd(g, bareiss_determinant(sub));
                return;
            }
            for (std::size_t c = cstart; c < A.cols(); ++c) {
                cols.push_back(c);
                rec_cols(c + 1);
                cols.pop_back();
            }
        };
        rec_cols(0);
        return;
    }
    for (std::size_t r = start; r < A.rows(); ++r) {
        rows.push_back(r);
        minors_rec(A, j, r + 1, rows, cols_scratch, g);
        rows.pop_back();
    }
}
}  // namespace

Integer minor_gcd(const IntMatrix& A, std::size_t j) {
    if (j == 0) return 1;
    if (j > std::min(A.rows(), A.cols())) return 0;
    Integer g = 0;
    std::vector<std::size_t> rows, cols;
    minors_rec(A, j, 0, rows, cols, g);
    return abs(g);
}

std::optional<std::vector<Integer>> solve_integer(const IntMatrix& A,
                                                  const std::vector<Integer>& b) {
    if (b.size() != A.rows()) throw OpError(ErrorCode::DIMENSION_MISMATCH, "solve shapes");
    SmithNormalForm snf = smith_normal_form(A);
    // U A V = D, so A x = b  <=>  D y = U b with x = V y.
    std::vector<Integer> ub(A.rows(), 0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.rows(); ++j)
            if (snf.U.at(i, j) != 0) ub[i] += snf.U.at(i, j) * b[j];
    std::vector<Integer> y(A.cols(), 0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        if (i < snf.factors.size()) {
            if (ub[i] % snf.factors[i] != 0) return std::nullopt;
            y[i] = ub[i] / snf.factors[i];
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Integer> x(A.cols(), 0);
    for (std::size_t i = 0; i < A.cols(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (snf.V.at(i, j) != 0) x[i] += snf.V.at(i, j) * y[j];
    return x;
}

std::optional<std::vector<Rational>> solve_rational(const IntMatrix& A,
                                                    const std::vector<Rational>& b) {
    if (b.size() != A.rows()) throw OpError(ErrorCode::DIMENSION_MISMATCH, "solve shapes");
    const std::size_t m = A.rows(), n = A.cols();
    std::vector<std::vector<Rational>> M(m, std::vector<Rational>(n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) M[i][j] = Rational(A.at(i, j));
        M[i][n] = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t p = row;
        while (p < m && M[p][col] == 0) ++p;
        if (p == m) continue;
        std::swap(M[p], M[row]);
        Rational inv = M[row][col];
        for (std::size_t j = col; j <= n; ++j) M[row][j] /= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || M[i][col] == 0) continue;
            Rational f = M[i][col];
            for (std::size_t j = col; j <= n; ++j) M[i][j] -= f * M[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < m; ++i)
        if (M[i][n] != 0) return std::nullopt;
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = M[i][n];
    return x;
}

}  // namespace stratafill
