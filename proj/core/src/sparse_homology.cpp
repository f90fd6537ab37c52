#include "stratafill/sparse_homology.hpp"

#include <algorithm>

#include "stratafill/errors.hpp"

namespace stratafill {

SparseCol sparse_axpy(const SparseCol& x, const Rational& a, const SparseCol& y) {
    // x + a*y, merged by row.
    SparseCol out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            Rational v = a * y[j].second;
            if (v != 0) out.emplace_back(y[j].first, std::move(v));
            ++j;
        } else {
            Rational v = x[i].second + a * y[j].second;
            if (v != 0) out.emplace_back(x[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

void SparseReduction::ensure_lookup() {
    if (low_to_pivot_.size() != rows_) low_to_pivot_.assign(rows_, -1);
}

std::int64_t SparseReduction::pivot_with_low(std::uint32_t row) const {
    if (low_to_pivot_.size() != rows_) return -1;
    return low_to_pivot_[row];
}

SparseCol SparseReduction::reduce(SparseCol col) const {
    while (!col.empty()) {
        std::uint32_t low = col.back().first;
        std::int64_t p = pivot_with_low(low);
        if (p < 0) break;
        const SparseCol& piv = pivots_[p];
        Rational factor = -col.back().second / piv.back().second;
        col = sparse_axpy(col, factor, piv);
    }
    return col;
}

SparseCol SparseReduction::reduce_with_coefficients(SparseCol col,
                                                    std::vector<Rational>* coeffs) const {
    if (coeffs) coeffs->assign(pivots_.size(), Rational(0));
    while (!col.empty()) {
        std::uint32_t low = col.back().first;
        std::int64_t p = pivot_with_low(low);
        if (p < 0) break;
        const SparseCol& piv = pivots_[p];
        Rational factor = -col.back().second / piv.back().second;
        if (coeffs) (*coeffs)[p] -= factor;
        col = sparse_axpy(col, factor, piv);
    }
    return col;
}

bool SparseReduction::add_column(SparseCol col) {
    ensure_lookup();
    col = reduce(std::move(col));
    if (col.empty()) return false;
    low_to_pivot_[col.back().first] = static_cast<std::int64_t>(pivots_.size());
    pivots_.push_back(std::move(col));
    return true;
}

std::optional<std::vector<Rational>> SparseHomologyBasis::class_coordinates(
    const SparseCol& cycle) const {
    std::vector<Rational> coeffs;
    SparseCol residue = class_reduction.reduce_with_coefficients(cycle, &coeffs);
    if (!residue.empty()) return std::nullopt;
    // The class columns were added after the boundary columns; strip the
    // boundary coefficients.
    std::size_t nb = class_reduction.rank() - classes.size();
    std::vector<Rational> out(coeffs.begin() + nb, coeffs.end());
    return out;
}

SparseHomologyBasis sparse_homology_basis(std::size_t n_down, std::size_t n_d,
                                          const std::vector<SparseCol>& boundary_d,
                                          const std::vector<SparseCol>& boundary_up) {
    SparseHomologyBasis basis;
    basis.dim_chains = n_d;
    basis.boundary_reduction = SparseReduction(n_d);
    basis.class_reduction = SparseReduction(n_d);

    // Image of the upper boundary.
    for (const auto& col : boundary_up) {
        basis.boundary_reduction.add_column(col);
        basis.class_reduction.add_column(col);
    }

    // Kernel of the lower boundary: reduce the columns of boundary_d,
    // tracking combinations; standard persistence-style pairing. Columns that
    // reduce to zero yield kernel vectors.
    SparseReduction down(n_down);
    std::vector<SparseCol> combo(n_d);  // combination that produced column j
    struct Tracked {
        SparseCol col;
        SparseCol combo;
    };
    std::vector<Tracked> pivots;
    std::vector<std::int64_t> low_to_pivot(n_down, -1);
    for (std::uint32_t j = 0; j < n_d; ++j) {
        SparseCol col = j < boundary_d.size() ? boundary_d[j] : SparseCol{};
        SparseCol cmb{{j, Rational(1)}};
        while (!col.empty()) {
            std::int64_t p = low_to_pivot[col.back().first];
            if (p < 0) break;
            Rational factor = -col.back().second / pivots[p].col.back().second;
            col = sparse_axpy(col, factor, pivots[p].col);
            cmb = sparse_axpy(cmb, factor, pivots[p].combo);
        }
        if (col.empty()) {
            // Kernel vector; keep it if independent modulo boundaries and the
            // classes found so far.
            if (basis.class_reduction.add_column(cmb)) basis.classes.push_back(cmb);
        } else {
            low_to_pivot[col.back().first] = static_cast<std::int64_t>(pivots.size());
            pivots.push_back({std::move(col), std::move(cmb)});
        }
    }
    return basis;
}

}  // namespace stratafill
