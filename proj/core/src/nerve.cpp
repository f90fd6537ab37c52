#include "stratafill/nerve.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace stratafill {

std::size_t NerveComplex::index_of(int dim, const std::vector<std::uint32_t>& tuple) const {
    const auto& list = simplices.at(dim);
    auto it = std::lower_bound(list.begin(), list.end(), tuple);
    if (it == list.end() || *it != tuple)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "tuple not in complex");
    return static_cast<std::size_t>(it - list.begin());
}

IntMatrix NerveComplex::boundary_matrix(int dim, bool augmented) const {
    if (dim == 0) {
        IntMatrix b(augmented ? 1 : 0, count(0));
        if (augmented)
            for (std::size_t j = 0; j < count(0); ++j) b.at(0, j) = 1;
        return b;
    }
    IntMatrix b(count(dim - 1), count(dim));
    for (std::size_t j = 0; j < count(dim); ++j) {
        const auto& s = simplices[dim][j];
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<std::uint32_t> face;
            face.reserve(s.size() - 1);
            for (std::size_t t = 0; t < s.size(); ++t)
                if (t != i) face.push_back(s[t]);
            std::size_t r = index_of(dim - 1, face);
            b.at(r, j) += (i % 2 == 0) ? 1 : -1;
        }
    }
    return b;
}

NerveComplex nerve(const Cover& cover, int max_dim) {
    NerveComplex nc;
    nc.max_dim = max_dim;
    nc.simplices.resize(max_dim + 1);

    const std::size_t n = cover.sets.size();
    for (std::size_t i = 0; i < n; ++i)
        nc.simplices[0].push_back({static_cast<std::uint32_t>(i)});

    // Extend tuples by larger indices while the common intersection stays
    // nonempty on the net.
    std::vector<std::uint32_t> tuple;
    std::vector<Bits> inter_stack;
    auto extend = [&](auto&& self, std::size_t last) -> void {
        if (static_cast<int>(tuple.size()) - 1 >= max_dim) return;
        for (std::size_t j = last + 1; j < n; ++j) {
            Bits meet = inter_stack.back() & cover.sets[j].bits;
            if (meet.none()) continue;
            tuple.push_back(static_cast<std::uint32_t>(j));
            inter_stack.push_back(meet);
            nc.simplices[tuple.size() - 1].push_back(tuple);
            self(self, j);
            inter_stack.pop_back();
            tuple.pop_back();
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        tuple = {static_cast<std::uint32_t>(i)};
        inter_stack = {cover.sets[i].bits};
        extend(extend, i);
    }
    for (auto& lst : nc.simplices) std::sort(lst.begin(), lst.end());
    return nc;
}

NerveComplex tiny_simplex_complex(const Cover& cover, int max_dim, std::size_t budget) {
    NerveComplex nc;
    nc.max_dim = max_dim;
    nc.simplices.resize(max_dim + 1);

    const std::size_t n = cover.net.size();
    std::set<std::vector<std::uint32_t>> seen;
    std::size_t total = 0;

    // Vertices: covered net positions.
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : cover.sets)
            if (s.bits.test(i)) {
                nc.simplices[0].push_back({static_cast<std::uint32_t>(i)});
                ++total;
                break;
            }
    }

    // Per set, enumerate subsets of its members up to the dimension cap.
    for (const auto& s : cover.sets) {
        std::vector<std::uint32_t> mem;
        for (std::size_t i = 0; i < n; ++i)
            if (s.bits.test(i)) mem.push_back(static_cast<std::uint32_t>(i));
        std::vector<std::uint32_t> tuple;
        auto rec = [&](auto&& self, std::size_t start) -> void {
            if (static_cast<int>(tuple.size()) - 1 >= max_dim) return;
            for (std::size_t t = start; t < mem.size(); ++t) {
                tuple.push_back(mem[t]);
                if (tuple.size() >= 2 && seen.insert(tuple).second) {
                    if (++total > budget)
                        throw OpError(ErrorCode::COMPLEX_TOO_LARGE,
                                      "tiny-simplex complex exceeds the budget");
                    nc.simplices[tuple.size() - 1].push_back(tuple);
                }
                self(self, t + 1);
                tuple.pop_back();
            }
        };
        rec(rec, 0);
    }
    for (auto& lst : nc.simplices) std::sort(lst.begin(), lst.end());
    return nc;
}

namespace {

std::size_t field_rank(const IntMatrix& a, int prime) {
    // Gaussian elimination over GF(p).
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<long long>> M(m, std::vector<long long>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Integer r = a.at(i, j) % prime;
            if (r < 0) r += prime;
            M[i][j] = static_cast<long long>(r);
        }
    auto inv_mod = [&](long long x) {
        long long r = 1, b = x % prime, e = prime - 2;
        while (e) {
            if (e & 1) r = r * b % prime;
            b = b * b % prime;
            e >>= 1;
        }
        return r;
    };
    std::size_t rank = 0, row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t p = row;
        while (p < m && M[p][col] == 0) ++p;
        if (p == m) continue;
        std::swap(M[p], M[row]);
        long long inv = inv_mod(M[row][col]);
        for (std::size_t j = col; j < n; ++j) M[row][j] = M[row][j] * inv % prime;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || M[i][col] == 0) continue;
            long long f = M[i][col];
            for (std::size_t j = col; j < n; ++j)
                M[i][j] = ((M[i][j] - f * M[row][j]) % prime + prime) % prime;
        }
        ++row;
        ++rank;
    }
    return rank;
}

}  // namespace

HomologyGroups homology(const NerveComplex& complex, Coefficients coeffs, int prime,
                        bool reduced) {
    HomologyGroups out;
    out.reduced = reduced;
    out.degrees.resize(complex.max_dim + 1);

    std::vector<std::size_t> rank(complex.max_dim + 2, 0);
    std::vector<std::vector<Integer>> torsion(complex.max_dim + 2);

    for (int d = 0; d <= complex.max_dim + 1; ++d) {
        if (d > complex.max_dim) break;
        IntMatrix b = complex.boundary_matrix(d, reduced && d == 0);
        if (b.rows() == 0 || b.cols() == 0) {
            rank[d] = 0;
            continue;
        }
        switch (coeffs) {
            case Coefficients::IntegersZ: {
                SmithNormalForm snf = smith_normal_form(b);
                if (!snf.verify(b))
                    throw OpError(ErrorCode::PRECONDITION_FAILED, "SNF certificate failed");
                std::size_t br = bareiss_rank(b);
                if (br != snf.rank())
                    throw OpError(ErrorCode::PRECONDITION_FAILED,
                                  "SNF rank disagrees with fraction-free rank");
                rank[d] = snf.rank();
                for (const auto& f : snf.factors)
                    if (f != 1 && f != -1) torsion[d].push_back(f);
                break;
            }
            case Coefficients::RationalsQ:
                rank[d] = bareiss_rank(b);
                break;
            case Coefficients::PrimeField:
                if (prime < 2)
                    throw OpError(ErrorCode::PRECONDITION_FAILED, "prime field needs a prime");
                rank[d] = field_rank(b, prime);
                break;
        }
    }

    for (int d = 0; d <= complex.max_dim; ++d) {
        std::size_t n_d = complex.count(d);
        std::size_t r_d = rank[d];
        std::size_t r_up = (d + 1 <= complex.max_dim) ? rank[d + 1] : 0;
        out.degrees[d].betti = n_d - r_d - r_up;
        if (coeffs == Coefficients::IntegersZ && d + 1 <= complex.max_dim)
            out.degrees[d].torsion = torsion[d + 1];
    }
    return out;
}

HomologyGroups discrete_homology_at_scale(const Cover& cover, int max_dim, std::size_t budget) {
    NerveComplex complex = tiny_simplex_complex(cover, max_dim, budget);
    return homology(complex);
}

HomologyBasisQ homology_basis(const NerveComplex& complex, int degree) {
    HomologyBasisQ basis;
    basis.degree = degree;
    const std::size_t n = complex.count(degree);

    IntMatrix bd = complex.boundary_matrix(degree);
    IntMatrix bup = (degree + 1 <= complex.max_dim)
                        ? complex.boundary_matrix(degree + 1)
                        : IntMatrix(n, 0);
    basis.boundaries = bup;

    // Integer kernel basis of bd from its SNF: columns of V past the rank.
    std::vector<std::vector<Integer>> kernel;
    if (bd.rows() == 0) {
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Integer> e(n, 0);
            e[j] = 1;
            kernel.push_back(std::move(e));
        }
    } else {
        SmithNormalForm snf = smith_normal_form(bd);
        for (std::size_t j = snf.rank(); j < n; ++j) {
            std::vector<Integer> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = snf.V.at(i, j);
            kernel.push_back(std::move(col));
        }
    }

    // Greedily extend the boundary columns to a maximal independent family by
    // kernel vectors; the added vectors represent a rational homology basis.
    std::size_t bnd_rank = bareiss_rank(bup);
    std::vector<std::vector<Integer>> chosen;
    auto stack_rank = [&](const std::vector<Integer>* extra) {
        IntMatrix M(n, bup.cols() + chosen.size() + (extra ? 1 : 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < bup.cols(); ++j) M.at(i, j) = bup.at(i, j);
            for (std::size_t j = 0; j < chosen.size(); ++j)
                M.at(i, bup.cols() + j) = chosen[j][i];
            if (extra) M.at(i, bup.cols() + chosen.size()) = (*extra)[i];
        }
        return bareiss_rank(M);
    };
    std::size_t current = bnd_rank;
    for (const auto& k : kernel) {
        if (stack_rank(&k) > current) {
            chosen.push_back(k);
            ++current;
        }
    }
    basis.cycles = IntMatrix(n, chosen.size());
    for (std::size_t j = 0; j < chosen.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) basis.cycles.at(i, j) = chosen[j][i];
    return basis;
}

std::optional<std::vector<Rational>> HomologyBasisQ::class_coordinates(
    const std::vector<Integer>& cycle_vec) const {
    const std::size_t n = cycle_vec.size();
    const std::size_t b = cycles.cols(), m = boundaries.cols();
    IntMatrix M(n, b + m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < b; ++j) M.at(i, j) = cycles.at(i, j);
        for (std::size_t j = 0; j < m; ++j) M.at(i, b + j) = boundaries.at(i, j);
    }
    std::vector<Rational> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = Rational(cycle_vec[i]);
    auto sol = solve_rational(M, rhs);
    if (!sol) return std::nullopt;
    return std::vector<Rational>(sol->begin(), sol->begin() + b);
}

std::vector<Integer> chain_to_vector(const NerveComplex& complex, const NerveChain& c) {
    std::vector<Integer> v(complex.count(c.dimension()), 0);
    for (const auto& [s, a] : c.terms()) {
        // Sorted nondegenerate representation with the permutation sign;
        // degenerate tuples vanish in the alternating basis.
        std::vector<std::uint32_t> tup;
        tup.reserve(s.verts.size());
        for (const auto& x : s.verts) tup.push_back(x.v);
        int sign = 1;
        for (std::size_t i = 0; i + 1 < tup.size(); ++i)
            for (std::size_t t = 0; t + 1 < tup.size() - i; ++t)
                if (tup[t] > tup[t + 1]) {
                    std::swap(tup[t], tup[t + 1]);
                    sign = -sign;
                }
        bool degen = false;
        for (std::size_t i = 0; i + 1 < tup.size(); ++i)
            if (tup[i] == tup[i + 1]) degen = true;
        if (degen) continue;
        v[complex.index_of(c.dimension(), tup)] += a * sign;
    }
    return v;
}

NerveChain vector_to_chain(const NerveComplex& complex, int degree,
                           const std::vector<Integer>& v) {
    NerveChain c(degree);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] == 0) continue;
        NerveSimplex s;
        for (std::uint32_t x : complex.simplices[degree][j]) s.verts.push_back(SetId{x});
        c.add(s, v[j]);
    }
    return c;
}

std::vector<Integer> map_nerve_cycle(const FamilyMap& spouse, const NerveComplex& source,
                                     const NerveComplex& target, int degree,
                                     const std::vector<Integer>& vec) {
    std::vector<Integer> out(target.count(degree), 0);
    for (std::size_t j = 0; j < vec.size(); ++j) {
        if (vec[j] == 0) continue;
        std::vector<std::uint32_t> img;
        for (std::uint32_t x : source.simplices[degree][j]) img.push_back(spouse.set_to_set.at(x));
        // Sort with sign; degenerate images vanish.
        int sign = 1;
        for (std::size_t i = 0; i + 1 < img.size(); ++i)
            for (std::size_t t = 0; t + 1 < img.size() - i; ++t)
                if (img[t] > img[t + 1]) {
                    std::swap(img[t], img[t + 1]);
                    sign = -sign;
                }
        bool degen = false;
        for (std::size_t i = 0; i + 1 < img.size(); ++i)
            if (img[i] == img[i + 1]) degen = true;
        if (degen) continue;
        out[target.index_of(degree, img)] += vec[j] * sign;
    }
    return out;
}

IntMatrix induced_on_homology_num(const FamilyMap& spouse, const NerveComplex& source,
                                  const NerveComplex& target, int degree,
                                  std::vector<Integer>* denominators) {
    HomologyBasisQ src = homology_basis(source, degree);
    HomologyBasisQ dst = homology_basis(target, degree);

    IntMatrix M(dst.cycles.cols(), src.cycles.cols());
    if (denominators) denominators->assign(src.cycles.cols(), 1);
    for (std::size_t j = 0; j < src.cycles.cols(); ++j) {
        std::vector<Integer> z(source.count(degree));
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = src.cycles.at(i, j);
        auto img = map_nerve_cycle(spouse, source, target, degree, z);
        auto coords = dst.class_coordinates(img);
        if (!coords)
            throw OpError(ErrorCode::WELLDEF_FAILED, "image cycle not in the target cycle span");
        // Clear denominators per column.
        Integer denom = 1;
        for (const auto& q : *coords) denom = denom / gcd(denom, denominator(q)) * denominator(q);
        for (std::size_t i = 0; i < coords->size(); ++i) {
            Rational scaled = (*coords)[i] * Rational(denom);
            M.at(i, j) = numerator(scaled);
        }
        if (denominators) (*denominators)[j] = denom;
    }
    return M;
}

}  // namespace stratafill
