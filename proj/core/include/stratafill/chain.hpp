#ifndef STRATAFILL_CHAIN_HPP
#define STRATAFILL_CHAIN_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "stratafill/errors.hpp"
#include "stratafill/geometry.hpp"
#include "stratafill/integer.hpp"

namespace stratafill {

/// Vertex of a nerve chain: the id of a cover set.
struct SetId {
    std::uint32_t v = 0;
    auto operator<=>(const SetId&) const = default;
};

/// An ordered vertex tuple; repeats are permitted and kept. The empty tuple is
/// the distinguished (-1)-simplex (it only ever appears under cone()).
template <class Id>
struct Simplex {
    std::vector<Id> verts;

    Simplex() = default;
    Simplex(std::initializer_list<Id> vs) : verts(vs) {}
    explicit Simplex(std::vector<Id> vs) : verts(std::move(vs)) {}

    int dim() const { return static_cast<int>(verts.size()) - 1; }
    bool degenerate() const {
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                if (verts[i] == verts[j]) return true;
        return false;
    }

    /// Face omitting vertex i.
    Simplex face(std::size_t i) const {
        Simplex f;
        f.verts.reserve(verts.size() - 1);
        for (std::size_t j = 0; j < verts.size(); ++j)
            if (j != i) f.verts.push_back(verts[j]);
        return f;
    }

    auto operator<=>(const Simplex&) const = default;
};

/// Finite integer formal sum of simplices of one dimension, kept in canonical
/// form: no zero coefficients, terms ordered lexicographically by vertex ids.
template <class Id>
class Chain {
  public:
    using SimplexT = Simplex<Id>;
    using TermMap = std::map<SimplexT, Integer>;

    /// The zero chain of the given dimension (>= -2; dimension -1 holds
    /// multiples of the empty simplex, dimension -2 only ever the zero chain).
    explicit Chain(int dim = 0) : dim_(dim) {}

    int dimension() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    void add(const SimplexT& s, Integer coeff) {
        if (coeff == 0) return;
        if (s.dim() != dim_)
            throw OpError(ErrorCode::DIMENSION_MISMATCH, "simplex dimension != chain dimension");
        auto it = terms_.find(s);
        if (it == terms_.end()) {
            terms_.emplace(s, std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Chain& operator+=(const Chain& o) {
        require_same_dim(o);
        for (const auto& [s, a] : o.terms_) add(s, a);
        return *this;
    }
    Chain& operator-=(const Chain& o) {
        require_same_dim(o);
        for (const auto& [s, a] : o.terms_) add(s, -a);
        return *this;
    }
    Chain operator+(const Chain& o) const {
        Chain r = *this;
        r += o;
        return r;
    }
    Chain operator-(const Chain& o) const {
        Chain r = *this;
        r -= o;
        return r;
    }
    Chain operator-() const {
        Chain r(dim_);
        for (const auto& [s, a] : terms_) r.terms_.emplace(s, -a);
        return r;
    }
    Chain operator*(const Integer& k) const {
        Chain r(dim_);
        if (k == 0) return r;
        for (const auto& [s, a] : terms_) r.terms_.emplace(s, a * k);
        return r;
    }
    bool operator==(const Chain& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  private:
    void require_same_dim(const Chain& o) const {
        if (dim_ != o.dim_)
            throw OpError(ErrorCode::DIMENSION_MISMATCH, "chain dimensions differ");
    }

    int dim_;
    TermMap terms_;
};

using DiscreteSimplex = Simplex<PointId>;
using DiscreteChain = Chain<PointId>;
using NerveSimplex = Simplex<SetId>;
using NerveChain = Chain<SetId>;

/// Set of simplices closed under taking faces.
template <class Id>
struct FaceComplex {
    std::set<Simplex<Id>> generators;

    bool contains(const Simplex<Id>& s) const { return generators.count(s) > 0; }
};

/// Alternating-sum boundary. On 0-chains this is the augmentation onto the
/// empty (-1)-simplex, which is what makes the cone identity
/// d(cone(x,c)) = c - cone(x, dc) hold in every dimension.
template <class Id>
Chain<Id> boundary(const Chain<Id>& c) {
    Chain<Id> out(c.dimension() - 1);
    if (c.dimension() <= -1) return out;
    if (c.dimension() == 0) {
        Integer total = 0;
        for (const auto& [s, a] : c.terms()) total += a;
        out.add(Simplex<Id>{}, total);
        return out;
    }
    for (const auto& [s, a] : c.terms()) {
        for (std::size_t i = 0; i < s.verts.size(); ++i)
            out.add(s.face(i), (i % 2 == 0) ? a : -a);
    }
    return out;
}

template <class Id>
Chain<Id> cone(Id apex, const Chain<Id>& c) {
    if (c.dimension() < -1)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "cone over a chain below dimension -1");
    Chain<Id> out(c.dimension() + 1);
    for (const auto& [s, a] : c.terms()) {
        Simplex<Id> t;
        t.verts.reserve(s.verts.size() + 1);
        t.verts.push_back(apex);
        t.verts.insert(t.verts.end(), s.verts.begin(), s.verts.end());
        out.add(t, a);
    }
    return out;
}

/// Union of vertex sets of stored (post-cancellation) simplices, sorted.
template <class Id>
std::vector<Id> support(const Chain<Id>& c) {
    std::set<Id> s;
    for (const auto& [sx, a] : c.terms()) s.insert(sx.verts.begin(), sx.verts.end());
    return {s.begin(), s.end()};
}

/// True iff dimension >= 1, or dimension 0 with zero coefficient sum.
template <class Id>
bool is_reduced(const Chain<Id>& c) {
    if (c.dimension() >= 1) return true;
    if (c.dimension() == 0) {
        Integer total = 0;
        for (const auto& [s, a] : c.terms()) total += a;
        return total == 0;
    }
    return c.is_zero();
}

template <class Id>
FaceComplex<Id> face_complex(const Chain<Id>& c) {
    FaceComplex<Id> fc;
    std::vector<Simplex<Id>> stack;
    for (const auto& [s, a] : c.terms()) stack.push_back(s);
    while (!stack.empty()) {
        Simplex<Id> s = std::move(stack.back());
        stack.pop_back();
        if (s.dim() < 0) continue;
        if (!fc.generators.insert(s).second) continue;
        if (s.dim() == 0) continue;
        for (std::size_t i = 0; i < s.verts.size(); ++i) stack.push_back(s.face(i));
    }
    return fc;
}

double fineness(const DiscreteChain& c, const Metric& metric);
double simplex_diameter(const DiscreteSimplex& s, const Metric& metric);
double chain_diameter(const DiscreteChain& c, const Metric& metric);

}  // namespace stratafill

#endif
