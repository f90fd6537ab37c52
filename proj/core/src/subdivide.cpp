#include <algorithm>
#include <cmath>
#include <map>

#include "stratafill/sphere.hpp"

namespace stratafill {

namespace {

// One round of relative barycentric subdivision. RS(s) = s on frozen simplices
// (boundary cells, anything already below target, vertices); otherwise
// RS(s) = cone(b_s, RS(ds)). RS is memoized per ordered tuple so shared faces
// subdivide identically, which is what makes d(RS c) = RS(d c) hold exactly.
class Round {
  public:
    Round(PointStore& store, const Metric& metric, double target, const SubdivideOptions& opts)
        : store_(store), metric_(metric), target_(target), opts_(opts) {}

    DiscreteChain apply(const DiscreteChain& c) {
        DiscreteChain out(c.dimension());
        for (const auto& [s, a] : c.terms()) out += rs(s) * a;
        return out;
    }

    bool subdivided_anything() const { return subdivided_; }

  private:
    bool frozen(const DiscreteSimplex& s) const {
        if (s.dim() <= 0) return true;
        if (opts_.frozen && opts_.frozen->contains(s)) return true;
        return simplex_diameter(s, metric_) <= target_;
    }

    bool on_latitude(const DiscreteSimplex& s) const {
        if (!opts_.latitude) return false;
        for (PointId v : s.verts) {
            double d = store_.distance(opts_.latitude->center, v);
            if (std::abs(d - opts_.latitude->radius) > opts_.latitude->tol) return false;
        }
        return true;
    }

    PointId barycenter(const DiscreteSimplex& s) {
        // The store caches barycenters by vertex multiset, so shared faces of
        // adjacent simplices (in either orientation) agree.
        if (on_latitude(s))
            return store_.append_latitude_barycenter(s.verts, opts_.latitude->center,
                                                     opts_.latitude->radius);
        return store_.append_barycenter(s.verts);
    }

    const DiscreteChain& rs(const DiscreteSimplex& s) {
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        DiscreteChain result(s.dim());
        if (frozen(s)) {
            result.add(s, 1);
        } else {
            subdivided_ = true;
            DiscreteChain sub_bd(s.dim() - 1);
            for (std::size_t i = 0; i < s.verts.size(); ++i)
                sub_bd += rs(s.face(i)) * Integer((i % 2 == 0) ? 1 : -1);
            result = cone(barycenter(s), sub_bd);
        }
        return memo_.emplace(s, std::move(result)).first->second;
    }

    PointStore& store_;
    const Metric& metric_;
    double target_;
    const SubdivideOptions& opts_;
    std::map<DiscreteSimplex, DiscreteChain> memo_;
    bool subdivided_ = false;
};

}  // namespace

DiscreteChain relative_subdivide_chain(const DiscreteChain& c, double target, PointStore& store,
                                       const Metric& metric, const SubdivideOptions& opts) {
    if (target <= 0.0)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "subdivision target must be positive");
    DiscreteChain cur = c;
    double fin = fineness(cur, metric);
    int rounds = 0;
    int stalls = 0;
    while (fin > target) {
        if (rounds++ >= opts.max_rounds)
            throw OpError(ErrorCode::FILL_FAILED, "subdivision did not reach target fineness");
        Round round(store, metric, target, opts);
        DiscreteChain next = round.apply(cur);
        double next_fin = fineness(next, metric);
        if (!round.subdivided_anything())
            throw OpError(ErrorCode::FILL_FAILED,
                          "frozen cells block subdivision below the requested target");
        stalls = (next_fin > fin * (1.0 - 1e-6)) ? stalls + 1 : 0;
        if (stalls >= 4)
            throw OpError(ErrorCode::FILL_FAILED, "subdivision stalled above target fineness");
        cur = std::move(next);
        fin = next_fin;
    }
    return cur;
}

StraightChain relative_subdivide(const StraightChain& c, double target, PointStore& store) {
    Metric metric(store);
    DiscreteChain bd = boundary(c.verts);
    double floor = 2.0 * fineness(bd, metric);
    if (target < floor)
        throw OpError(ErrorCode::TARGET_TOO_FINE,
                      "target below twice the boundary fineness (subdivision floor)");
    FaceComplex<PointId> frozen = face_complex(bd);
    SubdivideOptions opts;
    opts.frozen = &frozen;
    DiscreteChain sub = relative_subdivide_chain(c.verts, target, store, metric, opts);
    StraightChain out;
    out.verts = std::move(sub);
    out.max_simplex_diameter = fineness(out.verts, metric);
    out.valid = out.max_simplex_diameter <= 3.14159265358979323846 / 2.0;
    return out;
}

}  // namespace stratafill
