#ifndef STRATAFILL_GEOMETRY_HPP
#define STRATAFILL_GEOMETRY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "stratafill/errors.hpp"

namespace stratafill {

using PointId = std::uint32_t;

constexpr int kMaxAmbientDim = 8;

/// Append-only store of unit vectors in R^{ambient_dim}. Points are referred
/// to by index everywhere else; chains never copy coordinates.
///
/// The store is not thread-safe: parallelism in this project is per-scenario,
/// each worker owning its own store.
class PointStore {
  public:
    explicit PointStore(int ambient_dim);

    int ambient_dim() const { return dim_; }
    std::size_t size() const { return count_; }

    /// Normalizes and appends; throws if the vector is numerically zero.
    PointId append_unit(std::span<const double> v);

    /// Appends verbatim, requiring unit norm within 1e-12 (deserialization:
    /// keeps serialized coordinates bit-exact).
    PointId append_exact_unit(std::span<const double> v);

    std::span<const double> coords(PointId p) const {
        return {xyz_.data() + static_cast<std::size_t>(p) * dim_, static_cast<std::size_t>(dim_)};
    }

    /// Geodesic (angular) distance, in [0, pi].
    double distance(PointId a, PointId b) const;
    double distance_to(PointId a, std::span<const double> v) const;

    /// Normalized mean of the listed points (with multiplicity), cached per
    /// sorted multiset so shared faces of different chains agree. Throws
    /// OpError(FILL_FAILED) if the mean is numerically zero.
    PointId append_barycenter(std::span<const PointId> pts);

    /// Barycenter constrained to the latitude sphere {x : d(center, x) = radius}:
    /// normalized mean, then radial reprojection along the geodesic from center.
    PointId append_latitude_barycenter(std::span<const PointId> pts, PointId center,
                                       double radius);

    /// Cached +/- coordinate axis points (apex candidates).
    PointId axis_point(int axis, int sign);

    /// Point at distance `radius` from `center` on the geodesic through `x`.
    /// Requires x not (anti)podal to center. Cached per (center, x, radius)
    /// so repeated projections yield the same point id.
    PointId append_radial_point(PointId center, PointId x, double radius);

  private:
    int dim_;
    std::size_t count_ = 0;
    std::vector<double> xyz_;
    std::map<std::tuple<PointId, PointId, std::uint64_t>, PointId> radial_cache_;
    std::map<std::vector<PointId>, PointId> bary_cache_;
    std::map<std::tuple<PointId, std::uint64_t, std::vector<PointId>>, PointId> lat_bary_cache_;
    std::map<std::pair<int, int>, PointId> axis_cache_;
};

/// Geodesic metric handle over a store; the distance every fineness/diameter
/// computation in this project uses unless stated otherwise.
class Metric {
  public:
    explicit Metric(const PointStore& store) : store_(&store) {}

    double operator()(PointId a, PointId b) const { return store_->distance(a, b); }
    const PointStore& store() const { return *store_; }

    double diameter(std::span<const PointId> pts) const;

  private:
    const PointStore* store_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double angle_between(std::span<const double> a, std::span<const double> b);

}  // namespace stratafill

#endif
