#include "stratafill/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace stratafill {

PointStore::PointStore(int ambient_dim) : dim_(ambient_dim) {
    if (ambient_dim < 2 || ambient_dim > kMaxAmbientDim)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "ambient dimension out of range");
}

PointId PointStore::append_unit(std::span<const double> v) {
    if (static_cast<int>(v.size()) != dim_)
        throw OpError(ErrorCode::DIMENSION_MISMATCH, "coordinate size != ambient dimension");
    double n = norm(v);
    if (n < 1e-14)
        throw OpError(ErrorCode::FILL_FAILED, "cannot normalize numerically zero vector");
    for (int i = 0; i < dim_; ++i) xyz_.push_back(v[i] / n);
    return static_cast<PointId>(count_++);
}

PointId PointStore::append_exact_unit(std::span<const double> v) {
    if (static_cast<int>(v.size()) != dim_)
        throw OpError(ErrorCode::DIMENSION_MISMATCH, "coordinate size != ambient dimension");
    if (std::abs(norm(v) - 1.0) > 1e-12)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "coordinates are not unit length");
    for (int i = 0; i < dim_; ++i) xyz_.push_back(v[i]);
    return static_cast<PointId>(count_++);
}

double PointStore::distance(PointId a, PointId b) const {
    if (a == b) return 0.0;
    return angle_between(coords(a), coords(b));
}

double PointStore::distance_to(PointId a, std::span<const double> v) const {
    return angle_between(coords(a), v);
}

PointId PointStore::append_barycenter(std::span<const PointId> pts) {
    std::vector<PointId> key(pts.begin(), pts.end());
    std::sort(key.begin(), key.end());
    auto it = bary_cache_.find(key);
    if (it != bary_cache_.end()) return it->second;
    double acc[kMaxAmbientDim] = {0};
    for (PointId p : pts) {
        auto c = coords(p);
        for (int i = 0; i < dim_; ++i) acc[i] += c[i];
    }
    PointId id = append_unit({acc, static_cast<std::size_t>(dim_)});
    bary_cache_.emplace(std::move(key), id);
    return id;
}

PointId PointStore::append_latitude_barycenter(std::span<const PointId> pts, PointId center,
                                               double radius) {
    std::uint64_t bits;
    std::memcpy(&bits, &radius, sizeof bits);
    std::vector<PointId> sorted(pts.begin(), pts.end());
    std::sort(sorted.begin(), sorted.end());
    auto key = std::make_tuple(center, bits, std::move(sorted));
    auto it = lat_bary_cache_.find(key);
    if (it != lat_bary_cache_.end()) return it->second;
    double acc[kMaxAmbientDim] = {0};
    for (PointId p : pts) {
        auto c = coords(p);
        for (int i = 0; i < dim_; ++i) acc[i] += c[i];
    }
    // Split the mean into the component along the latitude center and the
    // tangential remainder, then rebuild at the exact latitude radius.
    auto ctr = coords(center);
    double along = dot({acc, static_cast<std::size_t>(dim_)}, ctr);
    double tang[kMaxAmbientDim];
    for (int i = 0; i < dim_; ++i) tang[i] = acc[i] - along * ctr[i];
    double tn = norm({tang, static_cast<std::size_t>(dim_)});
    if (tn < 1e-14)
        throw OpError(ErrorCode::FILL_FAILED, "latitude barycenter collapsed onto the axis");
    double out[kMaxAmbientDim];
    for (int i = 0; i < dim_; ++i)
        out[i] = std::cos(radius) * ctr[i] + std::sin(radius) * tang[i] / tn;
    PointId id = append_unit({out, static_cast<std::size_t>(dim_)});
    lat_bary_cache_.emplace(std::move(key), id);
    return id;
}

PointId PointStore::axis_point(int axis, int sign) {
    auto key = std::make_pair(axis, sign);
    auto it = axis_cache_.find(key);
    if (it != axis_cache_.end()) return it->second;
    double v[kMaxAmbientDim] = {0};
    v[axis] = sign >= 0 ? 1.0 : -1.0;
    PointId id = append_unit({v, static_cast<std::size_t>(dim_)});
    axis_cache_.emplace(key, id);
    return id;
}

PointId PointStore::append_radial_point(PointId center, PointId x, double radius) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof radius);
    std::memcpy(&bits, &radius, sizeof bits);
    auto key = std::make_tuple(center, x, bits);
    auto it = radial_cache_.find(key);
    if (it != radial_cache_.end()) return it->second;

    auto ctr = coords(center);
    auto xc = coords(x);
    double along = dot(xc, ctr);
    double tang[kMaxAmbientDim];
    for (int i = 0; i < dim_; ++i) tang[i] = xc[i] - along * ctr[i];
    double tn = norm({tang, static_cast<std::size_t>(dim_)});
    if (tn < 1e-14)
        throw OpError(ErrorCode::FILL_FAILED, "radial projection undefined on the axis");
    double out[kMaxAmbientDim];
    for (int i = 0; i < dim_; ++i)
        out[i] = std::cos(radius) * ctr[i] + std::sin(radius) * tang[i] / tn;
    PointId id = append_unit({out, static_cast<std::size_t>(dim_)});
    radial_cache_.emplace(key, id);
    return id;
}

double Metric::diameter(std::span<const PointId> pts) const {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (*store_).distance(pts[i], pts[j]));
    return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double angle_between(std::span<const double> a, std::span<const double> b) {
    double c = std::clamp(dot(a, b), -1.0, 1.0);
    if (c > 0.5) {
        // Near-zero angles: acos(dot) loses all precision below ~1e-8, the
        // chord keeps full relative accuracy.
        double chord2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i] - b[i];
            chord2 += d * d;
        }
        return 2.0 * std::asin(std::clamp(0.5 * std::sqrt(chord2), 0.0, 1.0));
    }
    return std::acos(c);
}

}  // namespace stratafill
