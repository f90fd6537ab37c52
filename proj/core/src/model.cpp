#include "stratafill/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stratafill/rng.hpp"

namespace stratafill {

namespace {
constexpr double kPi = 3.14159265358979323846;

double ball_gap(const PointStore& store, const BallFamily& f, std::size_t a, std::size_t b) {
    // Negative when the family balls intersect.
    double d = store.distance(f.balls[a].center, f.balls[b].center);
    return d - (f.family_radius(a) + f.family_radius(b));
}
}  // namespace

double BallFamily::max_family_radius() const {
    double r = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i) r = std::max(r, family_radius(i));
    return r;
}

double BallFamily::min_family_radius() const {
    double r = kPi;
    for (std::size_t i = 0; i < balls.size(); ++i) r = std::min(r, family_radius(i));
    return r;
}

BallFamily build_family(const FamilyParams& params, PointStore& store) {
    const double K = 9.0, M = 2.0 * K * K;
    if (params.ratio > 1.0 / (K * K * K * K) + 1e-15)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "ratio must be <= 1/K^4");
    // The cap keeps every 2K^2-enlarged family ball convex, which the
    // homotopy part of detouring relies on.
    if (params.base_radius <= 0.0 || params.base_radius > 1.5)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "base_radius must lie in (0, 1.5]");
    if (params.levels < 1 || params.count_per_level < 1)
        throw OpError(ErrorCode::PRECONDITION_FAILED, "need levels >= 1 and count >= 1");

    BallFamily fam;
    fam.K = K;
    fam.M = M;
    fam.params = params;

    Rng rng(params.seed);
    const int dim = store.ambient_dim();
    int rejections = 0;

    auto random_unit = [&](std::vector<double>& v) {
        for (int i = 0; i < dim; i += 2) {
            double u1 = std::max(rng.next_double(), 1e-300);
            double u2 = rng.next_double();
            double r = std::sqrt(-2.0 * std::log(u1));
            v[i] = r * std::cos(2.0 * kPi * u2);
            if (i + 1 < dim) v[i + 1] = r * std::sin(2.0 * kPi * u2);
        }
    };

    std::vector<double> v(dim);
    for (int level = 0; level < params.levels; ++level) {
        double r_p = params.base_radius * std::pow(params.ratio, level);
        double fr = r_p / M;
        for (int c = 0; c < params.count_per_level; ++c) {
            while (true) {
                if (rejections > params.retry_budget)
                    throw OpError(ErrorCode::PACKING_FAILED, "packing retry budget exhausted");
                random_unit(v);
                double n = norm(v);
                if (n < 1e-12) continue;
                for (int i = 0; i < dim; ++i) v[i] /= n;

                if (params.nest && level > 0) {
                    // Drop the candidate near a random previous-level ball so
                    // hierarchical scenarios actually nest.
                    std::vector<std::size_t> prev;
                    for (std::size_t i = 0; i < fam.balls.size(); ++i)
                        if (fam.balls[i].level == level - 1) prev.push_back(i);
                    const BallEntry& host = fam.balls[prev[rng.below(prev.size())]];
                    double hr = host.r_p / M;
                    // Uniform offset within half the host ball.
                    double off = rng.uniform(0.0, 0.5 * hr);
                    double dir[kMaxAmbientDim];
                    auto hc = store.coords(host.center);
                    double along = dot(v, hc);
                    for (int i = 0; i < dim; ++i) dir[i] = v[i] - along * hc[i];
                    double dn = norm({dir, static_cast<std::size_t>(dim)});
                    if (dn < 1e-12) {
                        ++rejections;
                        continue;
                    }
                    for (int i = 0; i < dim; ++i)
                        v[i] = std::cos(off) * hc[i] + std::sin(off) * dir[i] / dn;
                }

                bool ok = true;
                for (std::size_t i = 0; i < fam.balls.size() && ok; ++i) {
                    double d = store.distance_to(fam.balls[i].center, v);
                    double fri = fam.family_radius(i);
                    if (fam.balls[i].level == level) {
                        // Same radius: the separation axiom forbids any
                        // intersection, and disjoint spacing applies at the
                        // 2K scale.
                        double need = params.spacing * 2.0 * K * (fri + fr);
                        if (d < need) ok = false;
                    } else {
                        double lo = std::min(fri, fr), hi = std::max(fri, fr);
                        bool intersect = d <= fri + fr;
                        // Tolerance: hierarchical levels sit exactly at the
                        // 1/K^4 ratio; rounding order must not flag them.
                        if (intersect && lo > hi / (K * K * K * K) * (1.0 + 1e-9)) ok = false;
                    }
                }
                if (!ok) {
                    ++rejections;
                    continue;
                }
                BallEntry e;
                e.center = store.append_unit(v);
                e.r_p = r_p;
                e.level = level;
                fam.balls.push_back(e);
                break;
            }
        }
    }
    fam.cutoff = 0.5 * fam.min_family_radius() * fam.params.ratio;
    return fam;
}

SeparationReport validate_separation(const BallFamily& f, const PointStore& store) {
    SeparationReport rep;
    const double k4 = f.K * f.K * f.K * f.K;
    for (std::size_t a = 0; a < f.balls.size(); ++a) {
        for (std::size_t b = a + 1; b < f.balls.size(); ++b) {
            ++rep.pairs_checked;
            if (ball_gap(store, f, a, b) > 0.0) continue;  // disjoint
            double lo = std::min(f.family_radius(a), f.family_radius(b));
            double hi = std::max(f.family_radius(a), f.family_radius(b));
            if (lo > hi / k4 * (1.0 + 1e-9)) {
                SeparationReport::Violation v;
                v.a = a;
                v.b = b;
                v.distance = store.distance(f.balls[a].center, f.balls[b].center);
                v.ratio = lo / hi;
                rep.violations.push_back(v);
            }
        }
    }
    return rep;
}

bool stratum_membership_coords(const BallFamily& f, const PointStore& store,
                               std::span<const double> x, int n) {
    if (n < 1) throw OpError(ErrorCode::PRECONDITION_FAILED, "stratum index must be >= 1");
    for (std::size_t i = 0; i < f.balls.size(); ++i) {
        double thr = f.family_radius(i) / n;
        if (store.distance_to(f.balls[i].center, x) < thr) return false;
    }
    return true;
}

bool stratum_membership(const BallFamily& f, const PointStore& store, PointId x, int n) {
    return stratum_membership_coords(f, store, store.coords(x), n);
}

int stratum_level(const BallFamily& f, const PointStore& store, PointId x, int max_n) {
    for (int n = 1; n <= max_n; ++n)
        if (stratum_membership(f, store, x, n)) return n;
    return max_n + 1;
}

StratumNet sample_stratum_net(const BallFamily& f, int n, double eps, std::uint64_t seed,
                              PointStore& store) {
    StratumNet net;
    net.n = n;
    net.eps = eps;
    net.points = sample_net(
        eps, [&](std::span<const double> v) { return stratum_membership_coords(f, store, v, n); },
        seed, store);
    return net;
}

std::pair<PointId, double> stratum_witness(const BallFamily& f, PointStore& store, PointId x,
                                           int n) {
    if (stratum_membership(f, store, x, n)) return {x, 0.0};
    PointId cur = x;
    for (int iter = 0; iter < 16; ++iter) {
        // Exit the most deeply violated ball.
        double worst = 0.0;
        std::size_t worst_i = f.balls.size();
        for (std::size_t i = 0; i < f.balls.size(); ++i) {
            double thr = f.family_radius(i) / n;
            double d = store.distance(f.balls[i].center, cur);
            if (d < thr && thr - d > worst) {
                worst = thr - d;
                worst_i = i;
            }
        }
        if (worst_i == f.balls.size()) break;
        const BallEntry& ball = f.balls[worst_i];
        double thr = f.family_radius(worst_i) / n;
        double target = thr * (1.0 + 1e-6);
        if (store.distance(ball.center, cur) < 1e-12) {
            // Centre point: push along a deterministic tangent direction.
            const int dim = store.ambient_dim();
            auto cc = store.coords(ball.center);
            double v[kMaxAmbientDim] = {0};
            for (int ax = 0; ax < dim; ++ax) {
                double t[kMaxAmbientDim] = {0};
                t[ax] = 1.0;
                double along = dot({t, static_cast<std::size_t>(dim)}, cc);
                double tn = 0.0;
                for (int i = 0; i < dim; ++i) {
                    v[i] = t[i] - along * cc[i];
                    tn += v[i] * v[i];
                }
                if (tn > 1e-6) break;
            }
            double out[kMaxAmbientDim];
            auto xc = store.coords(cur);
            double vn = norm({v, static_cast<std::size_t>(dim)});
            for (int i = 0; i < dim; ++i)
                out[i] = std::cos(target) * xc[i] + std::sin(target) * v[i] / vn;
            cur = store.append_unit({out, static_cast<std::size_t>(dim)});
        } else {
            cur = store.append_radial_point(ball.center, cur, target);
        }
        if (stratum_membership(f, store, cur, n)) return {cur, store.distance(x, cur)};
    }
    if (stratum_membership(f, store, cur, n)) return {cur, store.distance(x, cur)};
    throw OpError(ErrorCode::TOO_FAR, "no stratum witness found by push-out");
}

double approx_radius(const BallFamily& f, int n, double eps, const PointStore& store_in,
                     PointStore& store) {
    (void)store_in;
    if (eps <= 0.0) throw OpError(ErrorCode::PRECONDITION_FAILED, "eps must be positive");
    if (f.balls.empty()) return 0.0;

    // Candidate thresholds: the distinct family radii (cutoff-truncated tail
    // is absent by fiat), largest first, plus a sentinel above the largest
    // radius for the case where no ball obstructs the density at all.
    std::set<double, std::greater<double>> cand;
    for (std::size_t i = 0; i < f.balls.size(); ++i)
        if (f.family_radius(i) >= f.cutoff) cand.insert(f.family_radius(i));
    if (cand.empty()) return 0.0;
    cand.insert(2.0 * *cand.begin());

    // Probe stream: global seeded sample plus targeted probes at ball centres
    // and on shallow rings inside each ball (the depth extremes).
    std::vector<PointId> probes;
    {
        Rng rng(f.params.seed ^ 0x9e3779b97f4a7c15ull);
        const int dim = store.ambient_dim();
        std::vector<double> v(dim);
        std::size_t count = std::min<std::size_t>(4000, static_cast<std::size_t>(200.0 / eps));
        for (std::size_t i = 0; i < count; ++i) {
            for (int j = 0; j < dim; j += 2) {
                double u1 = std::max(rng.next_double(), 1e-300);
                double u2 = rng.next_double();
                double r = std::sqrt(-2.0 * std::log(u1));
                v[j] = r * std::cos(2.0 * kPi * u2);
                if (j + 1 < dim) v[j + 1] = r * std::sin(2.0 * kPi * u2);
            }
            if (norm(v) < 1e-12) continue;
            probes.push_back(store.append_unit(v));
        }
        for (std::size_t i = 0; i < f.balls.size(); ++i) {
            probes.push_back(f.balls[i].center);
            double ring = 0.5 * f.family_radius(i) / n;
            if (ring > 1e-14)
                probes.push_back(store.append_radial_point(f.balls[i].center,
                                                           probes.front(), ring));
        }
    }

    auto passes = [&](double r) {
        for (PointId q : probes) {
            // Probe must lie in the truncated complement.
            bool in_truncated = true;
            for (std::size_t i = 0; i < f.balls.size(); ++i) {
                if (f.family_radius(i) < r || f.family_radius(i) < f.cutoff) continue;
                if (store.distance(f.balls[i].center, q) < f.family_radius(i) / n) {
                    in_truncated = false;
                    break;
                }
            }
            if (!in_truncated) continue;
            try {
                auto [w, moved] = stratum_witness(f, store, q, n);
                (void)w;
                if (moved > eps) return false;
            } catch (const OpError&) {
                return false;
            }
        }
        return true;
    };

    for (double r : cand)
        if (passes(r)) return r;
    return *cand.rbegin();  // smallest radius: truncated set equals X_n
}

DiscreteChain project_to_stratum(const DiscreteChain& c, int n, double eps, const BallFamily& f,
                                 PointStore& store, const StratumNet* net) {
    std::map<PointId, PointId> vmap;
    for (PointId v : support(c)) {
        if (stratum_membership(f, store, v, n)) {
            vmap[v] = v;
            continue;
        }
        PointId best = v;
        double best_d = std::numeric_limits<double>::infinity();
        if (net) {
            for (PointId q : net->points) {
                double d = store.distance(v, q);
                if (d < best_d - 1e-15) {
                    best_d = d;
                    best = q;
                }
            }
        }
        try {
            auto [w, moved] = stratum_witness(f, store, v, n);
            if (moved < best_d - 1e-15) {
                best_d = moved;
                best = w;
            }
        } catch (const OpError&) {
            // fall through to the net candidate, if any
        }
        if (best_d > eps)
            throw OpError(ErrorCode::TOO_FAR, "support point farther than eps from the stratum");
        vmap[v] = best;
    }
    DiscreteChain out(c.dimension());
    for (const auto& [s, a] : c.terms()) {
        DiscreteSimplex t;
        t.verts.reserve(s.verts.size());
        for (PointId v : s.verts) t.verts.push_back(vmap.at(v));
        out.add(t, a);
    }
    return out;
}

}  // namespace stratafill
