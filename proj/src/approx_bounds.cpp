#include "adsamp/approx_bounds.hpp"

#include "adsamp/boundary.hpp"
#include "adsamp/resampler.hpp"
#include "adsamp/upsampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace adsamp {

namespace {

constexpr double kGolden = 0.6180339887498949;

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Golden-section minimum of f on [lo, hi].
template <typename F>
std::pair<double, double> golden_minimum(F&& f, double lo, double hi, int iterations) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iterations && b - a > 0.0; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// 5-point Gauss-Legendre on [a, b].
template <typename F>
double gauss_legendre(F&& f, double a, double b) {
    static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                0.2369268850561891, 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += w[k] * f(mid + half * x[k]);
    return sum * half;
}

// Nearest-curve-point search over a fixed dense sampling of the curve.
class CurveIndex {
public:
    CurveIndex(const CurveSpec& curve, int samples, int refine_iterations)
        : curve_(curve), refine_(refine_iterations) {
        const int n = std::max(samples, 2);
        step_ = curve.length / n;
        const int count = curve.closed ? n : n + 1;
        s_.resize(count);
        pts_.resize(count);
        for (int k = 0; k < count; ++k) {
            s_[k] = curve.s0 + k * step_;
            pts_[k] = curve.evaluator(s_[k]);
        }
    }

    double step() const { return step_; }

    double distance_to(Vec2 p) const {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts_.size(); ++k) {
            const double dx = pts_[k].x - p.x;
            const double dy = pts_[k].y - p.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = k;
            }
        }
        double lo = s_[best] - step_;
        double hi = s_[best] + step_;
        if (!curve_.closed) {
            lo = std::max(lo, curve_.s0);
            hi = std::min(hi, curve_.s1());
        }
        auto at = [&](double s) {
            if (curve_.closed) {
                s = std::fmod(s - curve_.s0, curve_.length);
                if (s < 0) s += curve_.length;
                s += curve_.s0;
            }
            return distance(curve_.evaluator(s), p);
        };
        const double refined = golden_minimum(at, lo, hi, refine_).second;
        return std::min(refined, std::sqrt(best_d2));
    }

private:
    const CurveSpec& curve_;
    int refine_;
    double step_ = 0.0;
    std::vector<double> s_;
    std::vector<Vec2> pts_;
};

// Arc-length table for an ellipse (a cos t, b sin t).
struct EllipseArc {
    double a;
    double b;
    std::vector<double> theta;
    std::vector<double> cumulative;

    double speed(double t) const { return std::hypot(a * std::sin(t), b * std::cos(t)); }

    EllipseArc(double a_, double b_, int intervals) : a(a_), b(b_) {
        theta.resize(intervals + 1);
        cumulative.resize(intervals + 1);
        const double dt = 2.0 * std::numbers::pi / intervals;
        cumulative[0] = 0.0;
        for (int k = 0; k <= intervals; ++k) theta[k] = k * dt;
        for (int k = 0; k < intervals; ++k) {
            cumulative[k + 1] = cumulative[k] + gauss_legendre([&](double t) { return speed(t); }, theta[k], theta[k + 1]);
        }
    }

    double total() const { return cumulative.back(); }

    Vec2 at_arc_length(double s) const {
        s = std::clamp(s, 0.0, total());
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
        std::size_t k = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
        k = std::min(k, theta.size() - 2);
        double t = theta[k] + (s - cumulative[k]) / speed(theta[k] + 1e-300);
        for (int it_n = 0; it_n < 4; ++it_n) {
            const double arc = cumulative[k] + gauss_legendre([&](double u) { return speed(u); }, theta[k], t);
            t -= (arc - s) / speed(t);
        }
        return {a * std::cos(t), b * std::sin(t)};
    }
};

} // namespace

CurveSpec make_circle(double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::config, "circle radius must be positive");
    CurveSpec c;
    c.name = "circle";
    c.evaluator = [radius](double s) { return Vec2{radius * std::cos(s / radius), radius * std::sin(s / radius)}; };
    c.length = 2.0 * std::numbers::pi * radius;
    c.max_curvature = 1.0 / radius;
    c.closed = true;
    return c;
}

CurveSpec make_line(Vec2 from, Vec2 to) {
    const double len = distance(from, to);
    if (!(len > 0.0)) throw Error(ErrorCode::config, "line endpoints must differ");
    CurveSpec c;
    c.name = "line";
    c.evaluator = [from, to, len](double s) {
        const double t = s / len;
        return Vec2{from.x + t * (to.x - from.x), from.y + t * (to.y - from.y)};
    };
    c.length = len;
    c.max_curvature = 0.0;
    return c;
}

CurveSpec make_ellipse(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::config, "ellipse semi-axes must be positive");
    if (a < b) std::swap(a, b);
    auto arc = std::make_shared<EllipseArc>(a, b, 4096);
    CurveSpec c;
    c.name = "ellipse";
    c.evaluator = [arc](double s) { return arc->at_arc_length(s); };
    c.length = arc->total();
    c.max_curvature = a / (b * b);
    c.closed = true;
    return c;
}

PolyChain approximate_curve(const CurveSpec& curve, int segments) {
    if (segments < 1) throw Error(ErrorCode::config, "chain needs at least one segment");
    PolyChain chain;
    chain.vertices.reserve(segments + 1);
    for (int k = 0; k < segments; ++k) {
        chain.vertices.push_back(curve.evaluator(curve.s0 + curve.length * k / segments));
    }
    chain.vertices.push_back(curve.closed ? chain.vertices.front() : curve.evaluator(curve.s1()));
    return chain;
}

ApproxError approx_error(const CurveSpec& curve, const PolyChain& chain, const ApproxErrorOptions& options) {
    if (chain.segment_count() < 1) throw Error(ErrorCode::config, "chain has no segments");
    if (options.samples_per_segment < 2) throw Error(ErrorCode::config, "need at least 2 samples per segment");
    const CurveIndex index(curve, options.curve_samples, options.refine_iterations);
    const int per = options.samples_per_segment;

    auto point_on = [&](int seg, double t) {
        const Vec2 a = chain.vertices[seg];
        const Vec2 b = chain.vertices[seg + 1];
        return Vec2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    };

    struct Candidate {
        double value;
        int seg;
        double t;
    };
    constexpr std::size_t kKeep = 8;
    std::vector<Candidate> top;
    for (int seg = 0; seg < chain.segment_count(); ++seg) {
        for (int k = 0; k <= per; ++k) {
            const double t = static_cast<double>(k) / per;
            const double d = index.distance_to(point_on(seg, t));
            if (top.size() < kKeep || d > top.back().value) {
                top.push_back({d, seg, t});
                std::sort(top.begin(), top.end(), [](const Candidate& x, const Candidate& y) { return x.value > y.value; });
                if (top.size() > kKeep) top.pop_back();
            }
        }
    }

    double eps = top.front().value;
    const double dt = 1.0 / per;
    for (const Candidate& c : top) {
        const auto refined = golden_minimum(
            [&](double t) { return -index.distance_to(point_on(c.seg, t)); }, std::max(0.0, c.t - dt),
            std::min(1.0, c.t + dt), options.refine_iterations);
        eps = std::max(eps, -refined.second);
    }

    double chain_step = 0.0;
    for (int seg = 0; seg < chain.segment_count(); ++seg) {
        chain_step = std::max(chain_step, distance(chain.vertices[seg], chain.vertices[seg + 1]) / per);
    }
    return {eps, chain_step, index.step()};
}

std::vector<BoundRow> bound_experiment(const CurveSpec& curve, const std::vector<int>& segment_counts,
                                       const ApproxErrorOptions& options) {
    if (!std::is_sorted(segment_counts.begin(), segment_counts.end()) ||
        std::adjacent_find(segment_counts.begin(), segment_counts.end()) != segment_counts.end()) {
        throw Error(ErrorCode::config, "segment counts must be strictly increasing");
    }
    std::vector<BoundRow> rows;
    const double kappa = curve.max_curvature;
    const double l = curve.length;
    for (int m : segment_counts) {
        const ApproxError err = approx_error(curve, approximate_curve(curve, m), options);
        BoundRow row;
        row.segments = m;
        row.sample_points = 3 * m;
        row.epsilon = err.epsilon;
        row.chain_step = err.chain_step;
        row.small_angle_bound = kappa * l * l / (8.0 * m * m);
        if (kappa > 0.0) {
            row.arc_bound = (1.0 - std::cos(kappa * l / (2.0 * m))) / kappa;
            row.arc_bound_double = (1.0 - std::cos(kappa * l / m)) / kappa;
        }
        row.epsilon_m2 = err.epsilon * m * m;
        if (!rows.empty() && err.epsilon > 0.0) row.ratio_to_previous = rows.back().epsilon / err.epsilon;
        rows.push_back(row);
    }
    return rows;
}

LabelMap make_disk_shape(int size, double radius, double center_row, double center_col) {
    LabelMap shape(PixelGrid(size, size), 0);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double dr = r - center_row;
            const double dc = c - center_col;
            if (dr * dr + dc * dc <= radius * radius) shape.at(r, c) = 1;
        }
    return shape;
}

double localization_error(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets) {
    if (!(pred.grid() == gt.grid())) throw Error(ErrorCode::shape, "prediction and ground truth differ in size");
    const BoundaryMap boundary = extract_boundary(gt, targets);
    if (boundary.empty()) return 0.0;
    const std::vector<double> dist = boundary_distance_pixels(boundary);
    double worst = 0.0;
    for (std::size_t f = 0; f < dist.size(); ++f) {
        if (gt.is_ignored(gt.labels()[f]) || pred.labels()[f] == gt.labels()[f]) continue;
        worst = std::max(worst, dist[f]);
    }
    return worst;
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& error) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (!(error[k] > 0.0) || !(n[k] > 0.0)) continue;
        const double x = std::log(n[k]);
        const double y = std::log(error[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

LabelMap classify_and_upsample(const LabelMap& shape, const SamplingTensor& phi) {
    const LabelMap sampled = sample_labels(shape, phi);
    const int classes = std::max<int>(shape.max_class(), sampled.max_class()) + 1;
    ScoreMap scores(phi.grid_h(), phi.grid_w(), std::max(classes, 1));
    for (int i = 0; i < phi.grid_h(); ++i)
        for (int j = 0; j < phi.grid_w(); ++j) {
            const ClassId id = sampled.at(i, j);
            if (sampled.is_ignored(id)) {
                for (int k = 0; k < scores.num_classes(); ++k) scores.at(k, i, j) = 1.0 / scores.num_classes();
            } else {
                scores.at(id, i, j) = 1.0;
            }
        }
    return upsample_labels(scores, build_coverage(phi, shape.grid()), shape.ignore_id());
}

} // namespace

BoundaryErrorTable uniform_grid_boundary_error(const LabelMap& shape, const TargetClassSet& targets,
                                               const std::vector<int>& n_list, std::optional<double> adaptive_lambda) {
    BoundaryErrorTable table;
    const BoundaryMap boundary = extract_boundary(shape, targets);
    std::vector<double> ns, uniform_err, adaptive_err;
    for (int requested : n_list) {
        if (requested < 4) throw Error(ErrorCode::config, "N must be at least 4");
        BoundaryErrorRow row;
        row.requested_n = requested;
        row.side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(requested))));
        row.n = row.side * row.side;
        row.adjusted = row.n != requested;
        row.uniform_error = localization_error(
            classify_and_upsample(shape, SamplingTensor::uniform(row.side, row.side)), shape, targets);
        row.adaptive_error = std::numeric_limits<double>::quiet_NaN();
        if (adaptive_lambda) {
            const NearestBoundaryField b = nearest_boundary_field(boundary, row.side, row.side);
            const SamplingTensor phi = solve_sampling_tensor(b, EnergyParams{*adaptive_lambda});
            row.adaptive_error = localization_error(classify_and_upsample(shape, phi), shape, targets);
        }
        ns.push_back(row.n);
        uniform_err.push_back(row.uniform_error);
        adaptive_err.push_back(row.adaptive_error);
        table.rows.push_back(row);
    }
    table.uniform_slope = loglog_slope(ns, uniform_err);
    table.adaptive_slope = adaptive_lambda ? loglog_slope(ns, adaptive_err) : std::numeric_limits<double>::quiet_NaN();
    return table;
}

} // namespace adsamp
