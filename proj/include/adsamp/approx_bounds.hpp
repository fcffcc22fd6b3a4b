#pragma once

#include "adsamp/core.hpp"
#include "adsamp/tensor_solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace adsamp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Arc-length parameterised plane curve f(s), s in [s0, s0 + length].
struct CurveSpec {
    std::string name;
    std::function<Vec2(double)> evaluator;
    double s0 = 0.0;
    double length = 0.0;
    double max_curvature = 0.0;
    bool closed = false;

    double s1() const { return s0 + length; }
};

CurveSpec make_circle(double radius);
CurveSpec make_line(Vec2 from, Vec2 to);
// Axis-aligned ellipse with semi-axes a >= b; arc length by Gauss-Legendre
// quadrature, reparameterised by arc length through a lookup table.
CurveSpec make_ellipse(double a, double b);

struct PolyChain {
    std::vector<Vec2> vertices;  // M + 1 points; closed chains repeat the first
    int segment_count() const { return static_cast<int>(vertices.size()) - 1; }
};

// Vertices on the curve at arc-length positions s0 + k * l / M.
PolyChain approximate_curve(const CurveSpec& curve, int segments);

struct ApproxErrorOptions {
    int samples_per_segment = 64;
    int curve_samples = 4096;
    int refine_iterations = 80;   // golden-section steps per refinement
};

struct ApproxError {
    double epsilon = 0.0;
    // Densification used for the sup/inf: chain parameter step and curve
    // arc-length step before refinement.
    double chain_step = 0.0;
    double curve_step = 0.0;
};

// epsilon = sup_t inf_s ||p(t) - f(s)||, by dense sampling of both the chain
// and the curve followed by golden-section refinement of the best candidates.
ApproxError approx_error(const CurveSpec& curve, const PolyChain& chain, const ApproxErrorOptions& options = {});

struct BoundRow {
    int segments = 0;                  // M
    int sample_points = 0;             // N = 3M
    double epsilon = 0.0;
    double small_angle_bound = 0.0;    // kappa l^2 / (8 M^2)
    double arc_bound = 0.0;            // (1 - cos a) / kappa with a * r = l / (2M)
    double arc_bound_double = 0.0;     // same with a * r = l / M
    double epsilon_m2 = 0.0;           // epsilon * M^2
    double ratio_to_previous = 0.0;    // epsilon(previous M) / epsilon(M); 0 for the first row
    double chain_step = 0.0;
};

std::vector<BoundRow> bound_experiment(const CurveSpec& curve, const std::vector<int>& segment_counts,
                                       const ApproxErrorOptions& options = {});

struct BoundaryErrorRow {
    int requested_n = 0;
    int n = 0;                 // side * side
    int side = 0;
    bool adjusted = false;     // requested N was not a perfect square
    double uniform_error = 0.0;
    double adaptive_error = 0.0;  // NaN when the adaptive arm is not run
};

struct BoundaryErrorTable {
    std::vector<BoundaryErrorRow> rows;
    double uniform_slope = 0.0;    // least-squares slope of log(error) vs log(N)
    double adaptive_slope = 0.0;
};

// Boundary localisation error of sparse sampling: sample an n x n tensor,
// classify the samples by ground truth, upsample, and take the largest
// Euclidean pixel distance from a misclassified pixel to the nearest
// ground-truth boundary pixel. Runs the uniform tensor and, when
// adaptive_lambda is set, the solved tensor at the same n.
BoundaryErrorTable uniform_grid_boundary_error(const LabelMap& shape, const TargetClassSet& targets,
                                               const std::vector<int>& n_list,
                                               std::optional<double> adaptive_lambda = std::nullopt);

// Disk of the given radius centred in a size x size canvas (class 1 on 0).
LabelMap make_disk_shape(int size, double radius, double center_row, double center_col);

double localization_error(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets);

double loglog_slope(const std::vector<double>& n, const std::vector<double>& error);

} // namespace adsamp
