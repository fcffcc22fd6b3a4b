#include "adsamp/tensor_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adsamp {

namespace {

constexpr double kPrincipleSlack = 1e-9;

std::size_t idx(int c, int i, int j, int h, int w) {
    return (static_cast<std::size_t>(c) * h + i) * w + j;
}

void check_shape(int h, int w) {
    if (h < 2 || w < 2) {
        throw Error(ErrorCode::size, "sampling tensor must be at least 2x2, got " + std::to_string(h) + "x" +
                                         std::to_string(w));
    }
}

// One coordinate channel laid out so that its constrained lines are the first
// row (value 0) and the last row (value 1). Channel 1 is handled by
// transposing into this layout.
class RowFixedChannel {
public:
    RowFixedChannel(int rows, int cols, std::vector<double> target, double lambda)
        : rows_(rows), cols_(cols), target_(std::move(target)), lambda_(lambda) {}

    int free_count() const { return (rows_ - 2) * cols_; }

    double diagonal(int c) const {
        const int degree = 2 + (c > 0) + (c < cols_ - 1);
        return 1.0 + lambda_ * degree;
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const int fr = rows_ - 2;
        for (int r = 0; r < fr; ++r) {
            for (int c = 0; c < cols_; ++c) {
                const std::size_t k = static_cast<std::size_t>(r) * cols_ + c;
                double neighbours = 0.0;
                if (r > 0) neighbours += x[k - cols_];
                if (r + 1 < fr) neighbours += x[k + cols_];
                if (c > 0) neighbours += x[k - 1];
                if (c + 1 < cols_) neighbours += x[k + 1];
                y[k] = diagonal(c) * x[k] - lambda_ * neighbours;
            }
        }
    }

    std::vector<double> rhs() const {
        std::vector<double> out(free_count());
        const int fr = rows_ - 2;
        for (int r = 0; r < fr; ++r)
            for (int c = 0; c < cols_; ++c) {
                double v = target_[static_cast<std::size_t>(r + 1) * cols_ + c];
                // Row above the first free row is pinned at 0; row below the
                // last free row is pinned at 1.
                if (r == fr - 1) v += lambda_;
                out[static_cast<std::size_t>(r) * cols_ + c] = v;
            }
        return out;
    }

    std::vector<double> free_part(const std::vector<double>& full) const {
        return {full.begin() + cols_, full.end() - cols_};
    }

    std::vector<double> assemble(const std::vector<double>& free) const {
        std::vector<double> full(static_cast<std::size_t>(rows_) * cols_);
        std::fill(full.begin(), full.begin() + cols_, 0.0);
        std::copy(free.begin(), free.end(), full.begin() + cols_);
        std::fill(full.end() - cols_, full.end(), 1.0);
        return full;
    }

    std::vector<double> solve_dense(SolveStats& stats) const {
        const int n = free_count();
        std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
        const int fr = rows_ - 2;
        for (int r = 0; r < fr; ++r)
            for (int c = 0; c < cols_; ++c) {
                const int k = r * cols_ + c;
                a[static_cast<std::size_t>(k) * n + k] = diagonal(c);
                auto couple = [&](int other) { a[static_cast<std::size_t>(k) * n + other] = -lambda_; };
                if (r > 0) couple(k - cols_);
                if (r + 1 < fr) couple(k + cols_);
                if (c > 0) couple(k - 1);
                if (c + 1 < cols_) couple(k + 1);
            }
        // In-place Cholesky, lower triangle.
        for (int j = 0; j < n; ++j) {
            double d = a[static_cast<std::size_t>(j) * n + j];
            for (int k = 0; k < j; ++k) d -= a[static_cast<std::size_t>(j) * n + k] * a[static_cast<std::size_t>(j) * n + k];
            if (!(d > 0.0)) throw Error(ErrorCode::internal, "smoothness system is not positive definite");
            const double ljj = std::sqrt(d);
            a[static_cast<std::size_t>(j) * n + j] = ljj;
            for (int i = j + 1; i < n; ++i) {
                double s = a[static_cast<std::size_t>(i) * n + j];
                for (int k = 0; k < j; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
                a[static_cast<std::size_t>(i) * n + j] = s / ljj;
            }
        }
        std::vector<double> x = rhs();
        for (int i = 0; i < n; ++i) {
            double s = x[i];
            for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * x[k];
            x[i] = s / a[static_cast<std::size_t>(i) * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * x[k];
            x[i] = s / a[static_cast<std::size_t>(i) * n + i];
        }
        stats.flops += static_cast<double>(n) * n * n / 3.0 + 2.0 * n * n;
        stats.residual = std::max(stats.residual, relative_residual(x));
        return x;
    }

    std::vector<double> solve_cg(const SolveOptions& options, int max_iterations, SolveStats& stats) const {
        const std::size_t n = static_cast<std::size_t>(free_count());
        const std::vector<double> b = rhs();
        const double b_norm = norm(b);

        // Start from the uniform ramp, the large-lambda limit.
        std::vector<double> x(n);
        for (int r = 0; r < rows_ - 2; ++r)
            for (int c = 0; c < cols_; ++c)
                x[static_cast<std::size_t>(r) * cols_ + c] = static_cast<double>(r + 1) / (rows_ - 1);
        if (b_norm == 0.0) return std::vector<double>(n, 0.0);

        std::vector<double> r(n), z(n), p(n), ap(n);
        const double target = options.tolerance * b_norm;
        int iterations = 0;
        double residual = 0.0;
        // Restart from the true residual whenever the recursive one has
        // drifted below the target but the true one has not.
        while (true) {
            apply(x, ap);
            for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
            residual = norm(r);
            if (residual <= target) break;
            if (iterations >= max_iterations) {
                std::ostringstream msg;
                msg << "conjugate gradient did not converge after " << iterations
                    << " iterations, relative residual " << residual / b_norm;
                throw ConvergenceError(msg.str(), residual / b_norm, iterations);
            }
            for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diagonal(static_cast<int>(k % cols_));
            p = z;
            double rz = dot(r, z);
            while (iterations < max_iterations) {
                apply(p, ap);
                const double alpha = rz / dot(p, ap);
                for (std::size_t k = 0; k < n; ++k) {
                    x[k] += alpha * p[k];
                    r[k] -= alpha * ap[k];
                }
                ++iterations;
                if (norm(r) <= target) break;
                for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diagonal(static_cast<int>(k % cols_));
                const double rz_next = dot(r, z);
                const double beta = rz_next / rz;
                rz = rz_next;
                for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
            }
        }
        stats.iterations += iterations;
        stats.flops += 20.0 * static_cast<double>(n) * (iterations + 1);
        stats.residual = std::max(stats.residual, residual / b_norm);
        return x;
    }

    double residual_inf(const std::vector<double>& free) const {
        std::vector<double> ax(free.size());
        apply(free, ax);
        const std::vector<double> b = rhs();
        double worst = 0.0;
        for (std::size_t k = 0; k < ax.size(); ++k) worst = std::max(worst, std::abs(ax[k] - b[k]));
        return worst;
    }

private:
    double relative_residual(const std::vector<double>& x) const {
        std::vector<double> ax(x.size());
        apply(x, ax);
        const std::vector<double> b = rhs();
        for (std::size_t k = 0; k < ax.size(); ++k) ax[k] -= b[k];
        const double bn = norm(b);
        return bn == 0.0 ? norm(ax) : norm(ax) / bn;
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    }
    static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

    int rows_;
    int cols_;
    std::vector<double> target_;
    double lambda_;
};

std::vector<double> channel_rows_fixed(const NearestBoundaryField& b, int c, bool transpose) {
    const int h = b.grid_h();
    const int w = b.grid_w();
    std::vector<double> out(static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            if (transpose) out[static_cast<std::size_t>(j) * h + i] = b.at(c, i, j);
            else out[static_cast<std::size_t>(i) * w + j] = b.at(c, i, j);
        }
    return out;
}

std::vector<double> channel_rows_fixed(const SamplingTensor& phi, int c, bool transpose) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    std::vector<double> out(static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            if (transpose) out[static_cast<std::size_t>(j) * h + i] = phi.at(c, i, j);
            else out[static_cast<std::size_t>(i) * w + j] = phi.at(c, i, j);
        }
    return out;
}

void check_lambda(double lambda) {
    if (std::isnan(lambda) || lambda < 0.0) throw Error(ErrorCode::config, "lambda must be non-negative");
}

} // namespace

SamplingTensor SamplingTensor::uniform(int grid_h, int grid_w) {
    check_shape(grid_h, grid_w);
    std::vector<double> phi(2 * static_cast<std::size_t>(grid_h) * grid_w);
    for (int i = 0; i < grid_h; ++i)
        for (int j = 0; j < grid_w; ++j) {
            phi[idx(0, i, j, grid_h, grid_w)] = static_cast<double>(i) / (grid_h - 1);
            phi[idx(1, i, j, grid_h, grid_w)] = static_cast<double>(j) / (grid_w - 1);
        }
    return SamplingTensor(grid_h, grid_w, std::move(phi));
}

SamplingTensor SamplingTensor::from_values(int grid_h, int grid_w, std::vector<double> phi) {
    check_shape(grid_h, grid_w);
    if (phi.size() != 2 * static_cast<std::size_t>(grid_h) * grid_w) {
        throw Error(ErrorCode::shape, "sampling tensor data must hold 2*h*w values");
    }
    for (double v : phi) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::domain, "sampling tensor entry outside [0,1]");
    }
    for (int j = 0; j < grid_w; ++j) {
        if (phi[idx(0, 0, j, grid_h, grid_w)] != 0.0 || phi[idx(0, grid_h - 1, j, grid_h, grid_w)] != 1.0) {
            throw Error(ErrorCode::domain, "channel 0 violates the covering constraints");
        }
    }
    for (int i = 0; i < grid_h; ++i) {
        if (phi[idx(1, i, 0, grid_h, grid_w)] != 0.0 || phi[idx(1, i, grid_w - 1, grid_h, grid_w)] != 1.0) {
            throw Error(ErrorCode::domain, "channel 1 violates the covering constraints");
        }
    }
    return SamplingTensor(grid_h, grid_w, std::move(phi));
}

SamplingTensor SamplingTensor::transposed() const {
    std::vector<double> out(phi_.size());
    for (int i = 0; i < grid_h_; ++i)
        for (int j = 0; j < grid_w_; ++j) {
            out[idx(0, j, i, grid_w_, grid_h_)] = at(1, i, j);
            out[idx(1, j, i, grid_w_, grid_h_)] = at(0, i, j);
        }
    return SamplingTensor(grid_w_, grid_h_, std::move(out));
}

EnergyTerms energy_terms(const SamplingTensor& phi, const NearestBoundaryField& b) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    if (b.grid_h() != h || b.grid_w() != w) throw Error(ErrorCode::shape, "tensor and boundary field differ in shape");
    EnergyTerms terms;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double d = phi.at(c, i, j) - b.at(c, i, j);
                terms.data += d * d;
                if (j + 1 < w) {
                    const double e = phi.at(c, i, j) - phi.at(c, i, j + 1);
                    terms.smoothness += e * e;
                }
                if (i + 1 < h) {
                    const double e = phi.at(c, i, j) - phi.at(c, i + 1, j);
                    terms.smoothness += e * e;
                }
            }
    return terms;
}

double energy(const SamplingTensor& phi, const NearestBoundaryField& b, EnergyParams params) {
    check_lambda(params.lambda);
    const EnergyTerms t = energy_terms(phi, b);
    if (std::isinf(params.lambda)) return t.smoothness == 0.0 ? t.data : kInfiniteLambda;
    return t.data + params.lambda * t.smoothness;
}

SamplingTensor solve_sampling_tensor(const NearestBoundaryField& b, EnergyParams params,
                                     const SolveOptions& options, SolveStats* stats_out) {
    check_lambda(params.lambda);
    const int h = b.grid_h();
    const int w = b.grid_w();
    SolveStats stats;
    if (std::isinf(params.lambda)) {
        if (stats_out) *stats_out = stats;
        return SamplingTensor::uniform(h, w);
    }

    std::vector<double> phi(2 * static_cast<std::size_t>(h) * w);
    const bool dense = h * w < options.dense_below;
    const int max_iterations = options.max_iterations > 0 ? options.max_iterations : 10 * h * w;
    stats.method = params.lambda == 0.0 ? SolveStats::Method::trivial
                   : dense             ? SolveStats::Method::dense
                                       : SolveStats::Method::conjugate_gradient;

    for (int c = 0; c < 2; ++c) {
        const bool transpose = c == 1;
        const int rows = transpose ? w : h;
        const int cols = transpose ? h : w;
        RowFixedChannel channel(rows, cols, channel_rows_fixed(b, c, transpose), params.lambda);
        std::vector<double> free;
        if (channel.free_count() == 0) {
            free.clear();
        } else if (params.lambda == 0.0) {
            free = channel.free_part(channel_rows_fixed(b, c, transpose));
        } else if (dense) {
            free = channel.solve_dense(stats);
        } else {
            free = channel.solve_cg(options, max_iterations, stats);
        }
        for (double v : free) {
            if (!(v >= -kPrincipleSlack && v <= 1.0 + kPrincipleSlack)) {
                throw Error(ErrorCode::internal, "solver output escaped [0,1]; maximum principle violated");
            }
        }
        const std::vector<double> full = channel.assemble(free);
        for (int r = 0; r < rows; ++r)
            for (int q = 0; q < cols; ++q) {
                const int i = transpose ? q : r;
                const int j = transpose ? r : q;
                phi[idx(c, i, j, h, w)] = std::clamp(full[static_cast<std::size_t>(r) * cols + q], 0.0, 1.0);
            }
    }
    if (stats_out) *stats_out = stats;
    return SamplingTensor::from_values(h, w, std::move(phi));
}

double kkt_residual(const SamplingTensor& phi, const NearestBoundaryField& b, EnergyParams params) {
    check_lambda(params.lambda);
    if (std::isinf(params.lambda)) throw Error(ErrorCode::config, "KKT residual is undefined for infinite lambda");
    if (b.grid_h() != phi.grid_h() || b.grid_w() != phi.grid_w()) {
        throw Error(ErrorCode::shape, "tensor and boundary field differ in shape");
    }
    double worst = 0.0;
    for (int c = 0; c < 2; ++c) {
        const bool transpose = c == 1;
        const int rows = transpose ? phi.grid_w() : phi.grid_h();
        const int cols = transpose ? phi.grid_h() : phi.grid_w();
        RowFixedChannel channel(rows, cols, channel_rows_fixed(b, c, transpose), params.lambda);
        if (channel.free_count() == 0) continue;
        worst = std::max(worst, channel.residual_inf(channel.free_part(channel_rows_fixed(phi, c, transpose))));
    }
    return worst;
}

SamplingTensor project_constraints(int grid_h, int grid_w, std::span<const double> phi_raw) {
    check_shape(grid_h, grid_w);
    if (phi_raw.size() != 2 * static_cast<std::size_t>(grid_h) * grid_w) {
        throw Error(ErrorCode::shape, "raw tensor must hold 2*h*w values");
    }
    std::vector<double> phi(phi_raw.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (std::isnan(phi_raw[k])) throw Error(ErrorCode::domain, "raw tensor contains NaN");
        phi[k] = std::clamp(phi_raw[k], 0.0, 1.0);
    }
    for (int j = 0; j < grid_w; ++j) {
        phi[idx(0, 0, j, grid_h, grid_w)] = 0.0;
        phi[idx(0, grid_h - 1, j, grid_h, grid_w)] = 1.0;
    }
    for (int i = 0; i < grid_h; ++i) {
        phi[idx(1, i, 0, grid_h, grid_w)] = 0.0;
        phi[idx(1, i, grid_w - 1, grid_h, grid_w)] = 1.0;
    }
    return SamplingTensor(grid_h, grid_w, std::move(phi));
}

} // namespace adsamp
