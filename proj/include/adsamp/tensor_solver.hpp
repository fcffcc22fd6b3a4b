#pragma once

#include "adsamp/boundary.hpp"
#include "adsamp/core.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace adsamp {

// 2 x h x w sampling coordinates. Invariants: every entry lies in [0,1] and
// the covering constraints hold exactly (channel 0 is 0 on the first row and
// 1 on the last, channel 1 is 0 on the first column and 1 on the last).
class SamplingTensor {
public:
    static SamplingTensor uniform(int grid_h, int grid_w);

    // Accepts values that already satisfy the invariants; throws domain
    // error otherwise. Use project_constraints for raw data.
    static SamplingTensor from_values(int grid_h, int grid_w, std::vector<double> phi);

    int grid_h() const noexcept { return grid_h_; }
    int grid_w() const noexcept { return grid_w_; }
    double at(int c, int i, int j) const { return phi_[(static_cast<std::size_t>(c) * grid_h_ + i) * grid_w_ + j]; }
    Point point(int i, int j) const { return {at(0, i, j), at(1, i, j)}; }
    const std::vector<double>& values() const noexcept { return phi_; }

    SamplingTensor transposed() const;

    friend bool operator==(const SamplingTensor&, const SamplingTensor&) = default;

private:
    SamplingTensor(int grid_h, int grid_w, std::vector<double> phi)
        : grid_h_(grid_h), grid_w_(grid_w), phi_(std::move(phi)) {}

    friend SamplingTensor project_constraints(int, int, std::span<const double>);

    int grid_h_;
    int grid_w_;
    std::vector<double> phi_;
};

inline SamplingTensor uniform_tensor(int grid_h, int grid_w) { return SamplingTensor::uniform(grid_h, grid_w); }

struct EnergyParams {
    // Smoothness weight. +inf selects the uniform tensor.
    double lambda = 1.0;
};

constexpr double kInfiniteLambda = std::numeric_limits<double>::infinity();

struct EnergyTerms {
    double data = 0.0;
    double smoothness = 0.0;
};

// Data term sum ||phi_ij - b_ij||^2 and smoothness sum over unordered
// 4-neighbour pairs ||phi_ij - phi_i'j'||^2.
EnergyTerms energy_terms(const SamplingTensor& phi, const NearestBoundaryField& b);
double energy(const SamplingTensor& phi, const NearestBoundaryField& b, EnergyParams params);

struct SolveOptions {
    double tolerance = 1e-10;         // relative residual ||r|| / ||rhs||
    int max_iterations = 0;           // 0 means 10 * h * w
    int dense_below = 16 * 16;        // dense Cholesky when h * w is smaller
};

struct SolveStats {
    enum class Method { trivial, dense, conjugate_gradient };
    Method method = Method::trivial;
    int iterations = 0;               // summed over both channels
    double residual = 0.0;            // max final relative residual
    double flops = 0.0;               // rough operation count
};

// Global minimiser of the energy subject to the covering constraints. The two
// coordinate channels decouple; each solves (I + lambda L) x = rhs over its
// free variables.
SamplingTensor solve_sampling_tensor(const NearestBoundaryField& b, EnergyParams params,
                                     const SolveOptions& options = {}, SolveStats* stats = nullptr);

// ||(I + lambda L) x - rhs||_inf over the free variables of both channels.
double kkt_residual(const SamplingTensor& phi, const NearestBoundaryField& b, EnergyParams params);

// Clamp into [0,1], then overwrite the constrained border lines. Idempotent.
SamplingTensor project_constraints(int grid_h, int grid_w, std::span<const double> phi_raw);

} // namespace adsamp
