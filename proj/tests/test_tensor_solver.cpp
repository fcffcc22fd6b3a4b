#include "adsamp/tensor_solver.hpp"

#include "dense_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace adsamp;
using namespace testing_support;

namespace {

NearestBoundaryField field_from(const SamplingTensor& phi) {
    NearestBoundaryField b(phi.grid_h(), phi.grid_w());
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < phi.grid_h(); ++i)
            for (int j = 0; j < phi.grid_w(); ++j) b.at(c, i, j) = phi.at(c, i, j);
    return b;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

bool is_free(int c, int i, int j, int h, int w) {
    return c == 0 ? (i != 0 && i != h - 1) : (j != 0 && j != w - 1);
}

} // namespace

TEST_CASE("uniform tensors") {
    const SamplingTensor u = SamplingTensor::uniform(2, 2);
    CHECK(u.values() == std::vector<double>{0, 0, 1, 1, 0, 1, 0, 1});
    const SamplingTensor v = SamplingTensor::uniform(3, 2);
    CHECK(v.values() == std::vector<double>{0, 0, 0.5, 0.5, 1, 1, 0, 1, 0, 1, 0, 1});
    CHECK_THROWS_AS(SamplingTensor::uniform(1, 4), Error);
}

TEST_CASE("energy of the 2x2 uniform tensor") {
    const SamplingTensor u = SamplingTensor::uniform(2, 2);
    const NearestBoundaryField b = field_from(u);
    const EnergyTerms t = energy_terms(u, b);
    CHECK(t.data == 0.0);
    CHECK(t.smoothness == 4.0);
    CHECK(energy(u, b, {1.0}) == 4.0);
}

TEST_CASE("b equal to the uniform grid gives back the uniform grid") {
    for (auto [h, w] : {std::pair{2, 2}, {5, 7}, {16, 16}, {40, 33}}) {
        const SamplingTensor u = SamplingTensor::uniform(h, w);
        for (double lambda : {0.0, 0.3, 1.0, 50.0}) {
            const SamplingTensor phi = solve_sampling_tensor(field_from(u), {lambda});
            CHECK(max_abs_diff(phi.values(), u.values()) < 1e-9);
        }
    }
}

TEST_CASE("lambda zero copies b onto the free entries") {
    std::mt19937_64 rng(1);
    for (auto [h, w] : {std::pair{3, 3}, {8, 8}, {20, 31}}) {
        const NearestBoundaryField b = random_field(h, w, rng);
        SolveStats stats;
        const SamplingTensor phi = solve_sampling_tensor(b, {0.0}, {}, &stats);
        CHECK(stats.method == SolveStats::Method::trivial);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j)
                    if (is_free(c, i, j, h, w)) CHECK(phi.at(c, i, j) == b.at(c, i, j));
    }
}

TEST_CASE("infinite lambda returns the uniform tensor exactly") {
    std::mt19937_64 rng(2);
    const SamplingTensor phi = solve_sampling_tensor(random_field(9, 6, rng), {kInfiniteLambda});
    CHECK(phi == SamplingTensor::uniform(9, 6));
}

TEST_CASE("solver agrees with the dense normal equations") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 40; ++n) {
        const int h = uniform_int(rng, 2, 18);
        const int w = uniform_int(rng, 2, 18);
        const NearestBoundaryField b = n % 2 ? random_field(h, w, rng) : random_boundary_field(h, w, rng);
        for (double lambda : {0.0, 0.5, 1.0, 10.0}) {
            const SamplingTensor phi = solve_sampling_tensor(b, {lambda});
            CHECK(max_abs_diff(phi.values(), dense_oracle_solve(b, lambda)) < 1e-8);
        }
    }
}

TEST_CASE("conjugate gradient path reaches a small KKT residual") {
    std::mt19937_64 rng(4);
    const NearestBoundaryField b = random_boundary_field(48, 40, rng);
    SolveStats stats;
    const SamplingTensor phi = solve_sampling_tensor(b, {2.0}, {}, &stats);
    CHECK(stats.method == SolveStats::Method::conjugate_gradient);
    CHECK(stats.iterations > 0);
    CHECK(kkt_residual(phi, b, {2.0}) < 1e-8);
    CHECK(max_abs_diff(phi.values(), dense_oracle_solve(b, 2.0)) < 1e-8);
}

TEST_CASE("solution never has higher energy than the uniform tensor") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 50; ++n) {
        const int h = uniform_int(rng, 2, 24);
        const int w = uniform_int(rng, 2, 24);
        const NearestBoundaryField b = random_boundary_field(h, w, rng);
        const double lambda = std::pow(10.0, uniform01(rng) * 4 - 2);
        const SamplingTensor phi = solve_sampling_tensor(b, {lambda});
        CHECK(energy(phi, b, {lambda}) <= energy(SamplingTensor::uniform(h, w), b, {lambda}) + 1e-12);
    }
}

TEST_CASE("larger lambda trades data fit for smoothness") {
    std::mt19937_64 rng(6);
    const NearestBoundaryField b = random_boundary_field(12, 12, rng);
    double prev_data = -1.0;
    double prev_smooth = 1e300;
    for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
        const EnergyTerms t = energy_terms(solve_sampling_tensor(b, {lambda}), b);
        CHECK(t.data >= prev_data - 1e-12);
        CHECK(t.smoothness <= prev_smooth + 1e-12);
        prev_data = t.data;
        prev_smooth = t.smoothness;
    }
}

TEST_CASE("very large lambda approaches the uniform tensor") {
    std::mt19937_64 rng(7);
    for (auto [h, w] : {std::pair{8, 8}, {16, 16}, {32, 24}}) {
        const NearestBoundaryField b = random_field(h, w, rng);
        const SamplingTensor phi = solve_sampling_tensor(b, {1e9});
        CHECK(max_abs_diff(phi.values(), SamplingTensor::uniform(h, w).values()) < 1e-3);
    }
}

TEST_CASE("transposing b transposes the solution") {
    std::mt19937_64 rng(8);
    const NearestBoundaryField b = random_field(7, 11, rng);
    const SamplingTensor a = solve_sampling_tensor(b, {1.5}).transposed();
    const SamplingTensor t = solve_sampling_tensor(b.transposed(), {1.5});
    CHECK(max_abs_diff(a.values(), t.values()) < 1e-12);
}

TEST_CASE("maximum principle keeps entries inside the data range") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 20; ++n) {
        const int h = uniform_int(rng, 3, 30);
        const int w = uniform_int(rng, 3, 30);
        NearestBoundaryField b(h, w);
        const double lo = 0.3 + 0.2 * uniform01(rng);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) b.at(c, i, j) = lo + 0.1 * uniform01(rng);
        const SamplingTensor phi = solve_sampling_tensor(b, {uniform01(rng) * 5});
        for (double v : phi.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        for (int i = 1; i < h - 1; ++i)
            for (int j = 1; j < w - 1; ++j) CHECK(phi.at(0, i, j) > 0.0);
    }
}

TEST_CASE("project_constraints") {
    const std::vector<double> raw{0.3, -1.0, 0.4, 2.0, 0.7, 0.2, 0.9, 0.1};
    const SamplingTensor p = project_constraints(2, 2, raw);
    CHECK(p == SamplingTensor::uniform(2, 2));

    std::vector<double> raw3(2 * 3 * 3, 0.25);
    raw3[4] = 1.7;                 // channel 0, (1,1)
    raw3[9 + 4] = -0.2;            // channel 1, (1,1)
    const SamplingTensor q = project_constraints(3, 3, raw3);
    CHECK(q.at(0, 1, 1) == 1.0);
    CHECK(q.at(1, 1, 1) == 0.0);
    CHECK(q.at(0, 1, 0) == 0.25);
    CHECK(q.at(0, 2, 1) == 1.0);
    CHECK(q.at(1, 1, 2) == 1.0);
    CHECK(project_constraints(3, 3, q.values()) == q);

    std::vector<double> bad(8, 0.5);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(project_constraints(2, 2, bad), Error);
    CHECK_THROWS_AS(SamplingTensor::from_values(2, 2, {0, 0, 1, 0.9, 0, 1, 0, 1}), Error);
}

TEST_CASE("solver rejects bad lambda") {
    const NearestBoundaryField b(4, 4);
    CHECK_THROWS_AS(solve_sampling_tensor(b, {-1.0}), Error);
    CHECK_THROWS_AS(solve_sampling_tensor(b, {std::nan("")}), Error);
}
