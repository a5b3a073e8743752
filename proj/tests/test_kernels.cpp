#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "divrate/kernels.hpp"

using namespace divrate;

namespace {

// Reproducible fill; values span several orders of magnitude so that
// summation order actually matters if an implementation reorders.
std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v[i] = (u - 0.25) * std::pow(10.0, 6.0 * u - 3.0);
    }
    return v;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t ia, ib;
        std::memcpy(&ia, &a[i], sizeof ia);
        std::memcpy(&ib, &b[i], sizeof ib);
        if (ia != ib)
            return false;
    }
    return true;
}

// Sizes straddling the serial/parallel dispatch threshold plus a block
// remainder case.
const std::size_t sizes[] = {64, kernels::parallel_threshold - 1,
                             kernels::parallel_threshold,
                             4 * kernels::parallel_threshold + 137};

} // namespace

TEST_CASE("serial and parallel generator evaluations agree bitwise") {
    for (std::size_t n : sizes) {
        const auto a = random_values(n, 11);
        auto g = random_values(n, 12);
        auto B = random_values(n, 13);
        for (double& x : g)
            x = std::abs(x);
        for (double& x : B)
            x = std::abs(x);
        std::vector<double> serial(n), parallel(n), dispatched(n);
        kernels::generator_rhs_serial(a, g, B, 1.0 / 256.0, serial);
        kernels::generator_rhs_omp(a, g, B, 1.0 / 256.0, parallel);
        kernels::generator_rhs(a, g, B, 1.0 / 256.0, dispatched);
        CHECK(bitwise_equal(serial, parallel));
        CHECK(bitwise_equal(serial, dispatched));
    }
}

TEST_CASE("generator stencil on a small hand-checked case") {
    // n = 8, dx = 1: flux difference, removal, and the doubled-index
    // dilation read are all visible by eye.
    const std::vector<double> a = {0, 1, 2, 3, 4, 3, 2, 1};
    const std::vector<double> g(8, 1.0);
    const std::vector<double> B = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    std::vector<double> out(8);
    kernels::generator_rhs_serial(a, g, B, 1.0, out);

    // i=0: no influx, a_0 = 0 -> only the dilation read at node 0.
    CHECK(out[0] == doctest::Approx(-0.0 - 0.0 + 4 * 0.5 * a[0]));
    // i=2: -(a2-a1)/dx - B2*a2 + 4*B4*a4
    CHECK(out[2] == doctest::Approx(-(2.0 - 1.0) - 0.5 * 2.0 + 4 * 0.5 * 4.0));
    // i=3: dilation reads node 6.
    CHECK(out[3] == doctest::Approx(-(3.0 - 2.0) - 0.5 * 3.0 + 4 * 0.5 * 2.0));
    // i=4: 2i = 8 is off the grid -> dilation contributes nothing.
    CHECK(out[4] == doctest::Approx(-(4.0 - 3.0) - 0.5 * 4.0));
    CHECK(out[7] == doctest::Approx(-(1.0 - 2.0) - 0.5 * 1.0));
}

TEST_CASE("fused Euler step clamps and reports") {
    for (std::size_t n : sizes) {
        const auto a = random_values(n, 21);
        const auto rhs = random_values(n, 22);
        std::vector<double> serial(n), parallel(n), dispatched(n);
        const auto s0 = kernels::euler_clamp_step_serial(a, rhs, 0.37, serial);
        const auto s1 = kernels::euler_clamp_step_omp(a, rhs, 0.37, parallel);
        const auto s2 = kernels::euler_clamp_step(a, rhs, 0.37, dispatched);
        CHECK(bitwise_equal(serial, parallel));
        CHECK(bitwise_equal(serial, dispatched));
        CHECK(s0.clamped_sum == s1.clamped_sum);
        CHECK(s0.max_value == s1.max_value);
        CHECK(s0.clamped_sum == s2.clamped_sum);
        CHECK(s0.max_value == s2.max_value);
    }

    SUBCASE("clamp bookkeeping on a crafted step") {
        const std::vector<double> a = {1.0, 0.5, 2.0};
        const std::vector<double> rhs = {-3.0, 1.0, -1.0};
        std::vector<double> out(3);
        const auto stats = kernels::euler_clamp_step_serial(a, rhs, 1.0, out);
        CHECK(out[0] == 0.0); // 1 - 3 clamped
        CHECK(out[1] == 1.5);
        CHECK(out[2] == 1.0);
        CHECK(stats.clamped_sum == doctest::Approx(2.0)); // -(1-3)
        CHECK(stats.max_value == 1.5);
    }

    SUBCASE("aliased output is allowed") {
        auto a = random_values(1000, 23);
        std::vector<double> expect(1000);
        kernels::euler_clamp_step_serial(a, a, 0.5, expect);
        kernels::euler_clamp_step_serial(a, a, 0.5, a);
        CHECK(bitwise_equal(a, expect));
    }
}

TEST_CASE("blocked reductions are thread-count independent") {
    for (std::size_t n : sizes) {
        const auto v = random_values(n, 31);
        const auto w = random_values(n, 32);
        CHECK(kernels::blocked_sum_serial(v) == kernels::blocked_sum_omp(v));
        CHECK(kernels::blocked_sum_serial(v) == kernels::blocked_sum(v));
        CHECK(kernels::abs_diff_sum_serial(v, w) == kernels::abs_diff_sum_omp(v, w));
        CHECK(kernels::abs_diff_sum_serial(v, w) == kernels::abs_diff_sum(v, w));
    }

    SUBCASE("sums match a plain accumulation on benign data") {
        std::vector<double> v(10000, 0.125);
        CHECK(kernels::blocked_sum(v) == doctest::Approx(1250.0).epsilon(1e-14));
        std::vector<double> w(10000, 0.25);
        CHECK(kernels::abs_diff_sum(v, w) == doctest::Approx(1250.0).epsilon(1e-14));
    }
}

TEST_CASE("causal convolution") {
    SUBCASE("serial and parallel agree bitwise") {
        const auto w = random_values(40, 41);
        for (std::size_t n : sizes) {
            const auto data = random_values(n, 42);
            std::vector<double> serial(n), parallel(n), dispatched(n);
            kernels::convolve_causal_serial(data, w, serial);
            kernels::convolve_causal_omp(data, w, parallel);
            kernels::convolve_causal(data, w, dispatched);
            CHECK(bitwise_equal(serial, parallel));
            CHECK(bitwise_equal(serial, dispatched));
        }
    }

    SUBCASE("delta window is the identity") {
        const auto data = random_values(500, 43);
        const std::vector<double> w = {1.0};
        std::vector<double> out(500);
        kernels::convolve_causal_serial(data, w, out);
        CHECK(bitwise_equal(data, out));
    }

    SUBCASE("shifted delta delays the signal and zero-pads the start") {
        const auto data = random_values(500, 44);
        const std::vector<double> w = {0.0, 1.0};
        std::vector<double> out(500);
        kernels::convolve_causal_serial(data, w, out);
        CHECK(out[0] == 0.0);
        for (std::size_t i = 1; i < 500; ++i)
            CHECK(out[i] == data[i - 1]);
    }
}
