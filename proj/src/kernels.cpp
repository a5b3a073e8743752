#include "divrate/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace divrate::kernels {

namespace {

inline std::size_t block_count(std::size_t n) {
    return (n + reduction_block - 1) / reduction_block;
}

inline double rhs_at(std::span<const double> a, std::span<const double> g,
                     std::span<const double> B, double inv_dx, std::size_t i) {
    const std::size_t n = a.size();
    double flux = g[i] * a[i];
    if (i > 0)
        flux -= g[i - 1] * a[i - 1];
    double r = -flux * inv_dx - B[i] * a[i];
    const std::size_t twice = 2 * i;
    if (twice < n)
        r += 4.0 * B[twice] * a[twice];
    return r;
}

} // namespace

void generator_rhs_serial(std::span<const double> a, std::span<const double> g,
                          std::span<const double> B, double dx, std::span<double> out) {
    assert(a.size() == g.size() && a.size() == B.size() && a.size() == out.size());
    const double inv_dx = 1.0 / dx;
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = rhs_at(a, g, B, inv_dx, i);
}

void generator_rhs_omp(std::span<const double> a, std::span<const double> g,
                       std::span<const double> B, double dx, std::span<double> out) {
    assert(a.size() == g.size() && a.size() == B.size() && a.size() == out.size());
    const double inv_dx = 1.0 / dx;
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = rhs_at(a, g, B, inv_dx, static_cast<std::size_t>(i));
}

void generator_rhs(std::span<const double> a, std::span<const double> g,
                   std::span<const double> B, double dx, std::span<double> out) {
    if (a.size() >= parallel_threshold)
        generator_rhs_omp(a, g, B, dx, out);
    else
        generator_rhs_serial(a, g, B, dx, out);
}

namespace {

inline void step_block(std::span<const double> a, std::span<const double> rhs, double dt,
                       std::span<double> out, std::size_t lo, std::size_t hi,
                       double& clamped, double& maxv) {
    double c = 0.0;
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        double v = a[i] + dt * rhs[i];
        if (v < 0.0) {
            c -= v;
            v = 0.0;
        }
        out[i] = v;
        m = std::max(m, v);
    }
    clamped = c;
    maxv = m;
}

} // namespace

StepStats euler_clamp_step_serial(std::span<const double> a, std::span<const double> rhs,
                                  double dt, std::span<double> out) {
    assert(a.size() == rhs.size() && a.size() == out.size());
    const std::size_t nb = block_count(a.size());
    StepStats s;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, a.size());
        double c, m;
        step_block(a, rhs, dt, out, lo, hi, c, m);
        s.clamped_sum += c;
        s.max_value = std::max(s.max_value, m);
    }
    return s;
}

StepStats euler_clamp_step_omp(std::span<const double> a, std::span<const double> rhs,
                               double dt, std::span<double> out) {
    assert(a.size() == rhs.size() && a.size() == out.size());
    const std::size_t nb = block_count(a.size());
    std::vector<double> clamped(nb), maxv(nb);
    const std::int64_t nb64 = static_cast<std::int64_t>(nb);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb64; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, a.size());
        step_block(a, rhs, dt, out, lo, hi, clamped[static_cast<std::size_t>(b)],
                   maxv[static_cast<std::size_t>(b)]);
    }
    StepStats s;
    for (std::size_t b = 0; b < nb; ++b) {
        s.clamped_sum += clamped[b];
        s.max_value = std::max(s.max_value, maxv[b]);
    }
    return s;
}

StepStats euler_clamp_step(std::span<const double> a, std::span<const double> rhs,
                           double dt, std::span<double> out) {
    if (a.size() >= parallel_threshold)
        return euler_clamp_step_omp(a, rhs, dt, out);
    return euler_clamp_step_serial(a, rhs, dt, out);
}

double blocked_sum_serial(std::span<const double> v) {
    const std::size_t nb = block_count(v.size());
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, v.size());
        double part = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            part += v[i];
        total += part;
    }
    return total;
}

double blocked_sum_omp(std::span<const double> v) {
    const std::size_t nb = block_count(v.size());
    std::vector<double> parts(nb, 0.0);
    const std::int64_t nb64 = static_cast<std::int64_t>(nb);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb64; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, v.size());
        double part = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            part += v[i];
        parts[static_cast<std::size_t>(b)] = part;
    }
    double total = 0.0;
    for (double p : parts)
        total += p;
    return total;
}

double blocked_sum(std::span<const double> v) {
    if (v.size() >= parallel_threshold)
        return blocked_sum_omp(v);
    return blocked_sum_serial(v);
}

double abs_diff_sum_serial(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t nb = block_count(a.size());
    double total = 0.0;
    for (std::size_t blk = 0; blk < nb; ++blk) {
        const std::size_t lo = blk * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, a.size());
        double part = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            part += std::abs(a[i] - b[i]);
        total += part;
    }
    return total;
}

double abs_diff_sum_omp(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t nb = block_count(a.size());
    std::vector<double> parts(nb, 0.0);
    const std::int64_t nb64 = static_cast<std::int64_t>(nb);
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < nb64; ++blk) {
        const std::size_t lo = static_cast<std::size_t>(blk) * reduction_block;
        const std::size_t hi = std::min(lo + reduction_block, a.size());
        double part = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            part += std::abs(a[i] - b[i]);
        parts[static_cast<std::size_t>(blk)] = part;
    }
    double total = 0.0;
    for (double p : parts)
        total += p;
    return total;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() >= parallel_threshold)
        return abs_diff_sum_omp(a, b);
    return abs_diff_sum_serial(a, b);
}

namespace {

inline double convolve_at(std::span<const double> data, std::span<const double> w,
                          std::size_t i) {
    const std::size_t kmax = std::min(w.size() - 1, i);
    double acc = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k)
        acc += w[k] * data[i - k];
    return acc;
}

} // namespace

void convolve_causal_serial(std::span<const double> data, std::span<const double> w,
                            std::span<double> out) {
    assert(data.size() == out.size() && !w.empty());
    for (std::size_t i = 0; i < data.size(); ++i)
        out[i] = convolve_at(data, w, i);
}

void convolve_causal_omp(std::span<const double> data, std::span<const double> w,
                         std::span<double> out) {
    assert(data.size() == out.size() && !w.empty());
    const std::int64_t n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = convolve_at(data, w, static_cast<std::size_t>(i));
}

void convolve_causal(std::span<const double> data, std::span<const double> w,
                     std::span<double> out) {
    if (data.size() >= parallel_threshold)
        convolve_causal_omp(data, w, out);
    else
        convolve_causal_serial(data, w, out);
}

} // namespace divrate::kernels
