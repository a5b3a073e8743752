#pragma once

#include <cstddef>
#include <span>

namespace divrate::kernels {

/// Grids below this size always run the serial path; parallel setup
/// costs more than single-pass work on small profiles.
inline constexpr std::size_t parallel_threshold = 1u << 14;

/// Reduction block width. All reductions sum per-block partials in
/// block order, so results are bitwise identical for any thread count.
inline constexpr std::size_t reduction_block = 2048;

/// Semi-discrete generator: out_i = -(g_i a_i - g_{i-1} a_{i-1})/dx
/// - B_i a_i + 4 B_{2i} a_{2i}, with the dilation read taken as 0 once
/// 2i falls off the grid and the upwind influx at i=0 pinned to 0.
void generator_rhs_serial(std::span<const double> a, std::span<const double> g,
                          std::span<const double> B, double dx, std::span<double> out);
void generator_rhs_omp(std::span<const double> a, std::span<const double> g,
                       std::span<const double> B, double dx, std::span<double> out);
void generator_rhs(std::span<const double> a, std::span<const double> g,
                   std::span<const double> B, double dx, std::span<double> out);

struct StepStats {
    double clamped_sum = 0.0; // nodal sum of clamped negative overshoot (caller scales by dx)
    double max_value = 0.0;   // max of the clamped result
};

/// Fused explicit Euler update out_i = max(a_i + dt*rhs_i, 0) with
/// clamp bookkeeping. out may alias a.
StepStats euler_clamp_step_serial(std::span<const double> a, std::span<const double> rhs,
                                  double dt, std::span<double> out);
StepStats euler_clamp_step_omp(std::span<const double> a, std::span<const double> rhs,
                               double dt, std::span<double> out);
StepStats euler_clamp_step(std::span<const double> a, std::span<const double> rhs,
                           double dt, std::span<double> out);

/// Deterministic blocked sum of v.
double blocked_sum_serial(std::span<const double> v);
double blocked_sum_omp(std::span<const double> v);
double blocked_sum(std::span<const double> v);

/// Deterministic blocked sum of |a_i - b_i|.
double abs_diff_sum_serial(std::span<const double> a, std::span<const double> b);
double abs_diff_sum_omp(std::span<const double> a, std::span<const double> b);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

/// Causal convolution out_i = sum_k w_k * data_{i-k}, zero-padded
/// below index 0. Window length w.size() is assumed small next to n.
void convolve_causal_serial(std::span<const double> data, std::span<const double> w,
                            std::span<double> out);
void convolve_causal_omp(std::span<const double> data, std::span<const double> w,
                         std::span<double> out);
void convolve_causal(std::span<const double> data, std::span<const double> w,
                     std::span<double> out);

} // namespace divrate::kernels
