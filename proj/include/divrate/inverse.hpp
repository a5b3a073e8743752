#pragma once

#include <optional>
#include <span>
#include <vector>

#include "divrate/grid.hpp"

namespace divrate {

/// Canonical smooth bump rho(s) = C*exp(-1/(s(1-s))) on (0,1), scaled
/// to width alpha: rho_alpha(x) = rho(x/alpha)/alpha. C is fixed once
/// by adaptive quadrature so that the bump integrates to 1.
class Mollifier {
public:
    double alpha() const { return alpha_; }

    /// rho_alpha(x); identically 0 outside (0, alpha).
    double operator()(double x) const;

    /// d/dx rho_alpha(x); identically 0 outside (0, alpha).
    double derivative(double x) const;

private:
    friend Mollifier make_mollifier(double alpha);
    explicit Mollifier(double alpha) : alpha_(alpha) {}
    double alpha_;
};

Mollifier make_mollifier(double alpha);

enum class Method { Exact, QuasiReversibility, Filtering, Hybrid };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct ReconstructionDiagnostics {
    std::size_t floor_count = 0;  // nodes with N below the division floor, B forced to 0
    std::size_t clamp_count = 0;  // nodes where a negative B was clamped to 0
    double clamped_mass = 0.0;    // dx * sum of the negative H removed by clamping
    double filter_alpha = 0.0;    // mollifier width, when one was applied
    bool oversmoothed = false;    // mollifier wider than the data support
};

struct ReconstructionResult {
    DivisionRate rate;
    SizeDensity n_used;     // profile the division B = H/N was taken against
    std::vector<double> H;  // raw dilation solution B*N, before floor and clamp
    double lambda_used;
    double alpha;           // regularization width (0 for the exact method)
    Method method;
    double residual;        // dilation defect of raw H against the unfiltered input
    ReconstructionDiagnostics diagnostics;
};

/// L(x) = (g N)'(x) + lambda N(x), centered second-order differences
/// inside, one-sided second-order at both ends.
std::vector<double> rhs_L(const SizeDensity& N, double lambda, const GrowthLaw& g);

/// Trapezoid L2 norm of the dilation defect 4H(2x) - H(x) - L(x),
/// dilation by exact index doubling with zero beyond the grid.
double dilation_residual(std::span<const double> H, std::span<const double> L, double dx);

/// Solves 4H(2x) - H(x) = L(x) for H = B*N by backward recursion with
/// a zero tail, then divides by N under the floor rule.
DivisionRate solve_dilation(std::span<const double> L, const SizeDensity& N);

/// Exact inversion packaged with residual and diagnostics. lambda
/// defaults to the growth-rate identity integral(gN)/integral(xN).
ReconstructionResult exact_inverse(const SizeDensity& N_eps, const GrowthLaw& g,
                                   std::optional<double> lambda_override = {});

/// Stabilized inversion: adds alpha * d/dy (B N) and marches the
/// doubled-size variable upward by implicit Euler. lambda defaults to
/// the regularized rate integral(N)/(integral(xN) + alpha/4 integral(N)).
ReconstructionResult quasi_reversibility(const SizeDensity& N_eps, double alpha,
                                         const GrowthLaw& g,
                                         std::optional<double> lambda_override = {});

/// N_eps convolved with the bump (window [x - alpha, x], zero-padded
/// below the origin), exact for piecewise-linear data.
std::vector<double> mollify(const SizeDensity& N_eps, const Mollifier& rho);

/// Smoothing inversion: convolves the data with the bump, moves the
/// derivative onto the kernel, then solves the dilation equation on
/// the smoothed pair.
ReconstructionResult filter_regularize(const SizeDensity& N_eps, double alpha,
                                       const GrowthLaw& g,
                                       std::optional<double> lambda_override = {});

/// Filter at alpha_filter, then stabilized march at alpha_qr on the
/// smoothed profile.
ReconstructionResult hybrid(const SizeDensity& N_eps, double alpha_filter, double alpha_qr,
                            const GrowthLaw& g, std::optional<double> lambda_override = {});

/// Relative L2 distance between two rates weighted by the density,
/// restricted to nodes where N >= threshold_fraction * max(N): the
/// data determines B*N, so B is only meaningful where N has mass.
double weighted_rate_error(const DivisionRate& recovered, const DivisionRate& truth,
                           const SizeDensity& N, double threshold_fraction = 0.01);

} // namespace divrate
