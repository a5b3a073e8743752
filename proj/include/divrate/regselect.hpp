#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divrate/inverse.hpp"

namespace divrate {

/// One reconstruction per alpha. Entries that threw keep a reason
/// string instead of a result; residual and ratio are NaN there.
struct AlphaSweep {
    Method method;
    std::vector<double> alphas; // strictly increasing
    std::vector<std::optional<ReconstructionResult>> results;
    std::vector<std::string> failure_reasons; // empty string when the entry succeeded
    std::vector<double> residuals;
    std::vector<double> ratios;         // residual / sqrt(alpha)
    std::vector<double> solution_norms; // trapezoid L2 norm of B*N
};

/// Trapezoid L2 norm of 4(BN)(2x) - (BN)(x) - [(gN)' + lambda N](x).
double residual(const DivisionRate& B, const SizeDensity& N, double lambda,
                const GrowthLaw& g);

/// Runs the chosen method at every alpha. Per-alpha work is
/// independent; entries are filled in alpha order regardless of the
/// execution order, so concurrent and sequential runs agree exactly.
/// max_concurrency = 0 picks the runtime default.
AlphaSweep sweep_alpha(Method method, const SizeDensity& N_eps, std::vector<double> alphas,
                       const GrowthLaw& g, std::optional<double> lambda_override = {},
                       std::size_t max_concurrency = 0);

/// The alpha minimizing residual/sqrt(alpha). flat is set when the
/// ratio at the neighbors of the minimizer is within 5% of the
/// minimum, i.e. the curve gives no sharp preference.
struct RatioSelection {
    double alpha_star;
    bool flat;
};
RatioSelection select_alpha_ratio(const AlphaSweep& sweep);

/// The alpha at the sharpest corner of the (log residual, log norm)
/// curve by the three-point discrete curvature. degenerate is set
/// when no point has nonzero curvature (collinear data).
struct LCurveSelection {
    double alpha;
    bool degenerate;
};
LCurveSelection select_alpha_lcurve(const AlphaSweep& sweep,
                                    const std::vector<double>& solution_norms);

} // namespace divrate
