#pragma once

#include "divrate/grid.hpp"

namespace divrate {

/// Trapezoid approximation of the k-th moment of d.
double moment(const SizeDensity& d, unsigned k);

/// Growth rate lambda0 = integral(g*N) / integral(x*N). For an
/// exponential law this cancels to the law's coefficient exactly.
double malthus_from_density(const SizeDensity& N, const GrowthLaw& g);

/// Regularized growth rate integral(N) / (integral(x*N) + alpha/4 * integral(N)).
double malthus_regularized(const SizeDensity& N_eps, double alpha);

/// Growth rate plus growth law pinned by a measured doubling time:
/// lambda0 = ln 2 / T0, then either Linear(g0 = lambda0 * m1/m0) or
/// Exponential(kappa = lambda0).
struct CalibratedGrowth {
    double lambda0;
    GrowthLaw law;
};
CalibratedGrowth growth_constant_from_doubling(const DatasetMeta& meta,
                                               const SizeDensity& N_eps,
                                               GrowthLaw::Kind kind);

/// Volume noise level implied by a diameter noise level:
/// sigma_V = (pi/6) * sqrt(15) * sigma^3.
double volume_sigma(double diameter_sigma);

} // namespace divrate
