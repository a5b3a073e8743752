#include "divrate/model.hpp"

#include <cmath>
#include <numbers>

namespace divrate {

double moment(const SizeDensity& d, unsigned k) {
    return trapezoid_moment(d.values(), d.grid().dx(), k);
}

double malthus_from_density(const SizeDensity& N, const GrowthLaw& g) {
    if (g.kind == GrowthLaw::Kind::Exponential)
        return g.coefficient;
    double m1 = moment(N, 1);
    if (!(m1 > 0.0))
        throw DegenerateDensity("malthus_from_density: first moment must be > 0");
    return g.coefficient * moment(N, 0) / m1;
}

double malthus_regularized(const SizeDensity& N_eps, double alpha) {
    if (alpha < 0.0)
        throw InvalidArgument("malthus_regularized: alpha must be >= 0");
    double m0 = moment(N_eps, 0);
    double denom = moment(N_eps, 1) + 0.25 * alpha * m0;
    if (!(denom > 0.0))
        throw DegenerateDensity("malthus_regularized: denominator must be > 0");
    return m0 / denom;
}

CalibratedGrowth growth_constant_from_doubling(const DatasetMeta& meta,
                                               const SizeDensity& N_eps,
                                               GrowthLaw::Kind kind) {
    if (!meta.has_doubling_time())
        throw MissingMetadata("growth_constant_from_doubling: doubling time is absent");
    double lambda0 = std::numbers::ln2 / meta.doubling_time;
    if (kind == GrowthLaw::Kind::Exponential)
        return {lambda0, GrowthLaw::exponential(lambda0)};
    double m0 = moment(N_eps, 0);
    double m1 = moment(N_eps, 1);
    if (!(m0 > 0.0) || !(m1 > 0.0))
        throw DegenerateDensity("growth_constant_from_doubling: moments must be > 0");
    return {lambda0, GrowthLaw::linear(lambda0 * m1 / m0)};
}

double volume_sigma(double diameter_sigma) {
    if (diameter_sigma < 0.0)
        throw InvalidArgument("volume_sigma: sigma must be >= 0");
    const double s = diameter_sigma;
    return std::numbers::pi / 6.0 * std::sqrt(15.0) * s * s * s;
}

} // namespace divrate
