#include "divrate/grid.hpp"

#include <cmath>

namespace divrate {

double trapezoid(std::span<const double> values, double dx) {
    if (values.size() < 2)
        return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        sum += values[i];
    return sum * dx;
}

double trapezoid_moment(std::span<const double> values, double dx, unsigned k) {
    if (values.size() < 2)
        return 0.0;
    auto xk = [&](std::size_t i) {
        return std::pow(static_cast<double>(i) * dx, static_cast<double>(k));
    };
    double sum = 0.5 * (values.front() * xk(0) + values.back() * xk(values.size() - 1));
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        sum += values[i] * xk(i);
    return sum * dx;
}

double l2_norm(std::span<const double> values, double dx) {
    if (values.size() < 2)
        return 0.0;
    double sum = 0.5 * (values.front() * values.front() + values.back() * values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        sum += values[i] * values[i];
    return std::sqrt(sum * dx);
}

double l1_distance(std::span<const double> a, std::span<const double> b, double dx) {
    if (a.size() != b.size())
        throw GridMismatch("l1_distance: length mismatch");
    if (a.size() < 2)
        return 0.0;
    double sum = 0.5 * (std::abs(a.front() - b.front()) + std::abs(a.back() - b.back()));
    for (std::size_t i = 1; i + 1 < a.size(); ++i)
        sum += std::abs(a[i] - b[i]);
    return sum * dx;
}

namespace {

void check_profile(const UniformGrid& grid, const std::vector<double>& values,
                   const char* what) {
    if (values.size() != grid.n_points())
        throw GridMismatch(std::string(what) + ": sample count does not match grid");
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DegenerateDensity(std::string(what) + ": values must be finite and >= 0");
    }
}

} // namespace

SizeDensity::SizeDensity(UniformGrid grid, std::vector<double> values, bool normalized)
    : grid_(grid), values_(std::move(values)), normalized_(normalized) {
    check_profile(grid_, values_, "SizeDensity");
    if (values_[0] != 0.0)
        throw DegenerateDensity("SizeDensity: value at x=0 must be exactly 0");
    if (normalized_) {
        double mass = integral();
        if (std::abs(mass - 1.0) > 1e-12 * std::max(1.0, std::abs(mass)))
            throw DegenerateDensity("SizeDensity: normalized flag set but integral != 1");
    }
}

SizeDensity SizeDensity::normalize(UniformGrid grid, std::vector<double> values) {
    double mass = trapezoid(values, grid.dx());
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw DegenerateDensity("SizeDensity::normalize: mass must be finite and > 0");
    for (double& v : values)
        v /= mass;
    // Renormalizing by the trapezoid mass makes the integral exactly the
    // ratio of two equal sums up to rounding, well inside the 1e-12 gate.
    return SizeDensity(grid, std::move(values), true);
}

DivisionRate::DivisionRate(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    check_profile(grid_, values_, "DivisionRate");
}

DivisionRate DivisionRate::constant(const UniformGrid& grid, double b) {
    if (!(b >= 0.0))
        throw InvalidArgument("DivisionRate::constant: rate must be >= 0");
    return DivisionRate(grid, std::vector<double>(grid.n_points(), b));
}

} // namespace divrate
