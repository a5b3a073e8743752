#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace divrate {

/// Natural cubic spline through (knots_x, knots_y), knots_x strictly
/// increasing. Evaluation outside the knot range clamps to the end
/// values (callers pad with explicit zeros where a zero tail is meant).
class CubicSpline {
public:
    CubicSpline(std::vector<double> knots_x, std::vector<double> knots_y);

    double operator()(double x) const;

    std::size_t n_knots() const { return x_.size(); }

private:
    std::vector<double> x_, y_, m_; // m_ holds second derivatives
};

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

} // namespace divrate
