#include "divrate/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "divrate/errors.hpp"

namespace divrate {

CubicSpline::CubicSpline(std::vector<double> knots_x, std::vector<double> knots_y)
    : x_(std::move(knots_x)), y_(std::move(knots_y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw InvalidArgument("CubicSpline: need >= 3 knots with matching values");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw InvalidArgument("CubicSpline: knot abscissae must be strictly increasing");

    // Natural end conditions: second derivative 0 at both ends. The
    // tridiagonal system is solved by the Thomas algorithm.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (hl + hr);
        upper[i] = hr;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    diag[n - 1] = 1.0;

    // Forward elimination; the lower entry in row i is hl = x_i - x_{i-1}.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double w = (i == 1) ? 0.0 : hl / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t k = n - 1; k-- > 1;)
        m_[k] = (rhs[k] - upper[k] * m_[k + 1]) / diag[k];
}

double CubicSpline::operator()(double x) const {
    if (x <= x_.front())
        return y_.front();
    if (x >= x_.back())
        return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[j + 1] - x_[j];
    const double t = (x_[j + 1] - x) / h;
    const double u = (x - x_[j]) / h;
    return t * y_[j] + u * y_[j + 1] +
           ((t * t * t - t) * m_[j] + (u * u * u - u) * m_[j + 1]) * h * h / 6.0;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (!(b > a))
        throw InvalidArgument("adaptive_simpson: need b > a");
    if (!(tol > 0.0))
        throw InvalidArgument("adaptive_simpson: tolerance must be > 0");
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace divrate
