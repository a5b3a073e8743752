#include "divrate/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "divrate/kernels.hpp"
#include "divrate/model.hpp"
#include "divrate/numerics.hpp"

namespace divrate {

namespace {

double bump_unnormalized(double s) {
    if (s <= 0.0 || s >= 1.0)
        return 0.0;
    return std::exp(-1.0 / (s * (1.0 - s)));
}

double bump_constant() {
    static const double C = [] {
        const double mass = adaptive_simpson(bump_unnormalized, 0.0, 1.0, 1e-10);
        return 1.0 / mass;
    }();
    return C;
}

} // namespace

double Mollifier::operator()(double x) const {
    return bump_constant() * bump_unnormalized(x / alpha_) / alpha_;
}

double Mollifier::derivative(double x) const {
    const double s = x / alpha_;
    if (s <= 0.0 || s >= 1.0)
        return 0.0;
    const double t = s * (1.0 - s);
    // d/ds exp(-1/t) = exp(-1/t) * (1 - 2s) / t^2.
    return bump_constant() * bump_unnormalized(s) * (1.0 - 2.0 * s) / (t * t) /
           (alpha_ * alpha_);
}

Mollifier make_mollifier(double alpha) {
    if (!(alpha > 0.0))
        throw NonPositiveAlpha("make_mollifier: alpha must be > 0");
    return Mollifier(alpha);
}

const char* method_name(Method m) {
    switch (m) {
    case Method::Exact: return "exact";
    case Method::QuasiReversibility: return "qr";
    case Method::Filtering: return "filter";
    case Method::Hybrid: return "hybrid";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "exact") return Method::Exact;
    if (name == "qr") return Method::QuasiReversibility;
    if (name == "filter") return Method::Filtering;
    if (name == "hybrid") return Method::Hybrid;
    throw InvalidArgument("unknown reconstruction method '" + name + "'");
}

std::vector<double> rhs_L(const SizeDensity& N, double lambda, const GrowthLaw& g) {
    const UniformGrid grid = N.grid();
    const std::size_t n = grid.n_points();
    const double dx = grid.dx();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = g(grid.x(i)) * N[i];

    std::vector<double> L(n);
    L[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx) + lambda * N[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        L[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx) + lambda * N[i];
    L[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx) + lambda * N[n - 1];
    return L;
}

double dilation_residual(std::span<const double> H, std::span<const double> L, double dx) {
    if (H.size() != L.size())
        throw GridMismatch("dilation_residual: length mismatch");
    const std::size_t n = H.size();
    std::vector<double> defect(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t twice = 2 * i;
        const double up = twice < n ? H[twice] : 0.0;
        defect[i] = 4.0 * up - H[i] - L[i];
    }
    return l2_norm(defect, dx);
}

namespace {

/// Backward recursion H_i = 4 H_{2i} - L_i, zero tail. Node 0 maps to
/// itself under doubling; its unique fixed point is H_0 = L_0 / 3,
/// which keeps the dilation identity exact there too.
std::vector<double> dilation_H(std::span<const double> L) {
    const std::size_t n = L.size();
    std::vector<double> H(n);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t twice = 2 * i;
        const double up = twice < n ? H[twice] : 0.0;
        H[i] = 4.0 * up - L[i];
    }
    H[0] = L[0] / 3.0;
    return H;
}

/// B = H/N where N clears the relative floor, else 0; negatives
/// clamped to 0 afterwards. Bookkeeping feeds the diagnostics.
DivisionRate divide_floor_clamp(const std::vector<double>& H, const SizeDensity& N,
                                ReconstructionDiagnostics& diag) {
    const auto nv = N.values();
    const double floor = *std::max_element(nv.begin(), nv.end()) * 1e-3;
    std::vector<double> B(H.size(), 0.0);
    double clamped = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!(nv[i] >= floor) || floor <= 0.0) {
            ++diag.floor_count;
            continue;
        }
        if (H[i] < 0.0) {
            ++diag.clamp_count;
            clamped -= H[i];
            continue;
        }
        B[i] = H[i] / nv[i];
    }
    diag.clamped_mass = clamped * N.grid().dx();
    return DivisionRate(N.grid(), std::move(B));
}

double default_lambda_exact(const SizeDensity& N, const GrowthLaw& g) {
    return malthus_from_density(
        SizeDensity::normalize(N.grid(), {N.values().begin(), N.values().end()}), g);
}

/// Implicit Euler march of the stabilized dilation equation in the
/// doubled-size variable: (alpha/dy)(H_i - H_{i-1}) + 4 H_i =
/// H(y_i/2) + L(y_i/2). Half-points hit a node for even i and average
/// the two neighbors for odd i; at i=1 the half-point involves H_1
/// itself, so that row is solved implicitly.
std::vector<double> qr_march(std::span<const double> L, double alpha, double dy) {
    const std::size_t n = L.size();
    const double r = alpha / dy;
    auto half = [](std::span<const double> v, std::size_t i) {
        return i % 2 == 0 ? v[i / 2] : 0.5 * (v[(i - 1) / 2] + v[(i + 1) / 2]);
    };
    std::vector<double> H(n, 0.0);
    H[1] = half(L, 1) / (r + 3.5);
    for (std::size_t i = 2; i < n; ++i)
        H[i] = (r * H[i - 1] + half(H, i) + half(L, i)) / (r + 4.0);
    return H;
}

ReconstructionResult package(Method method, std::vector<double> H, SizeDensity n_used,
                             const SizeDensity& n_reference, double lambda, double alpha,
                             const GrowthLaw& g, ReconstructionDiagnostics diag) {
    const auto L_ref = rhs_L(n_reference, lambda, g);
    const double res = dilation_residual(H, L_ref, n_reference.grid().dx());
    DivisionRate B = divide_floor_clamp(H, n_used, diag);
    return ReconstructionResult{std::move(B), std::move(n_used), std::move(H),
                                lambda,       alpha,             method,
                                res,          diag};
}

} // namespace

DivisionRate solve_dilation(std::span<const double> L, const SizeDensity& N) {
    if (L.size() != N.size())
        throw GridMismatch("solve_dilation: forcing length does not match grid");
    ReconstructionDiagnostics diag;
    return divide_floor_clamp(dilation_H(L), N, diag);
}

ReconstructionResult exact_inverse(const SizeDensity& N_eps, const GrowthLaw& g,
                                   std::optional<double> lambda_override) {
    const double lambda = lambda_override.value_or(default_lambda_exact(N_eps, g));
    auto H = dilation_H(rhs_L(N_eps, lambda, g));
    return package(Method::Exact, std::move(H), N_eps, N_eps, lambda, 0.0, g, {});
}

ReconstructionResult quasi_reversibility(const SizeDensity& N_eps, double alpha,
                                         const GrowthLaw& g,
                                         std::optional<double> lambda_override) {
    if (!(alpha > 0.0))
        throw NonPositiveAlpha("quasi_reversibility: alpha must be > 0");
    const double lambda = lambda_override.value_or(malthus_regularized(N_eps, alpha));
    auto H = qr_march(rhs_L(N_eps, lambda, g), alpha, N_eps.grid().dx());
    return package(Method::QuasiReversibility, std::move(H), N_eps, N_eps, lambda, alpha, g,
                   {});
}

namespace {

/// Hat-weighted kernel moments: out[k] = integral over the kernel
/// support of hat((k*dx - s)/dx) * kernel(s) ds. Exact convolution of
/// the kernel with piecewise-linear data; the hat partition of unity
/// makes the weights sum to the kernel's own integral.
std::vector<double> cell_weights(const Mollifier& rho, double dx, bool derivative) {
    const double alpha = rho.alpha();
    auto kernel = [&](double s) { return derivative ? rho.derivative(s) : rho(s); };
    const std::size_t k_max = static_cast<std::size_t>(std::ceil(alpha / dx)) + 1;
    std::vector<double> w(k_max + 1, 0.0);
    for (std::size_t k = 0; k <= k_max; ++k) {
        const double node = static_cast<double>(k) * dx;
        const double lo = std::max(0.0, node - dx);
        const double hi = std::min(alpha, node + dx);
        if (!(hi > lo))
            continue;
        auto f = [&](double s) {
            const double hat = 1.0 - std::abs(node - s) / dx;
            return hat > 0.0 ? hat * kernel(s) : 0.0;
        };
        // The hat has a kink at the node; integrate each smooth half.
        const double mid = std::clamp(node, lo, hi);
        double acc = 0.0;
        if (mid > lo)
            acc += adaptive_simpson(f, lo, mid, 1e-13);
        if (hi > mid)
            acc += adaptive_simpson(f, mid, hi, 1e-13);
        w[k] = acc;
    }
    while (w.size() > 1 && w.back() == 0.0)
        w.pop_back();
    return w;
}

std::vector<double> convolve_with(const std::vector<double>& data,
                                  const std::vector<double>& w) {
    std::vector<double> out(data.size());
    kernels::convolve_causal(data, w, out);
    return out;
}

std::size_t support_end_index(std::span<const double> v) {
    for (std::size_t i = v.size(); i-- > 0;)
        if (v[i] > 0.0)
            return i;
    return 0;
}

} // namespace

std::vector<double> mollify(const SizeDensity& N_eps, const Mollifier& rho) {
    const auto w = cell_weights(rho, N_eps.grid().dx(), false);
    return convolve_with({N_eps.values().begin(), N_eps.values().end()}, w);
}

ReconstructionResult filter_regularize(const SizeDensity& N_eps, double alpha,
                                       const GrowthLaw& g,
                                       std::optional<double> lambda_override) {
    if (!(alpha > 0.0))
        throw NonPositiveAlpha("filter_regularize: alpha must be > 0");
    const UniformGrid grid = N_eps.grid();
    const double dx = grid.dx();
    const double lambda = lambda_override.value_or(malthus_regularized(N_eps, alpha));

    const Mollifier rho = make_mollifier(alpha);
    const auto w = cell_weights(rho, dx, false);
    const auto v = cell_weights(rho, dx, true);

    const std::vector<double> data(N_eps.values().begin(), N_eps.values().end());
    auto smoothed = convolve_with(data, w);
    for (double& s : smoothed)
        s = std::max(s, 0.0);
    smoothed[0] = 0.0;

    // L_alpha = (gN) * rho' + lambda * (N * rho): the derivative lands
    // on the kernel, the noisy data is never differenced.
    std::vector<double> gN(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        gN[i] = g(grid.x(i)) * data[i];
    const auto dgN = convolve_with(gN, v);
    std::vector<double> L(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        L[i] = dgN[i] + lambda * smoothed[i];

    ReconstructionDiagnostics diag;
    diag.filter_alpha = alpha;
    const double support = static_cast<double>(support_end_index(data)) * dx;
    const double mass_in = trapezoid(data, dx);
    SizeDensity n_used(grid, std::move(smoothed), false);
    diag.oversmoothed = alpha >= support || n_used.integral() < 0.5 * mass_in;

    auto H = dilation_H(L);
    return package(Method::Filtering, std::move(H), std::move(n_used), N_eps, lambda, alpha,
                   g, diag);
}

double weighted_rate_error(const DivisionRate& recovered, const DivisionRate& truth,
                           const SizeDensity& N, double threshold_fraction) {
    require_same_grid(recovered.grid(), truth.grid(), "weighted_rate_error");
    require_same_grid(recovered.grid(), N.grid(), "weighted_rate_error");
    const auto nv = N.values();
    const double cut = *std::max_element(nv.begin(), nv.end()) * threshold_fraction;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nv.size(); ++i) {
        if (nv[i] < cut)
            continue;
        const double d = recovered[i] - truth[i];
        num += d * d * nv[i];
        den += truth[i] * truth[i] * nv[i];
    }
    if (!(den > 0.0))
        throw DegenerateDensity("weighted_rate_error: reference rate vanishes on the region");
    return std::sqrt(num / den);
}

ReconstructionResult hybrid(const SizeDensity& N_eps, double alpha_filter, double alpha_qr,
                            const GrowthLaw& g, std::optional<double> lambda_override) {
    if (!(alpha_filter > 0.0) || !(alpha_qr > 0.0))
        throw NonPositiveAlpha("hybrid: both widths must be > 0");
    const UniformGrid grid = N_eps.grid();
    const double lambda = lambda_override.value_or(malthus_regularized(N_eps, alpha_qr));

    auto smoothed = mollify(N_eps, make_mollifier(alpha_filter));
    for (double& s : smoothed)
        s = std::max(s, 0.0);
    smoothed[0] = 0.0;

    ReconstructionDiagnostics diag;
    diag.filter_alpha = alpha_filter;
    const double support = static_cast<double>(support_end_index(N_eps.values())) * grid.dx();
    diag.oversmoothed = alpha_filter >= support;

    SizeDensity n_used(grid, std::move(smoothed), false);
    auto H = qr_march(rhs_L(n_used, lambda, g), alpha_qr, grid.dx());
    auto result = package(Method::Hybrid, std::move(H), std::move(n_used), N_eps, lambda,
                          alpha_qr, g, diag);
    return result;
}

} // namespace divrate
