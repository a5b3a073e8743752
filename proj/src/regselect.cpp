#include "divrate/regselect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace divrate {

double residual(const DivisionRate& B, const SizeDensity& N, double lambda,
                const GrowthLaw& g) {
    require_same_grid(B.grid(), N.grid(), "residual");
    std::vector<double> H(N.size());
    for (std::size_t i = 0; i < H.size(); ++i)
        H[i] = B[i] * N[i];
    return dilation_residual(H, rhs_L(N, lambda, g), N.grid().dx());
}

namespace {

ReconstructionResult run_method(Method method, const SizeDensity& N_eps, double alpha,
                                const GrowthLaw& g, std::optional<double> lambda_override) {
    switch (method) {
    case Method::Exact:
        return exact_inverse(N_eps, g, lambda_override);
    case Method::QuasiReversibility:
        return quasi_reversibility(N_eps, alpha, g, lambda_override);
    case Method::Filtering:
        return filter_regularize(N_eps, alpha, g, lambda_override);
    case Method::Hybrid:
        // Single-knob sweep: one width drives both stages.
        return hybrid(N_eps, alpha, alpha, g, lambda_override);
    }
    throw InvalidArgument("sweep_alpha: unknown method");
}

double solution_norm(const ReconstructionResult& r) {
    std::vector<double> BN(r.rate.size());
    for (std::size_t i = 0; i < BN.size(); ++i)
        BN[i] = r.rate[i] * r.n_used[i];
    return l2_norm(BN, r.rate.grid().dx());
}

} // namespace

AlphaSweep sweep_alpha(Method method, const SizeDensity& N_eps, std::vector<double> alphas,
                       const GrowthLaw& g, std::optional<double> lambda_override,
                       std::size_t max_concurrency) {
    if (alphas.empty())
        throw EmptySweep("sweep_alpha: no alpha values supplied");
    std::sort(alphas.begin(), alphas.end());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0))
            throw NonPositiveAlpha("sweep_alpha: alpha values must be > 0");
        if (i > 0 && alphas[i] == alphas[i - 1])
            throw InvalidArgument("sweep_alpha: alpha values must be distinct");
    }

    const std::size_t n = alphas.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    AlphaSweep sweep{method, alphas, {}, {}, {}, {}, {}};
    sweep.results.resize(n);
    sweep.failure_reasons.assign(n, "");
    sweep.residuals.assign(n, nan);
    sweep.ratios.assign(n, nan);
    sweep.solution_norms.assign(n, nan);

    auto run_one = [&](std::size_t i) {
        try {
            auto r = run_method(method, N_eps, alphas[i], g, lambda_override);
            sweep.residuals[i] = r.residual;
            sweep.ratios[i] = r.residual / std::sqrt(alphas[i]);
            sweep.solution_norms[i] = solution_norm(r);
            sweep.results[i] = std::move(r);
        } catch (const std::exception& e) {
            sweep.failure_reasons[i] = e.what();
        }
    };

#ifdef _OPENMP
    int threads = max_concurrency == 0 ? omp_get_max_threads()
                                       : static_cast<int>(max_concurrency);
    threads = std::min<int>(threads, static_cast<int>(n));
    threads = std::max(threads, 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        run_one(static_cast<std::size_t>(i));
#else
    (void)max_concurrency;
    for (std::size_t i = 0; i < n; ++i)
        run_one(i);
#endif
    return sweep;
}

RatioSelection select_alpha_ratio(const AlphaSweep& sweep) {
    if (sweep.alphas.empty())
        throw EmptySweep("select_alpha_ratio: empty sweep");
    std::size_t best = sweep.alphas.size();
    for (std::size_t i = 0; i < sweep.alphas.size(); ++i) {
        if (std::isnan(sweep.ratios[i]))
            continue;
        if (best == sweep.alphas.size() || sweep.ratios[i] < sweep.ratios[best])
            best = i;
    }
    if (best == sweep.alphas.size())
        throw EmptySweep("select_alpha_ratio: every sweep entry failed");

    bool flat = false;
    const double ref = sweep.ratios[best];
    for (std::size_t j : {best - 1, best + 1}) {
        if (j >= sweep.ratios.size() || std::isnan(sweep.ratios[j]))
            continue;
        if (ref == 0.0 ? sweep.ratios[j] == 0.0 : std::abs(sweep.ratios[j] - ref) < 0.05 * std::abs(ref))
            flat = true;
    }
    return {sweep.alphas[best], flat};
}

LCurveSelection select_alpha_lcurve(const AlphaSweep& sweep,
                                    const std::vector<double>& solution_norms) {
    const std::size_t n = sweep.alphas.size();
    if (n < 3 || solution_norms.size() != n)
        throw TooFewPoints("select_alpha_lcurve: need >= 3 matching points");

    std::vector<double> lr(n), ln(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(sweep.residuals[i]) || !(sweep.residuals[i] > 0.0) ||
            !(solution_norms[i] > 0.0))
            throw TooFewPoints("select_alpha_lcurve: nonpositive or missing sweep entry");
        lr[i] = std::log(sweep.residuals[i]);
        ln[i] = std::log(solution_norms[i]);
    }

    // Unsigned curvature of the parametric log-log curve at interior
    // points from the circumscribed triangle (Menger curvature).
    double best_curv = 0.0;
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ax = lr[i - 1], ay = ln[i - 1];
        const double bx = lr[i], by = ln[i];
        const double cx = lr[i + 1], cy = ln[i + 1];
        const double area2 = std::abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
        const double la = std::hypot(bx - ax, by - ay);
        const double lb = std::hypot(cx - bx, cy - by);
        const double lc = std::hypot(cx - ax, cy - ay);
        const double denom = la * lb * lc;
        const double curv = denom > 0.0 ? 2.0 * area2 / denom : 0.0;
        if (curv > best_curv) {
            best_curv = curv;
            best = i;
        }
    }
    const bool degenerate = best_curv <= 1e-12;
    if (degenerate)
        best = n / 2;
    return {sweep.alphas[best], degenerate};
}

} // namespace divrate
