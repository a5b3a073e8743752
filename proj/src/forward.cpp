#include "divrate/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "divrate/kernels.hpp"
#include "divrate/model.hpp"

namespace divrate {

SolverConfig::SolverConfig(double dt_, double t_max_, const UniformGrid& grid,
                           const GrowthLaw& g, double convergence_tol_,
                           std::size_t max_steps_, std::size_t record_every_)
    : dt(dt_),
      t_max(t_max_),
      convergence_tol(convergence_tol_),
      max_steps(max_steps_),
      record_every(record_every_) {
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw InvalidArgument("SolverConfig: dt and t_max must be > 0");
    if (!(convergence_tol > 0.0))
        throw InvalidArgument("SolverConfig: convergence_tol must be > 0");
    if (max_steps == 0 || record_every == 0)
        throw InvalidArgument("SolverConfig: max_steps and record_every must be > 0");
    if (dt * g.max_speed(grid) > grid.dx() * (1.0 + 1e-12))
        throw CflViolation("SolverConfig: dt * max growth speed exceeds dx");
}

namespace {

std::vector<double> sample_growth(const UniformGrid& grid, const GrowthLaw& g) {
    std::vector<double> out(grid.n_points());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = g(grid.x(i));
    return out;
}

} // namespace

std::vector<double> apply_generator(const SizeDensity& n, const DivisionRate& B,
                                    const GrowthLaw& g) {
    require_same_grid(n.grid(), B.grid(), "apply_generator");
    const auto gv = sample_growth(n.grid(), g);
    std::vector<double> out(n.size());
    kernels::generator_rhs(n.values(), gv, B.values(), n.grid().dx(), out);
    return out;
}

Trajectory transient_solve(const SizeDensity& n0, const DivisionRate& B, const GrowthLaw& g,
                           const SolverConfig& cfg) {
    require_same_grid(n0.grid(), B.grid(), "transient_solve");
    const UniformGrid grid = n0.grid();
    const double dx = grid.dx();
    const auto gv = sample_growth(grid, g);

    std::vector<double> cur(n0.values().begin(), n0.values().end());
    std::vector<double> rhs(cur.size());

    Trajectory traj{grid, {}, 0.0};
    traj.states.emplace_back(0.0, SizeDensity(grid, cur, false));

    const std::size_t n_steps = std::min(
        cfg.max_steps, static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-12)));
    for (std::size_t step = 1; step <= n_steps; ++step) {
        kernels::generator_rhs(cur, gv, B.values(), dx, rhs);
        const auto stats = kernels::euler_clamp_step(cur, rhs, cfg.dt, cur);
        cur[0] = 0.0;
        traj.clamped_mass += stats.clamped_sum * dx;
        if (stats.max_value > 1e300)
            throw BlowUp("transient_solve: density exceeded 1e300");
        if (step % cfg.record_every == 0 || step == n_steps)
            traj.states.emplace_back(static_cast<double>(step) * cfg.dt,
                                     SizeDensity(grid, cur, false));
    }
    return traj;
}

EigenPair eigenpair_solve(const DivisionRate& B, const GrowthLaw& g, const SolverConfig& cfg,
                          EigenDiagnostics* diag) {
    const UniformGrid grid = B.grid();
    const double dx = grid.dx();
    const auto bv = B.values();
    if (std::all_of(bv.begin(), bv.end(), [](double v) { return v == 0.0; }))
        throw DegenerateInput("eigenpair_solve: division rate is identically 0");
    const auto gv = sample_growth(grid, g);

    // Smooth positive seed vanishing at the origin; any profile with
    // mass works, this one keeps the transient short.
    std::vector<double> cur(grid.n_points());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        const double x = grid.x(i);
        cur[i] = x * std::exp(-x);
    }
    {
        const double mass = trapezoid(cur, dx);
        for (double& v : cur)
            v /= mass;
    }

    std::vector<double> rhs(cur.size()), prev(cur.size());
    std::vector<double> lambda_steps;
    lambda_steps.reserve(4096);

    double clamped_total = 0.0;
    double last_diff = 0.0;
    bool settled = false;
    std::size_t step = 0;
    while (step < cfg.max_steps) {
        ++step;
        prev = cur;
        kernels::generator_rhs(cur, gv, bv, dx, rhs);
        const auto stats = kernels::euler_clamp_step(cur, rhs, cfg.dt, cur);
        cur[0] = 0.0;
        clamped_total += stats.clamped_sum * dx;
        if (stats.max_value > 1e300)
            throw BlowUp("eigenpair_solve: iteration blew up");

        // Previous iterate was normalized, so the step's mass is the
        // growth factor e^{lambda dt} up to discretization error.
        const double mass = trapezoid(cur, dx);
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw DegenerateDensity("eigenpair_solve: mass lost during iteration");
        lambda_steps.push_back(std::log(mass) / cfg.dt);
        for (double& v : cur)
            v /= mass;

        last_diff = kernels::abs_diff_sum(cur, prev) * dx;
        const std::size_t k = lambda_steps.size();
        const bool rate_stable =
            k >= 2 && std::abs(lambda_steps[k - 1] - lambda_steps[k - 2]) < cfg.convergence_tol;
        if (last_diff < cfg.convergence_tol && rate_stable) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw NonConverged("eigenpair_solve: no fixed profile within max_steps");

    const std::size_t k = lambda_steps.size();
    const std::size_t tail = std::max<std::size_t>(1, k / 10);
    const double lambda =
        std::accumulate(lambda_steps.end() - static_cast<std::ptrdiff_t>(tail),
                        lambda_steps.end(), 0.0) /
        static_cast<double>(tail);
    if (!(lambda > 0.0))
        throw NonConverged("eigenpair_solve: growth rate estimate is not positive");

    SizeDensity N = SizeDensity::normalize(grid, std::move(cur));
    const double lambda_ratio = malthus_from_density(N, g);
    const double cross = std::abs(lambda - lambda_ratio);
    if (cross > 10.0 * dx)
        throw NonConverged("eigenpair_solve: growth-rate estimates disagree beyond 10*dx");

    if (diag) {
        diag->steps = step;
        diag->final_profile_diff = last_diff;
        diag->malthus_cross_check = cross;
        diag->clamped_mass = clamped_total;
    }
    return EigenPair{std::move(N), lambda};
}

BalanceResiduals balance_residuals(const Trajectory& traj, const DivisionRate& B,
                                   const GrowthLaw& g) {
    if (traj.states.size() < 3)
        throw InvalidArgument("balance_residuals: need at least 3 recorded states");
    const UniformGrid grid = traj.grid;
    require_same_grid(grid, B.grid(), "balance_residuals");
    const double dx = grid.dx();
    const auto gv = sample_growth(grid, g);

    double worst_number = 0.0;
    double worst_biomass = 0.0;
    std::vector<double> weighted(grid.n_points());
    for (std::size_t k = 1; k + 1 < traj.states.size(); ++k) {
        const auto& lo = traj.states[k - 1];
        const auto& mid = traj.states[k];
        const auto& hi = traj.states[k + 1];
        const double span = hi.time - lo.time;

        const double dN = (hi.total_number - lo.total_number) / span;
        const double dM = (hi.total_biomass - lo.total_biomass) / span;

        const auto nv = mid.density.values();
        for (std::size_t i = 0; i < weighted.size(); ++i)
            weighted[i] = B[i] * nv[i];
        const double division_gain = trapezoid(weighted, dx);
        for (std::size_t i = 0; i < weighted.size(); ++i)
            weighted[i] = gv[i] * nv[i];
        const double uptake = trapezoid(weighted, dx);

        const double scale = std::abs(mid.total_number);
        if (scale <= 0.0)
            throw DegenerateDensity("balance_residuals: empty density");
        worst_number = std::max(worst_number, std::abs(dN - division_gain) / scale);
        worst_biomass = std::max(worst_biomass, std::abs(dM - uptake) / scale);
    }
    return {worst_number, worst_biomass};
}

} // namespace divrate
