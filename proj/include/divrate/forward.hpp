#pragma once

#include <cstddef>
#include <vector>

#include "divrate/grid.hpp"

namespace divrate {

/// Time-stepping parameters. Construction checks the CFL bound
/// dt * max g <= dx against the grid the run will use.
struct SolverConfig {
    double dt;
    double t_max;
    double convergence_tol = 1e-8;
    std::size_t max_steps = 10'000'000;
    std::size_t record_every = 1;

    SolverConfig(double dt_, double t_max_, const UniformGrid& grid, const GrowthLaw& g,
                 double convergence_tol_ = 1e-8, std::size_t max_steps_ = 10'000'000,
                 std::size_t record_every_ = 1);
};

/// Recorded transient run. clamped_mass accumulates dx * (negative
/// overshoot removed by the positivity clamp) over all steps.
struct Trajectory {
    UniformGrid grid;
    std::vector<TransientState> states;
    double clamped_mass = 0.0;
};

/// Diagnostics attached to an eigenpair extraction.
struct EigenDiagnostics {
    std::size_t steps = 0;
    double final_profile_diff = 0.0; // last per-step L1 change
    double malthus_cross_check = 0.0; // |lambda - integral(gN)/integral(xN)|
    double clamped_mass = 0.0;
};

/// Semi-discrete right-hand side of the division model: upwind
/// transport, division loss, and the doubled-size gain term.
std::vector<double> apply_generator(const SizeDensity& n, const DivisionRate& B,
                                    const GrowthLaw& g);

/// Explicit Euler evolution of the division model from n0.
Trajectory transient_solve(const SizeDensity& n0, const DivisionRate& B, const GrowthLaw& g,
                           const SolverConfig& cfg);

/// Principal eigenpair by renormalized long-time iteration: step,
/// renormalize, read the growth rate off the per-step mass gain.
EigenPair eigenpair_solve(const DivisionRate& B, const GrowthLaw& g, const SolverConfig& cfg,
                          EigenDiagnostics* diag = nullptr);

/// Worst relative defect of the two conservation identities
/// d/dt(number) = integral(B n) and d/dt(biomass) = integral(g n)
/// over the recorded states, derivatives by centered differences.
struct BalanceResiduals {
    double number_residual;
    double biomass_residual;
};
BalanceResiduals balance_residuals(const Trajectory& traj, const DivisionRate& B,
                                   const GrowthLaw& g);

} // namespace divrate
