#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "divrate/errors.hpp"

namespace divrate {

/// Uniform volume axis x_i = i*dx, i = 0..n_points-1. The origin is pinned
/// at zero so that doubling a node index is the exact dilation x -> 2x.
class UniformGrid {
public:
    UniformGrid(double dx, std::size_t n_points) : dx_(dx), n_(n_points) {
        if (!(dx > 0.0))
            throw InvalidArgument("grid spacing dx must be > 0");
        if (n_points < 4)
            throw InvalidArgument("grid needs at least 4 nodes");
    }

    double dx() const { return dx_; }
    std::size_t n_points() const { return n_; }
    double x(std::size_t i) const { return static_cast<double>(i) * dx_; }
    double x_max() const { return x(n_ - 1); }

    bool operator==(const UniformGrid& o) const { return dx_ == o.dx_ && n_ == o.n_; }
    bool operator!=(const UniformGrid& o) const { return !(*this == o); }

private:
    double dx_;
    std::size_t n_;
};

inline void require_same_grid(const UniformGrid& a, const UniformGrid& b, const char* what) {
    if (a != b)
        throw GridMismatch(std::string(what) + ": profiles live on different grids");
}

/// Composite trapezoid of sampled values on a uniform grid.
double trapezoid(std::span<const double> values, double dx);

/// Trapezoid of x^k * values(x).
double trapezoid_moment(std::span<const double> values, double dx, unsigned k);

/// Trapezoid-weighted L2 norm, sqrt(integral of values^2).
double l2_norm(std::span<const double> values, double dx);

/// Trapezoid L1 distance between two equal-length samplings.
double l1_distance(std::span<const double> a, std::span<const double> b, double dx);

/// Microscopic growth law: linear g(x) = g0 or exponential g(x) = kappa*x.
struct GrowthLaw {
    enum class Kind { Linear, Exponential };

    Kind kind;
    double coefficient; // g0 [um^3/min] for Linear, kappa [1/min] for Exponential

    static GrowthLaw linear(double g0) {
        check(g0);
        return {Kind::Linear, g0};
    }
    static GrowthLaw exponential(double kappa) {
        check(kappa);
        return {Kind::Exponential, kappa};
    }

    double operator()(double x) const {
        return kind == Kind::Linear ? coefficient : coefficient * x;
    }

    /// Largest transport speed on the grid (enters the CFL bound).
    double max_speed(const UniformGrid& g) const {
        return kind == Kind::Linear ? coefficient : coefficient * g.x_max();
    }

private:
    static void check(double c) {
        if (!(c > 0.0))
            throw InvalidArgument("growth coefficient must be > 0");
    }
};

/// A sampled size density N(x) >= 0 with N(0) = 0. When the normalized
/// flag is set the trapezoid integral must be 1 within 1e-12 relative.
class SizeDensity {
public:
    SizeDensity(UniformGrid grid, std::vector<double> values, bool normalized);

    /// Rescales the samples to unit integral and sets the flag.
    static SizeDensity normalize(UniformGrid grid, std::vector<double> values);

    const UniformGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    bool normalized() const { return normalized_; }

    double integral() const { return trapezoid(values_, grid_.dx()); }

private:
    UniformGrid grid_;
    std::vector<double> values_;
    bool normalized_;
};

/// A sampled division rate B(x) >= 0.
class DivisionRate {
public:
    DivisionRate(UniformGrid grid, std::vector<double> values);

    static DivisionRate constant(const UniformGrid& grid, double b);

    const UniformGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    UniformGrid grid_;
    std::vector<double> values_;
};

/// Principal eigenpair (N, lambda0) of the division model.
struct EigenPair {
    SizeDensity density; // normalized
    double malthus;      // lambda0 > 0 [1/min]
};

/// Experiment-level metadata accompanying a measured histogram.
struct DatasetMeta {
    double doubling_time = 0.0; // T0 [min]; 0 = absent
    double mean_volume = 0.0;   // V_b [um^3]; 0 = absent
    double diameter_sigma = 0.0; // instrument sigma [um]
    std::string label;

    bool has_doubling_time() const { return doubling_time > 0.0; }
    bool has_mean_volume() const { return mean_volume > 0.0; }
};

/// One recorded instant of a transient run, with its two balance
/// integrals precomputed on construction.
struct TransientState {
    double time;
    SizeDensity density; // not normalized
    double total_number;  // integral of n
    double total_biomass; // integral of x*n

    TransientState(double t, SizeDensity d)
        : time(t),
          density(std::move(d)),
          total_number(density.integral()),
          total_biomass(trapezoid_moment(density.values(), density.grid().dx(), 1)) {}
};

} // namespace divrate
