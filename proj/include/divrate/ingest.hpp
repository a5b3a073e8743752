#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "divrate/grid.hpp"

namespace divrate {

/// Transcribed size histogram: (volume, count) channels plus the
/// experiment metadata carried in `#` lines.
struct RawHistogram {
    std::vector<std::pair<double, double>> points;
    DatasetMeta meta;
};

/// Reads CSV with header `volume,count` and optional metadata lines
/// `# doubling_time_min=`, `# mean_volume=`, `# sigma_um=`, `# label=`.
RawHistogram parse_histogram(const std::string& path);

/// Prepends a (0,0) knot, appends an interior zero knot one median
/// channel spacing past the last datum, and ends with (x_max, 0).
RawHistogram complete_boundaries(RawHistogram h, double x_max);

/// Default grid extent: 4 * mean volume when the metadata has one,
/// else 1.5 * the largest recorded volume.
double default_x_max(const RawHistogram& h);

/// Natural cubic spline through the knots evaluated at the grid
/// nodes, clamped to >= 0 and normalized to unit integral.
/// clamped_nodes, when given, receives the count of negative spline
/// values that were zeroed.
SizeDensity to_uniform_density(const RawHistogram& h, const UniformGrid& grid,
                               std::size_t* clamped_nodes = nullptr);

enum class NoiseKind { MultiplicativeUniform, AdditiveGaussian };

struct NoiseSpec {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    NoiseKind kind = NoiseKind::MultiplicativeUniform;
};

struct NoisyDensity {
    SizeDensity density;
    double realized_l2; // relative L2 distance of the output from the input
};

/// Perturbs N per the requested kind, clamps to >= 0, re-zeroes the
/// origin node, renormalizes. Deterministic in the seed; the generator
/// is self-contained so outputs are stable across standard libraries.
NoisyDensity add_noise(const SizeDensity& N, const NoiseSpec& spec);

} // namespace divrate
