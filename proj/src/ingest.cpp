#include "divrate/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "divrate/io.hpp"
#include "divrate/numerics.hpp"

namespace divrate {

namespace {

double meta_number(const std::map<std::string, std::string>& meta, const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end())
        return 0.0;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ParseError("metadata '" + key + "' is not a number", 0);
    }
}

void validate_histogram(const RawHistogram& h) {
    if (h.points.size() < 4)
        throw TooFewPoints("histogram needs at least 4 channels");
    for (std::size_t i = 0; i < h.points.size(); ++i) {
        const auto& [v, c] = h.points[i];
        if (!(v > 0.0))
            throw ParseError("channel volume must be > 0", i + 2);
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ParseError("channel count must be finite and >= 0", i + 2);
        if (i > 0 && !(v > h.points[i - 1].first))
            throw NonMonotoneVolumes("channel volumes must be strictly increasing");
    }
}

} // namespace

RawHistogram parse_histogram(const std::string& path) {
    const auto table = io::read_csv(path);
    const auto vc = table.column("volume");
    const auto cc = table.column("count");

    RawHistogram h;
    h.points.reserve(table.rows.size());
    for (const auto& row : table.rows)
        h.points.emplace_back(row[vc], row[cc]);
    h.meta.doubling_time = meta_number(table.meta, "doubling_time_min");
    h.meta.mean_volume = meta_number(table.meta, "mean_volume");
    h.meta.diameter_sigma = meta_number(table.meta, "sigma_um");
    if (const auto it = table.meta.find("label"); it != table.meta.end())
        h.meta.label = it->second;
    validate_histogram(h);
    return h;
}

RawHistogram complete_boundaries(RawHistogram h, double x_max) {
    if (h.points.empty())
        throw TooFewPoints("complete_boundaries: empty histogram");
    const double last = h.points.back().first;
    if (!(x_max > last))
        throw BadRange("complete_boundaries: x_max must exceed the largest volume");

    std::vector<double> gaps;
    gaps.reserve(h.points.size());
    for (std::size_t i = 1; i < h.points.size(); ++i)
        gaps.push_back(h.points[i].first - h.points[i - 1].first);
    double median_gap = x_max - last;
    if (!gaps.empty()) {
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        median_gap = gaps[gaps.size() / 2];
    }

    if (h.points.front().first != 0.0)
        h.points.insert(h.points.begin(), {0.0, 0.0});
    // One zero knot just past the data pins the spline down before the
    // long empty stretch to x_max.
    const double guard = last + median_gap;
    if (guard < x_max)
        h.points.emplace_back(guard, 0.0);
    h.points.emplace_back(x_max, 0.0);
    return h;
}

double default_x_max(const RawHistogram& h) {
    if (h.meta.has_mean_volume())
        return 4.0 * h.meta.mean_volume;
    if (h.points.empty())
        throw TooFewPoints("default_x_max: empty histogram");
    return 1.5 * h.points.back().first;
}

SizeDensity to_uniform_density(const RawHistogram& h, const UniformGrid& grid,
                               std::size_t* clamped_nodes) {
    if (h.points.size() < 3)
        throw TooFewPoints("to_uniform_density: need >= 3 knots");
    if (h.points.front().first != 0.0)
        throw BadRange("to_uniform_density: boundaries not completed (no x=0 knot)");
    const double last = h.points.back().first;
    if (grid.x_max() + 1e-9 * std::max(1.0, last) < last)
        throw GridMismatch("to_uniform_density: grid does not cover the knots");

    std::vector<double> kx(h.points.size()), ky(h.points.size());
    for (std::size_t i = 0; i < h.points.size(); ++i) {
        kx[i] = h.points[i].first;
        ky[i] = h.points[i].second;
    }
    const CubicSpline spline(std::move(kx), std::move(ky));

    std::vector<double> values(grid.n_points());
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = spline(grid.x(i));
        if (v < 0.0) {
            v = 0.0;
            ++clamped;
        }
        values[i] = v;
    }
    values[0] = 0.0;
    if (clamped_nodes)
        *clamped_nodes = clamped;
    return SizeDensity::normalize(grid, std::move(values));
}

namespace {

/// Canonical double in [0,1) from the top 53 bits; keeps outputs
/// independent of the standard library's distribution internals.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    // Box-Muller; rejects u1 = 0 to keep the log finite.
    double u1 = 0.0;
    do {
        u1 = canonical(rng);
    } while (u1 == 0.0);
    const double u2 = canonical(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

} // namespace

NoisyDensity add_noise(const SizeDensity& N, const NoiseSpec& spec) {
    if (spec.epsilon < 0.0)
        throw InvalidArgument("add_noise: epsilon must be >= 0");
    if (spec.epsilon == 0.0)
        return {N, 0.0};
    const UniformGrid grid = N.grid();
    std::vector<double> values(N.values().begin(), N.values().end());

    {
        std::mt19937_64 rng(spec.seed);
        if (spec.kind == NoiseKind::MultiplicativeUniform) {
            for (double& v : values)
                v *= 1.0 + spec.epsilon * (2.0 * canonical(rng) - 1.0);
        } else {
            const double scale = spec.epsilon * l2_norm(N.values(), grid.dx()) /
                                 std::sqrt(static_cast<double>(grid.n_points()) * grid.dx());
            for (double& v : values)
                v += scale * gaussian(rng);
        }
        for (double& v : values)
            v = std::max(v, 0.0);
        values[0] = 0.0;
    }

    SizeDensity out = SizeDensity::normalize(grid, std::move(values));
    std::vector<double> diff(out.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = out[i] - N[i];
    const double base = l2_norm(N.values(), grid.dx());
    const double realized = base > 0.0 ? l2_norm(diff, grid.dx()) / base : 0.0;
    return {std::move(out), realized};
}

} // namespace divrate
