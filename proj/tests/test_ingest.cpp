#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "divrate/ingest.hpp"

using namespace divrate;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("divrate_ingest_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string write_text(const TempDir& tmp, const char* name, const std::string& body) {
    const std::string p = tmp.file(name);
    std::ofstream out(p);
    out << body;
    return p;
}

// Smooth single bump dying out well inside the axis; exactly zero once
// it falls under 1e-13 so the tail knots are honest zeros.
double bump(double x) {
    const double v = std::exp(-((x - 1.0) / 0.18) * ((x - 1.0) / 0.18));
    return v < 1e-13 ? 0.0 : v;
}

} // namespace

TEST_CASE("histogram parsing") {
    TempDir tmp;

    SUBCASE("metadata lines and counts") {
        std::string body = "# doubling_time_min=20\n# mean_volume=1.36\n";
        body += "volume,count\n";
        for (int i = 1; i <= 10; ++i)
            body += std::to_string(0.3 * i) + "," + std::to_string(100 - i) + "\n";
        const RawHistogram h = parse_histogram(write_text(tmp, "h.csv", body));
        CHECK(h.points.size() == 10);
        CHECK(h.meta.doubling_time == 20.0);
        CHECK(h.meta.mean_volume == 1.36);
        CHECK(h.points[2].first == doctest::Approx(0.9));
        CHECK(h.points[2].second == 97.0);
    }

    SUBCASE("volumes out of order are rejected") {
        const std::string body = "volume,count\n0.5,1\n0.4,2\n0.9,3\n1.2,4\n";
        CHECK_THROWS_AS((void)parse_histogram(write_text(tmp, "u.csv", body)),
                        NonMonotoneVolumes);
    }

    SUBCASE("duplicate volumes are rejected") {
        const std::string body = "volume,count\n0.5,1\n0.5,2\n0.9,3\n1.2,4\n";
        CHECK_THROWS_AS((void)parse_histogram(write_text(tmp, "d.csv", body)),
                        NonMonotoneVolumes);
    }

    SUBCASE("fewer than four channels are rejected") {
        const std::string body = "volume,count\n0.5,1\n0.9,3\n1.2,4\n";
        CHECK_THROWS_AS((void)parse_histogram(write_text(tmp, "few.csv", body)), Error);
    }

    SUBCASE("negative count is rejected") {
        const std::string body = "volume,count\n0.5,1\n0.9,-3\n1.2,4\n1.5,1\n";
        CHECK_THROWS_AS((void)parse_histogram(write_text(tmp, "neg.csv", body)), Error);
    }
}

TEST_CASE("boundary completion") {
    RawHistogram h;
    h.points = {{0.4, 1.0}, {0.6, 5.0}, {0.8, 4.0}, {1.2, 1.0}};

    SUBCASE("zero knots added at both ends plus a tail guard") {
        const RawHistogram done = complete_boundaries(h, 4.0);
        REQUIRE(done.points.size() == h.points.size() + 3);
        CHECK(done.points.front() == std::pair{0.0, 0.0});
        CHECK(done.points.back() == std::pair{4.0, 0.0});
        // guard knot one median channel spacing past the last datum
        const auto& guard = done.points[done.points.size() - 2];
        CHECK(guard.first == doctest::Approx(1.2 + 0.2));
        CHECK(guard.second == 0.0);
        CHECK(std::is_sorted(done.points.begin(), done.points.end()));
    }

    SUBCASE("existing origin knot is not duplicated") {
        RawHistogram withzero;
        withzero.points = {{0.0, 0.0}, {0.6, 5.0}, {0.8, 4.0}, {1.2, 1.0}};
        const RawHistogram done = complete_boundaries(withzero, 4.0);
        CHECK(done.points.front() == std::pair{0.0, 0.0});
        CHECK(done.points[1].first == 0.6);
    }

    SUBCASE("extent at or below the data is rejected") {
        CHECK_THROWS_AS((void)complete_boundaries(h, 1.2), BadRange);
        CHECK_THROWS_AS((void)complete_boundaries(h, 1.0), BadRange);
    }

    SUBCASE("default extent is four mean volumes when metadata has one") {
        RawHistogram with_meta = h;
        with_meta.meta.mean_volume = 1.36;
        CHECK(default_x_max(with_meta) == doctest::Approx(5.44));
        CHECK(default_x_max(h) == doctest::Approx(1.5 * 1.2));
    }
}

TEST_CASE("interpolation to the uniform grid") {
    SUBCASE("knots on a straight line are reproduced at the nodes") {
        RawHistogram h;
        for (double x : {0.0, 0.25, 0.4, 0.55, 0.75, 1.0})
            h.points.emplace_back(x, 2.0 * x);
        UniformGrid grid(1.0 / 16.0, 17);
        const SizeDensity d = to_uniform_density(h, grid);
        // proportionality survives normalization: d(x) = 2x / integral
        const double scale = d.integral() / 1.0; // = 1 after normalize
        CHECK(scale == doctest::Approx(1.0).epsilon(1e-12));
        const double c = d[8] / grid.x(8);
        for (std::size_t i = 1; i < grid.n_points(); ++i)
            CHECK(d[i] == doctest::Approx(c * grid.x(i)).epsilon(1e-10));
    }

    SUBCASE("knot values are hit exactly when knots sit on nodes") {
        RawHistogram h;
        h.points = {{0.0, 0.0}, {0.25, 1.0}, {0.5, 3.0}, {0.75, 2.0}, {1.0, 0.0}};
        UniformGrid grid(0.0625, 17);
        const SizeDensity d = to_uniform_density(h, grid);
        const double c = d[8] / 3.0; // normalization factor via the 0.5 knot
        CHECK(d[4] == doctest::Approx(c * 1.0).epsilon(1e-12));
        CHECK(d[12] == doctest::Approx(c * 2.0).epsilon(1e-12));
        CHECK(d[0] == 0.0);
        CHECK(d[16] == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("single-bump histogram gives a unimodal unit-mass density") {
        RawHistogram h;
        h.meta.mean_volume = 1.0;
        for (double x = 0.3; x <= 2.0; x += 0.1)
            h.points.emplace_back(x, bump(x));
        const double x_max = default_x_max(h);
        const RawHistogram done = complete_boundaries(h, x_max);
        UniformGrid grid(x_max / 512.0, 513);
        std::size_t clamped = 0;
        const SizeDensity d = to_uniform_density(done, grid, &clamped);

        CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(d.normalized());
        // unimodal up to spline ripple a millionth of the peak height
        const auto peak = std::max_element(d.values().begin(), d.values().end());
        const double ripple = 1e-6 * *peak;
        for (auto it = d.values().begin(); it + 1 != peak; ++it)
            CHECK(*it <= *(it + 1) + ripple);
        double floor = *peak;
        for (auto it = peak + 1; it != d.values().end(); ++it) {
            CHECK(*it <= floor + ripple);
            floor = std::min(floor, *it);
        }
    }

    SUBCASE("grid not covering the knots is rejected") {
        RawHistogram h;
        h.points = {{0.0, 0.0}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 0.0}};
        UniformGrid grid(0.125, 9); // extends to 1.0 only
        CHECK_THROWS_AS((void)to_uniform_density(h, grid), GridMismatch);
    }

    SUBCASE("re-ingesting gridded data with zero boundaries is idempotent") {
        const double dx = 1.0 / 64.0;
        UniformGrid grid(dx, 257); // [0, 4]
        std::vector<double> v(grid.n_points());
        for (std::size_t i = 0; i < grid.n_points(); ++i)
            v[i] = bump(grid.x(i));
        const SizeDensity original = SizeDensity::normalize(grid, std::move(v));

        RawHistogram h;
        for (std::size_t i = 1; i + 1 < grid.n_points(); ++i)
            h.points.emplace_back(grid.x(i), original[i]);
        const RawHistogram done = complete_boundaries(std::move(h), grid.x_max());
        const SizeDensity again = to_uniform_density(done, grid);

        for (std::size_t i = 0; i < grid.n_points(); ++i)
            CHECK(again[i] == doctest::Approx(original[i]).epsilon(1e-10));
    }
}

TEST_CASE("controlled noise injection") {
    const double dx = 1.0 / 256.0;
    UniformGrid grid(dx, 1025);
    std::vector<double> v(grid.n_points());
    for (std::size_t i = 0; i < grid.n_points(); ++i)
        v[i] = bump(grid.x(i));
    const SizeDensity N = SizeDensity::normalize(grid, std::move(v));

    SUBCASE("zero level returns the input verbatim") {
        const NoisyDensity out = add_noise(N, {0.0, 123, NoiseKind::MultiplicativeUniform});
        CHECK(out.realized_l2 == 0.0);
        for (std::size_t i = 0; i < N.size(); ++i)
            CHECK(out.density[i] == N[i]);
    }

    SUBCASE("same seed gives identical output, different seed differs") {
        const NoiseSpec spec{1e-2, 77, NoiseKind::MultiplicativeUniform};
        const NoisyDensity a = add_noise(N, spec);
        const NoisyDensity b = add_noise(N, spec);
        CHECK(a.realized_l2 == b.realized_l2);
        for (std::size_t i = 0; i < N.size(); ++i)
            CHECK(a.density[i] == b.density[i]);
        const NoisyDensity c = add_noise(N, {1e-2, 78, NoiseKind::MultiplicativeUniform});
        CHECK(c.realized_l2 != a.realized_l2);
    }

    SUBCASE("multiplicative level 1e-2 lands near epsilon/sqrt(3)") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const NoisyDensity out =
                add_noise(N, {1e-2, seed, NoiseKind::MultiplicativeUniform});
            CHECK(out.realized_l2 > 0.003);
            CHECK(out.realized_l2 < 0.01);
        }
    }

    SUBCASE("additive level is calibrated to epsilon") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const NoisyDensity out =
                add_noise(N, {1e-2, seed, NoiseKind::AdditiveGaussian});
            // clamping trims variance, renormalization adds some back;
            // the level must stay the right order of magnitude
            CHECK(out.realized_l2 > 0.7e-2);
            CHECK(out.realized_l2 < 1.5e-2);
        }
    }

    SUBCASE("output is a valid normalized density") {
        const NoisyDensity out = add_noise(N, {5e-2, 9, NoiseKind::AdditiveGaussian});
        CHECK(out.density[0] == 0.0);
        CHECK(out.density.normalized());
        CHECK(out.density.integral() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < out.density.size(); ++i)
            CHECK(out.density[i] >= 0.0);
    }
}
