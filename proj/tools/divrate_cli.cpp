#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "divrate/forward.hpp"
#include "divrate/ingest.hpp"
#include "divrate/inverse.hpp"
#include "divrate/io.hpp"
#include "divrate/model.hpp"
#include "divrate/regselect.hpp"

namespace fs = std::filesystem;
using namespace divrate;

namespace {

std::size_t env_thread_cap() {
    const char* raw = std::getenv("DIVRATE_THREADS");
    if (!raw)
        return 0;
    const long v = std::strtol(raw, nullptr, 10);
    return v > 0 ? static_cast<std::size_t>(v) : 0;
}

struct Options {
    std::string input;
    std::string output_dir = ".";
    std::string method = "qr";
    std::string growth = "linear";
    double growth_coeff = 1.0;
    double alpha = 0.0;
    std::string alphas;
    double alpha_filter = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double dx = 0.0;
    std::size_t n_points = 0;
    double x_max = 0.0;
    std::string lambda_source = "doubling";
    std::string select = "ratio";
    double dt = 0.0;
    double t_max = 1.0;
    double tol = 1e-8;
    std::size_t max_steps = 2'000'000;
    std::size_t record_every = 0;
    std::string n0_path;
    bool forward_check = false;
    double b_const = 1.0;
    std::size_t channels = 64;
    std::string label;
    double t0_override = 0.0;
    double mean_volume_override = 0.0;
    double sigma_um = 0.0;
};

GrowthLaw growth_from(const Options& o) {
    if (o.growth == "linear")
        return GrowthLaw::linear(o.growth_coeff);
    if (o.growth == "exponential")
        return GrowthLaw::exponential(o.growth_coeff);
    throw InvalidArgument("unknown growth law '" + o.growth + "'");
}

GrowthLaw::Kind growth_kind(const Options& o) {
    if (o.growth == "linear")
        return GrowthLaw::Kind::Linear;
    if (o.growth == "exponential")
        return GrowthLaw::Kind::Exponential;
    throw InvalidArgument("unknown growth law '" + o.growth + "'");
}

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    std::istringstream ss(text);
    while (std::getline(ss, cur, ',')) {
        try {
            out.push_back(std::stod(cur));
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse alpha value '" + cur + "'");
        }
    }
    return out;
}

std::string out_path(const Options& o, const std::string& name) {
    fs::create_directories(o.output_dir);
    return (fs::path(o.output_dir) / name).string();
}

double default_dt(const UniformGrid& grid, const GrowthLaw& g) {
    return 0.5 * grid.dx() / g.max_speed(grid);
}

SolverConfig eigen_config(const Options& o, const UniformGrid& grid, const GrowthLaw& g) {
    const double dt = o.dt > 0.0 ? o.dt : default_dt(grid, g);
    return SolverConfig(dt, dt * static_cast<double>(o.max_steps), grid, g, o.tol,
                        o.max_steps, 1);
}

std::map<std::string, std::string> growth_meta(const GrowthLaw& g) {
    return {{"growth", g.kind == GrowthLaw::Kind::Linear ? "linear" : "exponential"},
            {"growth_coefficient", io::format_double(g.coefficient)}};
}

SizeDensity default_seed_profile(const UniformGrid& grid) {
    std::vector<double> v(grid.n_points());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.x(i);
        v[i] = x * std::exp(-x);
    }
    return SizeDensity::normalize(grid, std::move(v));
}

UniformGrid grid_from_flags(const Options& o, double x_max) {
    if (o.dx > 0.0) {
        const auto n = static_cast<std::size_t>(std::round(x_max / o.dx)) + 1;
        return UniformGrid(o.dx, n);
    }
    const std::size_t n = o.n_points > 0 ? o.n_points : 1025;
    if (n < 4)
        throw InvalidArgument("--n-points must be at least 4");
    return UniformGrid(x_max / static_cast<double>(n - 1), n);
}

ReconstructionResult reconstruct(Method method, const SizeDensity& N, double alpha,
                                 double alpha_filter, const GrowthLaw& g,
                                 std::optional<double> lambda_override) {
    switch (method) {
    case Method::Exact:
        return exact_inverse(N, g, lambda_override);
    case Method::QuasiReversibility:
        return quasi_reversibility(N, alpha, g, lambda_override);
    case Method::Filtering:
        return filter_regularize(N, alpha, g, lambda_override);
    case Method::Hybrid:
        return hybrid(N, alpha_filter > 0.0 ? alpha_filter : alpha, alpha, g,
                      lambda_override);
    }
    throw InvalidArgument("unknown method");
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& lines) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'", 0);
    for (const auto& [k, v] : lines)
        out << k << "=" << v << "\n";
}

int cmd_eigen(const Options& o) {
    const DivisionRate B = io::read_rate_csv(o.input);
    const GrowthLaw g = growth_from(o);
    EigenDiagnostics diag;
    const EigenPair pair = eigenpair_solve(B, g, eigen_config(o, B.grid(), g), &diag);

    auto meta = growth_meta(g);
    meta["lambda"] = io::format_double(pair.malthus);
    meta["cross_check"] = io::format_double(diag.malthus_cross_check);
    meta["steps"] = std::to_string(diag.steps);
    io::write_density_csv(out_path(o, "N.csv"), pair.density, meta);

    std::cout << "lambda0=" << io::format_double(pair.malthus) << "\n"
              << "cross_check=" << io::format_double(diag.malthus_cross_check) << "\n"
              << "steps=" << diag.steps << "\n"
              << "final_profile_diff=" << io::format_double(diag.final_profile_diff) << "\n"
              << "clamped_mass=" << io::format_double(diag.clamped_mass) << "\n";
    return 0;
}

int cmd_simulate(const Options& o) {
    const DivisionRate B = io::read_rate_csv(o.input);
    const GrowthLaw g = growth_from(o);
    const UniformGrid grid = B.grid();
    const SizeDensity n0 =
        o.n0_path.empty() ? default_seed_profile(grid) : io::read_density_csv(o.n0_path);
    const double dt = o.dt > 0.0 ? o.dt : default_dt(grid, g);
    const auto total_steps = static_cast<std::size_t>(std::ceil(o.t_max / dt));
    const std::size_t record =
        o.record_every > 0 ? o.record_every : std::max<std::size_t>(1, total_steps / 50);
    const SolverConfig cfg(dt, o.t_max, grid, g, o.tol, o.max_steps, record);

    const Trajectory traj = transient_solve(n0, B, g, cfg);
    io::write_trajectory_csv(out_path(o, "trajectory.csv"), traj);

    std::cout << "states=" << traj.states.size() << "\n"
              << "clamped_mass=" << io::format_double(traj.clamped_mass) << "\n";
    if (traj.states.size() >= 3) {
        const BalanceResiduals bal = balance_residuals(traj, B, g);
        std::cout << "number_residual=" << io::format_double(bal.number_residual) << "\n"
                  << "biomass_residual=" << io::format_double(bal.biomass_residual) << "\n";
    }
    return 0;
}

struct IngestedData {
    RawHistogram histogram;
    SizeDensity density;
    std::size_t interp_clamped;
};

IngestedData ingest_histogram(const Options& o) {
    RawHistogram h = parse_histogram(o.input);
    const double x_max = o.x_max > 0.0 ? o.x_max : default_x_max(h);
    const UniformGrid grid = grid_from_flags(o, x_max);
    std::size_t clamped = 0;
    SizeDensity N = to_uniform_density(complete_boundaries(h, x_max), grid, &clamped);
    return {std::move(h), std::move(N), clamped};
}

struct LambdaChoice {
    GrowthLaw law;
    std::optional<double> lambda_override; // set in doubling mode
    double reference;                      // value reported in text output
};

LambdaChoice choose_lambda(const Options& o, const DatasetMeta& meta, const SizeDensity& N,
                           const std::vector<double>& alphas) {
    if (o.lambda_source == "doubling") {
        const CalibratedGrowth cal = growth_constant_from_doubling(meta, N, growth_kind(o));
        return {cal.law, cal.lambda0, cal.lambda0};
    }
    if (o.lambda_source != "eq7")
        throw InvalidArgument("unknown lambda source '" + o.lambda_source + "'");
    const double alpha_ref = o.alpha > 0.0 ? o.alpha
                             : !alphas.empty()
                                 ? alphas.front()
                                 : throw InvalidArgument(
                                       "--lambda-source eq7 needs --alpha or --alphas");
    const double lambda_ref = malthus_regularized(N, alpha_ref);
    if (growth_kind(o) == GrowthLaw::Kind::Exponential)
        return {GrowthLaw::exponential(lambda_ref), std::nullopt, lambda_ref};
    const double g0 = lambda_ref * moment(N, 1) / moment(N, 0);
    return {GrowthLaw::linear(g0), std::nullopt, lambda_ref};
}

int cmd_calibrate(const Options& o) {
    const IngestedData data = ingest_histogram(o);
    const Method method = method_from_name(o.method);
    const std::vector<double> alphas =
        o.alphas.empty() ? std::vector<double>{} : parse_alpha_list(o.alphas);
    const LambdaChoice lam = choose_lambda(o, data.histogram.meta, data.density, alphas);

    io::write_density_csv(out_path(o, "density.csv"), data.density,
                          {{"label", data.histogram.meta.label}});

    std::vector<std::pair<std::string, std::string>> report;
    report.emplace_back("label", data.histogram.meta.label);
    report.emplace_back("lambda0", io::format_double(lam.reference));
    report.emplace_back("growth",
                        lam.law.kind == GrowthLaw::Kind::Linear ? "linear" : "exponential");
    report.emplace_back("growth_coefficient", io::format_double(lam.law.coefficient));
    report.emplace_back("method", o.method);
    report.emplace_back("interp_clamped_nodes", std::to_string(data.interp_clamped));

    double alpha_final = o.alpha;
    if (!alphas.empty()) {
        const AlphaSweep sweep = sweep_alpha(method, data.density, alphas, lam.law,
                                             lam.lambda_override, env_thread_cap());
        io::write_sweep_csv(out_path(o, "sweep.csv"), sweep);
        if (o.select == "ratio") {
            const RatioSelection sel = select_alpha_ratio(sweep);
            alpha_final = sel.alpha_star;
            report.emplace_back("alpha_star", io::format_double(sel.alpha_star));
            report.emplace_back("ratio_flat", sel.flat ? "1" : "0");
        } else if (o.select == "lcurve") {
            const LCurveSelection sel = select_alpha_lcurve(sweep, sweep.solution_norms);
            alpha_final = sel.alpha;
            report.emplace_back("lcurve_alpha", io::format_double(sel.alpha));
            report.emplace_back("lcurve_degenerate", sel.degenerate ? "1" : "0");
        } else if (o.select != "none") {
            throw InvalidArgument("unknown selection rule '" + o.select + "'");
        }
    }

    if (alpha_final > 0.0 || method == Method::Exact) {
        const ReconstructionResult rec = reconstruct(method, data.density, alpha_final,
                                                     o.alpha_filter, lam.law, lam.lambda_override);
        auto meta = growth_meta(lam.law);
        meta["label"] = data.histogram.meta.label;
        io::write_reconstruction_csv(out_path(o, "B.csv"), rec, meta);
        report.emplace_back("alpha", io::format_double(rec.alpha));
        report.emplace_back("lambda_used", io::format_double(rec.lambda_used));
        report.emplace_back("residual", io::format_double(rec.residual));
        report.emplace_back("floor_count", std::to_string(rec.diagnostics.floor_count));
        report.emplace_back("clamp_count", std::to_string(rec.diagnostics.clamp_count));
        report.emplace_back("clamped_mass", io::format_double(rec.diagnostics.clamped_mass));
        report.emplace_back("oversmoothed", rec.diagnostics.oversmoothed ? "1" : "0");
    } else if (alphas.empty()) {
        throw InvalidArgument("calibrate needs --alpha or --alphas (or --method exact)");
    }

    write_report(out_path(o, "report.txt"), report);
    for (const auto& [k, v] : report)
        std::cout << k << "=" << v << "\n";
    return 0;
}

int cmd_sweep(const Options& o) {
    if (o.alphas.empty())
        throw InvalidArgument("sweep needs --alphas");
    const IngestedData data = ingest_histogram(o);
    const Method method = method_from_name(o.method);
    const std::vector<double> alphas = parse_alpha_list(o.alphas);
    const LambdaChoice lam = choose_lambda(o, data.histogram.meta, data.density, alphas);

    const AlphaSweep sweep =
        sweep_alpha(method, data.density, alphas, lam.law, lam.lambda_override, env_thread_cap());
    io::write_sweep_csv(out_path(o, "sweep.csv"), sweep);

    std::cout << "entries=" << sweep.alphas.size() << "\n";
    for (std::size_t i = 0; i < sweep.alphas.size(); ++i)
        if (!sweep.failure_reasons[i].empty())
            std::cout << "failed_alpha=" << io::format_double(sweep.alphas[i]) << " ("
                      << sweep.failure_reasons[i] << ")\n";
    if (o.select == "ratio") {
        const RatioSelection sel = select_alpha_ratio(sweep);
        std::cout << "alpha_star=" << io::format_double(sel.alpha_star) << "\n"
                  << "ratio_flat=" << (sel.flat ? 1 : 0) << "\n";
    } else if (o.select == "lcurve") {
        const LCurveSelection sel = select_alpha_lcurve(sweep, sweep.solution_norms);
        std::cout << "lcurve_alpha=" << io::format_double(sel.alpha) << "\n"
                  << "lcurve_degenerate=" << (sel.degenerate ? 1 : 0) << "\n";
    }
    return 0;
}

int roundtrip_consistency(const Options& o, const io::CsvTable& table) {
    const auto xc = table.column("x");
    const UniformGrid grid = io::grid_from_x_column(table, xc);
    const auto bc = table.column("B");
    const auto nc = table.column("N_used");
    std::vector<double> bv(table.rows.size()), nv(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        bv[i] = table.rows[i][bc];
        nv[i] = table.rows[i][nc];
    }
    const DivisionRate B(grid, std::move(bv));
    const SizeDensity N_data = SizeDensity::normalize(grid, std::move(nv));

    GrowthLaw g = growth_from(o);
    if (const auto it = table.meta.find("growth_coefficient");
        it != table.meta.end() && o.growth_coeff == 1.0) {
        const double c = std::stod(it->second);
        const auto kit = table.meta.find("growth");
        const bool exp_law = kit != table.meta.end() && kit->second == "exponential";
        g = exp_law ? GrowthLaw::exponential(c) : GrowthLaw::linear(c);
    }

    EigenDiagnostics diag;
    const EigenPair pair = eigenpair_solve(B, g, eigen_config(o, grid, g), &diag);
    const double l1 = l1_distance(pair.density.values(), N_data.values(), grid.dx());

    auto meta = growth_meta(g);
    meta["lambda"] = io::format_double(pair.malthus);
    io::write_density_csv(out_path(o, "roundtrip_N.csv"), pair.density, meta);

    std::cout << "consistency_l1=" << io::format_double(l1) << "\n"
              << "lambda_forward=" << io::format_double(pair.malthus) << "\n";
    if (const auto it = table.meta.find("lambda"); it != table.meta.end()) {
        const double lam_file = std::stod(it->second);
        std::cout << "lambda_file=" << io::format_double(lam_file) << "\n"
                  << "lambda_mismatch=" << io::format_double(std::abs(lam_file - pair.malthus))
                  << "\n";
    }
    return 0;
}

int roundtrip_synthetic(const Options& o) {
    const DivisionRate B_true = io::read_rate_csv(o.input);
    const GrowthLaw g = growth_from(o);
    const UniformGrid grid = B_true.grid();

    EigenDiagnostics diag;
    const EigenPair pair = eigenpair_solve(B_true, g, eigen_config(o, grid, g), &diag);
    const NoisyDensity noisy =
        add_noise(pair.density, {o.epsilon, o.seed, NoiseKind::MultiplicativeUniform});
    io::write_density_csv(out_path(o, "density.csv"), noisy.density,
                          {{"epsilon", io::format_double(o.epsilon)},
                           {"realized_l2", io::format_double(noisy.realized_l2)}});

    const Method method = method_from_name(o.method);
    std::optional<double> lambda_override;
    if (o.lambda_source == "doubling")
        lambda_override = pair.malthus;
    const ReconstructionResult rec = reconstruct(method, noisy.density, o.alpha,
                                                 o.alpha_filter, g, lambda_override);
    io::write_reconstruction_csv(out_path(o, "B_rec.csv"), rec, growth_meta(g));

    const double err = weighted_rate_error(rec.rate, B_true, pair.density);
    std::cout << "lambda_true=" << io::format_double(pair.malthus) << "\n"
              << "lambda_used=" << io::format_double(rec.lambda_used) << "\n"
              << "realized_noise=" << io::format_double(noisy.realized_l2) << "\n"
              << "b_error_weighted=" << io::format_double(err) << "\n"
              << "residual=" << io::format_double(rec.residual) << "\n";

    if (o.forward_check) {
        const EigenPair back = eigenpair_solve(rec.rate, g, eigen_config(o, grid, g));
        const double l1 =
            l1_distance(back.density.values(), noisy.density.values(), grid.dx());
        std::cout << "forward_l1=" << io::format_double(l1) << "\n";
    }
    return 0;
}

int cmd_roundtrip(const Options& o) {
    const io::CsvTable table = io::read_csv(o.input);
    if (table.has_column("N_used"))
        return roundtrip_consistency(o, table);
    return roundtrip_synthetic(o);
}

int cmd_synth(const Options& o) {
    const double x_max = o.x_max > 0.0 ? o.x_max : 8.0;
    const UniformGrid grid = grid_from_flags(o, x_max);
    const GrowthLaw g = growth_from(o);
    const DivisionRate B = o.input.empty() ? DivisionRate::constant(grid, o.b_const)
                                           : io::read_rate_csv(o.input);
    require_same_grid(grid, B.grid(), "synth");

    const EigenPair pair = eigenpair_solve(B, g, eigen_config(o, grid, g));
    if (o.channels < 4)
        throw InvalidArgument("--channels must be at least 4");

    // Channel volumes are equally spaced strictly inside (0, x_max),
    // leaving the boundary to the ingest completion step; counts sample
    // the stationary profile, linearly interpolated between nodes.
    const auto nv = pair.density.values();
    std::vector<double> volume(o.channels), count(o.channels);
    for (std::size_t j = 0; j < o.channels; ++j) {
        const double v = (static_cast<double>(j) + 1.0) * x_max /
                         static_cast<double>(o.channels + 1);
        const double u = v / grid.dx();
        const auto i0 = std::min(static_cast<std::size_t>(u), grid.n_points() - 2);
        const double w = u - static_cast<double>(i0);
        volume[j] = v;
        count[j] = (1.0 - w) * nv[i0] + w * nv[i0 + 1];
    }
    if (o.epsilon > 0.0) {
        // Same portable generator as add_noise, applied channel-wise.
        std::mt19937_64 rng(o.seed);
        for (double& c : count) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            c *= 1.0 + o.epsilon * (2.0 * u - 1.0);
            c = std::max(c, 0.0);
        }
    }

    const double t0 =
        o.t0_override > 0.0 ? o.t0_override : std::log(2.0) / pair.malthus;
    const double mean = o.mean_volume_override > 0.0
                            ? o.mean_volume_override
                            : moment(pair.density, 1) / moment(pair.density, 0);

    const std::string path = out_path(o, "synth.csv");
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'", 0);
    out << "# doubling_time_min=" << io::format_double(t0) << "\n";
    out << "# mean_volume=" << io::format_double(mean) << "\n";
    out << "# sigma_um=" << io::format_double(o.sigma_um) << "\n";
    if (!o.label.empty())
        out << "# label=" << o.label << "\n";
    out << "volume,count\n";
    for (std::size_t j = 0; j < o.channels; ++j)
        out << io::format_double(volume[j]) << "," << io::format_double(count[j]) << "\n";
    out.close();

    std::cout << "written=" << path << "\n"
              << "lambda0=" << io::format_double(pair.malthus) << "\n"
              << "mean_volume=" << io::format_double(mean) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const std::size_t cap = env_thread_cap(); cap > 0)
        omp_set_num_threads(static_cast<int>(cap));
#endif

    CLI::App app{"growth-fragmentation division-rate toolkit"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--output-dir", o.output_dir, "directory for emitted files");
        cmd->add_option("--growth", o.growth, "growth law: linear|exponential");
        cmd->add_option("--dx", o.dx, "grid spacing override");
        cmd->add_option("--n-points", o.n_points, "grid node count override");
        cmd->add_option("--x-max", o.x_max, "grid extent override");
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--dt", o.dt, "time step (default: half the CFL bound)");
        cmd->add_option("--tol", o.tol, "convergence tolerance");
        cmd->add_option("--max-steps", o.max_steps, "iteration cap");
        cmd->add_option("--growth-coeff", o.growth_coeff,
                        "growth coefficient (g0 or kappa)");
    };

    CLI::App* eigen = app.add_subcommand("eigen", "stationary profile and growth rate");
    eigen->add_option("--input", o.input, "division-rate CSV (x,B)")->required();
    add_common(eigen);
    add_solver(eigen);

    CLI::App* simulate = app.add_subcommand("simulate", "transient evolution");
    simulate->add_option("--input", o.input, "division-rate CSV (x,B)")->required();
    simulate->add_option("--t-max", o.t_max, "simulated time span");
    simulate->add_option("--record-every", o.record_every, "steps between records");
    simulate->add_option("--n0", o.n0_path, "initial density CSV (x,N)");
    add_common(simulate);
    add_solver(simulate);

    CLI::App* calibrate = app.add_subcommand("calibrate", "histogram to division rate");
    calibrate->add_option("--input", o.input, "histogram CSV (volume,count)")->required();
    calibrate->add_option("--method", o.method, "exact|qr|filter|hybrid");
    calibrate->add_option("--alpha", o.alpha, "regularization width");
    calibrate->add_option("--alphas", o.alphas, "comma-separated sweep widths");
    calibrate->add_option("--alpha-filter", o.alpha_filter, "hybrid smoothing width");
    calibrate->add_option("--lambda-source", o.lambda_source, "eq7|doubling");
    calibrate->add_option("--select", o.select, "ratio|lcurve|none");
    add_common(calibrate);

    CLI::App* sweep = app.add_subcommand("sweep", "residual curve over alpha");
    sweep->add_option("--input", o.input, "histogram CSV (volume,count)")->required();
    sweep->add_option("--method", o.method, "exact|qr|filter|hybrid");
    sweep->add_option("--alpha", o.alpha, "reference width for eq7 mode");
    sweep->add_option("--alphas", o.alphas, "comma-separated sweep widths")->required();
    sweep->add_option("--lambda-source", o.lambda_source, "eq7|doubling");
    sweep->add_option("--select", o.select, "ratio|lcurve|none");
    add_common(sweep);

    CLI::App* roundtrip = app.add_subcommand(
        "roundtrip", "forward consistency of a reconstruction, or a full synthetic loop");
    roundtrip->add_option("--input", o.input, "reconstruction CSV or rate CSV")->required();
    roundtrip->add_option("--method", o.method, "exact|qr|filter|hybrid");
    roundtrip->add_option("--alpha", o.alpha, "regularization width");
    roundtrip->add_option("--alpha-filter", o.alpha_filter, "hybrid smoothing width");
    roundtrip->add_option("--epsilon", o.epsilon, "relative noise level");
    roundtrip->add_option("--seed", o.seed, "noise seed");
    roundtrip->add_option("--lambda-source", o.lambda_source, "eq7|doubling");
    roundtrip->add_flag("--forward-check", o.forward_check,
                        "re-solve the forward problem on the reconstructed rate");
    add_common(roundtrip);
    add_solver(roundtrip);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic histogram");
    synth->add_option("--input", o.input, "division-rate CSV (x,B); default constant");
    synth->add_option("--b-const", o.b_const, "constant rate when no input is given");
    synth->add_option("--channels", o.channels, "histogram channel count");
    synth->add_option("--epsilon", o.epsilon, "multiplicative channel noise");
    synth->add_option("--seed", o.seed, "noise seed");
    synth->add_option("--label", o.label, "dataset label");
    synth->add_option("--t0", o.t0_override, "doubling-time metadata override");
    synth->add_option("--mean-volume", o.mean_volume_override,
                      "mean-volume metadata override");
    synth->add_option("--sigma-um", o.sigma_um, "instrument sigma metadata");
    add_common(synth);
    add_solver(synth);

    // Range checks apply only when a flag was actually given; defaults use
    // 0 as an "unset" sentinel, so sign errors must be caught here.
    auto check_ranges = [&](const CLI::App* cmd) {
        const auto given = [&](const char* name) {
            const CLI::Option* opt = cmd->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        const std::pair<const char*, double> positive[] = {
            {"--alpha", o.alpha},   {"--alpha-filter", o.alpha_filter},
            {"--dx", o.dx},         {"--x-max", o.x_max},
            {"--dt", o.dt},         {"--tol", o.tol},
            {"--t-max", o.t_max},
        };
        for (const auto& [name, value] : positive)
            if (given(name) && !(value > 0.0))
                throw InvalidArgument(std::string(name) + " must be positive");
        if (given("--epsilon") && o.epsilon < 0.0)
            throw InvalidArgument("--epsilon must be nonnegative");
    };

    try {
        app.parse(argc, argv);
        for (const CLI::App* sub : app.get_subcommands())
            check_ranges(sub);
        if (eigen->parsed())
            return cmd_eigen(o);
        if (simulate->parsed())
            return cmd_simulate(o);
        if (calibrate->parsed())
            return cmd_calibrate(o);
        if (sweep->parsed())
            return cmd_sweep(o);
        if (roundtrip->parsed())
            return cmd_roundtrip(o);
        if (synth->parsed())
            return cmd_synth(o);
        return 9;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 9;
    }
}
