#include "divrate/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace divrate::io {

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw InvalidArgument("format_double: value does not fit");
    return std::string(buf, ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw ParseError("missing column '" + name + "'", 1);
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& c : columns)
        if (c == name)
            return true;
    return false;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep))
        out.push_back(trim(cur));
    if (!line.empty() && line.back() == sep)
        out.push_back("");
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("cannot parse number '" + cell + "'", line_no);
    return v;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'", 0);

    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#') {
            const std::string body = trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos)
                table.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            continue;
        }
        const auto cells = split(t, ',');
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw ParseError("expected " + std::to_string(table.columns.size()) +
                                 " cells, got " + std::to_string(cells.size()),
                             line_no);
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            row[i] = parse_number(cells[i], line_no);
        table.rows.push_back(std::move(row));
    }
    if (!have_header)
        throw ParseError("no header line in '" + path + "'", line_no);
    return table;
}

UniformGrid grid_from_x_column(const CsvTable& table, std::size_t col) {
    if (table.rows.size() < 4)
        throw TooFewPoints("grid_from_x_column: need at least 4 rows");
    if (table.rows.front()[col] != 0.0)
        throw ParseError("x column must start at 0", 2);
    const double dx = table.rows[1][col] - table.rows[0][col];
    if (!(dx > 0.0))
        throw ParseError("x column must be increasing", 3);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const double expect = static_cast<double>(i) * dx;
        if (std::abs(table.rows[i][col] - expect) > 1e-9 * std::max(1.0, expect))
            throw ParseError("x column is not uniformly spaced", i + 2);
    }
    return UniformGrid(dx, table.rows.size());
}

SizeDensity read_density_csv(const std::string& path) {
    const auto table = read_csv(path);
    const auto xc = table.column("x");
    const auto nc = table.column("N");
    const UniformGrid grid = grid_from_x_column(table, xc);
    std::vector<double> values(table.rows.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = table.rows[i][nc];
    const double mass = trapezoid(values, grid.dx());
    const bool normalized = std::abs(mass - 1.0) <= 1e-12 * std::max(1.0, std::abs(mass));
    return SizeDensity(grid, std::move(values), normalized);
}

DivisionRate read_rate_csv(const std::string& path) {
    const auto table = read_csv(path);
    const auto xc = table.column("x");
    const auto bc = table.column("B");
    const UniformGrid grid = grid_from_x_column(table, xc);
    std::vector<double> values(table.rows.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = table.rows[i][bc];
    return DivisionRate(grid, std::move(values));
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'", 0);
    return out;
}

void write_meta(std::ofstream& out, const std::map<std::string, std::string>& meta) {
    for (const auto& [k, v] : meta)
        out << "# " << k << "=" << v << "\n";
}

} // namespace

void write_density_csv(const std::string& path, const SizeDensity& d,
                       const std::map<std::string, std::string>& meta) {
    auto out = open_out(path);
    out << "x,N\n";
    for (std::size_t i = 0; i < d.size(); ++i)
        out << format_double(d.grid().x(i)) << "," << format_double(d[i]) << "\n";
    write_meta(out, meta);
}

void write_rate_csv(const std::string& path, const DivisionRate& B,
                    const std::map<std::string, std::string>& meta) {
    auto out = open_out(path);
    out << "x,B\n";
    for (std::size_t i = 0; i < B.size(); ++i)
        out << format_double(B.grid().x(i)) << "," << format_double(B[i]) << "\n";
    write_meta(out, meta);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,x,n\n";
    for (const auto& state : traj.states) {
        const std::string t = format_double(state.time);
        for (std::size_t i = 0; i < state.density.size(); ++i)
            out << t << "," << format_double(traj.grid.x(i)) << ","
                << format_double(state.density[i]) << "\n";
    }
}

void write_reconstruction_csv(const std::string& path, const ReconstructionResult& r,
                              const std::map<std::string, std::string>& extra_meta) {
    auto out = open_out(path);
    out << "x,B,N_used,H\n";
    const UniformGrid grid = r.rate.grid();
    for (std::size_t i = 0; i < r.rate.size(); ++i)
        out << format_double(grid.x(i)) << "," << format_double(r.rate[i]) << ","
            << format_double(r.n_used[i]) << "," << format_double(r.H[i]) << "\n";
    out << "# lambda=" << format_double(r.lambda_used) << "\n";
    out << "# alpha=" << format_double(r.alpha) << "\n";
    out << "# residual=" << format_double(r.residual) << "\n";
    out << "# method=" << method_name(r.method) << "\n";
    write_meta(out, extra_meta);
}

void write_sweep_csv(const std::string& path, const AlphaSweep& sweep) {
    auto out = open_out(path);
    out << "alpha,residual,ratio,solution_norm\n";
    for (std::size_t i = 0; i < sweep.alphas.size(); ++i)
        out << format_double(sweep.alphas[i]) << "," << format_double(sweep.residuals[i])
            << "," << format_double(sweep.ratios[i]) << ","
            << format_double(sweep.solution_norms[i]) << "\n";
}

} // namespace divrate::io
