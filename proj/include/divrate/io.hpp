#pragma once

#include <map>
#include <string>
#include <vector>

#include "divrate/forward.hpp"
#include "divrate/grid.hpp"
#include "divrate/inverse.hpp"
#include "divrate/regselect.hpp"

namespace divrate::io {

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

/// Generic CSV with one header line, numeric rows, and `# key=value`
/// comment lines allowed anywhere (metadata header or footer).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> meta;

    std::size_t column(const std::string& name) const; // throws ParseError if absent
    bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Reconstructs the uniform grid implied by an `x` column (must start
/// at 0 with equal spacing within 1e-9 relative).
UniformGrid grid_from_x_column(const CsvTable& table, std::size_t col);

SizeDensity read_density_csv(const std::string& path);
DivisionRate read_rate_csv(const std::string& path);

void write_density_csv(const std::string& path, const SizeDensity& d,
                       const std::map<std::string, std::string>& meta = {});
void write_rate_csv(const std::string& path, const DivisionRate& B,
                    const std::map<std::string, std::string>& meta = {});
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_reconstruction_csv(const std::string& path, const ReconstructionResult& r,
                              const std::map<std::string, std::string>& extra_meta = {});
void write_sweep_csv(const std::string& path, const AlphaSweep& sweep);

} // namespace divrate::io
