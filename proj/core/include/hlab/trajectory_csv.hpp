#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "hlab/iterators.hpp"

namespace hlab {

/// Columns: k, x_1..x_m, z_1..z_m, e_1..e_m, ell, phi_term, alpha, beta, gamma,
/// delta, epsilon, residual. One row per iterate x_k, so a complete run has
/// horizon + 1 data rows after the header. Cells that are undefined at a row
/// (z, e and the step columns on the last iterate, ell on vector schemes) are
/// left empty. Numbers use %.17g, so equal trajectories give equal bytes.
void write_trajectory_csv(const Trajectory& t, std::ostream& out);
std::string trajectory_csv(const Trajectory& t);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws std::runtime_error when the file cannot be written.
void write_trajectory_csv_file(const Trajectory& t, const std::filesystem::path& path);

/// Atomic write of arbitrary text, same guarantees as above.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace hlab
