#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/diagnostics.hpp"
#include "hlab/iterators.hpp"

namespace hlab::cli {

/// Malformed config; what() is "file:line: message".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Profile { standard, positive_venter, basic };

struct ValidationSpec {
  std::optional<std::size_t> horizon;  // defaults to the run horizon
  double tol = 1e-6;
  std::size_t samples = kDefaultSamples;
  Profile profile = Profile::standard;
};

struct ViGrid {
  double lo = 0.0, hi = 1.0, step = 0.01;
};

struct DiagnosticsSpec {
  double identity_tol = kIdentityTol;
  double tail_tol = kTailTol;
  double limsup_tol = kLimsupTol;
  double telescoping_tol = 1e-8;
  std::optional<BoundednessParams> boundedness;
  VenterParams venter;
  std::size_t fp_window = 1;
  double settle_tol = 1e-6;
  std::size_t permanence_k0 = 0;
  bool vi = false;
  std::optional<ViGrid> vi_grid;  // scalar grid of candidates; else sampling
  std::size_t vi_samples = 64;
  double vi_tol = 1e-9;
  std::optional<Point> vi_shift;  // evaluate the inequality at x* + shift instead
  bool positivity = false;
  std::vector<std::string> checks;  // explicit selection, "suite/name"; empty = defaults
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::string name;
  SchemeConfig scheme;
  DiagnosticsSpec diagnostics;
  ValidationSpec validation;
  std::filesystem::path out_dir = ".";
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);

}  // namespace hlab::cli
