#pragma once

// Run configuration of the command-line harness. A run is described by one
// JSON document:
//
//   {
//     "grid":     {"a": -150, "b": 50, "n": 1000},
//     "physics":  {"kappa": 1e-4, "beta": 0.5},
//     "model":    {"tag": "power_law", "q": 2},
//     "initial":  {"kind": "soliton", "eta": 1, "vel": 1},
//     "stepper":  {"dt": 0.1, "fp_tol": 1e-13, "fp_max_iters": 200},
//     "t_end": 100,
//     "sample_every": 1,
//     "outputs":  {"directory": "out", "formats": ["csv", "json"]},
//     "dispersion": {"xi_range": [-3, 3], "omega_range": [-3, 3], "resolution": [121, 121]},
//     "residuals":  {"source": "integrator"}
//   }
//
// Model tags and their keys:
//   power_law {q}, cubic_quintic {alpha, gamma, sigma},
//   heaviside_kerr {alpha0, alpha1, alpha2}, detuned_cubic {delta, alpha},
//   saturable {gamma}.
// detuned_cubic takes kappa_ref from physics.kappa (an explicit kappa_ref must match).
//
// Initial kinds: soliton {eta, vel}; plane_wave {amplitude, mode};
// file {path} with path relative to the config file, in final_state.json format.
//
// Defaults: fp_tol = 1e-13, fp_max_iters = 200, sample_every = round(1/(10 dt))
// (at least 1), outputs.directory = ".", formats = both, residuals.source =
// "integrator".

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nnls/integrator.hpp"
#include "nnls/models.hpp"

namespace nnls::harness {

struct GridConfig {
  double a{};
  double b{};
  Index n{};

  bool operator==(const GridConfig&) const = default;
};

enum class InitialKind { soliton, plane_wave, file };

struct InitialConfig {
  InitialKind kind{InitialKind::soliton};
  double eta{1};
  double vel{1};
  double amplitude{1};
  int mode{1};
  std::string path;  // as written in the config

  bool operator==(const InitialConfig&) const = default;
};

struct OutputConfig {
  std::string directory{"."};
  bool csv{true};
  bool json{true};

  bool operator==(const OutputConfig&) const = default;
};

struct DispersionScan {
  std::array<double, 2> xi_range{-3, 3};
  std::array<double, 2> omega_range{-3, 3};
  std::array<int, 2> resolution{121, 121};

  bool operator==(const DispersionScan&) const = default;
};

enum class ResidualSource { integrator, analytic };

struct RunConfig {
  GridConfig grid;
  double kappa{};
  double beta{};
  Nonlinearity<double> model{PowerLaw<double>{2}};
  InitialConfig initial;
  StepperConfig<double> stepper;
  double t_end{};
  int sample_every{1};
  OutputConfig outputs;
  DispersionScan dispersion;
  ResidualSource residual_source{ResidualSource::integrator};
  /// Directory of the config file; relative initial.path is resolved against it.
  std::filesystem::path base_dir{"."};

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a config document. `source` names the document in
/// error messages. Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>",
                       const std::filesystem::path& base_dir = ".");

RunConfig load_config(const std::filesystem::path& path);

/// Normalized JSON form of a config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

std::string initial_kind_name(InitialKind kind);

}  // namespace nnls::harness
