// nnls: command-line front end.
//
//   nnls simulate   <config> [--out DIR]
//   nnls converge   <config> --dts 0.2,0.1,0.05,0.025 [--out DIR]
//   nnls dispersion <config> [--nonlinear] [--out DIR]
//   nnls residuals  <config> [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 integrator failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nnls/harness/config.hpp"
#include "nnls/harness/io.hpp"
#include "nnls/harness/runners.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIntegrator = 3;

using namespace nnls;
using namespace nnls::harness;

std::filesystem::path output_dir(const RunConfig& cfg, const std::string& out_flag) {
  return out_flag.empty() ? std::filesystem::path(cfg.outputs.directory) : std::filesystem::path(out_flag);
}

void print_report(const ConvergenceReport& r) {
  std::printf("%-12s %-14s %-14s %-14s %-8s %-8s %-8s\n", "dt", "err_u", "err_v", "err_H", "ord_u", "ord_v",
              "ord_H");
  for (std::size_t i = 0; i < r.dt_list.size(); ++i) {
    std::printf("%-12.6g %-14.6e %-14.6e %-14.6e", r.dt_list[i], r.err_u[i], r.err_v[i], r.err_hamiltonian[i]);
    if (i == 0) {
      std::printf(" %-8s %-8s %-8s\n", "-", "-", "-");
    } else {
      std::printf(" %-8.4f %-8.4f %-8.4f\n", r.observed_orders_u[i - 1], r.observed_orders_v[i - 1],
                  r.hamiltonian_orders[i - 1]);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric integration of the nonparaxial nonlinear Schroedinger equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  std::vector<double> dts;
  bool nonlinear = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_flag, "Output directory (overrides outputs.directory)");
  };

  auto* sim = app.add_subcommand("simulate", "Integrate and write timeseries.csv and final_state.json");
  add_common(sim);
  auto* conv = app.add_subcommand("converge", "Error and order study over halving time steps");
  add_common(conv);
  conv->add_option("--dts", dts, "Comma-separated time steps, each half the previous")
      ->delimiter(',')
      ->required();
  auto* disp = app.add_subcommand("dispersion", "Scan the numerical dispersion relation");
  add_common(disp);
  disp->add_flag("--nonlinear", nonlinear, "Use the unit-amplitude nonlinear relation");
  auto* res = app.add_subcommand("residuals", "Local energy and momentum conservation-law residuals");
  add_common(res);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    const PreparedRun run = prepare(cfg);
    const auto dir = output_dir(cfg, out_flag);
    if (const Index bad = unstable_mode_count(run); bad > 0) {
      std::cerr << "warning: " << bad << " grid modes lie above the degenerate wavenumber "
                << format_double(degenerate_wavenumber(run.params))
                << " and grow exponentially; roundoff in them will be amplified\n";
    }

    if (*sim) {
      const auto r = run_simulate(run, dir);
      std::cout << "simulate: " << r.steps << " steps, " << r.total_iterations << " fixed-point sweeps, output in "
                << dir.string() << "\n";
    } else if (*conv) {
      print_report(run_converge(run, dts, dir));
    } else if (*disp) {
      const auto rows = run_dispersion(run, nonlinear, dir);
      std::size_t roots = 0;
      for (const auto& r : rows) roots += r.kind == "root";
      std::cout << "dispersion: " << rows.size() - roots << " scan points, " << roots << " roots, output in "
                << dir.string() << "\n";
    } else if (*res) {
      const auto rows = run_residuals(run, dir);
      double e = 0, m = 0;
      for (const auto& r : rows) {
        e = std::max(e, r.energy_max);
        m = std::max(m, r.momentum_max);
      }
      std::cout << "residuals: " << rows.size() << " windows, max energy residual " << format_double(e)
                << ", max momentum residual " << format_double(m) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedModelError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "integrator error: " << e.what() << "\n";
    return kExitIntegrator;
  } catch (const InstabilityError& e) {
    std::cerr << "integrator error: " << e.what() << "\n";
    return kExitIntegrator;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
