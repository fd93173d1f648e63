#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nnls/harness/io.hpp"
#include "nnls/harness/runners.hpp"
#include "oracles.hpp"

using namespace nnls;
using namespace nnls::harness;
namespace fs = std::filesystem;

namespace {

const char* kSmallSoliton = R"({
  "grid": {"a": -20, "b": 20, "n": 256},
  "physics": {"kappa": 1e-3, "beta": 0.5},
  "model": {"tag": "power_law", "q": 2},
  "initial": {"kind": "soliton", "eta": 1, "vel": 0.5},
  "stepper": {"dt": 0.05},
  "t_end": 1,
  "sample_every": 2
})";

nlohmann::json small_doc() { return nlohmann::json::parse(kSmallSoliton); }

RunConfig parse(const nlohmann::json& doc) { return parse_config(doc.dump(), "test.json"); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("nnls_test_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config defaults and round trip") {
  const auto cfg = parse(small_doc());
  CHECK(cfg.grid.n == 256);
  CHECK(cfg.stepper.fp_tol == 1e-13);
  CHECK(cfg.stepper.fp_max_iters == 200);
  CHECK(cfg.outputs.directory == ".");
  CHECK(cfg.residual_source == ResidualSource::integrator);
  CHECK(parse_config(serialize_config(cfg), "round-trip") == cfg);

  auto doc = small_doc();
  doc.erase("sample_every");
  CHECK(parse(doc).sample_every == 2);
  doc["stepper"]["dt"] = 0.25;
  CHECK(parse(doc).sample_every == 1);

  auto dc = small_doc();
  dc["model"] = {{"tag", "detuned_cubic"}, {"delta", 1.0}, {"alpha", 0.5}};
  dc["initial"] = {{"kind", "plane_wave"}, {"amplitude", 0.5}, {"mode", 2}};
  const auto c2 = parse(dc);
  CHECK(std::get<DetunedCubic<double>>(c2.model).kappa_ref == 1e-3);
  CHECK(parse_config(serialize_config(c2), "round-trip") == c2);
}

TEST_CASE("config errors name the offending key") {
  auto expect = [](nlohmann::json doc, const std::string& fragment) {
    INFO(fragment);
    CHECK_THROWS_WITH_AS(parse(doc), doctest::Contains(fragment.c_str()), ConfigError);
  };
  auto d = small_doc();
  d["grid"]["n"] = 63;
  expect(d, "/grid");
  d = small_doc();
  d["grid"]["extra"] = 1;
  expect(d, "/grid/extra: unknown key");
  d = small_doc();
  d["physics"]["kappa"] = -1;
  expect(d, "kappa");
  d = small_doc();
  d["model"]["tag"] = "quartic";
  expect(d, "unknown model tag 'quartic'");
  d = small_doc();
  d["model"] = {{"tag", "detuned_cubic"}, {"delta", 0}, {"alpha", 0}, {"kappa_ref", 0.5}};
  expect(d, "/model/kappa_ref");
  d = small_doc();
  d["stepper"]["dt"] = 0;
  expect(d, "/stepper/dt");
  d = small_doc();
  d["t_end"] = 1.01;
  expect(d, "/t_end");
  d = small_doc();
  d["initial"] = {{"kind", "plane_wave"}, {"mode", 128}};
  expect(d, "/initial/mode");
  d = small_doc();
  d["initial"] = {{"kind", "file"}, {"path", "does_not_exist.json"}};
  expect(d, "file not found");
  d = small_doc();
  d["dispersion"] = {{"xi_range", {-4, 3}}};
  expect(d, "/dispersion/xi_range");
  d = small_doc();
  d["residuals"] = {{"source", "oracle"}};
  expect(d, "/residuals/source");
  d = small_doc();
  d.erase("physics");
  expect(d, "missing section 'physics'");
  CHECK_THROWS_WITH_AS(parse_config("{\"grid\": ", "broken.json"), doctest::Contains("broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double x = U(rng) * std::pow(10.0, i % 20 - 10);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(csv_cell(std::optional<double>{}).empty());
}

TEST_CASE("state snapshots round-trip") {
  TempDir dir("snap");
  fs::create_directories(dir.path);
  std::mt19937 rng(52);
  const GridConfig gc{-20, 20, 16};
  const FieldState<double> s{oracle::random_vector(16, rng), oracle::random_vector(16, rng), 1.25};
  write_state_json(dir.path / "s.json", s, gc);
  const auto r = read_state_json(dir.path / "s.json", gc);
  CHECK(r.t == 1.25);
  CHECK(r.u == s.u);
  CHECK(r.v == s.v);
  CHECK_THROWS_AS(read_state_json(dir.path / "s.json", GridConfig{-20, 20, 32}), ConfigError);
}

TEST_CASE("output guard removes partial outputs") {
  TempDir dir("guard");
  {
    OutputGuard g(dir.path);
    write_text(g.file("a.csv"), "x\n");
  }
  CHECK_FALSE(fs::exists(dir.path));
  {
    OutputGuard g(dir.path);
    write_text(g.file("a.csv"), "x\n");
    g.commit();
  }
  CHECK(fs::exists(dir.path / "a.csv"));
}

TEST_CASE("simulate writes a time series") {
  TempDir dir("sim");
  const auto run = prepare(parse(small_doc()));
  CHECK(unstable_mode_count(run) == 0);
  const auto res = run_simulate(run, dir.path);
  const auto lines = read_lines(dir.path / "timeseries.csv");
  CHECK(lines.front() == "t,H,I1,I2,l2_norm,fp_iters,err_u,err_v,rel_drift_H,rel_drift_I1,rel_drift_I2");
  CHECK(lines.size() == res.records.size() + 1);
  CHECK(lines.size() == 11);
  CHECK(fs::exists(dir.path / "final_state.json"));

  auto doc = small_doc();
  doc["t_end"] = 0;
  TempDir empty("sim0");
  run_simulate(prepare(parse(doc)), empty.path);
  CHECK(read_lines(empty.path / "timeseries.csv").size() == 1);
}

TEST_CASE("continuing from a snapshot reproduces the uninterrupted run") {
  TempDir dir("cont");
  const auto full = run_simulate(prepare(parse(small_doc())), dir.path / "full");
  auto half = small_doc();
  half["t_end"] = 0.5;
  run_simulate(prepare(parse(half)), dir.path / "half");
  auto cont = small_doc();
  cont["initial"] = {{"kind", "file"}, {"path", (dir.path / "half" / "final_state.json").string()}};
  const auto rest = run_simulate(prepare(parse(cont)), dir.path / "rest");
  CHECK((rest.final_state.u - full.final_state.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("convergence runs on the plane wave") {
  auto doc = small_doc();
  doc["grid"] = {{"a", 0}, {"b", 20 * std::numbers::pi}, {"n", 24}};
  doc["physics"] = {{"kappa", 0.25}, {"beta", 0.5}};
  doc["model"] = {{"tag", "detuned_cubic"}, {"delta", 0}, {"alpha", 0}};
  doc["initial"] = {{"kind", "plane_wave"}, {"amplitude", 1}, {"mode", 3}};
  doc["stepper"]["dt"] = 0.2;
  doc["t_end"] = 10;
  doc["sample_every"] = 5;
  const auto run = prepare(parse(doc));
  const std::vector<double> dts{0.2, 0.1, 0.05};
  const auto report = make_report(run, dts, convergence_runs(run, dts));
  REQUIRE(report.observed_orders_u.size() == 2);
  for (const double p : report.observed_orders_u) CHECK(p == doctest::Approx(2.0).epsilon(0.05));
  CHECK_THROWS_AS(validate_dt_list(run, {0.2, 0.15}), ConfigError);
  CHECK_THROWS_AS(validate_dt_list(run, {0.3, 0.15}), ConfigError);
}

TEST_CASE("dispersion roots lie on the zero set") {
  auto doc = small_doc();
  doc["dispersion"] = {{"xi_range", {-2, 2}}, {"omega_range", {-3, 3}}, {"resolution", {21, 61}}};
  const auto run = prepare(parse(doc));
  for (const bool nonlinear : {false, true}) {
    int roots = 0;
    for (const auto& row : dispersion_rows(run, nonlinear)) {
      if (row.kind != "root") continue;
      ++roots;
      CHECK(row.residual < 1e-10);
    }
    CHECK(roots >= 21);
  }
}

TEST_CASE("analytic residuals decrease at second order") {
  auto doc = small_doc();
  doc["residuals"] = {{"source", "analytic"}};
  doc["t_end"] = 1.2;
  doc["sample_every"] = 4;
  const auto coarse = residual_rows(prepare(parse(doc)));
  doc["sample_every"] = 2;
  const auto fine = residual_rows(prepare(parse(doc)));
  REQUIRE(!coarse.empty());
  REQUIRE(!fine.empty());
  const double t = coarse.front().t;
  auto at = [&](const std::vector<ResidualRow>& rows) {
    for (const auto& r : rows)
      if (std::abs(r.t - t) < 1e-9) return r;
    FAIL("missing sample");
    return rows.front();
  };
  CHECK(at(coarse).energy_max / at(fine).energy_max == doctest::Approx(4.0).epsilon(0.1));
  CHECK(at(coarse).momentum_max / at(fine).momentum_max == doctest::Approx(4.0).epsilon(0.1));
}

}  // TEST_SUITE
