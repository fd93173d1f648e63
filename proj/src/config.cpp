#include "nnls/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nnls/analysis.hpp"
#include "nnls/simulation.hpp"

namespace nnls::harness {

using nlohmann::json;

namespace {

// Line and column of a byte offset, for parse-error messages.
std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& msg) const {
    throw ConfigError(source_ + ": " + (where.empty() ? "/" : where) + ": " + msg);
  }

  const json& object(const json& parent, const std::string& where, const char* key) const {
    const auto it = parent.find(key);
    if (it == parent.end()) fail(where, std::string("missing section '") + key + "'");
    if (!it->is_object()) fail(where + "/" + key, "expected an object");
    return *it;
  }

  void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.count(k)) fail(where + "/" + k, "unknown key");
    }
  }

  double number(const json& obj, const std::string& where, const char* key, std::optional<double> def = {}) const {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (def) return *def;
      fail(where, std::string("missing key '") + key + "'");
    }
    if (!it->is_number()) fail(where + "/" + key, "expected a number");
    const double x = it->get<double>();
    if (!std::isfinite(x)) fail(where + "/" + key, "must be finite");
    return x;
  }

  long long integer(const json& obj, const std::string& where, const char* key,
                    std::optional<long long> def = {}) const {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (def) return *def;
      fail(where, std::string("missing key '") + key + "'");
    }
    if (!it->is_number_integer()) fail(where + "/" + key, "expected an integer");
    return it->get<long long>();
  }

  std::string string(const json& obj, const std::string& where, const char* key,
                     std::optional<std::string> def = {}) const {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (def) return *def;
      fail(where, std::string("missing key '") + key + "'");
    }
    if (!it->is_string()) fail(where + "/" + key, "expected a string");
    return it->get<std::string>();
  }

  template <typename T>
  std::array<T, 2> pair(const json& obj, const std::string& where, const char* key, std::array<T, 2> def) const {
    const auto it = obj.find(key);
    if (it == obj.end()) return def;
    const std::string w = where + "/" + key;
    if (!it->is_array() || it->size() != 2) fail(w, "expected a two-element array");
    std::array<T, 2> out{};
    for (int i = 0; i < 2; ++i) {
      const auto& e = (*it)[i];
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) fail(w, "expected integers");
      } else {
        if (!e.is_number()) fail(w, "expected numbers");
      }
      out[i] = e.get<T>();
    }
    return out;
  }

 private:
  std::string source_;
};

Nonlinearity<double> parse_model(const Reader& r, const json& m, double kappa) {
  const std::string w = "/model";
  const std::string tag = r.string(m, w, "tag");
  if (tag == "power_law") {
    r.only_keys(m, w, {"tag", "q"});
    return PowerLaw<double>{r.number(m, w, "q", 2.0)};
  }
  if (tag == "cubic_quintic") {
    r.only_keys(m, w, {"tag", "alpha", "gamma", "sigma"});
    return CubicQuintic<double>{r.number(m, w, "alpha", 1.0), r.number(m, w, "gamma", 1.0),
                                r.number(m, w, "sigma", 2.0)};
  }
  if (tag == "heaviside_kerr") {
    r.only_keys(m, w, {"tag", "alpha0", "alpha1", "alpha2"});
    return HeavisideKerr<double>{r.number(m, w, "alpha0", 0.0), r.number(m, w, "alpha1", 0.0),
                                 r.number(m, w, "alpha2", 0.0)};
  }
  if (tag == "detuned_cubic") {
    r.only_keys(m, w, {"tag", "delta", "alpha", "kappa_ref"});
    const double kref = r.number(m, w, "kappa_ref", kappa);
    if (kref != kappa) r.fail(w + "/kappa_ref", "must equal physics.kappa");
    return DetunedCubic<double>{r.number(m, w, "delta", 0.0), r.number(m, w, "alpha", 0.0), kref};
  }
  if (tag == "saturable") {
    r.only_keys(m, w, {"tag", "gamma"});
    return Saturable<double>{r.number(m, w, "gamma", 1.0)};
  }
  r.fail(w + "/tag", "unknown model tag '" + tag + "'");
}

json model_to_json(const Nonlinearity<double>& model) {
  json m;
  m["tag"] = model_tag(model);
  std::visit(
      [&](const auto& v) {
        using M = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<M, PowerLaw<double>>) {
          m["q"] = v.q;
        } else if constexpr (std::is_same_v<M, CubicQuintic<double>>) {
          m["alpha"] = v.alpha;
          m["gamma"] = v.gamma;
          m["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<M, HeavisideKerr<double>>) {
          m["alpha0"] = v.alpha0;
          m["alpha1"] = v.alpha1;
          m["alpha2"] = v.alpha2;
        } else if constexpr (std::is_same_v<M, DetunedCubic<double>>) {
          m["delta"] = v.delta;
          m["alpha"] = v.alpha;
          m["kappa_ref"] = v.kappa_ref;
        } else {
          m["gamma"] = v.gamma;
        }
      },
      model);
  return m;
}

int default_sample_every(double dt) {
  return std::max(1, static_cast<int>(std::lround(1.0 / (10.0 * std::abs(dt)))));
}

}  // namespace

std::string initial_kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::soliton: return "soliton";
    case InitialKind::plane_wave: return "plane_wave";
    case InitialKind::file: return "file";
  }
  return "?";
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
  const Reader r(source);
  if (!doc.is_object()) r.fail("", "expected a JSON object at top level");
  r.only_keys(doc, "", {"grid", "physics", "model", "initial", "stepper", "t_end", "sample_every", "outputs",
                        "dispersion", "residuals"});

  RunConfig cfg;
  cfg.base_dir = base_dir;

  const json& g = r.object(doc, "", "grid");
  r.only_keys(g, "/grid", {"a", "b", "n"});
  cfg.grid.a = r.number(g, "/grid", "a");
  cfg.grid.b = r.number(g, "/grid", "b");
  cfg.grid.n = r.integer(g, "/grid", "n");
  try {
    (void)make_grid<double>(cfg.grid.a, cfg.grid.b, cfg.grid.n);
  } catch (const ConfigError& e) {
    r.fail("/grid", e.what());
  }

  const json& ph = r.object(doc, "", "physics");
  r.only_keys(ph, "/physics", {"kappa", "beta"});
  cfg.kappa = r.number(ph, "/physics", "kappa");
  cfg.beta = r.number(ph, "/physics", "beta");

  cfg.model = parse_model(r, r.object(doc, "", "model"), cfg.kappa);
  try {
    (void)make_model_params(cfg.kappa, cfg.beta, cfg.model);
  } catch (const ConfigError& e) {
    r.fail("/model", e.what());
  }

  const json& in = r.object(doc, "", "initial");
  const std::string kind = r.string(in, "/initial", "kind");
  if (kind == "soliton") {
    r.only_keys(in, "/initial", {"kind", "eta", "vel"});
    cfg.initial.kind = InitialKind::soliton;
    cfg.initial.eta = r.number(in, "/initial", "eta", 1.0);
    cfg.initial.vel = r.number(in, "/initial", "vel", 1.0);
    try {
      (void)make_soliton_spec(cfg.initial.eta, cfg.initial.vel, make_model_params(cfg.kappa, cfg.beta, cfg.model));
    } catch (const ConfigError& e) {
      r.fail("/initial", e.what());
    }
  } else if (kind == "plane_wave") {
    r.only_keys(in, "/initial", {"kind", "amplitude", "mode"});
    cfg.initial.kind = InitialKind::plane_wave;
    cfg.initial.amplitude = r.number(in, "/initial", "amplitude", 1.0);
    const long long mode = r.integer(in, "/initial", "mode", 1);
    if (cfg.initial.amplitude < 0) r.fail("/initial/amplitude", "must be >= 0");
    if (mode <= -cfg.grid.n / 2 || mode >= cfg.grid.n / 2) r.fail("/initial/mode", "must satisfy |mode| < n/2");
    if (is_x_dependent(cfg.model)) r.fail("/initial", "plane_wave requires a model without x dependence");
    cfg.initial.mode = static_cast<int>(mode);
  } else if (kind == "file") {
    r.only_keys(in, "/initial", {"kind", "path"});
    cfg.initial.kind = InitialKind::file;
    cfg.initial.path = r.string(in, "/initial", "path");
    const std::filesystem::path p = base_dir / cfg.initial.path;
    if (!std::filesystem::is_regular_file(p)) r.fail("/initial/path", "file not found: " + p.string());
  } else {
    r.fail("/initial/kind", "unknown initial kind '" + kind + "'");
  }

  const json& st = r.object(doc, "", "stepper");
  r.only_keys(st, "/stepper", {"dt", "fp_tol", "fp_max_iters"});
  cfg.stepper.dt = r.number(st, "/stepper", "dt");
  cfg.stepper.fp_tol = r.number(st, "/stepper", "fp_tol", 1e-13);
  const long long iters = r.integer(st, "/stepper", "fp_max_iters", 200);
  if (iters < 1 || iters > 1000000) r.fail("/stepper/fp_max_iters", "must be in [1, 1e6]");
  cfg.stepper.fp_max_iters = static_cast<int>(iters);
  if (!(cfg.stepper.dt > 0)) r.fail("/stepper/dt", "must be > 0");
  try {
    validate(cfg.stepper);
  } catch (const ConfigError& e) {
    r.fail("/stepper", e.what());
  }

  cfg.t_end = r.number(doc, "", "t_end");
  if (cfg.t_end < 0) r.fail("/t_end", "must be >= 0");
  if (cfg.initial.kind != InitialKind::file) {
    try {
      (void)step_count(0.0, cfg.t_end, cfg.stepper.dt);
    } catch (const ConfigError& e) {
      r.fail("/t_end", e.what());
    }
  }
  const long long se = r.integer(doc, "", "sample_every", default_sample_every(cfg.stepper.dt));
  if (se < 1 || se > 1000000000) r.fail("/sample_every", "must be >= 1");
  cfg.sample_every = static_cast<int>(se);

  if (doc.contains("outputs")) {
    const json& o = r.object(doc, "", "outputs");
    r.only_keys(o, "/outputs", {"directory", "formats"});
    cfg.outputs.directory = r.string(o, "/outputs", "directory", ".");
    if (o.contains("formats")) {
      const json& f = o["formats"];
      if (!f.is_array()) r.fail("/outputs/formats", "expected an array of strings");
      cfg.outputs.csv = cfg.outputs.json = false;
      for (const auto& e : f) {
        if (e == "csv") {
          cfg.outputs.csv = true;
        } else if (e == "json") {
          cfg.outputs.json = true;
        } else {
          r.fail("/outputs/formats", "supported formats are \"csv\" and \"json\"");
        }
      }
    }
  }

  if (doc.contains("dispersion")) {
    const json& d = r.object(doc, "", "dispersion");
    r.only_keys(d, "/dispersion", {"xi_range", "omega_range", "resolution"});
    auto& s = cfg.dispersion;
    s.xi_range = r.pair<double>(d, "/dispersion", "xi_range", s.xi_range);
    s.omega_range = r.pair<double>(d, "/dispersion", "omega_range", s.omega_range);
    s.resolution = r.pair<int>(d, "/dispersion", "resolution", s.resolution);
  }
  {
    const double pi = std::numbers::pi;
    const auto& s = cfg.dispersion;
    if (!(s.xi_range[0] < s.xi_range[1]) || s.xi_range[0] <= -pi || s.xi_range[1] >= pi) {
      r.fail("/dispersion/xi_range", "must be an increasing pair inside (-pi, pi)");
    }
    if (!(s.omega_range[0] < s.omega_range[1]) || s.omega_range[0] <= -pi || s.omega_range[1] >= pi) {
      r.fail("/dispersion/omega_range", "must be an increasing pair inside (-pi, pi)");
    }
    if (s.resolution[0] < 2 || s.resolution[1] < 2) r.fail("/dispersion/resolution", "must be >= 2 in each axis");
  }

  if (doc.contains("residuals")) {
    const json& rs = r.object(doc, "", "residuals");
    r.only_keys(rs, "/residuals", {"source"});
    const std::string src = r.string(rs, "/residuals", "source", "integrator");
    if (src == "integrator") {
      cfg.residual_source = ResidualSource::integrator;
    } else if (src == "analytic") {
      cfg.residual_source = ResidualSource::analytic;
    } else {
      r.fail("/residuals/source", "expected \"integrator\" or \"analytic\"");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_config(ss.str(), path.string(), base);
}

std::string serialize_config(const RunConfig& cfg) {
  json doc;
  doc["grid"] = {{"a", cfg.grid.a}, {"b", cfg.grid.b}, {"n", cfg.grid.n}};
  doc["physics"] = {{"kappa", cfg.kappa}, {"beta", cfg.beta}};
  doc["model"] = model_to_json(cfg.model);
  json in;
  in["kind"] = initial_kind_name(cfg.initial.kind);
  switch (cfg.initial.kind) {
    case InitialKind::soliton:
      in["eta"] = cfg.initial.eta;
      in["vel"] = cfg.initial.vel;
      break;
    case InitialKind::plane_wave:
      in["amplitude"] = cfg.initial.amplitude;
      in["mode"] = cfg.initial.mode;
      break;
    case InitialKind::file:
      in["path"] = cfg.initial.path;
      break;
  }
  doc["initial"] = in;
  doc["stepper"] = {{"dt", cfg.stepper.dt}, {"fp_tol", cfg.stepper.fp_tol}, {"fp_max_iters", cfg.stepper.fp_max_iters}};
  doc["t_end"] = cfg.t_end;
  doc["sample_every"] = cfg.sample_every;
  json formats = json::array();
  if (cfg.outputs.csv) formats.push_back("csv");
  if (cfg.outputs.json) formats.push_back("json");
  doc["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", formats}};
  doc["dispersion"] = {{"xi_range", cfg.dispersion.xi_range},
                       {"omega_range", cfg.dispersion.omega_range},
                       {"resolution", cfg.dispersion.resolution}};
  doc["residuals"] = {{"source", cfg.residual_source == ResidualSource::analytic ? "analytic" : "integrator"}};
  return doc.dump(2) + "\n";
}

}  // namespace nnls::harness
