#include "nnls/harness/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace nnls::harness {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_cell(double x) { return format_double(x); }
std::string csv_cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }
std::string csv_cell(long long x) { return std::to_string(x); }
std::string csv_cell(int x) { return std::to_string(x); }
std::string csv_cell(const std::string& s) { return s; }

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("error while writing " + path_.string());
}

OutputGuard::OutputGuard(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::error_code ec;
  created_dir_ = std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

OutputGuard::~OutputGuard() {
  if (committed_) return;
  for (const auto& f : files_) {
    std::error_code ec;
    std::filesystem::remove(f, ec);
  }
  std::error_code ec;
  if (created_dir_ && std::filesystem::is_empty(dir_, ec) && !ec) std::filesystem::remove(dir_, ec);
}

std::filesystem::path OutputGuard::file(const std::string& name) {
  files_.push_back(dir_ / name);
  return files_.back();
}

namespace {

json complex_array(const ComplexVector<double>& v) {
  json a = json::array();
  for (Index j = 0; j < v.size(); ++j) a.push_back({v[j].real(), v[j].imag()});
  return a;
}

ComplexVector<double> read_complex_array(const json& a, Index n, const std::string& where) {
  if (!a.is_array() || static_cast<Index>(a.size()) != n) {
    throw ConfigError(where + ": expected an array of " + std::to_string(n) + " [re, im] pairs");
  }
  ComplexVector<double> v(n);
  for (Index j = 0; j < n; ++j) {
    const json& e = a[static_cast<std::size_t>(j)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError(where + "[" + std::to_string(j) + "]: expected [re, im]");
    }
    v[j] = {e[0].get<double>(), e[1].get<double>()};
  }
  return v;
}

}  // namespace

void write_state_json(const std::filesystem::path& path, const FieldState<double>& state, const GridConfig& grid) {
  json doc;
  doc["t"] = state.t;
  doc["grid"] = {{"a", grid.a}, {"b", grid.b}, {"n", grid.n}};
  doc["u"] = complex_array(state.u);
  doc["v"] = complex_array(state.v);
  write_text(path, doc.dump() + "\n");
}

FieldState<double> read_state_json(const std::filesystem::path& path, const GridConfig& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open state file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
  const std::string src = path.string();
  if (!doc.is_object() || !doc.contains("grid") || !doc.contains("u") || !doc.contains("v")) {
    throw ConfigError(src + ": expected keys t, grid, u, v");
  }
  const json& g = doc["grid"];
  try {
    if (g.at("n").get<Index>() != grid.n || g.at("a").get<double>() != grid.a || g.at("b").get<double>() != grid.b) {
      throw ConfigError(src + ": snapshot grid does not match the configured grid");
    }
  } catch (const json::exception&) {
    throw ConfigError(src + ": /grid must hold numbers a, b, n");
  }
  FieldState<double> s;
  s.t = doc.value("t", 0.0);
  s.u = read_complex_array(doc["u"], grid.n, src + ": /u");
  s.v = read_complex_array(doc["v"], grid.n, src + ": /v");
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error("error while writing " + path.string());
}

}  // namespace nnls::harness
