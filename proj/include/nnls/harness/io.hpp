#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nnls/harness/config.hpp"
#include "nnls/integrator.hpp"

namespace nnls::harness {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// One CSV cell: a number, an optional number (empty when absent), an integer
/// or text.
std::string csv_cell(double x);
std::string csv_cell(const std::optional<double>& x);
std::string csv_cell(long long x);
std::string csv_cell(int x);
std::string csv_cell(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::string line;
    bool first = true;
    ((line += (first ? "" : ","), line += csv_cell(cells), first = false), ...);
    out_ << line << '\n';
  }

  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Files created by one harness command. Unless commit() is called, the
/// destructor deletes every registered file, and the output directory too
/// when the guard created it and it is left empty.
class OutputGuard {
 public:
  explicit OutputGuard(std::filesystem::path directory);
  ~OutputGuard();
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;

  /// Registers `name` inside the output directory and returns its full path.
  std::filesystem::path file(const std::string& name);
  void commit() { committed_ = true; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool created_dir_{false};
  bool committed_{false};
};

/// final_state.json: {"t", "grid": {"a","b","n"}, "u": [[re, im], ...], "v": [...]}.
void write_state_json(const std::filesystem::path& path, const FieldState<double>& state, const GridConfig& grid);

/// Reads a final_state.json snapshot and checks it against `grid`.
FieldState<double> read_state_json(const std::filesystem::path& path, const GridConfig& grid);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nnls::harness
