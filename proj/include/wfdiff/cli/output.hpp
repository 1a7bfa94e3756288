// Copyright 2026 The wfdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef WFDIFF_CLI_OUTPUT_HPP
#define WFDIFF_CLI_OUTPUT_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wfdiff::cli {

// One CSV cell. Doubles are written with 17 significant digits so that
// identical bits give identical bytes.
std::string cell(double v);
std::string cell(std::size_t v);
std::string cell(bool v);
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

// Collects a CSV table in memory; `write` emits the provenance comment
// line followed by the header and rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  template <class... Ts>
  void row(const Ts&... values) {
    std::vector<std::string> r{cell(values)...};
    add(std::move(r));
  }
  void add(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }

  std::string render(const std::string& provenance) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  std::string line() const;  // "# wfdiff <version> config_hash=<hex> seed=<n>"
};

// Writes atomically enough for a single writer: whole content, then close.
// Throws ConfigIoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

// Self-contained line chart with a logarithmic y axis. Nonpositive values
// are clipped to the bottom of the axis.
std::string render_svg_chart(const std::string& title,
                             const std::string& x_label,
                             std::span<const Series> series,
                             const Provenance& prov);

}  // namespace wfdiff::cli

#endif  // WFDIFF_CLI_OUTPUT_HPP
