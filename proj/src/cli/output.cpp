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


#include "wfdiff/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "wfdiff/cli/config.hpp"

namespace wfdiff::cli {

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string cell(std::size_t v) { return fmt::format("{}", v); }

std::string cell(bool v) { return v ? "true" : "false"; }

CsvTable::CsvTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw std::logic_error(fmt::format("CSV row has {} cells, expected {}",
                                       cells.size(), columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out += '"';
      for (char ch : cells[i]) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += cells[i];
    }
  }
  return out;
}

}  // namespace

std::string CsvTable::render(const std::string& provenance) const {
  std::string out = provenance + "\n" + join(columns_) + "\n";
  for (const auto& r : rows_) out += join(r) + "\n";
  return out;
}

std::string Provenance::line() const {
  return fmt::format("# wfdiff {} config_hash={:016x} seed={}", kVersion,
                     config_hash, seed);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigIoError(fmt::format("cannot write {}", path.string()));
  out << text;
  out.close();
  if (!out) throw ConfigIoError(fmt::format("failed writing {}", path.string()));
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_svg_chart(const std::string& title,
                             const std::string& x_label,
                             std::span<const Series> series,
                             const Provenance& prov) {
  constexpr double kW = 720.0, kH = 440.0;
  constexpr double kLeft = 70.0, kRight = 170.0, kTop = 40.0, kBottom = 50.0;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_hi = -std::numeric_limits<double>::infinity();
  double y_lo = std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      if (s.y[i] > 0.0 && std::isfinite(s.y[i])) {
        y_lo = std::min(y_lo, s.y[i]);
        y_hi = std::max(y_hi, s.y[i]);
      }
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (!std::isfinite(y_lo)) {
    y_lo = 1e-3;
    y_hi = 1.0;
  }
  const double d_lo = std::floor(std::log10(y_lo));
  double d_hi = std::ceil(std::log10(y_hi));
  if (d_hi <= d_lo) d_hi = d_lo + 1.0;

  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) {
    const double ly = y > 0.0 ? std::log10(y) : d_lo;
    const double t = (std::clamp(ly, d_lo, d_hi) - d_lo) / (d_hi - d_lo);
    return kTop + (1.0 - t) * ph;
  };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<!-- {2} -->\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{3}\" y=\"22\" font-size=\"15\">{4}</text>\n",
      kW, kH, escape_xml(prov.line().substr(2)), kLeft, escape_xml(title));

  for (double d = d_lo; d <= d_hi + 0.5; d += 1.0) {
    const double y = kTop + (1.0 - (d - d_lo) / (d_hi - d_lo)) * ph;
    svg += fmt::format(
        "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n",
        kLeft, y, kLeft + pw, y, kLeft - 6, y + 4, static_cast<int>(d));
  }
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n",
        px(xv), kTop + ph + 18, xv);
  }
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n"
      "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
      kLeft, kTop, pw, ph, kLeft + pw / 2.0, kH - 12, escape_xml(x_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(s.x[i]), py(s.y[i]));
    }
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
        pts, s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                         px(s.x[i]), py(s.y[i]), s.color);
    }
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(k);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
        "stroke-width=\"2\"{4}/>\n"
        "<text x=\"{5}\" y=\"{6}\">{7}</text>\n",
        kLeft + pw + 12, ly, kLeft + pw + 36, s.color,
        s.dashed ? " stroke-dasharray=\"6,4\"" : "", kLeft + pw + 42, ly + 4,
        escape_xml(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace wfdiff::cli
