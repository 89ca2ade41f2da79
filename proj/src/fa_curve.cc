// src/fa_curve.cc

// Copyright 2026  The wcfa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wcfa/fa_curve.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"
#include "wcfa/errors.h"

namespace wcfa {

void FaCurve::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &r = rows[i];
    bool ok = r.n >= 1 && 0.0 <= r.ci_lo && r.ci_lo <= r.p_fa &&
              r.p_fa <= r.ci_hi && r.ci_hi <= 1.0;
    if (!ok)
      throw Error("curve row " + std::to_string(i) +
                  " violates 0 <= ci_lo <= p_fa <= ci_hi <= 1 or N >= 1");
  }
}

CurveFormat curve_format_from_path(const std::filesystem::path &path) {
  auto ext = path.extension().string();
  if (ext == ".json") return CurveFormat::kJson;
  if (ext == ".svg") return CurveFormat::kSvg;
  return CurveFormat::kCsv;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_csv(const FaCurve &curve, std::ofstream &out) {
  out << "N,tau,p_fa,ci_lo,ci_hi\n";
  for (const auto &r : curve.rows)
    out << r.n << ',' << num(r.tau) << ',' << num(r.p_fa) << ','
        << num(r.ci_lo) << ',' << num(r.ci_hi) << '\n';
}

void write_json(const FaCurve &curve, std::ofstream &out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &r : curve.rows)
    rows.push_back({{"N", r.n}, {"tau", r.tau}, {"p_fa", r.p_fa},
                    {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi}});
  out << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
}

// p_fa against log10(N); one polyline and one shaded CI band per tau.
void write_svg(const FaCurve &curve, std::ofstream &out) {
  const double width = 640, height = 420, left = 60, right = 20, top = 20,
               bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  std::map<double, std::vector<FaCurveRow>> by_tau;
  std::int64_t n_min = 1, n_max = 10;
  if (!curve.rows.empty()) {
    n_min = curve.rows.front().n;
    n_max = curve.rows.front().n;
  }
  for (const auto &r : curve.rows) {
    by_tau[r.tau].push_back(r);
    n_min = std::min(n_min, r.n);
    n_max = std::max(n_max, r.n);
  }
  double lx0 = std::floor(std::log10(static_cast<double>(n_min)));
  double lx1 = std::ceil(std::log10(static_cast<double>(n_max)));
  if (lx1 <= lx0) lx1 = lx0 + 1;
  auto px = [&](double n) {
    return left + pw * (std::log10(n) - lx0) / (lx1 - lx0);
  };
  auto py = [&](double p) { return top + ph * (1.0 - p); };

  static const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double e = lx0; e <= lx1; e += 1.0) {
    double x = left + pw * (e - lx0) / (lx1 - lx0);
    out << "<text x=\"" << num(x) << "\" y=\"" << height - bottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    double p = k / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(py(p) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(p) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">N (impostors)</text>\n";
  out << "<text x=\"14\" y=\"" << top + ph / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << top + ph / 2 << ")\">P_FA^N(tau)</text>\n";

  std::size_t series = 0;
  for (auto &[tau, rows] : by_tau) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto &a, const auto &b) { return a.n < b.n; });
    const char *color = kColors[series % 8];
    out << "<polygon class=\"ci\" fill=\"" << color
        << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (const auto &r : rows)
      out << num(px(static_cast<double>(r.n))) << ',' << num(py(r.ci_hi)) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      out << num(px(static_cast<double>(it->n))) << ',' << num(py(it->ci_lo)) << ' ';
    out << "\"/>\n";
    out << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto &r : rows)
      out << num(px(static_cast<double>(r.n))) << ',' << num(py(r.p_fa)) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << left + pw - 4 << "\" y=\"" << top + 14 + 14 * series
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color
        << "\">tau=" << num(tau) << "</text>\n";
    ++series;
  }
  out << "</svg>\n";
}

}  // namespace

void write_curve(const FaCurve &curve, const std::filesystem::path &path,
                 CurveFormat format) {
  curve.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve to " + path.string());
  switch (format) {
    case CurveFormat::kCsv: write_csv(curve, out); break;
    case CurveFormat::kJson: write_json(curve, out); break;
    case CurveFormat::kSvg: write_svg(curve, out); break;
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace wcfa
