// wcfa/fa_curve.h

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

#ifndef WCFA_FA_CURVE_H_
#define WCFA_FA_CURVE_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wcfa {

struct FaCurveRow {
  std::int64_t n = 1;
  double tau = 0.0;
  double p_fa = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Worst-case false-alarm estimates over (N, tau) with confidence bounds.
struct FaCurve {
  std::vector<FaCurveRow> rows;

  /// Throws unless 0 <= ci_lo <= p_fa <= ci_hi <= 1 and N >= 1 for every row.
  void validate() const;
};

enum class CurveFormat { kCsv, kJson, kSvg };

CurveFormat curve_format_from_path(const std::filesystem::path &path);

void write_curve(const FaCurve &curve, const std::filesystem::path &path,
                 CurveFormat format);
inline void write_curve(const FaCurve &curve, const std::filesystem::path &path) {
  write_curve(curve, path, curve_format_from_path(path));
}

}  // namespace wcfa

#endif  // WCFA_FA_CURVE_H_
