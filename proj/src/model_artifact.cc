// src/model_artifact.cc

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

#include "wcfa/model_artifact.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wcfa/errors.h"

namespace wcfa {

using nlohmann::json;

std::string to_string(Family family) {
  switch (family) {
    case Family::kGaussianLs: return "gaussian-ls";
    case Family::kPwlLs: return "pwl-ls";
    case Family::kPlda: return "plda";
  }
  return "unknown";
}

Family family_from_string(const std::string &s) {
  if (s == "gaussian-ls") return Family::kGaussianLs;
  if (s == "pwl-ls") return Family::kPwlLs;
  if (s == "plda") return Family::kPlda;
  throw Error("unknown model family '" + s + "'");
}

std::size_t ModelArtifact::expected_param_count() const {
  std::size_t n = family == Family::kPlda ? static_cast<std::size_t>(std::max(structure.dim, 0)) : 5;
  if (structure.quantile) n += structure.quantile->knot_inputs.size();
  if (structure.warp) n += structure.warp->knot_inputs.size();
  return n;
}

void ModelArtifact::validate() const {
  if (version != kModelFormatVersion)
    throw Error("unsupported model format version '" + version + "'");
  if (structure.scores_per_pair < 1) throw Error("scores_per_pair must be >= 1");
  if (family == Family::kPlda) {
    if (structure.dim < 1) throw Error("plda model needs dim >= 1");
    if (structure.quantile) throw Error("plda model cannot carry a base quantile");
  } else {
    if (structure.dim != 0) throw Error("location-scale model must have dim 0");
    if ((family == Family::kPwlLs) != structure.quantile.has_value())
      throw Error("pwl-ls needs a base quantile and gaussian-ls must not have one");
    if (structure.quantile && structure.quantile->domain != PwlDomain::kUnitInterval)
      throw Error("base quantile must use the unit-interval domain");
  }
  if (structure.warp && structure.warp->domain != PwlDomain::kRealLine)
    throw Error("score warp must use the real-line domain");
  for (const auto *pwl : {&structure.quantile, &structure.warp}) {
    if (!*pwl) continue;
    const auto &x = (*pwl)->knot_inputs;
    if (x.size() < 2) throw Error("piecewise-linear layout needs >= 2 knots");
    for (std::size_t k = 1; k < x.size(); ++k)
      if (!(x[k] > x[k - 1])) throw Error("knot inputs must be strictly increasing");
  }
  if (params.size() != expected_param_count())
    throw Error("parameter vector has " + std::to_string(params.size()) +
                " values but the structure requires " +
                std::to_string(expected_param_count()));
  for (double p : params)
    if (!std::isfinite(p)) throw Error("parameter vector contains non-finite values");
}

namespace {

std::size_t pwl_offset(const ModelArtifact &a, bool warp) {
  std::size_t off = a.family == Family::kPlda ? static_cast<std::size_t>(a.structure.dim) : 5;
  if (warp && a.structure.quantile) off += a.structure.quantile->knot_inputs.size();
  return off;
}

json pwl_to_json(const ModelArtifact &a, const PwlLayout &layout, bool warp) {
  std::size_t off = pwl_offset(a, warp);
  std::vector<double> raw(a.params.begin() + static_cast<std::ptrdiff_t>(off),
                          a.params.begin() + static_cast<std::ptrdiff_t>(off + layout.knot_inputs.size()));
  return json{{"domain", to_string(layout.domain)},
              {"knot_inputs", layout.knot_inputs},
              {"raw_offsets", raw}};
}

PwlLayout pwl_from_json(const json &j) {
  PwlLayout l;
  l.domain = pwl_domain_from_string(j.at("domain").get<std::string>());
  l.knot_inputs = j.at("knot_inputs").get<std::vector<double>>();
  return l;
}

}  // namespace

std::string model_to_json(const ModelArtifact &a) {
  a.validate();
  json structure{{"dim", a.structure.dim},
                 {"scores_per_pair", a.structure.scores_per_pair}};
  if (a.structure.quantile)
    structure["quantile"] = pwl_to_json(a, *a.structure.quantile, false);
  if (a.structure.warp) structure["warp"] = pwl_to_json(a, *a.structure.warp, true);
  json j{{"version", a.version},
         {"family", to_string(a.family)},
         {"structure", structure},
         {"params", a.params},
         {"provenance",
          {{"method", a.provenance.method},
           {"config_hash", a.provenance.config_hash},
           {"seed", a.provenance.seed}}}};
  return j.dump(2);
}

ModelArtifact model_from_json(const std::string &text) {
  ModelArtifact a;
  try {
    json j = json::parse(text);
    a.version = j.at("version").get<std::string>();
    if (a.version != kModelFormatVersion)
      throw Error("unsupported model format version '" + a.version + "'");
    a.family = family_from_string(j.at("family").get<std::string>());
    const auto &s = j.at("structure");
    a.structure.dim = s.at("dim").get<int>();
    a.structure.scores_per_pair = s.at("scores_per_pair").get<int>();
    if (s.contains("quantile")) a.structure.quantile = pwl_from_json(s["quantile"]);
    if (s.contains("warp")) a.structure.warp = pwl_from_json(s["warp"]);
    a.params = j.at("params").get<std::vector<double>>();
    if (j.contains("provenance")) {
      const auto &p = j["provenance"];
      a.provenance.method = p.value("method", "");
      a.provenance.config_hash = p.value("config_hash", "");
      a.provenance.seed = p.value("seed", std::uint64_t{0});
    }
    a.validate();
    // The per-function raw offsets duplicate slices of `params`; they must agree.
    for (bool warp : {false, true}) {
      const char *key = warp ? "warp" : "quantile";
      if (!s.contains(key) || !s[key].contains("raw_offsets")) continue;
      auto raw = s[key]["raw_offsets"].get<std::vector<double>>();
      std::size_t off = pwl_offset(a, warp);
      const auto &layout = warp ? a.structure.warp : a.structure.quantile;
      if (raw.size() != layout->knot_inputs.size())
        throw Error(std::string(key) + ": raw_offsets length does not match knot_inputs");
      for (std::size_t k = 0; k < raw.size(); ++k)
        if (raw[k] != a.params[off + k])
          throw Error(std::string(key) + ": raw_offsets disagree with params");
    }
  } catch (const json::exception &e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  return a;
}

void save_model(const ModelArtifact &artifact, const std::filesystem::path &path) {
  std::string text = model_to_json(artifact);
  std::ofstream out(path);
  if (!out) throw Error("cannot write model to " + path.string());
  out << text << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

ModelArtifact load_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::string fnv1a_hex(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wcfa
