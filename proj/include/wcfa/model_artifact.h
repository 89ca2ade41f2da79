// wcfa/model_artifact.h

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

#ifndef WCFA_MODEL_ARTIFACT_H_
#define WCFA_MODEL_ARTIFACT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wcfa/monotone_pwl.h"

namespace wcfa {

inline constexpr const char *kModelFormatVersion = "wcfa-model/1";

enum class Family { kGaussianLs, kPwlLs, kPlda };

std::string to_string(Family family);
Family family_from_string(const std::string &s);

struct PwlLayout {
  PwlDomain domain = PwlDomain::kRealLine;
  std::vector<double> knot_inputs;
};

struct ModelStructure {
  int dim = 0;              // PLDA latent dimension; 0 for location-scale
  int scores_per_pair = 1;  // L, scores emitted per sampled speaker pair
  std::optional<PwlLayout> quantile;  // pwl-ls base quantile
  std::optional<PwlLayout> warp;      // optional monotone score warp
};

struct Provenance {
  std::string method;       // e.g. "discriminative", "moment-matching"
  std::string config_hash;  // FNV-1a of the training configuration
  std::uint64_t seed = 0;
};

/// Serializable score model: family, structure and flat raw parameters.
///
/// Parameter layout:
///   gaussian-ls / pwl-ls: [mean_mu, mean_log_sigma, log_l00, l10, log_l11,
///                          quantile raw offsets..., warp raw offsets...]
///   plda:                 [raw_d_1..raw_d_D, warp raw offsets...]
struct ModelArtifact {
  std::string version = kModelFormatVersion;
  Family family = Family::kGaussianLs;
  ModelStructure structure;
  std::vector<double> params;
  Provenance provenance;

  std::size_t expected_param_count() const;
  /// Throws when the version is unknown or the structure does not match the
  /// parameter vector.
  void validate() const;
};

std::string model_to_json(const ModelArtifact &artifact);
ModelArtifact model_from_json(const std::string &text);
void save_model(const ModelArtifact &artifact, const std::filesystem::path &path);
ModelArtifact load_model(const std::filesystem::path &path);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string &bytes);

}  // namespace wcfa

#endif  // WCFA_MODEL_ARTIFACT_H_
