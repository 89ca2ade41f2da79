// wcfa/score_table.h

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

#ifndef WCFA_SCORE_TABLE_H_
#define WCFA_SCORE_TABLE_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wcfa {

/// Opaque speaker token. Ordering is the lexicographic token order and is
/// used wherever ties must be broken deterministically.
class SpeakerId {
 public:
  explicit SpeakerId(std::string token);
  const std::string &str() const { return token_; }
  auto operator<=>(const SpeakerId &) const = default;

 private:
  std::string token_;
};

/// Multiset of finite detection scores for one ordered speaker pair.
class ScoreSet {
 public:
  explicit ScoreSet(std::vector<double> scores);

  std::span<const double> scores() const { return scores_; }
  /// Ascending copy of scores(), used for threshold counting.
  std::span<const double> sorted() const { return sorted_; }
  std::size_t size() const { return scores_.size(); }
  double mean() const { return mean_; }

 private:
  std::vector<double> scores_;
  std::vector<double> sorted_;
  double mean_ = 0.0;
};

struct ScoreRecord {
  std::string enroll;
  std::string test;
  double score = 0.0;
  std::optional<std::string> partition;
};

/// Nontarget scores grouped by ordered (enroll, test) speaker pair. Immutable
/// once built, so it can be shared freely between threads.
class PairScoreTable {
 public:
  struct Pair {
    std::uint32_t enroll;  // index into speakers()
    std::uint32_t test;
    ScoreSet scores;
  };

  /// Groups records by pair. Records whose partition differs from
  /// `partition_filter` are dropped; without a filter every record must carry
  /// the same partition (or none).
  static PairScoreTable from_records(
      std::span<const ScoreRecord> records,
      const std::optional<std::string> &partition_filter = std::nullopt);

  /// Speakers sorted by token; a speaker's index is its position here.
  const std::vector<SpeakerId> &speakers() const { return speakers_; }
  /// Pairs sorted by (enroll index, test index).
  const std::vector<Pair> &pairs() const { return pairs_; }
  const std::string &partition() const { return partition_; }

  /// Index into pairs(), or -1 when the pair has no scores.
  std::int64_t pair_index(std::uint32_t enroll, std::uint32_t test) const {
    return pair_lookup_[static_cast<std::size_t>(enroll) * speakers_.size() +
                        test];
  }
  const ScoreSet *find(const std::string &enroll,
                       const std::string &test) const;
  std::optional<std::uint32_t> speaker_index(const std::string &token) const;

  /// Speakers that occur as the enrolled side of at least one pair.
  const std::vector<std::uint32_t> &targets() const { return targets_; }
  /// Smallest number of other speakers available to any target.
  std::size_t max_impostors() const {
    return speakers_.empty() ? 0 : speakers_.size() - 1;
  }

  std::size_t score_count() const { return score_count_; }
  std::vector<double> pooled_scores() const;
  /// Median per-pair score count.
  std::size_t median_pair_size() const;

 private:
  std::vector<SpeakerId> speakers_;
  std::vector<Pair> pairs_;
  std::vector<std::int32_t> pair_lookup_;
  std::vector<std::uint32_t> targets_;
  std::string partition_;
  std::size_t score_count_ = 0;
};

enum class ScoreFormat { kCsv, kJsonl };

/// Picks the format from the file extension (.jsonl/.json -> jsonl, else csv).
ScoreFormat score_format_from_path(const std::filesystem::path &path);

/// CSV: header naming at least enroll,test,score (partition optional).
/// JSONL: one object per line with the same keys.
std::vector<ScoreRecord> read_score_records(const std::filesystem::path &path,
                                            ScoreFormat format);

PairScoreTable load_score_table(
    const std::filesystem::path &path, ScoreFormat format,
    const std::optional<std::string> &partition_filter = std::nullopt);

/// Writes every score of the table as CSV rows in pair order.
void write_score_table(const PairScoreTable &table,
                       const std::filesystem::path &path);

}  // namespace wcfa

#endif  // WCFA_SCORE_TABLE_H_
