// src/score_table.cc

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

#include "wcfa/score_table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "wcfa/errors.h"

namespace wcfa {

SpeakerId::SpeakerId(std::string token) : token_(std::move(token)) {
  if (token_.empty()) throw Error("speaker id must be non-empty");
}

ScoreSet::ScoreSet(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.empty()) throw Error("score set must be non-empty");
  double sum = 0.0;
  for (double s : scores_) {
    if (!std::isfinite(s)) throw Error("score set contains a non-finite score");
    sum += s;
  }
  mean_ = sum / static_cast<double>(scores_.size());
  sorted_ = scores_;
  std::sort(sorted_.begin(), sorted_.end());
}

PairScoreTable PairScoreTable::from_records(
    std::span<const ScoreRecord> records,
    const std::optional<std::string> &partition_filter) {
  PairScoreTable table;
  std::optional<std::string> seen_partition;
  std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
  for (const auto &r : records) {
    if (partition_filter && r.partition != partition_filter) continue;
    if (!partition_filter) {
      std::string p = r.partition.value_or("");
      if (seen_partition && *seen_partition != p)
        throw Error("records span several partitions ('" + *seen_partition +
                    "', '" + p + "'); select one with a partition filter");
      seen_partition = p;
    }
    if (r.enroll.empty() || r.test.empty())
      throw Error("speaker id must be non-empty");
    if (r.enroll == r.test)
      throw Error("record pairs speaker '" + r.enroll +
                  "' with itself; only nontarget trials are accepted");
    if (!std::isfinite(r.score)) throw Error("non-finite score");
    grouped[{r.enroll, r.test}].push_back(r.score);
  }
  if (grouped.empty()) throw Error("empty result: no score records retained");

  table.partition_ = partition_filter ? *partition_filter
                                      : seen_partition.value_or("");
  std::vector<std::string> tokens;
  for (const auto &[key, _] : grouped) {
    tokens.push_back(key.first);
    tokens.push_back(key.second);
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  for (auto &t : tokens) table.speakers_.emplace_back(t);

  const std::size_t m = tokens.size();
  table.pair_lookup_.assign(m * m, -1);
  auto index_of = [&](const std::string &t) {
    return static_cast<std::uint32_t>(
        std::lower_bound(tokens.begin(), tokens.end(), t) - tokens.begin());
  };
  // std::map iteration is already (enroll, test) token order.
  for (auto &[key, scores] : grouped) {
    std::uint32_t e = index_of(key.first), t = index_of(key.second);
    table.score_count_ += scores.size();
    table.pair_lookup_[e * m + t] = static_cast<std::int32_t>(table.pairs_.size());
    table.pairs_.push_back(Pair{e, t, ScoreSet(std::move(scores))});
    if (table.targets_.empty() || table.targets_.back() != e)
      table.targets_.push_back(e);
  }
  return table;
}

const ScoreSet *PairScoreTable::find(const std::string &enroll,
                                     const std::string &test) const {
  auto e = speaker_index(enroll), t = speaker_index(test);
  if (!e || !t) return nullptr;
  auto idx = pair_index(*e, *t);
  return idx < 0 ? nullptr : &pairs_[static_cast<std::size_t>(idx)].scores;
}

std::optional<std::uint32_t> PairScoreTable::speaker_index(
    const std::string &token) const {
  auto it = std::lower_bound(
      speakers_.begin(), speakers_.end(), token,
      [](const SpeakerId &s, const std::string &t) { return s.str() < t; });
  if (it == speakers_.end() || it->str() != token) return std::nullopt;
  return static_cast<std::uint32_t>(it - speakers_.begin());
}

std::vector<double> PairScoreTable::pooled_scores() const {
  std::vector<double> out;
  out.reserve(score_count_);
  for (const auto &p : pairs_)
    out.insert(out.end(), p.scores.scores().begin(), p.scores.scores().end());
  return out;
}

std::size_t PairScoreTable::median_pair_size() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(pairs_.size());
  for (const auto &p : pairs_) sizes.push_back(p.scores.size());
  auto mid = sizes.begin() + static_cast<std::ptrdiff_t>(sizes.size() / 2);
  std::nth_element(sizes.begin(), mid, sizes.end());
  return *mid;
}

ScoreFormat score_format_from_path(const std::filesystem::path &path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return (ext == ".jsonl" || ext == ".json") ? ScoreFormat::kJsonl
                                              : ScoreFormat::kCsv;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string &field) {
  double v = 0.0;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::vector<ScoreRecord> read_csv(std::istream &in, const std::string &source) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  int col_enroll = -1, col_test = -1, col_score = -1, col_part = -1;
  std::size_t n_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (col_score < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        int idx = static_cast<int>(i);
        if (fields[i] == "enroll") col_enroll = idx;
        else if (fields[i] == "test") col_test = idx;
        else if (fields[i] == "score") col_score = idx;
        else if (fields[i] == "partition") col_part = idx;
      }
      if (col_enroll < 0 || col_test < 0 || col_score < 0)
        throw ParseError(source, line_no,
                         "header must name enroll,test,score columns");
      n_cols = fields.size();
      continue;
    }
    if (fields.size() != n_cols)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(n_cols) + " fields, got " +
                           std::to_string(fields.size()));
    ScoreRecord r;
    r.enroll = fields[col_enroll];
    r.test = fields[col_test];
    if (r.enroll.empty() || r.test.empty())
      throw ParseError(source, line_no, "empty speaker id");
    auto score = parse_double(fields[col_score]);
    if (!score) throw ParseError(source, line_no, "unparsable score '" + fields[col_score] + "'");
    if (!std::isfinite(*score))
      throw ParseError(source, line_no, "non-finite score '" + fields[col_score] + "'");
    r.score = *score;
    if (col_part >= 0) r.partition = fields[col_part];
    out.push_back(std::move(r));
  }
  if (col_score < 0) throw ParseError(source, line_no, "missing header");
  return out;
}

std::vector<ScoreRecord> read_jsonl(std::istream &in, const std::string &source) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!j.is_object() || !j.contains("enroll") || !j.contains("test") ||
        !j.contains("score"))
      throw ParseError(source, line_no, "object must have enroll, test, score");
    if (!j["enroll"].is_string() || !j["test"].is_string())
      throw ParseError(source, line_no, "enroll and test must be strings");
    if (!j["score"].is_number())
      throw ParseError(source, line_no, "score must be a finite number");
    ScoreRecord r;
    r.enroll = j["enroll"].get<std::string>();
    r.test = j["test"].get<std::string>();
    r.score = j["score"].get<double>();
    if (r.enroll.empty() || r.test.empty())
      throw ParseError(source, line_no, "empty speaker id");
    if (!std::isfinite(r.score)) throw ParseError(source, line_no, "non-finite score");
    if (j.contains("partition") && !j["partition"].is_null()) {
      if (!j["partition"].is_string())
        throw ParseError(source, line_no, "partition must be a string");
      r.partition = j["partition"].get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ScoreRecord> read_score_records(const std::filesystem::path &path,
                                            ScoreFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open score file " + path.string());
  return format == ScoreFormat::kCsv ? read_csv(in, path.string())
                                     : read_jsonl(in, path.string());
}

PairScoreTable load_score_table(const std::filesystem::path &path,
                                ScoreFormat format,
                                const std::optional<std::string> &partition_filter) {
  auto records = read_score_records(path, format);
  return PairScoreTable::from_records(records, partition_filter);
}

void write_score_table(const PairScoreTable &table,
                       const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  bool with_partition = !table.partition().empty();
  out << (with_partition ? "enroll,test,score,partition\n" : "enroll,test,score\n");
  char buf[64];
  for (const auto &p : table.pairs()) {
    const auto &e = table.speakers()[p.enroll].str();
    const auto &t = table.speakers()[p.test].str();
    for (double s : p.scores.scores()) {
      auto res = std::to_chars(buf, buf + sizeof(buf), s);
      out << e << ',' << t << ',' << std::string_view(buf, res.ptr - buf);
      if (with_partition) out << ',' << table.partition();
      out << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace wcfa
