// condctc/lm.cc

// Copyright 2026  The condctc authors

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

#include "condctc/lm.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace condctc {

namespace {
const char* kEos = "</s>";
}

NGramLm NGramLm::Train(const std::vector<LabelSeq>& transcripts,
                       const Vocab& v, int order, double add_k,
                       double backoff) {
  if (transcripts.empty()) throw DataError("LM training corpus is empty");
  if (order < 1) throw ConfigError("LM order must be >= 1");
  if (add_k <= 0.0) throw ConfigError("LM add-k must be positive");
  if (backoff <= 0.0 || backoff > 1.0)
    throw ConfigError("LM backoff factor must be in (0, 1]");

  NGramLm lm;
  lm.order_ = order;
  lm.add_k_ = add_k;
  lm.backoff_ = backoff;
  lm.vocab_hash_ = v.Hash();
  for (int32_t id = Vocab::kFirstToken; id < v.Size(); ++id)
    lm.tokens_.push_back(v.Token(id));
  const int outcomes = lm.NumTokens() + 1;  // vocab plus eos

  using Counts = std::map<std::vector<int32_t>, std::vector<int64_t>>;
  std::vector<Counts> counts(order);
  for (const auto& y : transcripts) {
    std::vector<int32_t> seq;
    seq.reserve(y.size() + 1);
    for (int32_t id : y) seq.push_back(lm.ToLmId(id));
    seq.push_back(lm.EosId());
    for (int ctx_len = 0; ctx_len < order; ++ctx_len) {
      for (size_t i = ctx_len; i < seq.size(); ++i) {
        std::vector<int32_t> ctx(seq.begin() + (i - ctx_len), seq.begin() + i);
        auto it = counts[ctx_len].try_emplace(std::move(ctx),
                                              std::vector<int64_t>(outcomes, 0));
        it.first->second[seq[i]] += 1;
      }
    }
  }

  lm.tables_.resize(order);
  for (int ctx_len = 0; ctx_len < order; ++ctx_len) {
    for (const auto& [ctx, cnt] : counts[ctx_len]) {
      int64_t total = 0;
      for (int64_t c : cnt) total += c;
      double denom = static_cast<double>(total) + add_k * outcomes;
      std::vector<double> dist(outcomes);
      for (int w = 0; w < outcomes; ++w)
        dist[w] = std::log((static_cast<double>(cnt[w]) + add_k) / denom);
      lm.tables_[ctx_len].emplace(ctx, std::move(dist));
    }
  }
  return lm;
}

int NGramLm::ToLmId(int32_t full_id) const {
  int lm_id = full_id - first_full_;
  if (lm_id < 0 || lm_id >= NumTokens())
    throw ComputeError("token id " + std::to_string(full_id) +
                       " is not an LM token");
  return lm_id;
}

const std::vector<double>& NGramLm::Conditional(
    const std::vector<int32_t>& ctx, int* backoffs) const {
  std::vector<int32_t> key = ctx;
  if (static_cast<int>(key.size()) > order_ - 1)
    key.erase(key.begin(), key.end() - (order_ - 1));
  int steps = 0;
  while (true) {
    const Table& table = tables_[key.size()];
    auto it = table.find(key);
    if (it != table.end()) {
      if (backoffs) *backoffs = steps;
      return it->second;
    }
    // Unseen context: drop the oldest token. The empty context always
    // exists, so this terminates.
    key.erase(key.begin());
    ++steps;
  }
}

std::pair<double, LmState> NGramLm::ScoreStep(const LmState& state,
                                              int lm_token) const {
  if (lm_token < 0 || lm_token > EosId())
    throw ComputeError("LM token out of range: " + std::to_string(lm_token));
  int backoffs = 0;
  const std::vector<double>& dist = Conditional(state.ctx, &backoffs);
  double logp = backoffs * std::log(backoff_) + dist[lm_token];
  LmState next;
  if (lm_token != EosId()) {
    next.ctx = state.ctx;
    next.ctx.push_back(lm_token);
    if (static_cast<int>(next.ctx.size()) > order_ - 1)
      next.ctx.erase(next.ctx.begin(),
                     next.ctx.end() - (order_ - 1));
  }
  return {logp, std::move(next)};
}

double NGramLm::ScoreSequence(const LabelSeq& y_full) const {
  LmState state;
  double total = 0.0;
  for (int32_t id : y_full) {
    auto [lp, next] = ScoreStep(state, ToLmId(id));
    total += lp;
    state = std::move(next);
  }
  total += ScoreStep(state, EosId()).first;
  return total;
}

void NGramLm::Write(const std::string& path) const {
  AtomicWriteFile(path, [&](std::ostream& os) {
    os << "condctc-ngram 1\n";
    os << "order " << order_ << "\n";
    os << "add_k " << FormatFull(add_k_) << "\n";
    os << "backoff " << FormatFull(backoff_) << "\n";
    os << "vocab_hash " << HexU64(vocab_hash_) << "\n";
    size_t n_lines = 0;
    for (const auto& table : tables_)
      n_lines += table.size() * (tokens_.size() + 1);
    os << "ngrams " << n_lines << "\n";
    auto name = [&](int lm_id) -> std::string {
      return lm_id == EosId() ? kEos : tokens_[lm_id];
    };
    for (const auto& table : tables_) {
      for (const auto& [ctx, dist] : table) {
        std::string ctx_str;
        for (size_t i = 0; i < ctx.size(); ++i) {
          if (i) ctx_str += ' ';
          ctx_str += name(ctx[i]);
        }
        for (size_t w = 0; w < dist.size(); ++w) {
          os << ctx_str << " | " << name(static_cast<int>(w)) << " | "
             << FormatFull(dist[w]) << "\n";
        }
      }
    }
  });
}

NGramLm NGramLm::Read(const std::string& path, const Vocab& v) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open LM file: " + path);
  std::string line;
  auto expect = [&](const char* key) -> std::string {
    if (!std::getline(is, line)) throw DataError("truncated LM header: " + path);
    std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0)
      throw DataError("bad LM header line (want '" + std::string(key) +
                      "'): " + line);
    return line.substr(prefix.size());
  };
  if (!std::getline(is, line) || line != "condctc-ngram 1")
    throw DataError("bad LM file magic: " + path);

  NGramLm lm;
  lm.order_ = std::stoi(expect("order"));
  lm.add_k_ = std::stod(expect("add_k"));
  lm.backoff_ = std::stod(expect("backoff"));
  std::string hash_str = expect("vocab_hash");
  lm.vocab_hash_ = std::stoull(hash_str, nullptr, 16);
  if (lm.vocab_hash_ != v.Hash())
    throw DataError("LM vocab hash mismatch: " + path);
  for (int32_t id = Vocab::kFirstToken; id < v.Size(); ++id)
    lm.tokens_.push_back(v.Token(id));
  if (lm.order_ < 1) throw DataError("bad LM order in " + path);
  size_t n_lines = std::stoull(expect("ngrams"));
  lm.tables_.resize(lm.order_);

  auto lm_id_of = [&](const std::string& tok) -> int {
    if (tok == kEos) return lm.EosId();
    int32_t id = v.IdOf(tok);
    if (id < Vocab::kFirstToken)
      throw DataError("LM file has non-LM token '" + tok + "': " + path);
    return id - Vocab::kFirstToken;
  };

  size_t seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    // "<ctx tokens> | <token> | <logprob>"; an empty context yields a line
    // that starts with " | ".
    size_t p1 = line.find(" | ");
    if (p1 == std::string::npos) throw DataError("bad LM line: " + line);
    std::string ctx_str = line.substr(0, p1);
    std::string rest = line.substr(p1 + 3);
    size_t p2 = rest.find(" | ");
    if (p2 == std::string::npos) throw DataError("bad LM line: " + line);
    std::string tok = rest.substr(0, p2);
    double logprob = std::stod(rest.substr(p2 + 3));

    std::vector<int32_t> ctx;
    for (const auto& c : SplitWhitespace(ctx_str)) ctx.push_back(lm_id_of(c));
    if (static_cast<int>(ctx.size()) >= lm.order_)
      throw DataError("LM context longer than order-1: " + line);
    int w = lm_id_of(tok);
    auto it = lm.tables_[ctx.size()].try_emplace(
        std::move(ctx), std::vector<double>(lm.NumTokens() + 1, kLogZero));
    it.first->second[w] = logprob;
    ++seen;
  }
  if (seen != n_lines)
    throw DataError("LM line count mismatch (header says " +
                    std::to_string(n_lines) + ", file has " +
                    std::to_string(seen) + "): " + path);
  if (lm.tables_[0].empty()) throw DataError("LM file has no unigram table");
  return lm;
}

}  // namespace condctc
