// condctc/lm.h

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

#ifndef CONDCTC_LM_H_
#define CONDCTC_LM_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "condctc/common.h"
#include "condctc/lexicon.h"

namespace condctc {

// Incremental LM scoring state: the last (order-1) LM-space token ids.
struct LmState {
  std::vector<int32_t> ctx;
};

// Token-level backoff n-gram over the real (non-blank, non-<NULL>) tokens
// plus an end-of-sequence symbol. Conditionals are add-k smoothed at each
// order; an unseen context backs off to its longest seen suffix context with
// a fixed log-penalty per dropped token (stupid-backoff style). The
// conditional distribution used at any state is therefore always a proper
// add-k table and sums to one; the penalty only affects sequence scores.
// Immutable after training; concurrent scoring is safe.
class NGramLm {
 public:
  static NGramLm Train(const std::vector<LabelSeq>& transcripts,
                       const Vocab& v, int order = 3, double add_k = 0.1,
                       double backoff = 0.4);

  int order() const { return order_; }
  double add_k() const { return add_k_; }
  double backoff() const { return backoff_; }
  uint64_t vocab_hash() const { return vocab_hash_; }

  // LM token space: 0..V-1 are the vocab's real tokens in index order,
  // V is end-of-sequence.
  int NumTokens() const { return static_cast<int>(tokens_.size()); }
  int EosId() const { return NumTokens(); }
  int ToLmId(int32_t full_id) const;    // throws ComputeError on blank/<NULL>
  int32_t ToFullId(int lm_id) const { return first_full_ + lm_id; }

  // Log-probability table (size V+1) for the longest seen suffix of ctx;
  // reports the number of backoff steps taken.
  const std::vector<double>& Conditional(const std::vector<int32_t>& ctx,
                                         int* backoffs = nullptr) const;

  // Incremental log P(token | state) including any backoff penalty, plus
  // the successor state. Summing steps over a sequence and eos equals
  // ScoreSequence.
  std::pair<double, LmState> ScoreStep(const LmState& state,
                                       int lm_token) const;

  // Full-vocab label sequence score: token steps plus the eos step.
  double ScoreSequence(const LabelSeq& y_full) const;

  // Plain-text table: header (order, k, backoff factor, vocab hash), then
  // lines "context tokens | token | logprob".
  void Write(const std::string& path) const;
  static NGramLm Read(const std::string& path, const Vocab& v);

 private:
  NGramLm() = default;
  using Table = std::map<std::vector<int32_t>, std::vector<double>>;

  int order_ = 3;
  double add_k_ = 0.1;
  double backoff_ = 0.4;
  uint64_t vocab_hash_ = 0;
  int32_t first_full_ = Vocab::kFirstToken;
  std::vector<std::string> tokens_;   // LM-id order
  std::vector<Table> tables_;         // index = context length (0..order-1)
};

}  // namespace condctc

#endif  // CONDCTC_LM_H_
