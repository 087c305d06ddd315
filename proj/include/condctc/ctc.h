// condctc/ctc.h

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

#ifndef CONDCTC_CTC_H_
#define CONDCTC_CTC_H_

#include <optional>
#include <vector>

#include "condctc/common.h"
#include "condctc/lexicon.h"

namespace condctc {

// A posteriorgram is a T x |V| matrix of per-frame log-probabilities; every
// row exp-sums to 1.
using Posteriorgram = Matrix;

// Forward/backward lattice over the blank-interleaved target
// ext = [blank, y1, blank, y2, ..., yL, blank] of size 2L+1.
// alpha(t,s) sums prefix paths ending in state s at frame t, emission at t
// included; beta(t,s) sums suffix paths starting at s, emission at t
// included. loglik == kLogZero means no alignment exists.
struct CtcLattice {
  std::vector<int32_t> ext;
  Matrix alpha, beta;  // T x (2L+1), log domain
  double loglik = kLogZero;
  bool Feasible() const { return loglik != kLogZero; }
};

CtcLattice CtcForwardBackward(const Posteriorgram& logp, const LabelSeq& y,
                              int32_t blank_id);

struct CtcLossResult {
  double loss = 0.0;   // -log p(y|x); +inf when no alignment exists
  Matrix grad;         // d loss / d logp, zero when infeasible
};

// Alignment-marginalizing CTC loss. The gradient is taken with respect to
// the log-posterior entries treated as free variables; the softmax Jacobian
// is applied by the caller (nnet head backward).
CtcLossResult CtcLoss(const Posteriorgram& logp, const LabelSeq& y,
                      int32_t blank_id);

// Per-frame argmax path; ties broken toward the lowest index.
std::vector<int32_t> GreedyDecode(const Posteriorgram& logp);

// Merge adjacent repeats, then delete blanks. When also_remove >= 0 that
// symbol is deleted alongside the blank (used to drop greedy <NULL> hits).
LabelSeq Collapse(const std::vector<int32_t>& path, int32_t blank_id,
                  int32_t also_remove = -1);

struct ForcedAlignment {
  std::vector<int32_t> path;          // length T, collapses to y
  std::vector<FrameSpan> label_spans; // per label: frames its state occupied
  double logprob = kLogZero;
};

// Viterbi over the blank-interleaved lattice: the most probable frame path
// whose collapse equals y. Ties are resolved toward earlier emission: the
// recursion prefers the predecessor that entered the state earlier, and the
// final state prefers the trailing blank, so labels start and end as early
// as possible. Returns nullopt when no alignment exists.
std::optional<ForcedAlignment> ForcedAlign(const Posteriorgram& logp,
                                           const LabelSeq& y,
                                           int32_t blank_id);

}  // namespace condctc

#endif  // CONDCTC_CTC_H_
