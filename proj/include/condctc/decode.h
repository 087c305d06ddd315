// condctc/decode.h

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

#ifndef CONDCTC_DECODE_H_
#define CONDCTC_DECODE_H_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "condctc/lm.h"
#include "condctc/model.h"

namespace condctc {

struct MergeWeights {
  double bi = 0.5, l1 = 0.25, l2 = 0.25;
  void Validate() const;  // non-negative, sum to 1
};

// Projects a monolingual-view posteriorgram onto the full vocabulary:
// foreign tokens receive a floor probability (1e-10) and each row is
// renormalized.
Matrix ProjectMono(const Matrix& pg_mono, const MonoView& view, int full_size);

// Per-frame log-linear combination of the enabled sources, renormalized.
// Each token takes the weighted mean of the log-probabilities from the
// sources whose support contains it (weights renormalized per token);
// tokens outside every enabled support take the 1e-10 floor. Disabled
// sources are passed as null and must carry zero weight.
Matrix MergePosteriors(const Matrix* pg_bi, const Matrix* pg_l1,
                       const Matrix* pg_l2, const MonoView& view_l1,
                       const MonoView& view_l2, int full_size,
                       const MergeWeights& w);

struct DecodeConfig {
  int beam = 10;
  double lambda2 = 0.8;
  MergeWeights weights;
  bool use_lm = true;
  bool use_bi = true, use_l1 = true, use_l2 = true;
  int nbest = 1;

  // Weights with disabled sources zeroed and the rest renormalized; throws
  // ConfigError when every CTC source is disabled.
  MergeWeights EffectiveWeights() const;
  void Validate() const;
};

struct ScoredHyp {
  LabelSeq labels;
  double score = 0.0;     // lambda2 * ctc + (1-lambda2) * lm (ctc alone without LM)
  double ctc_logp = 0.0;
  double lm_logp = 0.0;
};

// Time-synchronous CTC prefix beam search over the full-vocab posteriorgram.
// Hypotheses are keyed by label prefix and merged via log-add; the LM step
// score is added at label-extension time and the end-of-sequence score at
// finalization. <NULL> is never proposed as an extension, so no output ever
// contains blank or <NULL>.
std::vector<ScoredHyp> BeamSearch(const Matrix& logpg, const Vocab& v,
                                  const NGramLm* lm, const DecodeConfig& cfg);

enum class LidDecision : uint8_t { kL1 = 0, kL2 = 1, kBlank = 2, kAmbiguous = 3 };
const char* LidName(LidDecision d);

struct LidSpan {
  int begin = 0, end = 0;
  LidDecision decision = LidDecision::kBlank;
};

struct LidResult {
  std::vector<LidDecision> frames;
  std::array<int, 4> counts{};   // indexed by LidDecision
  std::vector<LidSpan> spans;    // maximal same-decision runs
};

// Frame-level language identity diagnostic over the two monolingual-view
// posteriorgrams: a frame is L1 when the L1 argmax is a real token while the
// L2 argmax is <NULL> or blank (symmetrically L2), BLANK when both argmaxes
// are blank, otherwise AMBIGUOUS.
LidResult FrameLid(const Matrix& pg_l1, const Matrix& pg_l2);

// Forward + merge + beam search for the two model kinds.
std::vector<ScoredHyp> DecodeConditional(const ConditionalModel& m,
                                         const FeatureSeq& x, const NGramLm* lm,
                                         const DecodeConfig& cfg);
std::vector<ScoredHyp> DecodeVanilla(const VanillaModel& m, const FeatureSeq& x,
                                     const NGramLm* lm,
                                     const DecodeConfig& cfg);

// "id<TAB>score<TAB>tokens" lines, or with a rank column between id and
// score when nbest > 1.
void WriteDecodeOutput(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<ScoredHyp>>>& hyps,
    const Vocab& v, int nbest);

// Top-1 hypotheses keyed by utterance id (accepts both formats).
std::vector<std::pair<std::string, LabelSeq>> ReadHypFile(
    const std::string& path, const Vocab& v);

}  // namespace condctc

#endif  // CONDCTC_DECODE_H_
