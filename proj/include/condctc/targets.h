// condctc/targets.h

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

#ifndef CONDCTC_TARGETS_H_
#define CONDCTC_TARGETS_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "condctc/ctc.h"
#include "condctc/lexicon.h"
#include "condctc/synthdata.h"

namespace condctc {

enum class Scheme : uint8_t { kSegmentation = 0, kTransliteration = 1 };

const char* SchemeName(Scheme s);
Scheme ParseScheme(const std::string& name);

// The two monolingual supervision targets for one utterance. All ids live in
// the full bilingual vocabulary.
//   SEGMENTATION: each view keeps its native tokens; every maximal foreign
//   span becomes a single <NULL>.
//   TRANSLITERATION: each view contains only its own language's tokens and
//   no <NULL>.
struct TargetPair {
  LabelSeq y_l1, y_l2;
  Scheme scheme = Scheme::kSegmentation;
};

// <NULL>-masked language-segmentation targets for both views.
TargetPair MaskSegmentation(const LabelSeq& y, const Vocab& v);

// Produces a monolingual-view posteriorgram for an utterance. The matrix
// columns live in mono-view index space ({blank, <NULL>, lang tokens}).
using MonoPgFn = std::function<Matrix(const FeatureSeq&)>;

// Greedy transliteration: collapse(greedy(pg)) with <NULL> hits dropped,
// mapped back to full-vocab ids. Empty outputs are legal (flagged upstream).
LabelSeq PseudoLabel(const MonoPgFn& asr, const FeatureSeq& x,
                     const MonoView& view);

// One monolingual view of a code-switched utterance: true native tokens are
// kept; each foreign span is replaced by the pseudo-labels of the frames the
// native model's forced alignment leaves between the neighbouring native
// tokens (the whole inter-token gap, so the degenerate all-foreign view
// pseudo-labels the entire utterance). Returns nullopt when the masked view
// cannot be aligned.
std::optional<LabelSeq> StitchView(const LabelSeq& y, const Vocab& v,
                                   const MonoView& view,
                                   const Matrix& pg_view,
                                   int64_t* empty_segments = nullptr);

// Both views of a CS utterance via StitchView, each with its own native
// model.
std::optional<TargetPair> StitchCsTargets(const LabelSeq& y,
                                          const FeatureSeq& x, const Vocab& v,
                                          const MonoPgFn& pg_l1_fn,
                                          const MonoPgFn& pg_l2_fn,
                                          int64_t* empty_segments = nullptr);

struct TargetReport {
  int64_t empty_pseudolabels = 0;       // utterance-level empty transliterations
  int64_t empty_segments = 0;           // empty per-span splices during stitching
  std::vector<std::string> skipped_ids; // utterances dropped (infeasible alignment)
};

struct UtteranceTargets {
  std::string id;
  TargetPair pair;
};

// SEGMENTATION masks every utterance; TRANSLITERATION keeps native truth,
// pseudo-labels purely-foreign utterances and stitches CS utterances.
// Skipped utterances are recorded in the report and omitted from the output.
std::vector<UtteranceTargets> MakeTrainingTargets(
    const std::vector<const Utterance*>& utts, Scheme scheme, const Vocab& v,
    const MonoPgFn* pg_l1_fn, const MonoPgFn* pg_l2_fn, TargetReport* report);

// Cache file: "id<TAB>scheme<TAB>y_l1<TAB>y_l2" with space-joined tokens.
void WriteTargets(const std::vector<UtteranceTargets>& targets, const Vocab& v,
                  const std::string& path);
std::vector<UtteranceTargets> ReadTargets(const std::string& path,
                                          const Vocab& v);

}  // namespace condctc

#endif  // CONDCTC_TARGETS_H_
