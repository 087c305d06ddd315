// condctc/model.h

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

#ifndef CONDCTC_MODEL_H_
#define CONDCTC_MODEL_H_

#include <array>
#include <string>
#include <vector>

#include "condctc/ctc.h"
#include "condctc/lexicon.h"
#include "condctc/nnet.h"
#include "condctc/synthdata.h"
#include "condctc/targets.h"

namespace condctc {

// Two monolingual encoders with monolingual softmax heads; addition fusion
// of the latents feeds a bilingual head over the full vocabulary. Encoder
// widths are equal by construction (the fusion is an elementwise sum).
struct ConditionalModel {
  Vocab vocab;
  int hidden = 128;
  EncoderParams enc_l1, enc_l2;
  HeadParams head_l1, head_l2, head_bi;  // view_l1 / view_l2 / full vocab
  MonoView view_l1, view_l2;
};

// Single encoder, one softmax head. Serves both the bilingual baseline and
// the monolingual pseudo-labelers (output space selects the head dim).
enum class OutputSpace : uint8_t { kBilingual = 0, kMonoL1 = 1, kMonoL2 = 2 };
const char* OutputSpaceName(OutputSpace s);
OutputSpace ParseOutputSpace(const std::string& name);

struct VanillaModel {
  Vocab vocab;
  int hidden = 128;
  OutputSpace space = OutputSpace::kBilingual;
  EncoderParams enc;
  HeadParams head;
  MonoView view;  // meaningful for the mono spaces
  int OutDim() const;
};

// Seeded uniform(+-1/sqrt(fan_in)) init; context fixed at +-1 frame.
ConditionalModel InitConditional(const Vocab& v, int feat_dim, uint64_t seed,
                                 int hidden = 128);
VanillaModel InitVanilla(const Vocab& v, OutputSpace space, int feat_dim,
                         uint64_t seed, int hidden = 128);

struct CondForward {
  Matrix pg_l1, pg_l2, pg_bi;
  Matrix latent_l1, latent_l2, fused;
  EncoderCache c1, c2;  // filled when want_cache
};

// pg_l1/pg_l2 live in mono-view index space; pg_bi over the full vocab.
// All three share the input's frame count.
CondForward ForwardConditional(const ConditionalModel& m, const FeatureSeq& x,
                               bool want_cache = false);

Matrix ForwardVanilla(const VanillaModel& m, const FeatureSeq& x,
                      EncoderCache* cache = nullptr);

struct CondGrads {
  EncoderParams enc_l1, enc_l2;
  HeadParams head_l1, head_l2, head_bi;
  void AllocLike(const ConditionalModel& m);
};

std::vector<TensorRef> CondModelTensors(ConditionalModel* m);
std::vector<TensorRef> CondGradTensors(CondGrads* g);
std::vector<TensorRef> VanillaModelTensors(VanillaModel* m);

// Component order used in MultitaskResult masks and arrays.
enum { kCompBi = 0, kCompL1 = 1, kCompL2 = 2 };

struct MultitaskResult {
  double loss = 0.0;                       // interpolated objective
  std::array<double, 3> components{};      // bi, l1, l2 (+inf when skipped)
  uint8_t skipped_mask = 0;                // bit set = component infeasible
  bool AllSkipped() const { return skipped_mask == 0b111; }
};

// Interpolated multi-task objective
//   lambda1 * L_bi + (1 - lambda1) * (L_l1 + L_l2) / 2
// with infeasible components dropped from the sum. Gradients (when grads is
// non-null) are accumulated through all three CTC losses; the bilingual
// gradient flows into both encoders through the addition fusion.
MultitaskResult LossMultitask(const ConditionalModel& m, const FeatureSeq& x,
                              const TargetPair& targets, const LabelSeq& y_bi,
                              double lambda1, CondGrads* grads);

struct TrainConfig {
  double lambda1 = 0.7;
  int epochs = 40;
  int batch_size = 16;
  uint64_t seed = 1;
  Scheme scheme = Scheme::kSegmentation;
  double lr = 1e-3;
  int threads = 1;
};

struct TrainStats {
  std::vector<double> epoch_loss;   // mean contributing-utterance loss
  int64_t skipped_components = 0;
  int64_t skipped_utterances = 0;
};

struct TrainExample {
  const Utterance* utt = nullptr;
  TargetPair targets;
};

struct VanillaExample {
  const Utterance* utt = nullptr;
  LabelSeq target;  // full-vocab ids; mapped into the model's space
};

// Seeded shuffling, per-batch gradient averaging over contributing
// utterances, one Adam step per batch. Deterministic for a fixed seed
// regardless of thread count. Throws ComputeError on NaN loss.
TrainStats TrainConditional(ConditionalModel* m,
                            const std::vector<TrainExample>& data,
                            const TrainConfig& cfg);
TrainStats TrainVanilla(VanillaModel* m,
                        const std::vector<VanillaExample>& data,
                        const TrainConfig& cfg);

// Checkpoint = CFCK tensor table + JSON sidecar (<path>.json) carrying the
// model kind, vocab hash and train config.
void SaveConditional(const ConditionalModel& m, const std::string& path,
                     const TrainConfig& cfg);
void SaveVanilla(const VanillaModel& m, const std::string& path,
                 const TrainConfig& cfg);
ConditionalModel LoadConditional(const std::string& path, const Vocab& v);
VanillaModel LoadVanilla(const std::string& path, const Vocab& v);

enum class ModelFileKind { kConditional, kVanilla };
ModelFileKind PeekModelKind(const std::string& path);

// Adapter for targets::PseudoLabel / StitchCsTargets; the model must be a
// monolingual one.
MonoPgFn MakeMonoPgFn(const VanillaModel& m);

}  // namespace condctc

#endif  // CONDCTC_MODEL_H_
