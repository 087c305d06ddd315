// condctc/harness.h

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

#ifndef CONDCTC_HARNESS_H_
#define CONDCTC_HARNESS_H_

#include <optional>
#include <string>
#include <vector>

#include "condctc/decode.h"
#include "condctc/lm.h"
#include "condctc/model.h"

namespace condctc {

struct EditCounts {
  int64_t sub = 0, del = 0, ins = 0, ref_len = 0;
  int64_t Errors() const { return sub + del + ins; }
  double Rate() const {
    return ref_len == 0 ? (Errors() == 0 ? 0.0 : 1.0)
                        : static_cast<double>(Errors()) / ref_len;
  }
  EditCounts& operator+=(const EditCounts& o) {
    sub += o.sub;
    del += o.del;
    ins += o.ins;
    ref_len += o.ref_len;
    return *this;
  }
};

// Unit-cost edit distance with an operation backtrace. In the synthetic
// corpus every token is an atomic unit, so the mixed error rate reduces to
// token errors over the reference length.
EditCounts Mer(const LabelSeq& ref, const LabelSeq& hyp);

struct MerReport {
  EditCounts full, cs, mono_l1, mono_l2, mono;
};

// Pools counts per category split, then derives rates (corpus-level, not an
// average of per-utterance rates). Inputs are id-aligned by index.
MerReport ScoreCorpus(const std::vector<LabelSeq>& refs,
                      const std::vector<LabelSeq>& hyps,
                      const std::vector<Category>& cats);

enum class Condition : uint8_t { kA = 0, kB = 1, kC = 2 };
const char* ConditionName(Condition c);
Condition ParseCondition(const std::string& name);

enum class ModelKind : uint8_t { kVanilla = 0, kCondSeg = 1, kCondTra = 2 };
const char* ModelKindName(ModelKind k);
ModelKind ParseModelKind(const std::string& name);

struct SplitRates {
  double full = 0, cs = 0, mono_l1 = 0, mono_l2 = 0, mono = 0;
};
SplitRates RatesOf(const MerReport& r);

struct ResultRow {
  std::string model;      // vanilla / cond-seg / cond-tra
  std::string condition;  // A / B / C
  std::string seed;       // "1", ..., or "mean"
  std::string sources;    // decoding likelihoods, e.g. "bi+l1+l2+lm"
  MerReport counts;       // pooled (mean rows: summed over seeds)
  SplitRates rates;       // per-seed: derived; mean rows: seed average
};

struct ExperimentConfig {
  std::string data_dir;
  std::string work_dir;
  Condition condition = Condition::kB;
  std::vector<ModelKind> models{ModelKind::kVanilla, ModelKind::kCondSeg,
                                ModelKind::kCondTra};
  std::vector<uint64_t> seeds{1, 2, 3};
  TrainConfig train;
  DecodeConfig decode;
  int lm_order = 3;
  double lm_k = 0.1;
  int threads = 0;  // 0 = hardware concurrency
};

// Trains (or loads cached) models for every (model, seed) cell of the
// condition, trains the condition-appropriate LM on the unpaired
// transcripts, decodes the dev set, and emits one row per cell plus a
// seed-averaged row per model. Fully deterministic for fixed config.
std::vector<ResultRow> RunExperiment(const ExperimentConfig& cfg);

// Decoding-likelihood ablation of the condition-B transliteration model:
// the six source subsets, each scored per seed plus seed mean.
std::vector<ResultRow> RunAblation(const ExperimentConfig& cfg);

struct SweepPoint {
  double fraction = 0.0;
  Scheme scheme = Scheme::kSegmentation;
  std::string seed;  // "1", ..., or "mean"
  MerReport counts;
  SplitRates rates;
};

struct SweepResult {
  std::vector<SweepPoint> rows;
  std::optional<double> crossover;  // smallest fraction where SEG <= TRA (CS split)
};

// Retrains both schemes with each fraction of the CS training pool added to
// the monolingual data and records CS-split MER; fractions 0 and 1
// correspond to conditions B and A.
SweepResult RunDataSweep(const ExperimentConfig& cfg,
                         const std::vector<double>& fractions);

void WriteResultsTsv(const std::string& path,
                     const std::vector<ResultRow>& rows);
std::string RenderResultsTable(const std::vector<ResultRow>& rows);
void WriteSweepTsv(const std::string& path, const SweepResult& sweep);
std::string RenderSweepTable(const SweepResult& sweep);

// Formats a rate as percent with two decimals, e.g. "25.20".
std::string FormatRate(double rate);

}  // namespace condctc

#endif  // CONDCTC_HARNESS_H_
