// condctc/synthdata.h

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

#ifndef CONDCTC_SYNTHDATA_H_
#define CONDCTC_SYNTHDATA_H_

#include <string>
#include <vector>

#include "condctc/common.h"
#include "condctc/lexicon.h"

namespace condctc {

enum class Category : uint8_t { kMonoL1 = 0, kMonoL2 = 1, kCs = 2 };

const char* CategoryName(Category c);
Category ParseCategory(const std::string& name);

// Synthetic corpus knobs. Every L2 token prototype sits pair_delta away from
// its L1 partner, so cross-lingual token pairs are acoustically confusable
// while within-language classes stay far apart.
struct GenConfig {
  uint64_t seed = 1;
  int n_l1 = 8, n_l2 = 8;   // tokens per language (must be equal: pairing)
  int feat_dim = 16;
  int frames_min = 3, frames_max = 6;  // frames per token, inclusive range
  double noise_sigma = 0.3;
  double pair_delta = 0.6;
  int train_mono_per_lang = 400;
  int train_cs = 400;
  int dev_per_category = 150;

  void Validate() const;  // throws ConfigError
};

struct Utterance {
  std::string id;
  Category category = Category::kMonoL1;
  LabelSeq transcript;             // full-vocab ids; no blank, no <NULL>
  FeatureSeq feats;
  std::vector<FrameSpan> spans;    // gold per-token frame spans (in memory only)
  std::string feature_path;        // set when read from a manifest
};

struct Corpus {
  Vocab vocab;
  std::vector<Utterance> train_mono;  // L1 block first, then L2
  std::vector<Utterance> train_cs;
  std::vector<Utterance> dev;         // all three categories
};

struct Prototypes {
  Matrix l1, l2;  // n x D each; row i of l2 = row i of l1 + delta * unit
};

// Prototype draw consumes the stream first, so tests can re-derive the same
// prototypes from an Rng seeded with cfg.seed.
Prototypes MakePrototypes(const GenConfig& cfg, Rng* rng);

// Pure function of cfg: same config, byte-identical corpus.
Corpus GenerateCorpus(const GenConfig& cfg);

// Feature file: magic "CFCT", u32 version=1, u32 T, u32 D, T*D float32
// row-major, all little-endian.
void WriteFeatures(const FeatureSeq& f, const std::string& path);
FeatureSeq ReadFeatures(const std::string& path);

// Manifest line: id<TAB>feature_path<TAB>category<TAB>transcript, transcript
// space-joined. feature_path is stored as written and resolved relative to
// the manifest's directory on read.
void WriteManifest(const std::vector<Utterance>& utts, const Vocab& v,
                   const std::string& manifest_path);
std::vector<Utterance> ReadManifest(const std::string& manifest_path,
                                    const Vocab& v, bool load_features = true);

// Full on-disk layout: vocab.txt, feats/<id>.feat, train_mono.tsv,
// train_cs.tsv, dev.tsv, gen.conf.
void WriteCorpus(const Corpus& corpus, const GenConfig& cfg,
                 const std::string& out_dir);
Corpus ReadCorpusDir(const std::string& dir, bool load_features = true);

}  // namespace condctc

#endif  // CONDCTC_SYNTHDATA_H_
