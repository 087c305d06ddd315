// condctc/synthdata.cc

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

#include "condctc/synthdata.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace condctc {

namespace {

constexpr char kFeatureMagic[4] = {'C', 'F', 'C', 'T'};
constexpr uint32_t kFeatureVersion = 1;
// Sanity bound on T and D; a header past this is treated as corrupt.
constexpr uint32_t kMaxDim = 1u << 24;

// Code-switched utterances alternate 2-4 language segments of 2-5 tokens;
// monolingual utterances draw the same segment shape from one language so
// utterance lengths match across categories.
constexpr int kMinSegments = 2, kMaxSegments = 4;
constexpr int kMinSegTokens = 2, kMaxSegTokens = 5;

// Token sequences follow a seeded per-language Markov chain (geometric row
// profile with this decay), so transcripts carry the kind of token-level
// predictability an external LM can exploit. Segments open with a uniform
// draw.
constexpr double kTransitionDecay = 0.4;

void PutLe32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::string MakeId(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%04d", stem, i);
  return std::string(buf);
}

}  // namespace

const char* CategoryName(Category c) {
  switch (c) {
    case Category::kMonoL1: return "MONO_L1";
    case Category::kMonoL2: return "MONO_L2";
    default: return "CS";
  }
}

Category ParseCategory(const std::string& name) {
  if (name == "MONO_L1") return Category::kMonoL1;
  if (name == "MONO_L2") return Category::kMonoL2;
  if (name == "CS") return Category::kCs;
  throw DataError("unknown utterance category: '" + name + "'");
}

void GenConfig::Validate() const {
  if (n_l1 < 1 || n_l2 < 1) throw ConfigError("token counts must be positive");
  if (n_l1 != n_l2)
    throw ConfigError("cross-lingual pairing requires n_l1 == n_l2");
  if (feat_dim < 1) throw ConfigError("feature dim must be positive");
  if (frames_min < 1 || frames_max < frames_min)
    throw ConfigError("frames_per_token range is empty");
  if (noise_sigma < 0.0 || pair_delta < 0.0)
    throw ConfigError("noise_sigma and pair_delta must be non-negative");
  if (train_mono_per_lang < 0 || train_cs < 0 || dev_per_category < 0)
    throw ConfigError("corpus counts must be non-negative");
}

Prototypes MakePrototypes(const GenConfig& cfg, Rng* rng) {
  Prototypes p;
  p.l1 = Matrix(cfg.n_l1, cfg.feat_dim);
  p.l2 = Matrix(cfg.n_l2, cfg.feat_dim);
  for (int i = 0; i < cfg.n_l1; ++i)
    for (int d = 0; d < cfg.feat_dim; ++d) p.l1(i, d) = rng->Gaussian();
  for (int i = 0; i < cfg.n_l2; ++i) {
    // Unit offset direction; the paired L2 prototype sits pair_delta away.
    std::vector<double> u(cfg.feat_dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int d = 0; d < cfg.feat_dim; ++d) {
        u[d] = rng->Gaussian();
        norm += u[d] * u[d];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (int d = 0; d < cfg.feat_dim; ++d)
      p.l2(i, d) = p.l1(i, d) + cfg.pair_delta * u[d] / norm;
  }
  return p;
}

namespace {

// Row-stochastic next-token tables, one per language.
struct TokenChains {
  Matrix l1, l2;
};

Matrix MakeChain(int n, Rng* rng) {
  Matrix m(n, n);
  std::vector<int> perm(n);
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng->UniformInt(0, i)]);
    double w = 1.0, total = 0.0;
    for (int i = 0; i < n; ++i, w *= kTransitionDecay) {
      m(r, perm[i]) = w;
      total += w;
    }
    for (int c = 0; c < n; ++c) m(r, c) /= total;
  }
  return m;
}

TokenChains MakeTokenChains(const GenConfig& cfg, Rng* rng) {
  TokenChains chains;
  chains.l1 = MakeChain(cfg.n_l1, rng);
  chains.l2 = MakeChain(cfg.n_l2, rng);
  return chains;
}

int SampleRow(const Matrix& chain, int row, Rng* rng) {
  double u = rng->UniformDouble(), acc = 0.0;
  for (int c = 0; c < chain.cols; ++c) {
    acc += chain(row, c);
    if (u < acc) return c;
  }
  return chain.cols - 1;
}

// Markov segment: uniform start (or continue from *state), chained next
// tokens. *state carries the chain position across segments of the same
// language run.
LabelSeq SampleSegmentTokens(Rng* rng, const Matrix& chain, int first_id,
                             int n_tokens, int count, int* state) {
  LabelSeq out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int tok = *state < 0 ? rng->UniformInt(0, n_tokens - 1)
                         : SampleRow(chain, *state, rng);
    *state = tok;
    out.push_back(first_id + tok);
  }
  return out;
}

Utterance RenderUtterance(const GenConfig& cfg, const Prototypes& proto,
                          const Vocab& v, Rng* rng, std::string id,
                          Category cat, LabelSeq tokens) {
  Utterance u;
  u.id = std::move(id);
  u.category = cat;
  u.transcript = std::move(tokens);
  std::vector<int> frames_per(u.transcript.size());
  int total = 0;
  for (size_t i = 0; i < u.transcript.size(); ++i) {
    frames_per[i] = rng->UniformInt(cfg.frames_min, cfg.frames_max);
    total += frames_per[i];
  }
  u.feats = FeatureSeq(total, cfg.feat_dim);
  int t = 0;
  for (size_t i = 0; i < u.transcript.size(); ++i) {
    int32_t id_full = u.transcript[i];
    bool is_l1 = v.LangOf(id_full) == Lang::kL1;
    int row = is_l1 ? id_full - Vocab::kFirstToken
                    : id_full - Vocab::kFirstToken - v.NumL1();
    const Matrix& m = is_l1 ? proto.l1 : proto.l2;
    u.spans.push_back({t, t + frames_per[i]});
    for (int r = 0; r < frames_per[i]; ++r, ++t) {
      for (int d = 0; d < cfg.feat_dim; ++d)
        u.feats(t, d) = static_cast<float>(m(row, d) +
                                           cfg.noise_sigma * rng->Gaussian());
    }
  }
  return u;
}

LabelSeq SampleMonoTokens(const GenConfig& cfg, const TokenChains& chains,
                          Rng* rng, Lang lang) {
  int first = lang == Lang::kL1 ? Vocab::kFirstToken
                                : Vocab::kFirstToken + cfg.n_l1;
  int n = lang == Lang::kL1 ? cfg.n_l1 : cfg.n_l2;
  const Matrix& chain = lang == Lang::kL1 ? chains.l1 : chains.l2;
  int n_seg = rng->UniformInt(kMinSegments, kMaxSegments);
  LabelSeq out;
  int state = -1;  // one chain run across the whole utterance
  for (int s = 0; s < n_seg; ++s) {
    LabelSeq seg = SampleSegmentTokens(
        rng, chain, first, n, rng->UniformInt(kMinSegTokens, kMaxSegTokens),
        &state);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

LabelSeq SampleCsTokens(const GenConfig& cfg, const TokenChains& chains,
                        Rng* rng) {
  int n_seg = rng->UniformInt(kMinSegments, kMaxSegments);
  Lang lang = rng->UniformInt(0, 1) == 0 ? Lang::kL1 : Lang::kL2;
  LabelSeq out;
  for (int s = 0; s < n_seg; ++s) {
    int first = lang == Lang::kL1 ? Vocab::kFirstToken
                                  : Vocab::kFirstToken + cfg.n_l1;
    int n = lang == Lang::kL1 ? cfg.n_l1 : cfg.n_l2;
    const Matrix& chain = lang == Lang::kL1 ? chains.l1 : chains.l2;
    int state = -1;  // language switches restart the chain
    LabelSeq seg = SampleSegmentTokens(
        rng, chain, first, n, rng->UniformInt(kMinSegTokens, kMaxSegTokens),
        &state);
    out.insert(out.end(), seg.begin(), seg.end());
    lang = lang == Lang::kL1 ? Lang::kL2 : Lang::kL1;
  }
  return out;
}

}  // namespace

Corpus GenerateCorpus(const GenConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.seed);
  Prototypes proto = MakePrototypes(cfg, &rng);

  std::vector<std::string> l1_toks, l2_toks;
  for (int i = 1; i <= cfg.n_l1; ++i) l1_toks.push_back("m" + std::to_string(i));
  for (int i = 1; i <= cfg.n_l2; ++i) l2_toks.push_back("e" + std::to_string(i));

  Corpus corpus;
  corpus.vocab = Vocab::Build(l1_toks, l2_toks);
  const Vocab& v = corpus.vocab;
  TokenChains chains = MakeTokenChains(cfg, &rng);

  for (int i = 0; i < cfg.train_mono_per_lang; ++i)
    corpus.train_mono.push_back(RenderUtterance(
        cfg, proto, v, &rng, MakeId("trm-l1", i), Category::kMonoL1,
        SampleMonoTokens(cfg, chains, &rng, Lang::kL1)));
  for (int i = 0; i < cfg.train_mono_per_lang; ++i)
    corpus.train_mono.push_back(RenderUtterance(
        cfg, proto, v, &rng, MakeId("trm-l2", i), Category::kMonoL2,
        SampleMonoTokens(cfg, chains, &rng, Lang::kL2)));
  for (int i = 0; i < cfg.train_cs; ++i)
    corpus.train_cs.push_back(
        RenderUtterance(cfg, proto, v, &rng, MakeId("trcs", i), Category::kCs,
                        SampleCsTokens(cfg, chains, &rng)));
  for (int i = 0; i < cfg.dev_per_category; ++i)
    corpus.dev.push_back(RenderUtterance(
        cfg, proto, v, &rng, MakeId("dev-l1", i), Category::kMonoL1,
        SampleMonoTokens(cfg, chains, &rng, Lang::kL1)));
  for (int i = 0; i < cfg.dev_per_category; ++i)
    corpus.dev.push_back(RenderUtterance(
        cfg, proto, v, &rng, MakeId("dev-l2", i), Category::kMonoL2,
        SampleMonoTokens(cfg, chains, &rng, Lang::kL2)));
  for (int i = 0; i < cfg.dev_per_category; ++i)
    corpus.dev.push_back(
        RenderUtterance(cfg, proto, v, &rng, MakeId("dev-cs", i), Category::kCs,
                        SampleCsTokens(cfg, chains, &rng)));
  return corpus;
}

void WriteFeatures(const FeatureSeq& f, const std::string& path) {
  for (float x : f.data)
    if (!std::isfinite(x)) throw DataError("non-finite feature value");
  AtomicWriteFile(path, [&](std::ostream& os) {
    os.write(kFeatureMagic, 4);
    PutLe32(os, kFeatureVersion);
    PutLe32(os, static_cast<uint32_t>(f.rows));
    PutLe32(os, static_cast<uint32_t>(f.cols));
    for (float x : f.data) {
      uint32_t bits;
      std::memcpy(&bits, &x, 4);
      PutLe32(os, bits);
    }
  });
}

FeatureSeq ReadFeatures(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file: " + path);
  auto get32 = [&](const char* what) -> uint32_t {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
      throw DataError(std::string("truncated feature file (") + what + "): " +
                      path);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
  };
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kFeatureMagic, 4) != 0)
    throw DataError("bad feature file magic: " + path);
  uint32_t version = get32("version");
  if (version != kFeatureVersion)
    throw DataError("unsupported feature file version: " + path);
  uint32_t t = get32("T"), d = get32("D");
  if (t > kMaxDim || d > kMaxDim || (t != 0 && d > kMaxDim / t))
    throw DataError("feature dimension overflow: " + path);
  FeatureSeq f(static_cast<int>(t), static_cast<int>(d));
  for (size_t i = 0; i < f.data.size(); ++i) {
    uint32_t bits = get32("payload");
    float x;
    std::memcpy(&x, &bits, 4);
    f.data[i] = x;
  }
  // Trailing bytes mean the header and payload disagree.
  char extra;
  if (is.read(&extra, 1))
    throw DataError("feature file has trailing bytes: " + path);
  return f;
}

void WriteManifest(const std::vector<Utterance>& utts, const Vocab& v,
                   const std::string& manifest_path) {
  AtomicWriteFile(manifest_path, [&](std::ostream& os) {
    for (const auto& u : utts) {
      os << u.id << '\t' << u.feature_path << '\t' << CategoryName(u.category)
         << '\t' << v.ToString(u.transcript) << "\n";
    }
  });
}

std::vector<Utterance> ReadManifest(const std::string& manifest_path,
                                    const Vocab& v, bool load_features) {
  std::ifstream is(manifest_path);
  if (!is) throw DataError("cannot open manifest: " + manifest_path);
  std::string base = DirName(manifest_path);
  std::vector<Utterance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() != 4)
      throw DataError("manifest line " + std::to_string(line_no) +
                      " has " + std::to_string(fields.size()) +
                      " fields (want 4): " + manifest_path);
    Utterance u;
    u.id = fields[0];
    u.feature_path = fields[1];
    u.category = ParseCategory(fields[2]);
    try {
      u.transcript = v.Parse(fields[3]);
    } catch (const DataError& e) {
      throw DataError("utterance '" + u.id + "': " + e.what());
    }
    // Category must agree with the languages present in the transcript.
    bool has_l1 = false, has_l2 = false;
    for (int32_t id : u.transcript) {
      has_l1 |= v.LangOf(id) == Lang::kL1;
      has_l2 |= v.LangOf(id) == Lang::kL2;
    }
    bool is_cs = has_l1 && has_l2;
    if (is_cs != (u.category == Category::kCs))
      throw DataError("utterance '" + u.id +
                      "': category does not match transcript languages");
    std::string full = u.feature_path;
    if (!full.empty() && full[0] != '/') full = JoinPath(base, full);
    if (!FileExists(full))
      throw DataError("utterance '" + u.id + "': missing feature file " + full);
    if (load_features) {
      u.feats = ReadFeatures(full);
      if (u.feats.cols == 0 || u.feats.rows == 0)
        throw DataError("utterance '" + u.id + "': empty feature matrix");
    }
    out.push_back(std::move(u));
  }
  return out;
}

void WriteCorpus(const Corpus& corpus, const GenConfig& cfg,
                 const std::string& out_dir) {
  MakeDirs(JoinPath(out_dir, "feats"));
  corpus.vocab.Write(JoinPath(out_dir, "vocab.txt"));
  auto write_set = [&](const std::vector<Utterance>& utts,
                       const std::string& name) {
    std::vector<Utterance> with_paths;
    with_paths.reserve(utts.size());
    for (const auto& u : utts) {
      Utterance copy;
      copy.id = u.id;
      copy.category = u.category;
      copy.transcript = u.transcript;
      copy.feature_path = "feats/" + u.id + ".feat";
      WriteFeatures(u.feats, JoinPath(out_dir, copy.feature_path));
      with_paths.push_back(std::move(copy));
    }
    WriteManifest(with_paths, corpus.vocab, JoinPath(out_dir, name));
  };
  write_set(corpus.train_mono, "train_mono.tsv");
  write_set(corpus.train_cs, "train_cs.tsv");
  write_set(corpus.dev, "dev.tsv");
  AtomicWriteFile(JoinPath(out_dir, "gen.conf"), [&](std::ostream& os) {
    os << "seed=" << cfg.seed << "\n"
       << "n-l1=" << cfg.n_l1 << "\n"
       << "n-l2=" << cfg.n_l2 << "\n"
       << "feat-dim=" << cfg.feat_dim << "\n"
       << "frames-min=" << cfg.frames_min << "\n"
       << "frames-max=" << cfg.frames_max << "\n"
       << "noise-sigma=" << FormatFull(cfg.noise_sigma) << "\n"
       << "pair-delta=" << FormatFull(cfg.pair_delta) << "\n"
       << "train-mono=" << cfg.train_mono_per_lang << "\n"
       << "train-cs=" << cfg.train_cs << "\n"
       << "dev-per-category=" << cfg.dev_per_category << "\n";
  });
}

Corpus ReadCorpusDir(const std::string& dir, bool load_features) {
  Corpus c;
  c.vocab = Vocab::Read(JoinPath(dir, "vocab.txt"));
  c.train_mono = ReadManifest(JoinPath(dir, "train_mono.tsv"), c.vocab,
                              load_features);
  c.train_cs = ReadManifest(JoinPath(dir, "train_cs.tsv"), c.vocab,
                            load_features);
  c.dev = ReadManifest(JoinPath(dir, "dev.tsv"), c.vocab, load_features);
  return c;
}

}  // namespace condctc
