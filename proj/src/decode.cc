// condctc/decode.cc

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

#include "condctc/decode.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace condctc {

namespace {
constexpr double kFloorProb = 1e-10;
}

void MergeWeights::Validate() const {
  if (bi < 0.0 || l1 < 0.0 || l2 < 0.0)
    throw ConfigError("merge weights must be non-negative");
  if (std::fabs(bi + l1 + l2 - 1.0) > 1e-9)
    throw ConfigError("merge weights must sum to 1");
}

Matrix ProjectMono(const Matrix& pg_mono, const MonoView& view,
                   int full_size) {
  if (pg_mono.cols != view.size)
    throw ComputeError("mono posteriorgram width does not match the view");
  const double floor_lp = std::log(kFloorProb);
  Matrix out(pg_mono.rows, full_size, floor_lp);
  for (int t = 0; t < pg_mono.rows; ++t) {
    double* row = out.Row(t);
    for (int m = 0; m < view.size; ++m) row[view.ToFull(m)] = pg_mono(t, m);
    double lse = LogSumExp(row, full_size);
    for (int k = 0; k < full_size; ++k) row[k] -= lse;
  }
  return out;
}

Matrix MergePosteriors(const Matrix* pg_bi, const Matrix* pg_l1,
                       const Matrix* pg_l2, const MonoView& view_l1,
                       const MonoView& view_l2, int full_size,
                       const MergeWeights& w) {
  w.Validate();
  if ((pg_bi == nullptr) != (w.bi == 0.0) ||
      (pg_l1 == nullptr) != (w.l1 == 0.0) ||
      (pg_l2 == nullptr) != (w.l2 == 0.0))
    throw ConfigError("merge weights must be zero exactly for absent sources");

  int T = -1;
  for (const Matrix* pg : {pg_bi, pg_l1, pg_l2}) {
    if (!pg) continue;
    if (T < 0) T = pg->rows;
    if (pg->rows != T)
      throw ComputeError("posteriorgram frame counts differ in merge");
  }
  if (T < 0) throw ConfigError("merge needs at least one source");
  if (pg_bi && pg_bi->cols != full_size)
    throw ComputeError("bilingual posteriorgram width mismatch");
  if (pg_l1 && pg_l1->cols != view_l1.size)
    throw ComputeError("L1 posteriorgram width mismatch");
  if (pg_l2 && pg_l2->cols != view_l2.size)
    throw ComputeError("L2 posteriorgram width mismatch");

  // Per token, a weighted geometric mean over the sources whose support
  // contains it, with the weights renormalized to that support. A flat
  // gamma-weighted sum would charge every real token the foreign-view floor
  // while blank (shared by all views) pays nothing, and the decoder would
  // emit only blanks. Tokens outside every enabled support get the floor.
  const double floor_lp = std::log(kFloorProb);
  Matrix out(T, full_size, 0.0);
  for (int t = 0; t < T; ++t) {
    double* row = out.Row(t);
    for (int k = 0; k < full_size; ++k) {
      double acc = 0.0, wsum = 0.0;
      if (pg_bi) {
        acc += w.bi * (*pg_bi)(t, k);
        wsum += w.bi;
      }
      if (pg_l1) {
        int m = view_l1.ToMono(k);
        if (m >= 0) {
          acc += w.l1 * (*pg_l1)(t, m);
          wsum += w.l1;
        }
      }
      if (pg_l2) {
        int m = view_l2.ToMono(k);
        if (m >= 0) {
          acc += w.l2 * (*pg_l2)(t, m);
          wsum += w.l2;
        }
      }
      row[k] = wsum > 0.0 ? acc / wsum : floor_lp;
    }
    double lse = LogSumExp(row, full_size);
    for (int k = 0; k < full_size; ++k) row[k] -= lse;
  }
  return out;
}

MergeWeights DecodeConfig::EffectiveWeights() const {
  weights.Validate();
  MergeWeights w = weights;
  if (!use_bi) w.bi = 0.0;
  if (!use_l1) w.l1 = 0.0;
  if (!use_l2) w.l2 = 0.0;
  double sum = w.bi + w.l1 + w.l2;
  if (sum <= 0.0)
    throw ConfigError("decoding needs at least one CTC source with weight");
  w.bi /= sum;
  w.l1 /= sum;
  w.l2 /= sum;
  return w;
}

void DecodeConfig::Validate() const {
  if (beam < 1) throw ConfigError("beam width must be >= 1");
  if (lambda2 < 0.0 || lambda2 > 1.0)
    throw ConfigError("lambda2 must lie in [0, 1]");
  if (nbest < 1) throw ConfigError("nbest must be >= 1");
  weights.Validate();
}

namespace {

struct Hyp {
  double lp_b = kLogZero;   // prefix probability, paths ending in blank
  double lp_nb = kLogZero;  // paths ending in the prefix's last token
  double lm_lp = 0.0;
  LmState lm_state;
  double Total() const { return LogAdd(lp_b, lp_nb); }
};

using Beam = std::map<LabelSeq, Hyp>;

double PruneScore(const Hyp& h, double lambda2, bool use_lm) {
  double ctc = h.Total();
  return use_lm ? lambda2 * ctc + (1.0 - lambda2) * h.lm_lp : ctc;
}

}  // namespace

std::vector<ScoredHyp> BeamSearch(const Matrix& logpg, const Vocab& v,
                                  const NGramLm* lm, const DecodeConfig& cfg) {
  cfg.Validate();
  if (logpg.cols != v.Size())
    throw ComputeError("posteriorgram width does not match the vocabulary");
  if (cfg.use_lm && lm == nullptr)
    throw ConfigError("decoding with LM fusion requires a language model");
  const bool use_lm = cfg.use_lm && lm != nullptr;
  const int T = logpg.rows, V = logpg.cols;

  Beam beam;
  {
    Hyp init;
    init.lp_b = 0.0;  // empty prefix, all-blank so far, probability 1
    beam.emplace(LabelSeq{}, init);
  }

  for (int t = 0; t < T; ++t) {
    const double* row = logpg.Row(t);
    Beam next;
    for (const auto& [prefix, h] : beam) {
      const int32_t last = prefix.empty() ? -1 : prefix.back();
      // Blank keeps the prefix; so does repeating its last token.
      {
        Hyp& n = next.try_emplace(prefix).first->second;
        n.lm_lp = h.lm_lp;
        n.lm_state = h.lm_state;
        n.lp_b = LogAdd(n.lp_b, h.Total() + row[Vocab::kBlankId]);
        if (last >= 0) n.lp_nb = LogAdd(n.lp_nb, h.lp_nb + row[last]);
      }
      // Extension with every real token; <NULL> is never proposed.
      for (int32_t k = Vocab::kFirstToken; k < V; ++k) {
        LabelSeq ext = prefix;
        ext.push_back(k);
        auto [it, inserted] = next.try_emplace(std::move(ext));
        Hyp& n = it->second;
        if (inserted) {
          if (use_lm) {
            auto [lp, state] = lm->ScoreStep(h.lm_state, lm->ToLmId(k));
            n.lm_lp = h.lm_lp + lp;
            n.lm_state = std::move(state);
          }
        }
        // A repeated token needs an intervening blank.
        double base = k == last ? h.lp_b : h.Total();
        n.lp_nb = LogAdd(n.lp_nb, base + row[k]);
      }
    }
    if (static_cast<int>(next.size()) > cfg.beam) {
      std::vector<Beam::iterator> order;
      order.reserve(next.size());
      for (auto it = next.begin(); it != next.end(); ++it) order.push_back(it);
      std::sort(order.begin(), order.end(),
                [&](const Beam::iterator& a, const Beam::iterator& b) {
                  double sa = PruneScore(a->second, cfg.lambda2, use_lm);
                  double sb = PruneScore(b->second, cfg.lambda2, use_lm);
                  if (sa != sb) return sa > sb;
                  return a->first < b->first;
                });
      Beam pruned;
      for (int i = 0; i < cfg.beam; ++i)
        pruned.insert(*order[static_cast<size_t>(i)]);
      next = std::move(pruned);
    }
    beam = std::move(next);
  }

  std::vector<ScoredHyp> out;
  out.reserve(beam.size());
  for (const auto& [prefix, h] : beam) {
    ScoredHyp s;
    s.labels = prefix;
    s.ctc_logp = h.Total();
    if (use_lm) {
      s.lm_logp = h.lm_lp + lm->ScoreStep(h.lm_state, lm->EosId()).first;
      s.score = cfg.lambda2 * s.ctc_logp + (1.0 - cfg.lambda2) * s.lm_logp;
    } else {
      s.score = s.ctc_logp;
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const ScoredHyp& a, const ScoredHyp& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.labels < b.labels;
  });
  if (static_cast<int>(out.size()) > cfg.nbest) out.resize(cfg.nbest);
  return out;
}

const char* LidName(LidDecision d) {
  switch (d) {
    case LidDecision::kL1: return "L1";
    case LidDecision::kL2: return "L2";
    case LidDecision::kBlank: return "BLANK";
    default: return "AMBIGUOUS";
  }
}

LidResult FrameLid(const Matrix& pg_l1, const Matrix& pg_l2) {
  if (pg_l1.rows != pg_l2.rows)
    throw ComputeError("frame LID needs equal-length posteriorgrams");
  std::vector<int32_t> a1 = GreedyDecode(pg_l1);
  std::vector<int32_t> a2 = GreedyDecode(pg_l2);
  LidResult res;
  res.frames.resize(pg_l1.rows);
  for (int t = 0; t < pg_l1.rows; ++t) {
    auto real = [](int32_t k) { return k >= Vocab::kFirstToken; };
    auto silent = [](int32_t k) {
      return k == Vocab::kBlankId || k == Vocab::kNullId;
    };
    LidDecision d;
    if (real(a1[t]) && silent(a2[t])) {
      d = LidDecision::kL1;
    } else if (real(a2[t]) && silent(a1[t])) {
      d = LidDecision::kL2;
    } else if (a1[t] == Vocab::kBlankId && a2[t] == Vocab::kBlankId) {
      d = LidDecision::kBlank;
    } else {
      d = LidDecision::kAmbiguous;
    }
    res.frames[t] = d;
    res.counts[static_cast<size_t>(d)] += 1;
    if (!res.spans.empty() && res.spans.back().decision == d) {
      res.spans.back().end = t + 1;
    } else {
      res.spans.push_back({t, t + 1, d});
    }
  }
  return res;
}

std::vector<ScoredHyp> DecodeConditional(const ConditionalModel& m,
                                         const FeatureSeq& x, const NGramLm* lm,
                                         const DecodeConfig& cfg) {
  if (cfg.use_lm && lm == nullptr)
    throw ConfigError("decoding with LM fusion requires a language model");
  CondForward f = ForwardConditional(m, x);
  MergeWeights w = cfg.EffectiveWeights();
  Matrix merged = MergePosteriors(
      cfg.use_bi ? &f.pg_bi : nullptr, cfg.use_l1 ? &f.pg_l1 : nullptr,
      cfg.use_l2 ? &f.pg_l2 : nullptr, m.view_l1, m.view_l2, m.vocab.Size(), w);
  return BeamSearch(merged, m.vocab, cfg.use_lm ? lm : nullptr, cfg);
}

std::vector<ScoredHyp> DecodeVanilla(const VanillaModel& m, const FeatureSeq& x,
                                     const NGramLm* lm,
                                     const DecodeConfig& cfg) {
  if (m.space != OutputSpace::kBilingual)
    throw ConfigError("beam decoding expects the bilingual vanilla model");
  if (cfg.use_lm && lm == nullptr)
    throw ConfigError("decoding with LM fusion requires a language model");
  Matrix pg = ForwardVanilla(m, x);
  return BeamSearch(pg, m.vocab, cfg.use_lm ? lm : nullptr, cfg);
}

void WriteDecodeOutput(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<ScoredHyp>>>& hyps,
    const Vocab& v, int nbest) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    for (const auto& [id, list] : hyps) {
      int n = std::min<int>(nbest, static_cast<int>(list.size()));
      for (int r = 0; r < n; ++r) {
        os << id << '\t';
        if (nbest > 1) os << (r + 1) << '\t';
        os << FormatFull(list[r].score) << '\t' << v.ToString(list[r].labels)
           << "\n";
      }
    }
  });
}

std::vector<std::pair<std::string, LabelSeq>> ReadHypFile(
    const std::string& path, const Vocab& v) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open hypothesis file: " + path);
  std::vector<std::pair<std::string, LabelSeq>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw DataError("bad hypothesis line: " + line);
    bool has_rank = fields.size() == 4;
    if (has_rank && fields[1] != "1") continue;  // keep top-1 only
    out.emplace_back(fields[0], v.Parse(fields.back()));
  }
  return out;
}

}  // namespace condctc
