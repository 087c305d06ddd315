// condctc/harness.cc

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

#include "condctc/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "condctc/targets.h"

namespace condctc {

EditCounts Mer(const LabelSeq& ref, const LabelSeq& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  EditCounts out;
  out.ref_len = static_cast<int64_t>(n);
  // Full cost table with a backtrace to split errors by type. The totals do
  // not depend on how ties are broken.
  std::vector<std::vector<int32_t>> d(n + 1, std::vector<int32_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int32_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int32_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int32_t sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int32_t del = d[i - 1][j] + 1;
      int32_t ins = d[i][j - 1] + 1;
      d[i][j] = std::min({sub, del, ins});
    }
  }
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) out.sub += 1;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      out.del += 1;
      --i;
    } else {
      out.ins += 1;
      --j;
    }
  }
  return out;
}

MerReport ScoreCorpus(const std::vector<LabelSeq>& refs,
                      const std::vector<LabelSeq>& hyps,
                      const std::vector<Category>& cats) {
  if (refs.size() != hyps.size() || refs.size() != cats.size())
    throw DataError("score: refs, hyps and categories must be id-aligned");
  MerReport rep;
  for (size_t i = 0; i < refs.size(); ++i) {
    EditCounts c = Mer(refs[i], hyps[i]);
    rep.full += c;
    switch (cats[i]) {
      case Category::kCs: rep.cs += c; break;
      case Category::kMonoL1: rep.mono_l1 += c; rep.mono += c; break;
      case Category::kMonoL2: rep.mono_l2 += c; rep.mono += c; break;
    }
  }
  return rep;
}

const char* ConditionName(Condition c) {
  switch (c) {
    case Condition::kA: return "A";
    case Condition::kB: return "B";
    default: return "C";
  }
}

Condition ParseCondition(const std::string& name) {
  if (name == "A" || name == "a") return Condition::kA;
  if (name == "B" || name == "b") return Condition::kB;
  if (name == "C" || name == "c") return Condition::kC;
  throw ConfigError("unknown condition: '" + name + "'");
}

const char* ModelKindName(ModelKind k) {
  switch (k) {
    case ModelKind::kVanilla: return "vanilla";
    case ModelKind::kCondSeg: return "cond-seg";
    default: return "cond-tra";
  }
}

ModelKind ParseModelKind(const std::string& name) {
  if (name == "vanilla") return ModelKind::kVanilla;
  if (name == "cond-seg") return ModelKind::kCondSeg;
  if (name == "cond-tra") return ModelKind::kCondTra;
  throw ConfigError("unknown model kind: '" + name + "'");
}

SplitRates RatesOf(const MerReport& r) {
  return {r.full.Rate(), r.cs.Rate(), r.mono_l1.Rate(), r.mono_l2.Rate(),
          r.mono.Rate()};
}

std::string FormatRate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * rate);
  return std::string(buf);
}

namespace {

std::string FracTag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", f);
  return std::string(buf);
}

std::string SourcesString(ModelKind kind, const DecodeConfig& dec) {
  if (kind == ModelKind::kVanilla)
    return dec.use_lm ? "ctc+lm" : "ctc";
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += name;
  };
  add(dec.use_bi, "bi");
  add(dec.use_l1, "l1");
  add(dec.use_l2, "l2");
  add(dec.use_lm, "lm");
  return s;
}

void WriteLossCurve(const std::string& path, const TrainStats& stats) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    os << "epoch\tloss\n";
    for (size_t e = 0; e < stats.epoch_loss.size(); ++e)
      os << (e + 1) << '\t' << FormatFull(stats.epoch_loss[e]) << "\n";
  });
}

// Owns the corpus, LM/pseudo-labeler/model caches under work_dir, and the
// per-cell train/decode/score machinery. Cells are phased so that parallel
// work never races on a shared cache file.
class Runner {
 public:
  explicit Runner(const ExperimentConfig& cfg) : cfg_(cfg) {
    if (cfg.data_dir.empty()) throw ConfigError("data dir is required");
    if (cfg.work_dir.empty()) throw ConfigError("work dir is required");
    corpus_ = ReadCorpusDir(cfg.data_dir);
    if (corpus_.train_mono.empty())
      throw DataError("corpus has no monolingual training data");
    if (corpus_.dev.empty()) throw DataError("corpus has no dev data");
    feat_dim_ = corpus_.train_mono[0].feats.cols;
    for (const auto& u : corpus_.train_mono)
      (u.category == Category::kMonoL1 ? mono_l1_ : mono_l2_).push_back(&u);
    threads_ = cfg.threads > 0
                   ? cfg.threads
                   : static_cast<int>(std::thread::hardware_concurrency());
    if (threads_ < 1) threads_ = 1;
    for (const char* sub : {"lm", "pl", "models", "targets", "hyps"})
      MakeDirs(JoinPath(cfg.work_dir, sub));
  }

  const Corpus& corpus() const { return corpus_; }
  int threads() const { return threads_; }

  // LM over the unpaired transcripts: monolingual text always, CS text when
  // with_cs. Cached as a file plus an id manifest of its training corpus.
  const NGramLm& EnsureLm(bool with_cs) {
    std::optional<NGramLm>& slot = with_cs ? lm_csmono_ : lm_mono_;
    if (slot.has_value()) return *slot;
    std::string name = with_cs ? "csmono" : "mono";
    std::string path = JoinPath(cfg_.work_dir, "lm/" + name + ".txt");
    if (FileExists(path)) {
      slot = NGramLm::Read(path, corpus_.vocab);
      return *slot;
    }
    std::vector<LabelSeq> text;
    std::vector<std::string> ids;
    for (const auto& u : corpus_.train_mono) {
      text.push_back(u.transcript);
      ids.push_back(u.id);
    }
    if (with_cs) {
      for (const auto& u : corpus_.train_cs) {
        text.push_back(u.transcript);
        ids.push_back(u.id);
      }
    }
    slot = NGramLm::Train(text, corpus_.vocab, cfg_.lm_order, cfg_.lm_k);
    slot->Write(path);
    AtomicWriteFile(JoinPath(cfg_.work_dir, "lm/" + name + ".sources.txt"),
                    [&](std::ostream& os) {
                      for (const auto& id : ids) os << id << "\n";
                    });
    return *slot;
  }

  // Phase: train any missing monolingual pseudo-labelers, two per seed.
  void EnsurePseudoLabelers(const std::vector<uint64_t>& seeds) {
    struct Task {
      Lang lang;
      uint64_t seed;
    };
    std::vector<Task> tasks;
    for (uint64_t seed : seeds)
      for (Lang lang : {Lang::kL1, Lang::kL2})
        if (!FileExists(PlPath(lang, seed))) tasks.push_back({lang, seed});
    ParallelFor(static_cast<int>(tasks.size()), threads_, [&](int i) {
      TrainPseudoLabeler(tasks[static_cast<size_t>(i)].lang,
                         tasks[static_cast<size_t>(i)].seed);
    });
  }

  // Phase: train (or find cached) the cell's model; returns checkpoint path.
  std::string EnsureModel(ModelKind kind, double fraction, uint64_t seed) {
    std::string tag = "f" + FracTag(fraction) + "_" + ModelKindName(kind) +
                      "_s" + std::to_string(seed);
    std::string path = JoinPath(cfg_.work_dir, "models/" + tag + ".ckpt");
    if (FileExists(path)) return path;

    std::vector<const Utterance*> train_set = TrainSet(fraction);
    TrainConfig tc = cfg_.train;
    tc.seed = seed;
    tc.threads = 1;  // cells are parallel; keep each cell serial

    if (kind == ModelKind::kVanilla) {
      VanillaModel m = InitVanilla(corpus_.vocab, OutputSpace::kBilingual,
                                   feat_dim_, seed, kHidden);
      std::vector<VanillaExample> data;
      for (const Utterance* u : train_set) data.push_back({u, u->transcript});
      TrainStats stats = TrainVanilla(&m, data, tc);
      WriteLossCurve(JoinPath(cfg_.work_dir, "models/" + tag + ".loss.tsv"),
                     stats);
      SaveVanilla(m, path, tc);
      return path;
    }

    Scheme scheme = kind == ModelKind::kCondSeg ? Scheme::kSegmentation
                                                : Scheme::kTransliteration;
    tc.scheme = scheme;
    std::vector<UtteranceTargets> targets;
    TargetReport report;
    if (scheme == Scheme::kSegmentation) {
      targets = MakeTrainingTargets(train_set, scheme, corpus_.vocab, nullptr,
                                    nullptr, &report);
    } else {
      VanillaModel pl1 = LoadVanilla(PlPath(Lang::kL1, seed), corpus_.vocab);
      VanillaModel pl2 = LoadVanilla(PlPath(Lang::kL2, seed), corpus_.vocab);
      MonoPgFn f1 = MakeMonoPgFn(pl1);
      MonoPgFn f2 = MakeMonoPgFn(pl2);
      targets = MakeTrainingTargets(train_set, scheme, corpus_.vocab, &f1, &f2,
                                    &report);
    }
    WriteTargets(targets, corpus_.vocab,
                 JoinPath(cfg_.work_dir, "targets/" + tag + ".tsv"));
    if (!report.skipped_ids.empty() || report.empty_pseudolabels > 0 ||
        report.empty_segments > 0) {
      AtomicWriteFile(
          JoinPath(cfg_.work_dir, "targets/" + tag + ".report.txt"),
          [&](std::ostream& os) {
            os << "empty_pseudolabels\t" << report.empty_pseudolabels << "\n";
            os << "empty_segments\t" << report.empty_segments << "\n";
            for (const auto& id : report.skipped_ids)
              os << "skipped\t" << id << "\n";
          });
    }

    std::map<std::string, const Utterance*> by_id;
    for (const Utterance* u : train_set) by_id[u->id] = u;
    std::vector<TrainExample> data;
    data.reserve(targets.size());
    for (const auto& t : targets) data.push_back({by_id.at(t.id), t.pair});

    ConditionalModel m = InitConditional(corpus_.vocab, feat_dim_, seed,
                                         kHidden);
    TrainStats stats = TrainConditional(&m, data, tc);
    WriteLossCurve(JoinPath(cfg_.work_dir, "models/" + tag + ".loss.tsv"),
                   stats);
    SaveConditional(m, path, tc);
    return path;
  }

  MerReport DecodeAndScore(ModelKind kind, const std::string& ckpt,
                           const NGramLm& lm, const DecodeConfig& dec,
                           const std::string& hyp_name) {
    const NGramLm* lm_ptr = dec.use_lm ? &lm : nullptr;
    std::vector<std::pair<std::string, std::vector<ScoredHyp>>> all;
    std::vector<LabelSeq> refs, hyps;
    std::vector<Category> cats;
    all.reserve(corpus_.dev.size());
    if (kind == ModelKind::kVanilla) {
      VanillaModel m = LoadVanilla(ckpt, corpus_.vocab);
      for (const auto& u : corpus_.dev)
        all.emplace_back(u.id, DecodeVanilla(m, u.feats, lm_ptr, dec));
    } else {
      ConditionalModel m = LoadConditional(ckpt, corpus_.vocab);
      for (const auto& u : corpus_.dev)
        all.emplace_back(u.id, DecodeConditional(m, u.feats, lm_ptr, dec));
    }
    for (size_t i = 0; i < corpus_.dev.size(); ++i) {
      refs.push_back(corpus_.dev[i].transcript);
      cats.push_back(corpus_.dev[i].category);
      hyps.push_back(all[i].second.empty() ? LabelSeq{}
                                           : all[i].second[0].labels);
    }
    WriteDecodeOutput(JoinPath(cfg_.work_dir, "hyps/" + hyp_name + ".tsv"),
                      all, corpus_.vocab, dec.nbest);
    return ScoreCorpus(refs, hyps, cats);
  }

  // Monolingual utterances plus the first ceil(fraction * |CS|) CS
  // utterances in corpus order.
  std::vector<const Utterance*> TrainSet(double fraction) const {
    if (fraction < 0.0 || fraction > 1.0)
      throw ConfigError("CS fraction must lie in [0, 1]");
    std::vector<const Utterance*> out;
    for (const auto& u : corpus_.train_mono) out.push_back(&u);
    size_t k = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(corpus_.train_cs.size())));
    k = std::min(k, corpus_.train_cs.size());
    for (size_t i = 0; i < k; ++i) out.push_back(&corpus_.train_cs[i]);
    return out;
  }

 private:
  static constexpr int kHidden = 128;

  std::string PlPath(Lang lang, uint64_t seed) const {
    return JoinPath(cfg_.work_dir,
                    "pl/s" + std::to_string(seed) + "_" +
                        (lang == Lang::kL1 ? "l1" : "l2") + ".ckpt");
  }

  void TrainPseudoLabeler(Lang lang, uint64_t seed) {
    const auto& utts = lang == Lang::kL1 ? mono_l1_ : mono_l2_;
    if (utts.empty())
      throw DataError("no monolingual training data for pseudo-labeler");
    OutputSpace space = lang == Lang::kL1 ? OutputSpace::kMonoL1
                                          : OutputSpace::kMonoL2;
    VanillaModel m = InitVanilla(corpus_.vocab, space, feat_dim_, seed,
                                 kHidden);
    std::vector<VanillaExample> data;
    for (const Utterance* u : utts) data.push_back({u, u->transcript});
    TrainConfig tc = cfg_.train;
    tc.seed = seed;
    tc.threads = 1;
    TrainStats stats = TrainVanilla(&m, data, tc);
    std::string path = PlPath(lang, seed);
    WriteLossCurve(path + ".loss.tsv", stats);
    SaveVanilla(m, path, tc);
  }

  const ExperimentConfig& cfg_;
  Corpus corpus_;
  std::vector<const Utterance*> mono_l1_, mono_l2_;
  int feat_dim_ = 0;
  int threads_ = 1;
  std::optional<NGramLm> lm_csmono_, lm_mono_;
};

ResultRow MeanRow(const std::vector<ResultRow>& seed_rows) {
  ResultRow mean = seed_rows.front();
  mean.seed = "mean";
  mean.counts = MerReport{};
  mean.rates = SplitRates{};
  for (const auto& r : seed_rows) {
    mean.counts.full += r.counts.full;
    mean.counts.cs += r.counts.cs;
    mean.counts.mono_l1 += r.counts.mono_l1;
    mean.counts.mono_l2 += r.counts.mono_l2;
    mean.counts.mono += r.counts.mono;
    mean.rates.full += r.rates.full;
    mean.rates.cs += r.rates.cs;
    mean.rates.mono_l1 += r.rates.mono_l1;
    mean.rates.mono_l2 += r.rates.mono_l2;
    mean.rates.mono += r.rates.mono;
  }
  double n = static_cast<double>(seed_rows.size());
  mean.rates.full /= n;
  mean.rates.cs /= n;
  mean.rates.mono_l1 /= n;
  mean.rates.mono_l2 /= n;
  mean.rates.mono /= n;
  return mean;
}

}  // namespace

std::vector<ResultRow> RunExperiment(const ExperimentConfig& cfg) {
  Runner runner(cfg);
  const bool lm_cs = cfg.condition != Condition::kC;
  const double fraction = cfg.condition == Condition::kA ? 1.0 : 0.0;
  const NGramLm& lm = runner.EnsureLm(lm_cs);

  bool any_tra = false;
  for (ModelKind k : cfg.models) any_tra |= k == ModelKind::kCondTra;
  if (any_tra) runner.EnsurePseudoLabelers(cfg.seeds);

  struct Cell {
    ModelKind kind;
    uint64_t seed;
    std::string ckpt;
    MerReport mer;
  };
  std::vector<Cell> cells;
  for (ModelKind kind : cfg.models)
    for (uint64_t seed : cfg.seeds) cells.push_back({kind, seed, "", {}});

  ParallelFor(static_cast<int>(cells.size()), runner.threads(), [&](int i) {
    Cell& c = cells[static_cast<size_t>(i)];
    c.ckpt = runner.EnsureModel(c.kind, fraction, c.seed);
  });
  ParallelFor(static_cast<int>(cells.size()), runner.threads(), [&](int i) {
    Cell& c = cells[static_cast<size_t>(i)];
    std::string hyp_name = std::string(ConditionName(cfg.condition)) + "_" +
                           ModelKindName(c.kind) + "_s" +
                           std::to_string(c.seed);
    c.mer = runner.DecodeAndScore(c.kind, c.ckpt, lm, cfg.decode, hyp_name);
  });

  std::vector<ResultRow> rows;
  size_t idx = 0;
  for (ModelKind kind : cfg.models) {
    std::vector<ResultRow> seed_rows;
    for (size_t s = 0; s < cfg.seeds.size(); ++s, ++idx) {
      const Cell& c = cells[idx];
      ResultRow row;
      row.model = ModelKindName(kind);
      row.condition = ConditionName(cfg.condition);
      row.seed = std::to_string(c.seed);
      row.sources = SourcesString(kind, cfg.decode);
      row.counts = c.mer;
      row.rates = RatesOf(c.mer);
      seed_rows.push_back(row);
    }
    rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
    rows.push_back(MeanRow(seed_rows));
  }
  return rows;
}

std::vector<ResultRow> RunAblation(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.condition = Condition::kB;
  Runner runner(base);
  const NGramLm& lm = runner.EnsureLm(/*with_cs=*/true);
  runner.EnsurePseudoLabelers(base.seeds);

  std::vector<std::string> ckpts(base.seeds.size());
  ParallelFor(static_cast<int>(base.seeds.size()), runner.threads(),
              [&](int i) {
                ckpts[static_cast<size_t>(i)] = runner.EnsureModel(
                    ModelKind::kCondTra, 0.0, base.seeds[static_cast<size_t>(i)]);
              });

  // Source subsets in the ablation-table order: full; -LM; -mono CTCs;
  // -mono CTCs -LM; -bi CTC; -bi CTC -LM.
  struct Subset {
    bool bi, l1, l2, lm;
  };
  const std::vector<Subset> subsets = {
      {true, true, true, true},  {true, true, true, false},
      {true, false, false, true}, {true, false, false, false},
      {false, true, true, true},  {false, true, true, false},
  };

  struct Cell {
    size_t subset, seed_idx;
    MerReport mer;
  };
  std::vector<Cell> cells;
  for (size_t sub = 0; sub < subsets.size(); ++sub)
    for (size_t s = 0; s < base.seeds.size(); ++s) cells.push_back({sub, s, {}});

  ParallelFor(static_cast<int>(cells.size()), runner.threads(), [&](int i) {
    Cell& c = cells[static_cast<size_t>(i)];
    DecodeConfig dec = base.decode;
    dec.use_bi = subsets[c.subset].bi;
    dec.use_l1 = subsets[c.subset].l1;
    dec.use_l2 = subsets[c.subset].l2;
    dec.use_lm = subsets[c.subset].lm;
    std::string hyp_name = "ablate_" +
                           SourcesString(ModelKind::kCondTra, dec) + "_s" +
                           std::to_string(base.seeds[c.seed_idx]);
    c.mer = runner.DecodeAndScore(ModelKind::kCondTra, ckpts[c.seed_idx], lm,
                                  dec, hyp_name);
  });

  std::vector<ResultRow> rows;
  size_t idx = 0;
  for (size_t sub = 0; sub < subsets.size(); ++sub) {
    DecodeConfig dec = base.decode;
    dec.use_bi = subsets[sub].bi;
    dec.use_l1 = subsets[sub].l1;
    dec.use_l2 = subsets[sub].l2;
    dec.use_lm = subsets[sub].lm;
    std::vector<ResultRow> seed_rows;
    for (size_t s = 0; s < base.seeds.size(); ++s, ++idx) {
      ResultRow row;
      row.model = ModelKindName(ModelKind::kCondTra);
      row.condition = "B";
      row.seed = std::to_string(base.seeds[s]);
      row.sources = SourcesString(ModelKind::kCondTra, dec);
      row.counts = cells[idx].mer;
      row.rates = RatesOf(cells[idx].mer);
      seed_rows.push_back(row);
    }
    rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
    rows.push_back(MeanRow(seed_rows));
  }
  return rows;
}

SweepResult RunDataSweep(const ExperimentConfig& cfg,
                         const std::vector<double>& fractions) {
  if (fractions.empty()) throw ConfigError("sweep needs at least one fraction");
  Runner runner(cfg);
  const NGramLm& lm = runner.EnsureLm(/*with_cs=*/true);
  runner.EnsurePseudoLabelers(cfg.seeds);

  const std::vector<ModelKind> schemes = {ModelKind::kCondSeg,
                                          ModelKind::kCondTra};
  struct Cell {
    double fraction;
    ModelKind kind;
    uint64_t seed;
    std::string ckpt;
    MerReport mer;
  };
  std::vector<Cell> cells;
  for (double f : fractions)
    for (ModelKind kind : schemes)
      for (uint64_t seed : cfg.seeds) cells.push_back({f, kind, seed, "", {}});

  ParallelFor(static_cast<int>(cells.size()), runner.threads(), [&](int i) {
    Cell& c = cells[static_cast<size_t>(i)];
    c.ckpt = runner.EnsureModel(c.kind, c.fraction, c.seed);
  });
  ParallelFor(static_cast<int>(cells.size()), runner.threads(), [&](int i) {
    Cell& c = cells[static_cast<size_t>(i)];
    std::string hyp_name = "sweep_f" + FracTag(c.fraction) + "_" +
                           ModelKindName(c.kind) + "_s" +
                           std::to_string(c.seed);
    c.mer = runner.DecodeAndScore(c.kind, c.ckpt, lm, cfg.decode, hyp_name);
  });

  SweepResult result;
  size_t idx = 0;
  std::map<std::pair<double, ModelKind>, double> mean_cs;
  for (double f : fractions) {
    for (ModelKind kind : schemes) {
      std::vector<SweepPoint> seed_points;
      for (size_t s = 0; s < cfg.seeds.size(); ++s, ++idx) {
        SweepPoint p;
        p.fraction = f;
        p.scheme = kind == ModelKind::kCondSeg ? Scheme::kSegmentation
                                               : Scheme::kTransliteration;
        p.seed = std::to_string(cells[idx].seed);
        p.counts = cells[idx].mer;
        p.rates = RatesOf(cells[idx].mer);
        seed_points.push_back(p);
      }
      SweepPoint mean;
      mean.fraction = f;
      mean.scheme = seed_points.front().scheme;
      mean.seed = "mean";
      for (const auto& p : seed_points) {
        mean.counts.full += p.counts.full;
        mean.counts.cs += p.counts.cs;
        mean.counts.mono_l1 += p.counts.mono_l1;
        mean.counts.mono_l2 += p.counts.mono_l2;
        mean.counts.mono += p.counts.mono;
        mean.rates.full += p.rates.full;
        mean.rates.cs += p.rates.cs;
        mean.rates.mono_l1 += p.rates.mono_l1;
        mean.rates.mono_l2 += p.rates.mono_l2;
        mean.rates.mono += p.rates.mono;
      }
      double n = static_cast<double>(seed_points.size());
      mean.rates.full /= n;
      mean.rates.cs /= n;
      mean.rates.mono_l1 /= n;
      mean.rates.mono_l2 /= n;
      mean.rates.mono /= n;
      mean_cs[{f, kind}] = mean.rates.cs;
      result.rows.insert(result.rows.end(), seed_points.begin(),
                         seed_points.end());
      result.rows.push_back(mean);
    }
  }
  std::vector<double> sorted_fracs = fractions;
  std::sort(sorted_fracs.begin(), sorted_fracs.end());
  for (double f : sorted_fracs) {
    if (mean_cs[{f, ModelKind::kCondSeg}] <=
        mean_cs[{f, ModelKind::kCondTra}]) {
      result.crossover = f;
      break;
    }
  }
  return result;
}

void WriteResultsTsv(const std::string& path,
                     const std::vector<ResultRow>& rows) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    os << "model\tcondition\tseed\tsources\tfull\tcs\tmono_l1\tmono_l2\tmono"
       << "\tfull_errors\tfull_ref_len\n";
    for (const auto& r : rows) {
      os << r.model << '\t' << r.condition << '\t' << r.seed << '\t'
         << r.sources << '\t' << FormatRate(r.rates.full) << '\t'
         << FormatRate(r.rates.cs) << '\t' << FormatRate(r.rates.mono_l1)
         << '\t' << FormatRate(r.rates.mono_l2) << '\t'
         << FormatRate(r.rates.mono) << '\t' << r.counts.full.Errors() << '\t'
         << r.counts.full.ref_len << "\n";
    }
  });
}

std::string RenderResultsTable(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %-4s %-5s %-14s %7s %7s %8s %8s %7s\n",
                "model", "cond", "seed", "sources", "FULL", "CS", "MONO_L1",
                "MONO_L2", "MONO");
  os << buf;
  os << std::string(76, '-') << "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-10s %-4s %-5s %-14s %7s %7s %8s %8s %7s\n",
                  r.model.c_str(), r.condition.c_str(), r.seed.c_str(),
                  r.sources.c_str(), FormatRate(r.rates.full).c_str(),
                  FormatRate(r.rates.cs).c_str(),
                  FormatRate(r.rates.mono_l1).c_str(),
                  FormatRate(r.rates.mono_l2).c_str(),
                  FormatRate(r.rates.mono).c_str());
    os << buf;
  }
  return os.str();
}

void WriteSweepTsv(const std::string& path, const SweepResult& sweep) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    os << "fraction\tscheme\tseed\tcs\tfull\tmono\n";
    for (const auto& p : sweep.rows) {
      os << FracTag(p.fraction) << '\t' << SchemeName(p.scheme) << '\t'
         << p.seed << '\t' << FormatRate(p.rates.cs) << '\t'
         << FormatRate(p.rates.full) << '\t' << FormatRate(p.rates.mono)
         << "\n";
    }
    if (sweep.crossover.has_value())
      os << "# crossover\t" << FracTag(*sweep.crossover) << "\n";
    else
      os << "# crossover\tnone\n";
  });
}

std::string RenderSweepTable(const SweepResult& sweep) {
  std::ostringstream os;
  os << "CS-split MER by CS training-data fraction (seed means)\n";
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %10s\n", "fraction", "seg",
                "tra");
  os << buf << std::string(32, '-') << "\n";
  std::map<double, std::pair<std::string, std::string>> by_frac;
  for (const auto& p : sweep.rows) {
    if (p.seed != "mean") continue;
    auto& slot = by_frac[p.fraction];
    (p.scheme == Scheme::kSegmentation ? slot.first : slot.second) =
        FormatRate(p.rates.cs);
  }
  for (const auto& [f, pair] : by_frac) {
    std::snprintf(buf, sizeof(buf), "%-10s %10s %10s\n", FracTag(f).c_str(),
                  pair.first.c_str(), pair.second.c_str());
    os << buf;
  }
  if (sweep.crossover.has_value())
    os << "crossover at fraction " << FracTag(*sweep.crossover) << "\n";
  else
    os << "no crossover in the swept range\n";
  return os.str();
}

}  // namespace condctc
