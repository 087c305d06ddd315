// tools/condctc.cc

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

// Single executable exposing the pipeline as subcommands:
//   gen-data, train, train-lm, pseudolabel, decode, score, experiment,
//   ablate, sweep.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 compute error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "condctc/decode.h"
#include "condctc/harness.h"
#include "condctc/options.h"
#include "condctc/targets.h"

namespace condctc {
namespace {

namespace fs = std::filesystem;

struct CommonTrainFlags {
  double lambda1 = 0.7;
  int64_t epochs = 40;
  int64_t batch_size = 16;
  double lr = 1e-3;
  uint64_t seed = 1;
  int64_t threads = 0;

  void Register(OptionSet* opts) {
    opts->AddDouble("lambda1", &lambda1,
                    "bilingual loss weight in the multi-task objective");
    opts->AddInt("epochs", &epochs, "training epochs");
    opts->AddInt("batch-size", &batch_size, "utterances per Adam step");
    opts->AddDouble("lr", &lr, "Adam learning rate");
    opts->AddUint64("seed", &seed, "seed for init and shuffling");
    opts->AddInt("threads", &threads, "worker threads (0 = hardware)");
  }

  TrainConfig ToConfig() const {
    TrainConfig cfg;
    cfg.lambda1 = lambda1;
    cfg.epochs = static_cast<int>(epochs);
    cfg.batch_size = static_cast<int>(batch_size);
    cfg.lr = lr;
    cfg.seed = seed;
    cfg.threads = threads > 0 ? static_cast<int>(threads) : 1;
    return cfg;
  }
};

struct CommonDecodeFlags {
  int64_t beam = 10;
  double lambda2 = 0.8;
  std::string weights = "0.5,0.25,0.25";
  std::string sources = "bi,l1,l2";
  int64_t nbest = 1;

  void Register(OptionSet* opts) {
    opts->AddInt("beam", &beam, "beam width");
    opts->AddDouble("lambda2", &lambda2,
                    "CTC weight in the joint CTC+LM decoding score");
    opts->AddString("weights", &weights,
                    "merge weights bi,l1,l2 for the CTC posteriors");
    opts->AddString("sources", &sources,
                    "enabled CTC sources (subset of bi,l1,l2)");
    opts->AddInt("nbest", &nbest, "hypotheses to emit per utterance");
  }

  DecodeConfig ToConfig(bool use_lm) const {
    DecodeConfig cfg;
    cfg.beam = static_cast<int>(beam);
    cfg.lambda2 = lambda2;
    cfg.nbest = static_cast<int>(nbest);
    cfg.use_lm = use_lm;
    auto ws = ParseDoubleList(weights);
    if (ws.size() != 3)
      throw ConfigError("--weights needs exactly three values");
    cfg.weights = MergeWeights{ws[0], ws[1], ws[2]};
    cfg.use_bi = cfg.use_l1 = cfg.use_l2 = false;
    for (const auto& s : SplitString(sources, ',')) {
      if (s == "bi") cfg.use_bi = true;
      else if (s == "l1") cfg.use_l1 = true;
      else if (s == "l2") cfg.use_l2 = true;
      else if (!s.empty()) throw ConfigError("unknown CTC source: '" + s + "'");
    }
    cfg.Validate();
    return cfg;
  }
};

bool DirNonEmpty(const std::string& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return false;
  return fs::directory_iterator(path, ec) != fs::directory_iterator();
}

int CmdGenData(const std::vector<std::string>& args) {
  OptionSet opts("gen-data", "generate the synthetic bilingual corpus");
  GenConfig g;
  std::string out;
  bool force = false;
  uint64_t seed = g.seed;
  int64_t n_l1 = g.n_l1, n_l2 = g.n_l2, feat_dim = g.feat_dim;
  int64_t frames_min = g.frames_min, frames_max = g.frames_max;
  double sigma = g.noise_sigma, delta = g.pair_delta;
  int64_t train_mono = g.train_mono_per_lang, train_cs = g.train_cs;
  int64_t dev_per_cat = g.dev_per_category;
  opts.AddString("out", &out, "output corpus directory");
  opts.AddBool("force", &force, "overwrite a non-empty output directory");
  opts.AddUint64("seed", &seed, "corpus seed");
  opts.AddInt("n-l1", &n_l1, "L1 tokens");
  opts.AddInt("n-l2", &n_l2, "L2 tokens (must equal n-l1)");
  opts.AddInt("feat-dim", &feat_dim, "feature dimension");
  opts.AddInt("frames-min", &frames_min, "min frames per token");
  opts.AddInt("frames-max", &frames_max, "max frames per token");
  opts.AddDouble("noise-sigma", &sigma, "per-frame gaussian noise");
  opts.AddDouble("pair-delta", &delta,
                 "distance between paired cross-lingual prototypes");
  opts.AddInt("train-mono", &train_mono, "training utterances per language");
  opts.AddInt("train-cs", &train_cs, "code-switched training utterances");
  opts.AddInt("dev-per-category", &dev_per_cat, "dev utterances per category");
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (out.empty()) throw ConfigError("--out is required");
  if (DirNonEmpty(out) && !force)
    throw ConfigError("output directory is not empty (use --force): " + out);

  g.seed = seed;
  g.n_l1 = static_cast<int>(n_l1);
  g.n_l2 = static_cast<int>(n_l2);
  g.feat_dim = static_cast<int>(feat_dim);
  g.frames_min = static_cast<int>(frames_min);
  g.frames_max = static_cast<int>(frames_max);
  g.noise_sigma = sigma;
  g.pair_delta = delta;
  g.train_mono_per_lang = static_cast<int>(train_mono);
  g.train_cs = static_cast<int>(train_cs);
  g.dev_per_category = static_cast<int>(dev_per_cat);

  Corpus corpus = GenerateCorpus(g);
  WriteCorpus(corpus, g, out);
  std::cout << "wrote corpus to " << out << ": " << corpus.train_mono.size()
            << " mono train, " << corpus.train_cs.size() << " CS train, "
            << corpus.dev.size() << " dev utterances\n";
  return 0;
}

// Monolingual utterances plus the first ceil(fraction * |CS|) CS utterances.
std::vector<const Utterance*> SelectTrainSet(const Corpus& corpus,
                                             double fraction) {
  std::vector<const Utterance*> out;
  for (const auto& u : corpus.train_mono) out.push_back(&u);
  size_t k = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(corpus.train_cs.size())));
  k = std::min(k, corpus.train_cs.size());
  for (size_t i = 0; i < k; ++i) out.push_back(&corpus.train_cs[i]);
  return out;
}

int CmdTrain(const std::vector<std::string>& args) {
  OptionSet opts("train", "train a vanilla or conditional CTC model");
  std::string data, out, model = "cond", scheme = "seg", view = "bi";
  std::string pseudolabel_from;
  double cs_fraction = 0.0;
  CommonTrainFlags train_flags;
  opts.AddString("data", &data, "corpus directory");
  opts.AddString("out", &out, "checkpoint path to write");
  opts.AddString("model", &model, "vanilla | cond");
  opts.AddString("scheme", &scheme,
                 "monolingual supervision for cond: seg | tra");
  opts.AddString("view", &view,
                 "vanilla output space: bi | l1 | l2 (mono pseudo-labelers)");
  opts.AddString("pseudolabel-from", &pseudolabel_from,
                 "comma pair of L1,L2 monolingual checkpoints (scheme tra)");
  opts.AddDouble("cs-fraction", &cs_fraction,
                 "fraction of the CS training pool to include");
  train_flags.Register(&opts);
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (data.empty() || out.empty())
    throw ConfigError("--data and --out are required");

  Corpus corpus = ReadCorpusDir(data);
  if (corpus.train_mono.empty()) throw DataError("corpus has no training data");
  int feat_dim = corpus.train_mono[0].feats.cols;
  TrainConfig cfg = train_flags.ToConfig();
  std::vector<const Utterance*> train_set = SelectTrainSet(corpus, cs_fraction);

  if (model == "vanilla") {
    OutputSpace space = ParseOutputSpace(view);
    std::vector<const Utterance*> subset;
    if (space == OutputSpace::kBilingual) {
      subset = train_set;
    } else {
      Category want = space == OutputSpace::kMonoL1 ? Category::kMonoL1
                                                    : Category::kMonoL2;
      for (const Utterance* u : train_set)
        if (u->category == want) subset.push_back(u);
    }
    if (subset.empty()) throw DataError("no training utterances for this view");
    VanillaModel m = InitVanilla(corpus.vocab, space, feat_dim, cfg.seed, 128);
    std::vector<VanillaExample> examples;
    for (const Utterance* u : subset) examples.push_back({u, u->transcript});
    TrainStats stats = TrainVanilla(&m, examples, cfg);
    SaveVanilla(m, out, cfg);
    AtomicWriteFile(out + ".loss.tsv", [&](std::ostream& os) {
      os << "epoch\tloss\n";
      for (size_t e = 0; e < stats.epoch_loss.size(); ++e)
        os << (e + 1) << '\t' << FormatFull(stats.epoch_loss[e]) << "\n";
    });
    std::cout << "trained vanilla(" << view << ") model; final loss "
              << (stats.epoch_loss.empty() ? 0.0 : stats.epoch_loss.back())
              << "; wrote " << out << "\n";
    return 0;
  }
  if (model != "cond") throw ConfigError("--model must be vanilla or cond");

  cfg.scheme = ParseScheme(scheme);
  std::vector<UtteranceTargets> targets;
  TargetReport report;
  if (cfg.scheme == Scheme::kSegmentation) {
    targets = MakeTrainingTargets(train_set, cfg.scheme, corpus.vocab, nullptr,
                                  nullptr, &report);
  } else {
    if (pseudolabel_from.empty())
      throw ConfigError(
          "--scheme tra needs --pseudolabel-from <l1.ckpt>,<l2.ckpt>");
    auto parts = SplitString(pseudolabel_from, ',');
    if (parts.size() != 2)
      throw ConfigError("--pseudolabel-from needs exactly two checkpoints");
    VanillaModel pl1 = LoadVanilla(parts[0], corpus.vocab);
    VanillaModel pl2 = LoadVanilla(parts[1], corpus.vocab);
    if (pl1.space != OutputSpace::kMonoL1 || pl2.space != OutputSpace::kMonoL2)
      throw ConfigError(
        "--pseudolabel-from expects an L1-view then an L2-view checkpoint");
    MonoPgFn f1 = MakeMonoPgFn(pl1);
    MonoPgFn f2 = MakeMonoPgFn(pl2);
    targets = MakeTrainingTargets(train_set, cfg.scheme, corpus.vocab, &f1,
                                  &f2, &report);
  }
  WriteTargets(targets, corpus.vocab, out + ".targets.tsv");
  if (!report.skipped_ids.empty())
    std::cerr << "skipped " << report.skipped_ids.size()
              << " utterances with infeasible alignments\n";

  std::map<std::string, const Utterance*> by_id;
  for (const Utterance* u : train_set) by_id[u->id] = u;
  std::vector<TrainExample> examples;
  for (const auto& t : targets) examples.push_back({by_id.at(t.id), t.pair});

  ConditionalModel m = InitConditional(corpus.vocab, feat_dim, cfg.seed, 128);
  TrainStats stats = TrainConditional(&m, examples, cfg);
  SaveConditional(m, out, cfg);
  AtomicWriteFile(out + ".loss.tsv", [&](std::ostream& os) {
    os << "epoch\tloss\n";
    for (size_t e = 0; e < stats.epoch_loss.size(); ++e)
      os << (e + 1) << '\t' << FormatFull(stats.epoch_loss[e]) << "\n";
  });
  std::cout << "trained cond(" << SchemeName(cfg.scheme) << ") model; final loss "
            << (stats.epoch_loss.empty() ? 0.0 : stats.epoch_loss.back())
            << "; wrote " << out << "\n";
  return 0;
}

int CmdTrainLm(const std::vector<std::string>& args) {
  OptionSet opts("train-lm", "train the backoff n-gram language model");
  std::string data, out, text = "cs+mono";
  int64_t order = 3;
  double add_k = 0.1;
  opts.AddString("data", &data, "corpus directory");
  opts.AddString("out", &out, "LM file to write");
  opts.AddString("text", &text, "LM text corpus: cs+mono | mono");
  opts.AddInt("order", &order, "n-gram order");
  opts.AddDouble("add-k", &add_k, "add-k smoothing constant");
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (data.empty() || out.empty())
    throw ConfigError("--data and --out are required");
  Corpus corpus = ReadCorpusDir(data, /*load_features=*/false);
  std::vector<LabelSeq> transcripts;
  for (const auto& u : corpus.train_mono) transcripts.push_back(u.transcript);
  if (text == "cs+mono") {
    for (const auto& u : corpus.train_cs) transcripts.push_back(u.transcript);
  } else if (text != "mono") {
    throw ConfigError("--text must be cs+mono or mono");
  }
  NGramLm lm = NGramLm::Train(transcripts, corpus.vocab,
                              static_cast<int>(order), add_k);
  lm.Write(out);
  std::cout << "trained " << order << "-gram LM on " << transcripts.size()
            << " transcripts; wrote " << out << "\n";
  return 0;
}

int CmdPseudoLabel(const std::vector<std::string>& args) {
  OptionSet opts("pseudolabel",
                 "produce monolingual training targets for a manifest");
  std::string data, manifest, out, scheme = "tra", from_l1, from_l2;
  opts.AddString("data", &data, "corpus directory (for the vocabulary)");
  opts.AddString("manifest", &manifest, "utterance manifest to label");
  opts.AddString("out", &out, "targets file to write");
  opts.AddString("scheme", &scheme, "seg | tra");
  opts.AddString("from-l1", &from_l1, "L1 pseudo-labeler checkpoint (tra)");
  opts.AddString("from-l2", &from_l2, "L2 pseudo-labeler checkpoint (tra)");
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (data.empty() || manifest.empty() || out.empty())
    throw ConfigError("--data, --manifest and --out are required");
  Vocab vocab = Vocab::Read(JoinPath(data, "vocab.txt"));
  Scheme s = ParseScheme(scheme);
  std::vector<Utterance> utts = ReadManifest(manifest, vocab);
  std::vector<const Utterance*> ptrs;
  for (const auto& u : utts) ptrs.push_back(&u);

  TargetReport report;
  std::vector<UtteranceTargets> targets;
  if (s == Scheme::kSegmentation) {
    targets = MakeTrainingTargets(ptrs, s, vocab, nullptr, nullptr, &report);
  } else {
    if (from_l1.empty() || from_l2.empty())
      throw ConfigError("--scheme tra needs --from-l1 and --from-l2");
    VanillaModel pl1 = LoadVanilla(from_l1, vocab);
    VanillaModel pl2 = LoadVanilla(from_l2, vocab);
    MonoPgFn f1 = MakeMonoPgFn(pl1);
    MonoPgFn f2 = MakeMonoPgFn(pl2);
    targets = MakeTrainingTargets(ptrs, s, vocab, &f1, &f2, &report);
  }
  WriteTargets(targets, vocab, out);
  std::cout << "wrote " << targets.size() << " target pairs to " << out
            << " (skipped " << report.skipped_ids.size()
            << ", empty pseudo-labels " << report.empty_pseudolabels << ")\n";
  return 0;
}

int CmdDecode(const std::vector<std::string>& args) {
  OptionSet opts("decode", "beam-decode a manifest with a trained model");
  std::string data, manifest, model_path, lm_path, out, lid_out;
  bool no_lm = false;
  CommonDecodeFlags dec_flags;
  opts.AddString("data", &data, "corpus directory");
  opts.AddString("manifest", &manifest,
                 "manifest to decode (default <data>/dev.tsv)");
  opts.AddString("model", &model_path, "checkpoint to decode with");
  opts.AddString("lm", &lm_path, "LM file for shallow fusion");
  opts.AddBool("no-lm", &no_lm, "decode without LM fusion");
  opts.AddString("out", &out, "hypothesis file to write");
  opts.AddString("lid-out", &lid_out,
                 "optional per-utterance frame-LID report (cond models)");
  dec_flags.Register(&opts);
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (data.empty() || model_path.empty() || out.empty())
    throw ConfigError("--data, --model and --out are required");
  if (manifest.empty()) manifest = JoinPath(data, "dev.tsv");

  Vocab vocab = Vocab::Read(JoinPath(data, "vocab.txt"));
  bool use_lm = !no_lm;
  if (use_lm && lm_path.empty())
    throw ConfigError("--lm is required unless --no-lm is given");
  std::optional<NGramLm> lm;
  if (use_lm) lm = NGramLm::Read(lm_path, vocab);
  DecodeConfig cfg = dec_flags.ToConfig(use_lm);

  std::vector<Utterance> utts = ReadManifest(manifest, vocab);
  std::vector<std::pair<std::string, std::vector<ScoredHyp>>> all;
  std::ostringstream lid_report;

  if (PeekModelKind(model_path) == ModelFileKind::kVanilla) {
    VanillaModel m = LoadVanilla(model_path, vocab);
    for (const auto& u : utts)
      all.emplace_back(u.id,
                       DecodeVanilla(m, u.feats, lm ? &*lm : nullptr, cfg));
  } else {
    ConditionalModel m = LoadConditional(model_path, vocab);
    for (const auto& u : utts) {
      all.emplace_back(u.id,
                       DecodeConditional(m, u.feats, lm ? &*lm : nullptr, cfg));
      if (!lid_out.empty()) {
        CondForward f = ForwardConditional(m, u.feats);
        LidResult lid = FrameLid(f.pg_l1, f.pg_l2);
        lid_report << u.id;
        for (size_t d = 0; d < lid.counts.size(); ++d)
          lid_report << '\t'
                     << LidName(static_cast<LidDecision>(d)) << '='
                     << lid.counts[d];
        lid_report << '\t';
        for (size_t i = 0; i < lid.spans.size(); ++i) {
          if (i) lid_report << ' ';
          lid_report << lid.spans[i].begin << ':' << lid.spans[i].end << ':'
                     << LidName(lid.spans[i].decision);
        }
        lid_report << "\n";
      }
    }
  }
  WriteDecodeOutput(out, all, vocab, cfg.nbest);
  if (!lid_out.empty()) {
    std::string text = lid_report.str();
    AtomicWriteFile(lid_out, [&](std::ostream& os) { os << text; });
  }
  std::cout << "decoded " << all.size() << " utterances to " << out << "\n";
  return 0;
}

int CmdScore(const std::vector<std::string>& args) {
  OptionSet opts("score", "score hypotheses against reference manifests");
  std::string data, refs, hyps, out;
  opts.AddString("data", &data, "corpus directory");
  opts.AddString("refs", &refs,
                 "reference manifest (default <data>/dev.tsv)");
  opts.AddString("hyps", &hyps, "hypothesis file from decode");
  opts.AddString("out", &out, "optional TSV report path");
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  if (data.empty() || hyps.empty())
    throw ConfigError("--data and --hyps are required");
  if (refs.empty()) refs = JoinPath(data, "dev.tsv");

  Vocab vocab = Vocab::Read(JoinPath(data, "vocab.txt"));
  std::vector<Utterance> ref_utts =
      ReadManifest(refs, vocab, /*load_features=*/false);
  auto hyp_pairs = ReadHypFile(hyps, vocab);
  std::map<std::string, const LabelSeq*> hyp_by_id;
  for (const auto& [id, labels] : hyp_pairs) hyp_by_id[id] = &labels;
  if (hyp_pairs.size() != ref_utts.size())
    throw DataError("refs and hyps disagree on utterance count");

  std::vector<LabelSeq> ref_seqs, hyp_seqs;
  std::vector<Category> cats;
  for (const auto& u : ref_utts) {
    auto it = hyp_by_id.find(u.id);
    if (it == hyp_by_id.end())
      throw DataError("no hypothesis for utterance '" + u.id + "'");
    ref_seqs.push_back(u.transcript);
    hyp_seqs.push_back(*it->second);
    cats.push_back(u.category);
  }
  MerReport rep = ScoreCorpus(ref_seqs, hyp_seqs, cats);

  auto line = [](const char* name, const EditCounts& c) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%-8s %7s%%  (sub=%lld del=%lld ins=%lld / ref=%lld)\n",
                  name, FormatRate(c.Rate()).c_str(),
                  static_cast<long long>(c.sub), static_cast<long long>(c.del),
                  static_cast<long long>(c.ins),
                  static_cast<long long>(c.ref_len));
    return std::string(buf);
  };
  std::string text = line("FULL", rep.full) + line("CS", rep.cs) +
                     line("MONO_L1", rep.mono_l1) +
                     line("MONO_L2", rep.mono_l2) + line("MONO", rep.mono);
  std::cout << text;
  if (!out.empty()) {
    AtomicWriteFile(out, [&](std::ostream& os) {
      os << "split\tmer\tsub\tdel\tins\tref_len\n";
      auto row = [&](const char* name, const EditCounts& c) {
        os << name << '\t' << FormatRate(c.Rate()) << '\t' << c.sub << '\t'
           << c.del << '\t' << c.ins << '\t' << c.ref_len << "\n";
      };
      row("FULL", rep.full);
      row("CS", rep.cs);
      row("MONO_L1", rep.mono_l1);
      row("MONO_L2", rep.mono_l2);
      row("MONO", rep.mono);
    });
  }
  return 0;
}

struct ExperimentFlags {
  std::string data, work, out;
  std::string seeds = "1,2,3";
  CommonTrainFlags train;
  CommonDecodeFlags decode;
  int64_t lm_order = 3;
  double lm_k = 0.1;

  void Register(OptionSet* opts) {
    opts->AddString("data", &data, "corpus directory");
    opts->AddString("work", &work, "work directory for caches and outputs");
    opts->AddString("out", &out, "output path prefix (default under work)");
    opts->AddString("seeds", &seeds, "comma-separated training seeds");
    opts->AddInt("lm-order", &lm_order, "LM n-gram order");
    opts->AddDouble("lm-k", &lm_k, "LM add-k smoothing");
    train.Register(opts);
    decode.Register(opts);
  }

  ExperimentConfig ToConfig() const {
    if (data.empty() || work.empty())
      throw ConfigError("--data and --work are required");
    ExperimentConfig cfg;
    cfg.data_dir = data;
    cfg.work_dir = work;
    cfg.seeds = ParseSeedList(seeds);
    cfg.train = train.ToConfig();
    cfg.decode = decode.ToConfig(/*use_lm=*/true);
    cfg.lm_order = static_cast<int>(lm_order);
    cfg.lm_k = lm_k;
    cfg.threads = static_cast<int>(train.threads);
    return cfg;
  }
};

int CmdExperiment(const std::vector<std::string>& args) {
  OptionSet opts("experiment",
                 "train, decode and score one zero-shot condition");
  ExperimentFlags flags;
  std::string condition = "B", models = "vanilla,cond-seg,cond-tra";
  opts.AddString("condition", &condition,
                 "A (CS+mono ASR) | B (mono ASR, CS+mono LM) | C (mono only)");
  opts.AddString("models", &models, "comma list of models to run");
  flags.Register(&opts);
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  ExperimentConfig cfg = flags.ToConfig();
  cfg.condition = ParseCondition(condition);
  cfg.models.clear();
  for (const auto& m : SplitString(models, ','))
    if (!m.empty()) cfg.models.push_back(ParseModelKind(m));
  if (cfg.models.empty()) throw ConfigError("empty model list");

  std::vector<ResultRow> rows = RunExperiment(cfg);
  std::string prefix = flags.out.empty()
                           ? JoinPath(cfg.work_dir,
                                      std::string("results/experiment_") +
                                          ConditionName(cfg.condition))
                           : flags.out;
  WriteResultsTsv(prefix + ".tsv", rows);
  std::string table = RenderResultsTable(rows);
  AtomicWriteFile(prefix + ".txt", [&](std::ostream& os) { os << table; });
  std::cout << table;
  return 0;
}

int CmdAblate(const std::vector<std::string>& args) {
  OptionSet opts("ablate",
                 "decoding-likelihood ablation of the condition-B "
                 "transliteration model");
  ExperimentFlags flags;
  flags.Register(&opts);
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  ExperimentConfig cfg = flags.ToConfig();
  std::vector<ResultRow> rows = RunAblation(cfg);
  std::string prefix = flags.out.empty()
                           ? JoinPath(cfg.work_dir, "results/ablation")
                           : flags.out;
  WriteResultsTsv(prefix + ".tsv", rows);
  std::string table = RenderResultsTable(rows);
  AtomicWriteFile(prefix + ".txt", [&](std::ostream& os) { os << table; });
  std::cout << table;
  return 0;
}

int CmdSweep(const std::vector<std::string>& args) {
  OptionSet opts("sweep", "CS training-data sweep for both target schemes");
  ExperimentFlags flags;
  std::string fractions = "0,0.5,1";
  opts.AddString("fractions", &fractions,
                 "comma list of CS data fractions in [0,1]");
  flags.Register(&opts);
  opts.Parse(args);
  if (opts.help_requested()) {
    std::cout << opts.Help();
    return 0;
  }
  ExperimentConfig cfg = flags.ToConfig();
  SweepResult sweep = RunDataSweep(cfg, ParseDoubleList(fractions));
  std::string prefix = flags.out.empty()
                           ? JoinPath(cfg.work_dir, "results/sweep")
                           : flags.out;
  WriteSweepTsv(prefix + ".tsv", sweep);
  std::string table = RenderSweepTable(sweep);
  AtomicWriteFile(prefix + ".txt", [&](std::ostream& os) { os << table; });
  std::cout << table;
  return 0;
}

void PrintUsage() {
  std::cout <<
      "usage: condctc <command> [--help] [flags]\n"
      "\n"
      "commands:\n"
      "  gen-data     generate the synthetic bilingual corpus\n"
      "  train        train a vanilla or conditional CTC model\n"
      "  train-lm     train the backoff n-gram language model\n"
      "  pseudolabel  build segmentation or transliteration targets\n"
      "  decode       beam-decode a manifest with CTC+LM fusion\n"
      "  score        mixed error rate with category splits\n"
      "  experiment   full condition A/B/C table (train+decode+score)\n"
      "  ablate       decoding-likelihood ablation table\n"
      "  sweep        CS training-data sweep for both schemes\n";
}

int Dispatch(int argc, char** argv) {
  if (argc < 2) {
    PrintUsage();
    return 2;
  }
  std::string cmd = argv[1];
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    PrintUsage();
    return 0;
  }
  std::vector<std::string> args(argv + 2, argv + argc);
  using Handler = int (*)(const std::vector<std::string>&);
  static const std::map<std::string, Handler> handlers = {
      {"gen-data", CmdGenData},   {"train", CmdTrain},
      {"train-lm", CmdTrainLm},   {"pseudolabel", CmdPseudoLabel},
      {"decode", CmdDecode},      {"score", CmdScore},
      {"experiment", CmdExperiment}, {"ablate", CmdAblate},
      {"sweep", CmdSweep},
  };
  auto it = handlers.find(cmd);
  if (it == handlers.end()) {
    std::cerr << "unknown command: " << cmd << "\n";
    PrintUsage();
    return 2;
  }
  return it->second(args);
}

}  // namespace
}  // namespace condctc

int main(int argc, char** argv) {
  try {
    return condctc::Dispatch(argc, argv);
  } catch (const condctc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const condctc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const condctc::ComputeError& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
