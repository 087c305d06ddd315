// condctc/model.cc

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

#include "condctc/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace condctc {

using nlohmann::json;

const char* OutputSpaceName(OutputSpace s) {
  switch (s) {
    case OutputSpace::kBilingual: return "bi";
    case OutputSpace::kMonoL1: return "l1";
    default: return "l2";
  }
}

OutputSpace ParseOutputSpace(const std::string& name) {
  if (name == "bi") return OutputSpace::kBilingual;
  if (name == "l1") return OutputSpace::kMonoL1;
  if (name == "l2") return OutputSpace::kMonoL2;
  throw ConfigError("unknown output space: '" + name + "'");
}

int VanillaModel::OutDim() const {
  return space == OutputSpace::kBilingual ? vocab.Size() : view.size;
}

ConditionalModel InitConditional(const Vocab& v, int feat_dim, uint64_t seed,
                                 int hidden) {
  ConditionalModel m;
  m.vocab = v;
  m.hidden = hidden;
  m.view_l1 = MakeMonoView(v, Lang::kL1);
  m.view_l2 = MakeMonoView(v, Lang::kL2);
  Rng rng(seed);
  // Fixed draw order so the seed pins every tensor.
  m.enc_l1 = InitEncoder(feat_dim, hidden, 1, &rng);
  m.enc_l2 = InitEncoder(feat_dim, hidden, 1, &rng);
  m.head_l1 = InitHead(hidden, m.view_l1.size, &rng);
  m.head_l2 = InitHead(hidden, m.view_l2.size, &rng);
  m.head_bi = InitHead(hidden, v.Size(), &rng);
  return m;
}

VanillaModel InitVanilla(const Vocab& v, OutputSpace space, int feat_dim,
                         uint64_t seed, int hidden) {
  VanillaModel m;
  m.vocab = v;
  m.hidden = hidden;
  m.space = space;
  if (space != OutputSpace::kBilingual)
    m.view = MakeMonoView(
        v, space == OutputSpace::kMonoL1 ? Lang::kL1 : Lang::kL2);
  Rng rng(seed);
  m.enc = InitEncoder(feat_dim, hidden, 1, &rng);
  m.head = InitHead(hidden, m.OutDim(), &rng);
  return m;
}

CondForward ForwardConditional(const ConditionalModel& m, const FeatureSeq& x,
                               bool want_cache) {
  CondForward f;
  f.latent_l1 = Encode(m.enc_l1, x, want_cache ? &f.c1 : nullptr);
  f.latent_l2 = Encode(m.enc_l2, x, want_cache ? &f.c2 : nullptr);
  f.fused = f.latent_l1;
  for (size_t i = 0; i < f.fused.data.size(); ++i)
    f.fused.data[i] += f.latent_l2.data[i];
  f.pg_l1 = HeadLogProbs(m.head_l1, f.latent_l1);
  f.pg_l2 = HeadLogProbs(m.head_l2, f.latent_l2);
  f.pg_bi = HeadLogProbs(m.head_bi, f.fused);
  return f;
}

Matrix ForwardVanilla(const VanillaModel& m, const FeatureSeq& x,
                      EncoderCache* cache) {
  return HeadLogProbs(m.head, Encode(m.enc, x, cache));
}

void CondGrads::AllocLike(const ConditionalModel& m) {
  int in1 = m.enc_l1.lin1.w.cols;
  enc_l1.lin1.Resize(m.hidden, in1);
  enc_l1.lin2.Resize(m.hidden, m.hidden);
  enc_l2.lin1.Resize(m.hidden, in1);
  enc_l2.lin2.Resize(m.hidden, m.hidden);
  head_l1.proj.Resize(m.view_l1.size, m.hidden);
  head_l2.proj.Resize(m.view_l2.size, m.hidden);
  head_bi.proj.Resize(m.vocab.Size(), m.hidden);
}

namespace {

std::vector<TensorRef> CondTensors(EncoderParams* e1, EncoderParams* e2,
                                   HeadParams* h1, HeadParams* h2,
                                   HeadParams* hb) {
  std::vector<TensorRef> out;
  for (auto& t : EncoderTensors(e1, "enc_l1")) out.push_back(t);
  for (auto& t : EncoderTensors(e2, "enc_l2")) out.push_back(t);
  for (auto& t : HeadTensors(h1, "head_l1")) out.push_back(t);
  for (auto& t : HeadTensors(h2, "head_l2")) out.push_back(t);
  for (auto& t : HeadTensors(hb, "head_bi")) out.push_back(t);
  return out;
}

LabelSeq MapToView(const LabelSeq& y, const MonoView& view) {
  LabelSeq out;
  out.reserve(y.size());
  for (int32_t id : y) {
    int32_t m = view.ToMono(id);
    if (m < 0)
      throw ComputeError("target contains a token outside the model's view");
    out.push_back(m);
  }
  return out;
}

}  // namespace

std::vector<TensorRef> CondModelTensors(ConditionalModel* m) {
  return CondTensors(&m->enc_l1, &m->enc_l2, &m->head_l1, &m->head_l2,
                     &m->head_bi);
}

std::vector<TensorRef> CondGradTensors(CondGrads* g) {
  return CondTensors(&g->enc_l1, &g->enc_l2, &g->head_l1, &g->head_l2,
                     &g->head_bi);
}

std::vector<TensorRef> VanillaModelTensors(VanillaModel* m) {
  std::vector<TensorRef> out;
  for (auto& t : EncoderTensors(&m->enc, "enc")) out.push_back(t);
  for (auto& t : HeadTensors(&m->head, "head")) out.push_back(t);
  return out;
}

MultitaskResult LossMultitask(const ConditionalModel& m, const FeatureSeq& x,
                              const TargetPair& targets, const LabelSeq& y_bi,
                              double lambda1, CondGrads* grads) {
  if (lambda1 < 0.0 || lambda1 > 1.0)
    throw ConfigError("lambda1 must lie in [0, 1]");
  CondForward f = ForwardConditional(m, x, grads != nullptr);

  LabelSeq y_l1 = MapToView(targets.y_l1, m.view_l1);
  LabelSeq y_l2 = MapToView(targets.y_l2, m.view_l2);

  CtcLossResult r_bi = CtcLoss(f.pg_bi, y_bi, Vocab::kBlankId);
  CtcLossResult r_l1 = CtcLoss(f.pg_l1, y_l1, Vocab::kBlankId);
  CtcLossResult r_l2 = CtcLoss(f.pg_l2, y_l2, Vocab::kBlankId);

  MultitaskResult res;
  res.components = {r_bi.loss, r_l1.loss, r_l2.loss};
  const double w_bi = lambda1, w_mono = (1.0 - lambda1) / 2.0;
  const double weights[3] = {w_bi, w_mono, w_mono};
  const CtcLossResult* parts[3] = {&r_bi, &r_l1, &r_l2};
  for (int c = 0; c < 3; ++c) {
    if (std::isinf(res.components[c])) {
      res.skipped_mask |= (1u << c);
      continue;
    }
    res.loss += weights[c] * res.components[c];
  }
  if (std::isnan(res.loss)) throw ComputeError("multitask loss is NaN");
  if (!grads || res.AllSkipped()) return res;

  const int T = x.rows, H = m.hidden;
  Matrix dlat1(T, H, 0.0), dlat2(T, H, 0.0), dfused(T, H, 0.0);
  for (int c = 0; c < 3; ++c) {
    if (res.skipped_mask & (1u << c)) continue;
    Matrix dlogp = parts[c]->grad;
    for (double& g : dlogp.data) g *= weights[c];
    switch (c) {
      case kCompBi:
        HeadBackward(m.head_bi, f.fused, f.pg_bi, dlogp, &grads->head_bi,
                     &dfused);
        break;
      case kCompL1:
        HeadBackward(m.head_l1, f.latent_l1, f.pg_l1, dlogp, &grads->head_l1,
                     &dlat1);
        break;
      default:
        HeadBackward(m.head_l2, f.latent_l2, f.pg_l2, dlogp, &grads->head_l2,
                     &dlat2);
        break;
    }
  }
  // Addition fusion: the bilingual gradient flows into both encoders.
  for (size_t i = 0; i < dfused.data.size(); ++i) {
    dlat1.data[i] += dfused.data[i];
    dlat2.data[i] += dfused.data[i];
  }
  EncoderBackward(m.enc_l1, f.c1, dlat1, &grads->enc_l1);
  EncoderBackward(m.enc_l2, f.c2, dlat2, &grads->enc_l2);
  return res;
}

namespace {

// Deterministic Fisher-Yates using the training stream.
void Shuffle(std::vector<int>* order, Rng* rng) {
  for (int i = static_cast<int>(order->size()) - 1; i > 0; --i) {
    int j = rng->UniformInt(0, i);
    std::swap((*order)[i], (*order)[j]);
  }
}

struct UttResult {
  double loss = 0.0;
  bool contributed = false;
  int skipped_components = 0;
};

// Shared batch loop. compute(i, grads_slot) evaluates one utterance and
// returns its result; grads are reduced in index order so thread count
// never changes the sums.
template <typename Grads, typename ComputeFn, typename TensorsFn>
TrainStats RunTraining(int n, const TrainConfig& cfg,
                       const std::vector<TensorRef>& params,
                       ComputeFn&& compute, TensorsFn&& grad_tensors) {
  TrainStats stats;
  if (n == 0 || cfg.epochs == 0) return stats;
  if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");

  AdamState adam;
  adam.cfg.lr = cfg.lr;
  adam.Init(params);

  Rng shuffle_rng(cfg.seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Shuffle(&order, &shuffle_rng);
    double epoch_loss = 0.0;
    int64_t contributing = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      int bsz = std::min(cfg.batch_size, n - start);
      std::vector<Grads> grads(bsz);
      std::vector<UttResult> results(bsz);
      ParallelFor(bsz, cfg.threads, [&](int i) {
        results[i] = compute(order[start + i], &grads[i]);
      });
      int batch_contrib = 0;
      for (int i = 0; i < bsz; ++i) {
        if (results[i].contributed) {
          ++batch_contrib;
          epoch_loss += results[i].loss;
        } else {
          stats.skipped_utterances += 1;
        }
        stats.skipped_components += results[i].skipped_components;
      }
      if (batch_contrib == 0) continue;
      contributing += batch_contrib;
      // Ordered reduction into grads[0], then scale to the batch mean.
      std::vector<TensorRef> acc = grad_tensors(&grads[0]);
      for (int i = 1; i < bsz; ++i) {
        std::vector<TensorRef> gi = grad_tensors(&grads[i]);
        for (size_t t = 0; t < acc.size(); ++t) {
          const std::vector<double>& src = *gi[t].data;
          std::vector<double>& dst = *acc[t].data;
          for (size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
      }
      double scale = 1.0 / batch_contrib;
      for (auto& t : acc)
        for (double& g : *t.data) g *= scale;
      AdamStep(&adam, params, acc);
    }
    double mean = contributing > 0 ? epoch_loss / contributing : 0.0;
    if (std::isnan(mean))
      throw ComputeError("NaN training loss at epoch " + std::to_string(epoch));
    stats.epoch_loss.push_back(mean);
  }
  return stats;
}

}  // namespace

TrainStats TrainConditional(ConditionalModel* m,
                            const std::vector<TrainExample>& data,
                            const TrainConfig& cfg) {
  std::vector<TensorRef> params = CondModelTensors(m);
  auto compute = [&](int idx, CondGrads* grads) -> UttResult {
    grads->AllocLike(*m);
    const TrainExample& ex = data[idx];
    MultitaskResult r = LossMultitask(*m, ex.utt->feats, ex.targets,
                                      ex.utt->transcript, cfg.lambda1, grads);
    UttResult out;
    out.skipped_components = __builtin_popcount(r.skipped_mask);
    if (r.AllSkipped()) return out;
    if (std::isnan(r.loss))
      throw ComputeError("NaN loss on utterance '" + ex.utt->id + "'");
    out.loss = r.loss;
    out.contributed = true;
    return out;
  };
  auto tensors = [](CondGrads* g) { return CondGradTensors(g); };
  return RunTraining<CondGrads>(static_cast<int>(data.size()), cfg, params,
                                compute, tensors);
}

namespace {

struct VanillaGrads {
  EncoderParams enc;
  HeadParams head;
};

}  // namespace

TrainStats TrainVanilla(VanillaModel* m, const std::vector<VanillaExample>& data,
                        const TrainConfig& cfg) {
  std::vector<TensorRef> params = VanillaModelTensors(m);
  auto compute = [&](int idx, VanillaGrads* grads) -> UttResult {
    grads->enc.lin1.Resize(m->hidden, m->enc.lin1.w.cols);
    grads->enc.lin2.Resize(m->hidden, m->hidden);
    grads->head.proj.Resize(m->OutDim(), m->hidden);
    const VanillaExample& ex = data[idx];
    LabelSeq y = m->space == OutputSpace::kBilingual
                     ? ex.target
                     : MapToView(ex.target, m->view);
    EncoderCache cache;
    Matrix latent = Encode(m->enc, ex.utt->feats, &cache);
    Matrix logp = HeadLogProbs(m->head, latent);
    CtcLossResult r = CtcLoss(logp, y, Vocab::kBlankId);
    UttResult out;
    if (std::isinf(r.loss)) {
      out.skipped_components = 1;
      return out;
    }
    if (std::isnan(r.loss))
      throw ComputeError("NaN loss on utterance '" + ex.utt->id + "'");
    Matrix dlatent(latent.rows, latent.cols, 0.0);
    HeadBackward(m->head, latent, logp, r.grad, &grads->head, &dlatent);
    EncoderBackward(m->enc, cache, dlatent, &grads->enc);
    out.loss = r.loss;
    out.contributed = true;
    return out;
  };
  auto tensors = [](VanillaGrads* g) {
    std::vector<TensorRef> out;
    for (auto& t : EncoderTensors(&g->enc, "enc")) out.push_back(t);
    for (auto& t : HeadTensors(&g->head, "head")) out.push_back(t);
    return out;
  };
  return RunTraining<VanillaGrads>(static_cast<int>(data.size()), cfg, params,
                                   compute, tensors);
}

namespace {

json TrainConfigToJson(const TrainConfig& cfg) {
  return json{{"lambda1", cfg.lambda1},   {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size}, {"seed", cfg.seed},
              {"scheme", SchemeName(cfg.scheme)}, {"lr", cfg.lr}};
}

std::vector<NamedTensor> Snapshot(const std::vector<TensorRef>& refs) {
  std::vector<NamedTensor> out;
  out.reserve(refs.size());
  for (const auto& r : refs) out.push_back({r.name, r.dims, *r.data});
  return out;
}

void Restore(const std::vector<TensorRef>& refs,
             const std::vector<NamedTensor>& tensors,
             const std::string& path) {
  if (tensors.size() != refs.size())
    throw DataError("checkpoint tensor count mismatch: " + path);
  for (size_t i = 0; i < refs.size(); ++i) {
    if (tensors[i].name != refs[i].name || tensors[i].dims != refs[i].dims)
      throw DataError("checkpoint tensor '" + tensors[i].name +
                      "' does not match the model layout: " + path);
    *refs[i].data = tensors[i].data;
  }
}

json ReadSidecar(const std::string& path) {
  std::string side = path + ".json";
  std::ifstream is(side);
  if (!is) throw DataError("missing checkpoint sidecar: " + side);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw DataError("bad checkpoint sidecar " + side + ": " + e.what());
  }
  return j;
}

void CheckVocabHash(const json& j, const Vocab& v, const std::string& path) {
  std::string expect = HexU64(v.Hash());
  std::string got = j.value("vocab_hash", "");
  if (got != expect)
    throw DataError("checkpoint vocab hash mismatch (" + got + " vs " +
                    expect + "): " + path);
}

}  // namespace

void SaveConditional(const ConditionalModel& m, const std::string& path,
                     const TrainConfig& cfg) {
  auto refs = CondModelTensors(const_cast<ConditionalModel*>(&m));
  WriteTensorFile(path, Snapshot(refs));
  json j{{"kind", "conditional"},
         {"hidden", m.hidden},
         {"feat_dim", m.enc_l1.feat_dim},
         {"vocab_hash", HexU64(m.vocab.Hash())},
         {"train", TrainConfigToJson(cfg)}};
  AtomicWriteFile(path + ".json",
                  [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

void SaveVanilla(const VanillaModel& m, const std::string& path,
                 const TrainConfig& cfg) {
  auto refs = VanillaModelTensors(const_cast<VanillaModel*>(&m));
  WriteTensorFile(path, Snapshot(refs));
  json j{{"kind", "vanilla"},
         {"space", OutputSpaceName(m.space)},
         {"hidden", m.hidden},
         {"feat_dim", m.enc.feat_dim},
         {"vocab_hash", HexU64(m.vocab.Hash())},
         {"train", TrainConfigToJson(cfg)}};
  AtomicWriteFile(path + ".json",
                  [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

ConditionalModel LoadConditional(const std::string& path, const Vocab& v) {
  json j = ReadSidecar(path);
  if (j.value("kind", "") != "conditional")
    throw DataError("checkpoint is not a conditional model: " + path);
  CheckVocabHash(j, v, path);
  ConditionalModel m = InitConditional(v, j.value("feat_dim", 0),
                                       /*seed=*/0, j.value("hidden", 128));
  Restore(CondModelTensors(&m), ReadTensorFile(path), path);
  return m;
}

VanillaModel LoadVanilla(const std::string& path, const Vocab& v) {
  json j = ReadSidecar(path);
  if (j.value("kind", "") != "vanilla")
    throw DataError("checkpoint is not a vanilla model: " + path);
  CheckVocabHash(j, v, path);
  VanillaModel m =
      InitVanilla(v, ParseOutputSpace(j.value("space", "bi")),
                  j.value("feat_dim", 0), /*seed=*/0, j.value("hidden", 128));
  Restore(VanillaModelTensors(&m), ReadTensorFile(path), path);
  return m;
}

ModelFileKind PeekModelKind(const std::string& path) {
  json j = ReadSidecar(path);
  std::string kind = j.value("kind", "");
  if (kind == "conditional") return ModelFileKind::kConditional;
  if (kind == "vanilla") return ModelFileKind::kVanilla;
  throw DataError("unknown checkpoint kind '" + kind + "': " + path);
}

MonoPgFn MakeMonoPgFn(const VanillaModel& m) {
  if (m.space == OutputSpace::kBilingual)
    throw ConfigError("pseudo-labeling needs a monolingual model");
  return [&m](const FeatureSeq& x) { return ForwardVanilla(m, x); };
}

}  // namespace condctc
