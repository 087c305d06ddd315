// tests/decode-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "condctc/decode.h"
#include "test-oracles.h"

using namespace condctc;
using namespace condctc::testing;

namespace {

Vocab TestVocab() { return Vocab::Build({"m1"}, {"e1"}); }  // |V| = 4

Matrix OneHotLogPg(const std::vector<int32_t>& path, int V,
                   double eps = 1e-30) {
  Matrix m(static_cast<int>(path.size()), V);
  for (int t = 0; t < m.rows; ++t) {
    for (int k = 0; k < V; ++k) m(t, k) = std::log(eps);
    m(t, path[t]) = std::log1p(-(V - 1) * eps);
  }
  return m;
}

void CheckRowsNormalized(const Matrix& logp) {
  for (int t = 0; t < logp.rows; ++t) {
    double sum = 0.0;
    for (int k = 0; k < logp.cols; ++k) sum += std::exp(logp(t, k));
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("degenerate bilingual weight reproduces the bilingual source") {
  Vocab v = TestVocab();
  Rng rng(1);
  Matrix pg_bi = RandomLogPg(&rng, 5, v.Size());
  MergeWeights w{1.0, 0.0, 0.0};
  Matrix merged =
      MergePosteriors(&pg_bi, nullptr, nullptr, MakeMonoView(v, Lang::kL1),
                      MakeMonoView(v, Lang::kL2), v.Size(), w);
  for (size_t i = 0; i < merged.data.size(); ++i)
    CHECK(merged.data[i] == doctest::Approx(pg_bi.data[i]).epsilon(1e-12));
}

TEST_CASE("mono-only merge floors foreign tokens and keeps native order") {
  Vocab v = TestVocab();
  MonoView view_l1 = MakeMonoView(v, Lang::kL1);
  Rng rng(2);
  Matrix pg_l1 = RandomLogPg(&rng, 4, view_l1.size);
  MergeWeights w{0.0, 1.0, 0.0};
  Matrix merged =
      MergePosteriors(nullptr, &pg_l1, nullptr, view_l1,
                      MakeMonoView(v, Lang::kL2), v.Size(), w);
  CheckRowsNormalized(merged);
  for (int t = 0; t < merged.rows; ++t) {
    // Foreign token (e1, id 3) sits near the floor.
    CHECK(merged(t, 3) < std::log(1e-9));
    // Native entries preserve their ranking.
    CHECK((pg_l1(t, 2) > pg_l1(t, 0)) == (merged(t, 2) > merged(t, 0)));
  }
}

TEST_CASE("merged rows equal an independent per-frame recomputation") {
  Vocab v = TestVocab();
  MonoView v1 = MakeMonoView(v, Lang::kL1), v2 = MakeMonoView(v, Lang::kL2);
  Rng rng(3);
  Matrix pg_bi = RandomLogPg(&rng, 2, v.Size());
  Matrix pg_l1 = RandomLogPg(&rng, 2, v1.size);
  Matrix pg_l2 = RandomLogPg(&rng, 2, v2.size);
  MergeWeights w{1.0 / 3, 1.0 / 3, 1.0 / 3};
  Matrix merged = MergePosteriors(&pg_bi, &pg_l1, &pg_l2, v1, v2, v.Size(), w);
  CheckRowsNormalized(merged);

  // Separate scalar recomputation: weighted mean over the sources that see
  // each token, then renormalize the row.
  for (int t = 0; t < 2; ++t) {
    std::vector<double> row(v.Size());
    for (int k = 0; k < v.Size(); ++k) {
      double acc = pg_bi(t, k), wsum = 1.0;  // bi sees everything
      int m1 = v1.ToMono(k);
      if (m1 >= 0) {
        acc += pg_l1(t, m1);
        wsum += 1.0;
      }
      int m2 = v2.ToMono(k);
      if (m2 >= 0) {
        acc += pg_l2(t, m2);
        wsum += 1.0;
      }
      row[k] = acc / wsum;
    }
    double lse = LogSumExp(row.data(), v.Size());
    for (int k = 0; k < v.Size(); ++k)
      CHECK(merged(t, k) == doctest::Approx(row[k] - lse).epsilon(1e-10));
  }
}

TEST_CASE("effective weights renormalize over enabled sources") {
  DecodeConfig cfg;
  cfg.use_l1 = cfg.use_l2 = false;
  MergeWeights w = cfg.EffectiveWeights();
  CHECK(w.bi == doctest::Approx(1.0));
  cfg = DecodeConfig{};
  cfg.use_bi = false;
  w = cfg.EffectiveWeights();
  CHECK(w.l1 == doctest::Approx(0.5));
  CHECK(w.l2 == doctest::Approx(0.5));
  cfg.use_l1 = cfg.use_l2 = false;
  CHECK_THROWS_AS(cfg.EffectiveWeights(), ConfigError);
  MergeWeights bad{0.9, 0.3, 0.1};
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
}

TEST_CASE("beam search reads a one-hot posteriorgram exactly") {
  Vocab v = TestVocab();
  Matrix pg = OneHotLogPg({2, 0, 3}, v.Size());
  DecodeConfig cfg;
  cfg.lambda2 = 1.0;
  cfg.use_lm = false;
  auto hyps = BeamSearch(pg, v, nullptr, cfg);
  REQUIRE(!hyps.empty());
  CHECK(hyps[0].labels == LabelSeq{2, 3});
  CHECK(hyps[0].score == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("beam search equals the exhaustive argmax at small scale") {
  Rng rng(5);
  Vocab v = TestVocab();
  std::vector<int32_t> tokens = {2, 3};
  DecodeConfig cfg;
  cfg.lambda2 = 1.0;
  cfg.use_lm = false;
  cfg.beam = 300;  // covers every prefix for T <= 4
  for (int trial = 0; trial < 40; ++trial) {
    int T = rng.UniformInt(1, 4);
    Matrix pg = RandomLogPg(&rng, T, v.Size());
    double best = kLogZero;
    LabelSeq best_seq;
    for (const auto& seq : EnumerateLabelSeqs(tokens, T)) {
      double ll = -CtcLoss(pg, seq, Vocab::kBlankId).loss;
      if (ll > best) {
        best = ll;
        best_seq = seq;
      }
    }
    auto hyps = BeamSearch(pg, v, nullptr, cfg);
    REQUIRE(!hyps.empty());
    CHECK(hyps[0].labels == best_seq);
    CHECK(hyps[0].score == doctest::Approx(best).epsilon(1e-9));
    // N-best scores never increase down the list.
    for (size_t i = 1; i < hyps.size(); ++i)
      CHECK(hyps[i].score <= hyps[i - 1].score + 1e-12);
  }
}

TEST_CASE("a strong LM flips a weak acoustic preference") {
  Vocab v = TestVocab();
  // One frame: p(m1)=0.56, p(e1)=0.41, blank 0.01, <NULL> 0.02. The tiny
  // blank mass keeps the empty hypothesis (which pays only the LM's eos
  // factor) from winning outright.
  Matrix pg(1, 4);
  pg(0, 0) = std::log(0.01);
  pg(0, 1) = std::log(0.02);
  pg(0, 2) = std::log(0.56);
  pg(0, 3) = std::log(0.41);
  // LM corpus heavily favours e1.
  std::vector<LabelSeq> corpus(40, LabelSeq{3});
  corpus.push_back({2});
  NGramLm lm = NGramLm::Train(corpus, v, 1, 0.1);

  DecodeConfig ctc_only;
  ctc_only.lambda2 = 1.0;
  ctc_only.use_lm = false;
  ctc_only.nbest = 4;
  auto acoustic = BeamSearch(pg, v, nullptr, ctc_only);
  REQUIRE(!acoustic.empty());
  CHECK(acoustic[0].labels == LabelSeq{2});  // m1 wins on acoustics

  DecodeConfig fused;
  fused.lambda2 = 0.2;
  fused.nbest = 4;
  auto with_lm = BeamSearch(pg, v, &lm, fused);
  REQUIRE(!with_lm.empty());
  CHECK(with_lm[0].labels == LabelSeq{3});  // e1 wins once the LM dominates

  // Hand check of the flip inequality on the two single-token hypotheses.
  double ctc_m1 = std::log(0.56), ctc_e1 = std::log(0.41);
  double lm_m1 = lm.ScoreSequence({2}), lm_e1 = lm.ScoreSequence({3});
  CHECK(0.2 * ctc_e1 + 0.8 * lm_e1 > 0.2 * ctc_m1 + 0.8 * lm_m1);
}

TEST_CASE("hypotheses never contain blank or <NULL>") {
  Rng rng(7);
  Vocab v = Vocab::Build({"m1", "m2"}, {"e1", "e2"});
  std::vector<LabelSeq> corpus;
  for (int i = 0; i < 10; ++i) {
    LabelSeq y;
    for (int j = 0; j < 4; ++j) y.push_back(rng.UniformInt(2, v.Size() - 1));
    corpus.push_back(y);
  }
  NGramLm lm = NGramLm::Train(corpus, v, 3, 0.1);
  DecodeConfig cfg;
  cfg.nbest = 8;
  for (int trial = 0; trial < 30; ++trial) {
    // Bias mass towards blank and <NULL> to stress the exclusion.
    Matrix pg = RandomLogPg(&rng, 6, v.Size());
    for (int t = 0; t < pg.rows; ++t) {
      pg(t, 0) += 1.5;
      pg(t, 1) += 2.0;
      double lse = LogSumExp(pg.Row(t), pg.cols);
      for (int k = 0; k < pg.cols; ++k) pg(t, k) -= lse;
    }
    for (const auto& hyp : BeamSearch(pg, v, &lm, cfg)) {
      for (int32_t id : hyp.labels) {
        CHECK(id != Vocab::kBlankId);
        CHECK(id != Vocab::kNullId);
      }
    }
  }
}

TEST_CASE("without the LM the decode is independent of it") {
  Rng rng(9);
  Vocab v = TestVocab();
  Matrix pg = RandomLogPg(&rng, 5, v.Size());
  NGramLm lm = NGramLm::Train({{2}, {3}}, v, 2, 0.1);
  DecodeConfig cfg;
  cfg.use_lm = false;
  cfg.lambda2 = 1.0;
  cfg.nbest = 4;
  auto without = BeamSearch(pg, v, nullptr, cfg);
  auto with_ptr = BeamSearch(pg, v, &lm, cfg);  // pointer present but unused
  REQUIRE(without.size() == with_ptr.size());
  for (size_t i = 0; i < without.size(); ++i) {
    CHECK(without[i].labels == with_ptr[i].labels);
    CHECK(without[i].score == with_ptr[i].score);
  }
}

TEST_CASE("frame LID follows the case analysis") {
  Vocab v = TestVocab();
  MonoView v1 = MakeMonoView(v, Lang::kL1), v2 = MakeMonoView(v, Lang::kL2);
  // View space: 0=blank, 1=<NULL>, 2=token.
  Matrix l1_tok = OneHotLogPg({2, 2, 0, 2}, v1.size);
  Matrix l2_null = OneHotLogPg({1, 1, 0, 2}, v2.size);
  LidResult r = FrameLid(l1_tok, l2_null);
  CHECK(r.frames[0] == LidDecision::kL1);        // token vs <NULL>
  CHECK(r.frames[1] == LidDecision::kL1);
  CHECK(r.frames[2] == LidDecision::kBlank);     // blank vs blank
  CHECK(r.frames[3] == LidDecision::kAmbiguous); // token vs token
  CHECK(r.counts[0] == 2);
  CHECK(r.counts[2] == 1);
  CHECK(r.counts[3] == 1);
  REQUIRE(r.spans.size() == 3);
  CHECK(r.spans[0].begin == 0);
  CHECK(r.spans[0].end == 2);

  Matrix l1_null = OneHotLogPg({1}, v1.size);
  Matrix l2_tok = OneHotLogPg({2}, v2.size);
  CHECK(FrameLid(l1_null, l2_tok).frames[0] == LidDecision::kL2);
  CHECK_THROWS_AS(FrameLid(l1_tok, l2_tok), ComputeError);
}

TEST_CASE("decode output files round-trip") {
  Vocab v = TestVocab();
  std::vector<std::pair<std::string, std::vector<ScoredHyp>>> hyps;
  hyps.push_back({"u1", {{LabelSeq{2, 3}, -1.5, -1.5, 0.0},
                         {LabelSeq{2}, -2.5, -2.5, 0.0}}});
  hyps.push_back({"u2", {{LabelSeq{}, -0.25, -0.25, 0.0}}});

  WriteDecodeOutput("decode-test.tsv", hyps, v, 1);
  auto top = ReadHypFile("decode-test.tsv", v);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "u1");
  CHECK(top[0].second == LabelSeq{2, 3});
  CHECK(top[1].second.empty());

  WriteDecodeOutput("decode-test.tsv", hyps, v, 2);
  auto nbest = ReadHypFile("decode-test.tsv", v);
  REQUIRE(nbest.size() == 2);  // rank-1 rows only
  CHECK(nbest[0].second == LabelSeq{2, 3});
  std::remove("decode-test.tsv");
}
