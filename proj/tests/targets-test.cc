// tests/targets-test.cc

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

#include "condctc/targets.h"

using namespace condctc;

namespace {

// Vocab: m1,m2 (L1: ids 2,3), e1,e2 (L2: ids 4,5).
Vocab TestVocab() { return Vocab::Build({"m1", "m2"}, {"e1", "e2"}); }

Matrix OneHotViewPg(const std::vector<int32_t>& mono_path, int view_size,
                    double eps = 1e-30) {
  Matrix m(static_cast<int>(mono_path.size()), view_size);
  for (int t = 0; t < m.rows; ++t) {
    for (int k = 0; k < view_size; ++k) m(t, k) = std::log(eps);
    m(t, mono_path[t]) = std::log1p(-(view_size - 1) * eps);
  }
  return m;
}

}  // namespace

TEST_CASE("segmentation masking collapses foreign spans to one <NULL>") {
  Vocab v = TestVocab();
  int32_t m1 = 2, m2 = 3, m3 = 3, e1 = 4, e2 = 5;
  (void)m3;
  TargetPair pair = MaskSegmentation({m1, m2, e1, e2, m2}, v);
  CHECK(pair.scheme == Scheme::kSegmentation);
  CHECK(pair.y_l1 == LabelSeq{m1, m2, Vocab::kNullId, m2});
  CHECK(pair.y_l2 == LabelSeq{Vocab::kNullId, e1, e2, Vocab::kNullId});

  TargetPair mono = MaskSegmentation({m1, m2}, v);
  CHECK(mono.y_l1 == LabelSeq{m1, m2});
  CHECK(mono.y_l2 == LabelSeq{Vocab::kNullId});

  TargetPair empty = MaskSegmentation({}, v);
  CHECK(empty.y_l1.empty());
  CHECK(empty.y_l2.empty());
}

TEST_CASE("segmentation targets never contain adjacent <NULL>s") {
  Vocab v = TestVocab();
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    LabelSeq y;
    int len = rng.UniformInt(0, 14);
    for (int i = 0; i < len; ++i) y.push_back(rng.UniformInt(2, v.Size() - 1));
    TargetPair pair = MaskSegmentation(y, v);
    for (const LabelSeq* t : {&pair.y_l1, &pair.y_l2}) {
      for (size_t i = 1; i < t->size(); ++i)
        CHECK(!((*t)[i] == Vocab::kNullId && (*t)[i - 1] == Vocab::kNullId));
    }
    // Native tokens survive in order.
    LabelSeq l1_tokens, expect_l1;
    for (int32_t id : pair.y_l1)
      if (id != Vocab::kNullId) l1_tokens.push_back(id);
    for (int32_t id : y)
      if (v.LangOf(id) == Lang::kL1) expect_l1.push_back(id);
    CHECK(l1_tokens == expect_l1);
  }
}

TEST_CASE("pseudo-labels are collapsed greedy paths mapped to full ids") {
  Vocab v = TestVocab();
  MonoView view = MakeMonoView(v, Lang::kL1);
  // View space: 0=blank, 1=<NULL>, 2=m1, 3=m2.
  Matrix pg = OneHotViewPg({2, 2, 0, 3}, view.size);
  MonoPgFn fn = [&](const FeatureSeq&) { return pg; };
  FeatureSeq x(4, 1);
  LabelSeq got = PseudoLabel(fn, x, view);
  CHECK(got == LabelSeq{2, 3});  // full ids of m1, m2

  // All-blank greedy path gives an empty (but legal) transliteration.
  Matrix blanks = OneHotViewPg({0, 0, 0}, view.size);
  MonoPgFn fn2 = [&](const FeatureSeq&) { return blanks; };
  CHECK(PseudoLabel(fn2, x, view).empty());

  // Greedy <NULL> hits are dropped during collapse.
  Matrix with_null = OneHotViewPg({2, 1, 3}, view.size);
  MonoPgFn fn3 = [&](const FeatureSeq&) { return with_null; };
  CHECK(PseudoLabel(fn3, x, view) == LabelSeq{2, 3});
}

TEST_CASE("stitching keeps pure-native views untouched") {
  Vocab v = TestVocab();
  MonoView view = MakeMonoView(v, Lang::kL1);
  LabelSeq y = {2, 3};  // m1 m2, no foreign span
  Matrix pg = OneHotViewPg({2, 0, 3, 0}, view.size);
  auto out = StitchView(y, v, view, pg);
  REQUIRE(out.has_value());
  CHECK(*out == y);
}

TEST_CASE("an entirely foreign view pseudo-labels the whole utterance") {
  Vocab v = TestVocab();
  MonoView view = MakeMonoView(v, Lang::kL1);
  LabelSeq y = {4, 5};  // pure L2: the L1 masked view is just <NULL>
  Matrix pg = OneHotViewPg({2, 0, 3}, view.size);
  auto out = StitchView(y, v, view, pg);
  REQUIRE(out.has_value());
  FeatureSeq x(3, 1);
  MonoPgFn fn = [&](const FeatureSeq&) { return pg; };
  CHECK(*out == PseudoLabel(fn, x, view));
  CHECK(*out == LabelSeq{2, 3});
}

TEST_CASE("stitching splices pseudo-labels into the forced-aligned gap") {
  Vocab v = TestVocab();
  MonoView view = MakeMonoView(v, Lang::kL1);
  // y = m1 e1 m2; masked L1 view = m1 <NULL> m2.
  LabelSeq y = {2, 4, 3};
  // Frames: m1, m2 (the transliteration content), blank, m2.
  // The unique best alignment puts <NULL> on frame 1, m2 on frame 3, so the
  // foreign gap is frames [1,3) and its collapsed greedy labels are [m2].
  Matrix pg = OneHotViewPg({2, 3, 0, 3}, view.size);
  auto out = StitchView(y, v, view, pg);
  REQUIRE(out.has_value());
  CHECK(*out == LabelSeq{2, 3, 3});
}

TEST_CASE("stitch produces both views via the per-view native models") {
  Vocab v = TestVocab();
  MonoView view_l1 = MakeMonoView(v, Lang::kL1);
  MonoView view_l2 = MakeMonoView(v, Lang::kL2);
  LabelSeq y = {2, 4, 3};  // m1 e1 m2
  Matrix pg_l1 = OneHotViewPg({2, 3, 0, 3}, view_l1.size);
  // L2 masked view = <NULL> e1 <NULL>; frames: e2, e1, blank, e2.
  Matrix pg_l2 = OneHotViewPg({3, 2, 0, 3}, view_l2.size);
  FeatureSeq x(4, 1);
  MonoPgFn f1 = [&](const FeatureSeq&) { return pg_l1; };
  MonoPgFn f2 = [&](const FeatureSeq&) { return pg_l2; };
  auto pair = StitchCsTargets(y, x, v, f1, f2);
  REQUIRE(pair.has_value());
  CHECK(pair->scheme == Scheme::kTransliteration);
  CHECK(pair->y_l1 == LabelSeq{2, 3, 3});
  // L2 view: leading <NULL> gap is frame [0,1) -> e2; e1 aligns at frame 1;
  // trailing gap [2,4) -> e2.
  CHECK(pair->y_l2 == LabelSeq{5, 4, 5});
}

TEST_CASE("make_training_targets routes by scheme and category") {
  Vocab v = TestVocab();
  MonoView view_l1 = MakeMonoView(v, Lang::kL1);
  MonoView view_l2 = MakeMonoView(v, Lang::kL2);

  std::vector<Utterance> utts(3);
  utts[0].id = "l1utt";
  utts[0].category = Category::kMonoL1;
  utts[0].transcript = {2, 3};
  utts[0].feats = FeatureSeq(4, 1);
  utts[1].id = "l2utt";
  utts[1].category = Category::kMonoL2;
  utts[1].transcript = {4, 5};
  utts[1].feats = FeatureSeq(4, 1);
  utts[2].id = "csutt";
  utts[2].category = Category::kCs;
  utts[2].transcript = {2, 4, 3};
  utts[2].feats = FeatureSeq(4, 1);

  std::vector<const Utterance*> uptrs{&utts[0], &utts[1], &utts[2]};

  SUBCASE("segmentation masks everywhere") {
    auto targets = MakeTrainingTargets(uptrs, Scheme::kSegmentation, v, nullptr,
                                       nullptr, nullptr);
    REQUIRE(targets.size() == 3);
    CHECK(targets[0].pair.y_l1 == utts[0].transcript);
    CHECK(targets[0].pair.y_l2 == LabelSeq{Vocab::kNullId});
    CHECK(targets[1].pair.y_l2 == utts[1].transcript);
    CHECK(targets[1].pair.y_l1 == LabelSeq{Vocab::kNullId});
  }

  SUBCASE("transliteration keeps native truth and pseudo-labels the rest") {
    Matrix pg_l1 = OneHotViewPg({2, 3, 0, 3}, view_l1.size);
    Matrix pg_l2 = OneHotViewPg({3, 2, 0, 3}, view_l2.size);
    MonoPgFn f1 = [&](const FeatureSeq&) { return pg_l1; };
    MonoPgFn f2 = [&](const FeatureSeq&) { return pg_l2; };
    TargetReport report;
    auto targets = MakeTrainingTargets(uptrs, Scheme::kTransliteration, v, &f1,
                                       &f2, &report);
    REQUIRE(targets.size() == 3);
    CHECK(targets[0].pair.y_l1 == utts[0].transcript);          // native truth
    CHECK(targets[0].pair.y_l2 == LabelSeq{5, 4, 5});           // pseudo-label
    CHECK(targets[1].pair.y_l2 == utts[1].transcript);
    CHECK(targets[1].pair.y_l1 == LabelSeq{2, 3, 3});
    // CS goes through stitching.
    auto direct = StitchCsTargets(utts[2].transcript, utts[2].feats, v, f1, f2);
    REQUIRE(direct.has_value());
    CHECK(targets[2].pair.y_l1 == direct->y_l1);
    CHECK(targets[2].pair.y_l2 == direct->y_l2);
    CHECK(report.skipped_ids.empty());
  }

  SUBCASE("transliteration without pseudo-labelers is a config error") {
    CHECK_THROWS_AS(MakeTrainingTargets(uptrs, Scheme::kTransliteration, v,
                                        nullptr, nullptr, nullptr),
                    ConfigError);
  }

  SUBCASE("infeasible stitch alignments skip the utterance with its id") {
    // One frame cannot align the three-label masked view.
    Matrix tiny1 = OneHotViewPg({2}, view_l1.size);
    Matrix tiny2 = OneHotViewPg({2}, view_l2.size);
    MonoPgFn f1 = [&](const FeatureSeq&) { return tiny1; };
    MonoPgFn f2 = [&](const FeatureSeq&) { return tiny2; };
    TargetReport report;
    auto targets = MakeTrainingTargets({&utts[2]}, Scheme::kTransliteration, v,
                                       &f1, &f2, &report);
    CHECK(targets.empty());
    REQUIRE(report.skipped_ids.size() == 1);
    CHECK(report.skipped_ids[0] == "csutt");
  }
}

TEST_CASE("transliteration targets contain only in-language tokens") {
  Vocab v = TestVocab();
  MonoView view_l1 = MakeMonoView(v, Lang::kL1);
  MonoView view_l2 = MakeMonoView(v, Lang::kL2);
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    int T = rng.UniformInt(4, 10);
    std::vector<int32_t> path1, path2;
    for (int t = 0; t < T; ++t) {
      path1.push_back(rng.UniformInt(0, view_l1.size - 1));
      path2.push_back(rng.UniformInt(0, view_l2.size - 1));
    }
    Matrix pg1 = OneHotViewPg(path1, view_l1.size);
    Matrix pg2 = OneHotViewPg(path2, view_l2.size);
    MonoPgFn f1 = [&](const FeatureSeq&) { return pg1; };
    MonoPgFn f2 = [&](const FeatureSeq&) { return pg2; };
    FeatureSeq x(T, 1);
    MonoView v1 = view_l1;
    LabelSeq p1 = PseudoLabel(f1, x, v1);
    for (int32_t id : p1) CHECK(v.LangOf(id) == Lang::kL1);
    LabelSeq p2 = PseudoLabel(f2, x, view_l2);
    for (int32_t id : p2) CHECK(v.LangOf(id) == Lang::kL2);
  }
}

TEST_CASE("targets cache files round-trip") {
  Vocab v = TestVocab();
  std::vector<UtteranceTargets> targets(2);
  targets[0].id = "u1";
  targets[0].pair.scheme = Scheme::kSegmentation;
  targets[0].pair.y_l1 = {2, Vocab::kNullId, 3};
  targets[0].pair.y_l2 = {Vocab::kNullId, 4};
  targets[1].id = "u2";
  targets[1].pair.scheme = Scheme::kTransliteration;
  targets[1].pair.y_l1 = {};
  targets[1].pair.y_l2 = {4, 5};
  WriteTargets(targets, v, "targets-test.tsv");
  auto back = ReadTargets("targets-test.tsv", v);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "u1");
  CHECK(back[0].pair.scheme == Scheme::kSegmentation);
  CHECK(back[0].pair.y_l1 == targets[0].pair.y_l1);
  CHECK(back[0].pair.y_l2 == targets[0].pair.y_l2);
  CHECK(back[1].pair.y_l1.empty());
  CHECK(back[1].pair.y_l2 == targets[1].pair.y_l2);
  std::remove("targets-test.tsv");
}
