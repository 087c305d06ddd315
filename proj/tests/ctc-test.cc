// tests/ctc-test.cc

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

#include "condctc/ctc.h"
#include "test-oracles.h"

using namespace condctc;
using namespace condctc::testing;

namespace {

constexpr int32_t kBlank = 0;

Matrix UniformLogPg(int T, int V) {
  return Matrix(T, V, -std::log(static_cast<double>(V)));
}

Matrix OneHotLogPg(const std::vector<int32_t>& path, int V,
                   double eps = 1e-30) {
  // Numerically one-hot: non-target entries get log(eps)-ish mass so rows
  // stay valid distributions.
  Matrix m(static_cast<int>(path.size()), V);
  for (int t = 0; t < m.rows; ++t) {
    for (int k = 0; k < V; ++k) m(t, k) = std::log(eps);
    m(t, path[t]) = std::log1p(-(V - 1) * eps);
  }
  return m;
}

LabelSeq RandomFeasibleTarget(Rng* rng, int T, int V, int max_len) {
  while (true) {
    LabelSeq y;
    int len = rng->UniformInt(0, max_len);
    for (int i = 0; i < len; ++i) y.push_back(rng->UniformInt(1, V - 1));
    if (MinFramesFor(y) <= T) return y;
  }
}

}  // namespace

TEST_CASE("two uniform frames over {a,blank} give likelihood 3/4 for [a]") {
  Matrix pg = UniformLogPg(2, 2);
  CtcLossResult res = CtcLoss(pg, {1}, kBlank);
  CHECK(res.loss == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("repeated label needs a separating blank") {
  Matrix pg = UniformLogPg(2, 2);
  CtcLossResult res = CtcLoss(pg, {1, 1}, kBlank);
  CHECK(std::isinf(res.loss));
  for (double g : res.grad.data) CHECK(g == 0.0);
}

TEST_CASE("empty target likelihood is the all-blank path") {
  Rng rng(3);
  Matrix pg = RandomLogPg(&rng, 5, 3);
  CtcLossResult res = CtcLoss(pg, {}, kBlank);
  double expect = 0.0;
  for (int t = 0; t < pg.rows; ++t) expect += pg(t, kBlank);
  CHECK(res.loss == doctest::Approx(-expect).epsilon(1e-12));
}

TEST_CASE("ctc loss equals brute-force alignment enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    int T = rng.UniformInt(1, 6);
    int V = rng.UniformInt(2, 4);
    Matrix pg = RandomLogPg(&rng, T, V);
    LabelSeq y = RandomFeasibleTarget(&rng, T, V, 3);
    double oracle = BruteForceCtcLogLik(pg, y, kBlank);
    CtcLossResult res = CtcLoss(pg, y, kBlank);
    REQUIRE(oracle != kLogZero);
    CHECK(res.loss == doctest::Approx(-oracle).epsilon(1e-10));
  }
}

TEST_CASE("alpha-beta mass is constant over frames") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    int T = rng.UniformInt(2, 8);
    int V = rng.UniformInt(2, 5);
    Matrix pg = RandomLogPg(&rng, T, V);
    LabelSeq y = RandomFeasibleTarget(&rng, T, V, 4);
    CtcLattice lat = CtcForwardBackward(pg, y, kBlank);
    REQUIRE(lat.Feasible());
    for (int t = 0; t < T; ++t) {
      double total = kLogZero;
      for (size_t s = 0; s < lat.ext.size(); ++s) {
        double ab = lat.alpha(t, static_cast<int>(s)) +
                    lat.beta(t, static_cast<int>(s));
        if (ab == kLogZero || std::isnan(ab)) continue;
        total = LogAdd(total, ab - pg(t, lat.ext[s]));
      }
      CHECK(total == doctest::Approx(lat.loglik).epsilon(1e-8));
    }
  }
}

TEST_CASE("loss gradient matches finite differences with row renormalization") {
  Rng rng(29);
  const double h = 1e-4;
  for (int trial = 0; trial < 8; ++trial) {
    int T = rng.UniformInt(2, 5);
    int V = rng.UniformInt(2, 4);
    Matrix pg = RandomLogPg(&rng, T, V);
    LabelSeq y = RandomFeasibleTarget(&rng, T, V, 2);
    CtcLossResult res = CtcLoss(pg, y, kBlank);
    REQUIRE(std::isfinite(res.loss));
    for (int t = 0; t < T; ++t) {
      double gsum = 0.0;
      for (int k = 0; k < V; ++k) gsum += res.grad(t, k);
      for (int k = 0; k < V; ++k) {
        auto perturbed = [&](double delta) {
          Matrix q = pg;
          q(t, k) += delta;
          double lse = LogSumExp(q.Row(t), V);
          for (int j = 0; j < V; ++j) q(t, j) -= lse;
          return CtcLoss(q, y, kBlank).loss;
        };
        double fd = (perturbed(h) - perturbed(-h)) / (2 * h);
        // Projection through the renormalization Jacobian.
        double an = res.grad(t, k) - std::exp(pg(t, k)) * gsum;
        double rel = std::fabs(fd - an) / std::max(1.0, std::fabs(fd) + std::fabs(an));
        CHECK(rel <= 1e-4);
      }
    }
  }
}

TEST_CASE("greedy decode takes the per-row argmax with low-index ties") {
  Matrix uniform = UniformLogPg(4, 3);
  auto path = GreedyDecode(uniform);
  for (int32_t s : path) CHECK(s == 0);

  Matrix onehot = OneHotLogPg({2, 0, 1}, 3);
  CHECK(GreedyDecode(onehot) == std::vector<int32_t>{2, 0, 1});

  Rng rng(31);
  Matrix pg = RandomLogPg(&rng, 20, 6);
  auto got = GreedyDecode(pg);
  for (int t = 0; t < pg.rows; ++t) {
    int best = 0;
    for (int k = 1; k < pg.cols; ++k)
      if (pg(t, k) > pg(t, best)) best = k;
    CHECK(got[t] == best);
  }
}

TEST_CASE("collapse merges repeats then deletes blanks") {
  CHECK(Collapse({1, 1, 0, 2, 0, 0}, kBlank) == LabelSeq{1, 2});
  CHECK(Collapse({0, 0, 0}, kBlank) == LabelSeq{});
  CHECK(Collapse({1, 0, 1}, kBlank) == LabelSeq{1, 1});
  // Optional extra symbol removal (used for <NULL>).
  CHECK(Collapse({1, 3, 3, 2}, kBlank, 3) == LabelSeq{1, 2});
}

TEST_CASE("greedy+collapse of a canonical one-hot alignment recovers y") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    int V = rng.UniformInt(2, 5);
    LabelSeq y = RandomFeasibleTarget(&rng, 12, V, 4);
    // Canonical alignment: each label, blank-separated.
    std::vector<int32_t> path;
    for (size_t i = 0; i < y.size(); ++i) {
      path.push_back(y[i]);
      path.push_back(kBlank);
    }
    while (path.size() < 12) path.push_back(kBlank);
    Matrix pg = OneHotLogPg(path, V);
    CHECK(Collapse(GreedyDecode(pg), kBlank) == y);
  }
}

TEST_CASE("forced alignment on a consistent one-hot posteriorgram is exact") {
  std::vector<int32_t> truth = {0, 1, 1, 0, 2, 0};
  Matrix pg = OneHotLogPg(truth, 3);
  auto fa = ForcedAlign(pg, {1, 2}, kBlank);
  REQUIRE(fa.has_value());
  CHECK(fa->path == truth);
  CHECK(fa->logprob == doctest::Approx(0.0).epsilon(1e-6));
  REQUIRE(fa->label_spans.size() == 2);
  CHECK(fa->label_spans[0] == FrameSpan{1, 3});
  CHECK(fa->label_spans[1] == FrameSpan{4, 5});
}

TEST_CASE("forced alignment picks a maximum-probability path (enumeration)") {
  Matrix pg = UniformLogPg(3, 2);
  LabelSeq y = {1};
  auto fa = ForcedAlign(pg, y, kBlank);
  REQUIRE(fa.has_value());
  BestPaths oracle = BruteForceBestPaths(pg, y, kBlank);
  CHECK(fa->logprob == doctest::Approx(oracle.best).epsilon(1e-12));
  bool found = false;
  for (const auto& p : oracle.paths) found = found || p == fa->path;
  CHECK(found);
}

TEST_CASE("forced alignment of an infeasible target reports no alignment") {
  Matrix pg = UniformLogPg(2, 2);
  CHECK(!ForcedAlign(pg, {1, 1}, kBlank).has_value());
}

TEST_CASE("forced alignment always collapses back to the target") {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    int T = rng.UniformInt(1, 7);
    int V = rng.UniformInt(2, 4);
    Matrix pg = RandomLogPg(&rng, T, V);
    LabelSeq y = RandomFeasibleTarget(&rng, T, V, 3);
    auto fa = ForcedAlign(pg, y, kBlank);
    REQUIRE(fa.has_value());
    CHECK(Collapse(fa->path, kBlank) == y);
    BestPaths oracle = BruteForceBestPaths(pg, y, kBlank);
    CHECK(fa->logprob == doctest::Approx(oracle.best).epsilon(1e-9));
    // Spans are ordered and sit inside the utterance.
    int prev_end = 0;
    for (const auto& s : fa->label_spans) {
      CHECK(s.begin >= prev_end);
      CHECK(s.end > s.begin);
      CHECK(s.end <= T);
      prev_end = s.end;
    }
  }
}

TEST_CASE("ctc rejects vocabulary mismatches") {
  Matrix pg = UniformLogPg(3, 3);
  CHECK_THROWS_AS(CtcLoss(pg, {5}, kBlank), ComputeError);
  CHECK_THROWS_AS(CtcLoss(pg, {0}, kBlank), ComputeError);
  CHECK_THROWS_AS(CtcLoss(pg, {1}, 9), ComputeError);
}
