// tests/test-oracles.h

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

// Brute-force reference implementations used as test oracles. These must
// stay independent of the library code paths they check: everything here is
// plain enumeration or textbook DP.

#ifndef CONDCTC_TESTS_TEST_ORACLES_H_
#define CONDCTC_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "condctc/common.h"
#include "condctc/lexicon.h"

namespace condctc {
namespace testing {

// Repeat/blank collapse, re-stated locally so oracle results do not depend
// on the library's Collapse.
inline LabelSeq OracleCollapse(const std::vector<int32_t>& path,
                               int32_t blank_id) {
  LabelSeq out;
  int32_t prev = -1;
  for (int32_t s : path) {
    if (s != prev && s != blank_id) out.push_back(s);
    prev = s;
  }
  return out;
}

// Enumerates every |V|^T frame path and calls fn(path, logprob).
template <typename Fn>
void ForEachPath(const Matrix& logp, Fn&& fn) {
  const int T = logp.rows, V = logp.cols;
  std::vector<int32_t> path(T, 0);
  while (true) {
    double lp = 0.0;
    for (int t = 0; t < T; ++t) lp += logp(t, path[t]);
    fn(path, lp);
    int pos = T - 1;
    while (pos >= 0 && path[pos] == V - 1) path[pos--] = 0;
    if (pos < 0) break;
    path[pos] += 1;
  }
}

// log sum over all paths collapsing to y; kLogZero when none do.
inline double BruteForceCtcLogLik(const Matrix& logp, const LabelSeq& y,
                                  int32_t blank_id) {
  double total = kLogZero;
  ForEachPath(logp, [&](const std::vector<int32_t>& path, double lp) {
    if (OracleCollapse(path, blank_id) == y) total = LogAdd(total, lp);
  });
  return total;
}

// All maximum-probability paths that collapse to y (within tie_eps in log
// domain), plus the maximum itself.
struct BestPaths {
  double best = kLogZero;
  std::vector<std::vector<int32_t>> paths;
};
inline BestPaths BruteForceBestPaths(const Matrix& logp, const LabelSeq& y,
                                     int32_t blank_id,
                                     double tie_eps = 1e-12) {
  BestPaths out;
  ForEachPath(logp, [&](const std::vector<int32_t>& path, double lp) {
    if (OracleCollapse(path, blank_id) != y) return;
    if (lp > out.best + tie_eps) {
      out.best = lp;
      out.paths.clear();
    }
    if (lp >= out.best - tie_eps) out.paths.push_back(path);
  });
  return out;
}

// Random row-stochastic log matrix (softmax over gaussian logits).
inline Matrix RandomLogPg(Rng* rng, int T, int V, double scale = 1.5) {
  Matrix m(T, V);
  for (int t = 0; t < T; ++t) {
    double* row = m.Row(t);
    for (int k = 0; k < V; ++k) row[k] = scale * rng->Gaussian();
    double lse = LogSumExp(row, V);
    for (int k = 0; k < V; ++k) row[k] -= lse;
  }
  return m;
}

// Minimum frames needed to emit y under CTC (length plus separating blanks).
inline int MinFramesFor(const LabelSeq& y) {
  int repeats = 0;
  for (size_t i = 1; i < y.size(); ++i)
    if (y[i] == y[i - 1]) ++repeats;
  return static_cast<int>(y.size()) + repeats;
}

// Full-table unit-cost edit distance; the quadratic textbook DP.
inline int64_t FullTableEditDistance(const LabelSeq& a, const LabelSeq& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[n][m];
}

// All label sequences of length <= max_len over the given token ids.
inline std::vector<LabelSeq> EnumerateLabelSeqs(
    const std::vector<int32_t>& tokens, int max_len) {
  std::vector<LabelSeq> out{{}};
  std::vector<LabelSeq> frontier{{}};
  for (int l = 1; l <= max_len; ++l) {
    std::vector<LabelSeq> next;
    for (const auto& seq : frontier) {
      for (int32_t tok : tokens) {
        LabelSeq e = seq;
        e.push_back(tok);
        next.push_back(e);
        out.push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace testing
}  // namespace condctc

#endif  // CONDCTC_TESTS_TEST_ORACLES_H_
