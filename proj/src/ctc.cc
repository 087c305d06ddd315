// condctc/ctc.cc

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

#include "condctc/ctc.h"

#include <algorithm>

namespace condctc {

namespace {

std::vector<int32_t> ExtendedTarget(const LabelSeq& y, int32_t blank_id) {
  std::vector<int32_t> ext;
  ext.reserve(2 * y.size() + 1);
  ext.push_back(blank_id);
  for (int32_t id : y) {
    ext.push_back(id);
    ext.push_back(blank_id);
  }
  return ext;
}

void CheckInputs(const Posteriorgram& logp, const LabelSeq& y,
                 int32_t blank_id) {
  if (blank_id < 0 || blank_id >= logp.cols)
    throw ComputeError("ctc: blank id outside posteriorgram vocabulary");
  for (int32_t id : y) {
    if (id < 0 || id >= logp.cols)
      throw ComputeError("ctc: label id outside posteriorgram vocabulary");
    if (id == blank_id) throw ComputeError("ctc: target contains blank");
  }
}

// Skip transition s-2 -> s exists iff state s is a non-blank whose label
// differs from the label two states back.
inline bool SkipAllowed(const std::vector<int32_t>& ext, int s,
                        int32_t blank_id) {
  return s >= 2 && ext[s] != blank_id && ext[s] != ext[s - 2];
}

}  // namespace

CtcLattice CtcForwardBackward(const Posteriorgram& logp, const LabelSeq& y,
                              int32_t blank_id) {
  CheckInputs(logp, y, blank_id);
  CtcLattice lat;
  lat.ext = ExtendedTarget(y, blank_id);
  const int T = logp.rows;
  const int S = static_cast<int>(lat.ext.size());
  if (T == 0) {
    lat.loglik = y.empty() ? 0.0 : kLogZero;
    return lat;
  }
  lat.alpha = Matrix(T, S, kLogZero);
  lat.beta = Matrix(T, S, kLogZero);

  lat.alpha(0, 0) = logp(0, blank_id);
  if (S > 1) lat.alpha(0, 1) = logp(0, lat.ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = lat.alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, lat.alpha(t - 1, s - 1));
      if (SkipAllowed(lat.ext, s, blank_id))
        a = LogAdd(a, lat.alpha(t - 1, s - 2));
      lat.alpha(t, s) = a == kLogZero ? kLogZero : a + logp(t, lat.ext[s]);
    }
  }

  lat.beta(T - 1, S - 1) = logp(T - 1, blank_id);
  if (S > 1) lat.beta(T - 1, S - 2) = logp(T - 1, lat.ext[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = S - 1; s >= 0; --s) {
      double b = lat.beta(t + 1, s);
      if (s + 1 < S) b = LogAdd(b, lat.beta(t + 1, s + 1));
      if (s + 2 < S && SkipAllowed(lat.ext, s + 2, blank_id))
        b = LogAdd(b, lat.beta(t + 1, s + 2));
      lat.beta(t, s) = b == kLogZero ? kLogZero : b + logp(t, lat.ext[s]);
    }
  }

  double ll = lat.alpha(T - 1, S - 1);
  if (S > 1) ll = LogAdd(ll, lat.alpha(T - 1, S - 2));
  lat.loglik = ll;
  return lat;
}

CtcLossResult CtcLoss(const Posteriorgram& logp, const LabelSeq& y,
                      int32_t blank_id) {
  CtcLattice lat = CtcForwardBackward(logp, y, blank_id);
  CtcLossResult res;
  res.grad = Matrix(logp.rows, logp.cols, 0.0);
  if (!lat.Feasible()) {
    res.loss = std::numeric_limits<double>::infinity();
    return res;
  }
  res.loss = -lat.loglik;
  const int T = logp.rows;
  const int S = static_cast<int>(lat.ext.size());
  std::vector<double> occ(logp.cols);
  for (int t = 0; t < T; ++t) {
    std::fill(occ.begin(), occ.end(), kLogZero);
    for (int s = 0; s < S; ++s) {
      double ab = lat.alpha(t, s) + lat.beta(t, s);
      if (ab == kLogZero || std::isnan(ab)) continue;
      int32_t k = lat.ext[s];
      occ[k] = LogAdd(occ[k], ab);
    }
    // alpha and beta both include the emission at t, so dividing by
    // p(t,k) once yields the posterior path mass through symbol k.
    double* g = res.grad.Row(t);
    for (int k = 0; k < logp.cols; ++k) {
      if (occ[k] == kLogZero) continue;
      g[k] = -std::exp(occ[k] - lat.loglik - logp(t, k));
    }
  }
  return res;
}

std::vector<int32_t> GreedyDecode(const Posteriorgram& logp) {
  std::vector<int32_t> path(logp.rows);
  for (int t = 0; t < logp.rows; ++t) {
    const double* row = logp.Row(t);
    int best = 0;
    for (int k = 1; k < logp.cols; ++k)
      if (row[k] > row[best]) best = k;
    path[t] = best;
  }
  return path;
}

LabelSeq Collapse(const std::vector<int32_t>& path, int32_t blank_id,
                  int32_t also_remove) {
  LabelSeq out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && path[i] == path[i - 1]) continue;
    if (path[i] == blank_id || path[i] == also_remove) continue;
    out.push_back(path[i]);
  }
  return out;
}

std::optional<ForcedAlignment> ForcedAlign(const Posteriorgram& logp,
                                           const LabelSeq& y,
                                           int32_t blank_id) {
  CheckInputs(logp, y, blank_id);
  std::vector<int32_t> ext = ExtendedTarget(y, blank_id);
  const int T = logp.rows;
  const int S = static_cast<int>(ext.size());
  if (T == 0) {
    if (!y.empty()) return std::nullopt;
    return ForcedAlignment{{}, {}, 0.0};
  }

  Matrix v(T, S, kLogZero);
  // Predecessor offset per cell: 0 = stayed, 1 = from s-1, 2 = from s-2.
  std::vector<uint8_t> bp(static_cast<size_t>(T) * S, 0);
  v(0, 0) = logp(0, blank_id);
  if (S > 1) v(0, 1) = logp(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      // Strict > keeps the earliest-entering predecessor on ties.
      double best = v(t - 1, s);
      uint8_t from = 0;
      if (s >= 1 && v(t - 1, s - 1) > best) {
        best = v(t - 1, s - 1);
        from = 1;
      }
      if (SkipAllowed(ext, s, blank_id) && v(t - 1, s - 2) > best) {
        best = v(t - 1, s - 2);
        from = 2;
      }
      if (best == kLogZero) continue;
      v(t, s) = best + logp(t, ext[s]);
      bp[static_cast<size_t>(t) * S + s] = from;
    }
  }

  int s = S - 1;
  if (S > 1 && v(T - 1, S - 2) > v(T - 1, S - 1)) s = S - 2;
  if (v(T - 1, s) == kLogZero) return std::nullopt;

  ForcedAlignment out;
  out.logprob = v(T - 1, s);
  out.path.assign(T, blank_id);
  std::vector<int> states(T);
  for (int t = T - 1; t >= 0; --t) {
    states[t] = s;
    out.path[t] = ext[s];
    if (t > 0) s -= bp[static_cast<size_t>(t) * S + s];
  }
  out.label_spans.assign(y.size(), FrameSpan{});
  std::vector<bool> seen(y.size(), false);
  for (int t = 0; t < T; ++t) {
    if (states[t] % 2 == 0) continue;  // blank state
    int label = (states[t] - 1) / 2;
    if (!seen[label]) {
      out.label_spans[label].begin = t;
      seen[label] = true;
    }
    out.label_spans[label].end = t + 1;
  }
  return out;
}

}  // namespace condctc
