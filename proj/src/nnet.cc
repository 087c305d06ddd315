// condctc/nnet.cc

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

#include "condctc/nnet.h"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace condctc {

namespace {

void InitAffine(Affine* a, int out, int in, Rng* rng) {
  a->Resize(out, in);
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : a->w.data) w = rng->Uniform(-bound, bound);
  for (double& b : a->b) b = rng->Uniform(-bound, bound);
}

// out[t] = W * in[t] + b for every row.
void AffineForward(const Affine& a, const Matrix& in, Matrix* out) {
  const int T = in.rows, O = a.w.rows, I = a.w.cols;
  *out = Matrix(T, O);
  for (int t = 0; t < T; ++t) {
    const double* x = in.Row(t);
    double* y = out->Row(t);
    for (int o = 0; o < O; ++o) {
      const double* w = a.w.Row(o);
      double acc = a.b[o];
      for (int i = 0; i < I; ++i) acc += w[i] * x[i];
      y[o] = acc;
    }
  }
}

void TanhInPlace(Matrix* m) {
  for (double& v : m->data) v = std::tanh(v);
}

// Given dL/d tanh-out (dout) and the tanh outputs, accumulates affine grads
// and writes dL/d in.
void AffineTanhBackward(const Affine& a, const Matrix& in, const Matrix& out,
                        const Matrix& dout, Affine* grads, Matrix* din) {
  const int T = in.rows, O = a.w.rows, I = a.w.cols;
  if (din) *din = Matrix(T, I, 0.0);
  std::vector<double> dz(O);
  for (int t = 0; t < T; ++t) {
    const double* o = out.Row(t);
    const double* g = dout.Row(t);
    for (int k = 0; k < O; ++k) dz[k] = g[k] * (1.0 - o[k] * o[k]);
    const double* x = in.Row(t);
    for (int k = 0; k < O; ++k) {
      double* gw = grads->w.Row(k);
      double d = dz[k];
      if (d == 0.0) continue;
      for (int i = 0; i < I; ++i) gw[i] += d * x[i];
      grads->b[k] += d;
    }
    if (din) {
      double* dx = din->Row(t);
      for (int k = 0; k < O; ++k) {
        const double* w = a.w.Row(k);
        double d = dz[k];
        if (d == 0.0) continue;
        for (int i = 0; i < I; ++i) dx[i] += d * w[i];
      }
    }
  }
}

void PutLe32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t GetLe32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw DataError("truncated tensor file reading " + what);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

EncoderParams InitEncoder(int feat_dim, int hidden, int context, Rng* rng) {
  EncoderParams p;
  p.context = context;
  p.feat_dim = feat_dim;
  p.hidden = hidden;
  InitAffine(&p.lin1, hidden, (2 * context + 1) * feat_dim, rng);
  InitAffine(&p.lin2, hidden, hidden, rng);
  return p;
}

HeadParams InitHead(int hidden, int out_dim, Rng* rng) {
  HeadParams p;
  InitAffine(&p.proj, out_dim, hidden, rng);
  return p;
}

Matrix Encode(const EncoderParams& p, const FeatureSeq& x,
              EncoderCache* cache) {
  if (x.cols != p.feat_dim)
    throw ComputeError("encoder expects feature dim " +
                       std::to_string(p.feat_dim) + ", got " +
                       std::to_string(x.cols));
  const int T = x.rows, D = x.cols, c = p.context;
  Matrix spliced(T, (2 * c + 1) * D);
  for (int t = 0; t < T; ++t) {
    double* row = spliced.Row(t);
    for (int off = -c; off <= c; ++off) {
      int src = std::clamp(t + off, 0, T - 1);  // edge replication
      const float* f = x.Row(src);
      double* dst = row + (off + c) * D;
      for (int d = 0; d < D; ++d) dst[d] = static_cast<double>(f[d]);
    }
  }
  Matrix h1, h2;
  AffineForward(p.lin1, spliced, &h1);
  TanhInPlace(&h1);
  AffineForward(p.lin2, h1, &h2);
  TanhInPlace(&h2);
  for (double v : h2.data)
    if (!std::isfinite(v)) throw ComputeError("encoder produced non-finite latent");
  if (cache) {
    cache->spliced = std::move(spliced);
    cache->h1 = h1;
    cache->h2 = h2;
  }
  return h2;
}

Matrix HeadLogProbs(const HeadParams& p, const Matrix& latent) {
  if (latent.cols != p.proj.w.cols)
    throw ComputeError("head expects latent dim " +
                       std::to_string(p.proj.w.cols) + ", got " +
                       std::to_string(latent.cols));
  Matrix logits;
  AffineForward(p.proj, latent, &logits);
  for (int t = 0; t < logits.rows; ++t) {
    double* row = logits.Row(t);
    double lse = LogSumExp(row, logits.cols);
    for (int k = 0; k < logits.cols; ++k) row[k] -= lse;
  }
  return logits;
}

void EncoderBackward(const EncoderParams& p, const EncoderCache& cache,
                     const Matrix& dlatent, EncoderGrads* grads,
                     Matrix* dinput) {
  if (cache.h2.rows == 0)
    throw ComputeError("encoder backward called without a forward cache");
  if (!dlatent.SameShape(cache.h2))
    throw ComputeError("encoder backward: upstream gradient shape mismatch");
  Matrix dh1;
  AffineTanhBackward(p.lin2, cache.h1, cache.h2, dlatent, &grads->lin2, &dh1);
  Matrix dspliced;
  AffineTanhBackward(p.lin1, cache.spliced, cache.h1, dh1, &grads->lin1,
                     dinput ? &dspliced : nullptr);
  if (dinput) {
    const int T = cache.spliced.rows, D = p.feat_dim, c = p.context;
    *dinput = Matrix(T, D, 0.0);
    for (int t = 0; t < T; ++t) {
      const double* row = dspliced.Row(t);
      for (int off = -c; off <= c; ++off) {
        int src = std::clamp(t + off, 0, T - 1);
        double* dst = dinput->Row(src);
        const double* part = row + (off + c) * D;
        for (int d = 0; d < D; ++d) dst[d] += part[d];
      }
    }
  }
}

void HeadBackward(const HeadParams& p, const Matrix& latent,
                  const Matrix& logp, const Matrix& dlogp, HeadGrads* grads,
                  Matrix* dlatent_accum) {
  const int T = latent.rows, O = p.proj.w.rows, H = p.proj.w.cols;
  if (dlogp.rows != T || dlogp.cols != O)
    throw ComputeError("head backward: upstream gradient shape mismatch");
  std::vector<double> du(O);
  for (int t = 0; t < T; ++t) {
    const double* g = dlogp.Row(t);
    const double* lp = logp.Row(t);
    double gsum = 0.0;
    for (int k = 0; k < O; ++k) gsum += g[k];
    // d logp_j / d logit_k = delta_jk - p_k.
    for (int k = 0; k < O; ++k) du[k] = g[k] - std::exp(lp[k]) * gsum;
    const double* h = latent.Row(t);
    for (int k = 0; k < O; ++k) {
      double d = du[k];
      if (d == 0.0) continue;
      double* gw = grads->proj.w.Row(k);
      for (int i = 0; i < H; ++i) gw[i] += d * h[i];
      grads->proj.b[k] += d;
    }
    if (dlatent_accum) {
      double* dh = dlatent_accum->Row(t);
      for (int k = 0; k < O; ++k) {
        double d = du[k];
        if (d == 0.0) continue;
        const double* w = p.proj.w.Row(k);
        for (int i = 0; i < H; ++i) dh[i] += d * w[i];
      }
    }
  }
}

std::vector<TensorRef> EncoderTensors(EncoderParams* p,
                                      const std::string& prefix) {
  return {
      {prefix + ".lin1.w", &p->lin1.w.data, {p->lin1.w.rows, p->lin1.w.cols}},
      {prefix + ".lin1.b", &p->lin1.b, {static_cast<int>(p->lin1.b.size())}},
      {prefix + ".lin2.w", &p->lin2.w.data, {p->lin2.w.rows, p->lin2.w.cols}},
      {prefix + ".lin2.b", &p->lin2.b, {static_cast<int>(p->lin2.b.size())}},
  };
}

std::vector<TensorRef> HeadTensors(HeadParams* p, const std::string& prefix) {
  return {
      {prefix + ".w", &p->proj.w.data, {p->proj.w.rows, p->proj.w.cols}},
      {prefix + ".b", &p->proj.b, {static_cast<int>(p->proj.b.size())}},
  };
}

void AdamState::Init(const std::vector<TensorRef>& params) {
  step = 0;
  m.clear();
  v.clear();
  for (const auto& t : params) {
    m.emplace_back(t.data->size(), 0.0);
    v.emplace_back(t.data->size(), 0.0);
  }
}

void AdamStep(AdamState* state, const std::vector<TensorRef>& params,
              const std::vector<TensorRef>& grads) {
  if (params.size() != grads.size() || params.size() != state->m.size())
    throw ComputeError("adam: tensor list size mismatch");
  state->step += 1;
  const AdamConfig& c = state->cfg;
  double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state->step));
  double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state->step));
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = *params[i].data;
    const std::vector<double>& g = *grads[i].data;
    if (p.size() != g.size() || p.size() != state->m[i].size())
      throw ComputeError("adam: shape mismatch for " + params[i].name);
    std::vector<double>& m = state->m[i];
    std::vector<double>& v = state->v[i];
    for (size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      double mhat = m[j] / bc1;
      double vhat = v[j] / bc2;
      p[j] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

void WriteTensorFile(const std::string& path,
                     const std::vector<NamedTensor>& tensors) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    os.write("CFCK", 4);
    PutLe32(os, 1u);  // version
    PutLe32(os, static_cast<uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
      PutLe32(os, static_cast<uint32_t>(t.name.size()));
      os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
      PutLe32(os, static_cast<uint32_t>(t.dims.size()));
      size_t n = 1;
      for (int d : t.dims) {
        PutLe32(os, static_cast<uint32_t>(d));
        n *= static_cast<size_t>(d);
      }
      if (n != t.data.size())
        throw ComputeError("tensor dims inconsistent with payload: " + t.name);
      os.write(reinterpret_cast<const char*>(t.data.data()),
               static_cast<std::streamsize>(n * sizeof(double)));
    }
  });
}

std::vector<NamedTensor> ReadTensorFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CFCK", 4) != 0)
    throw DataError("bad checkpoint magic in " + path);
  uint32_t version = GetLe32(is, "version");
  if (version != 1) throw DataError("unsupported checkpoint version");
  uint32_t count = GetLe32(is, "tensor count");
  if (count > (1u << 20)) throw DataError("checkpoint tensor count overflow");
  std::vector<NamedTensor> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    uint32_t name_len = GetLe32(is, "name length");
    if (name_len > (1u << 16)) throw DataError("checkpoint name overflow");
    t.name.resize(name_len);
    if (!is.read(t.name.data(), name_len))
      throw DataError("truncated tensor name in " + path);
    uint32_t rank = GetLe32(is, "rank");
    if (rank > 8) throw DataError("checkpoint rank overflow");
    uint64_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      uint32_t d = GetLe32(is, "dim");
      t.dims.push_back(static_cast<int>(d));
      n *= d;
      if (n > (1ull << 32)) throw DataError("checkpoint dimension overflow");
    }
    t.data.resize(n);
    if (!is.read(reinterpret_cast<char*>(t.data.data()),
                 static_cast<std::streamsize>(n * sizeof(double))))
      throw DataError("truncated tensor payload in " + path);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace condctc
