// condctc/nnet.h

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

#ifndef CONDCTC_NNET_H_
#define CONDCTC_NNET_H_

#include <string>
#include <vector>

#include "condctc/common.h"

namespace condctc {

// y = W x + b, row-major W (out x in).
struct Affine {
  Matrix w;
  std::vector<double> b;
  void Resize(int out, int in) {
    w = Matrix(out, in, 0.0);
    b.assign(out, 0.0);
  }
  void SetZero() {
    w.SetZero();
    std::fill(b.begin(), b.end(), 0.0);
  }
};

// Two affine layers with tanh nonlinearities over +-context frame-spliced
// input. No time subsampling: the latent sequence keeps the input length.
struct EncoderParams {
  Affine lin1;  // hidden x (2*context+1)*feat_dim
  Affine lin2;  // hidden x hidden
  int context = 1;
  int feat_dim = 0;
  int hidden = 0;
};

struct HeadParams {
  Affine proj;  // out_dim x hidden, followed by log-softmax
};

EncoderParams InitEncoder(int feat_dim, int hidden, int context, Rng* rng);
HeadParams InitHead(int hidden, int out_dim, Rng* rng);

// Tanh outputs kept for the backward pass.
struct EncoderCache {
  Matrix spliced;  // T x (2c+1)D
  Matrix h1;       // T x H
  Matrix h2;       // T x H (the latent)
};

// Latent T x H sequence; cache optional (needed for backward).
Matrix Encode(const EncoderParams& p, const FeatureSeq& x,
              EncoderCache* cache = nullptr);

// T x out_dim log-posteriorgram; every row exp-sums to 1.
Matrix HeadLogProbs(const HeadParams& p, const Matrix& latent);

using EncoderGrads = EncoderParams;
using HeadGrads = HeadParams;

// Accumulates (does not reset) parameter gradients; dlatent is the upstream
// gradient w.r.t. the encoder output. Optionally produces the gradient
// w.r.t. the input features.
void EncoderBackward(const EncoderParams& p, const EncoderCache& cache,
                     const Matrix& dlatent, EncoderGrads* grads,
                     Matrix* dinput = nullptr);

// dlogp is the upstream gradient w.r.t. the head's log-posteriors; applies
// the log-softmax Jacobian, accumulates parameter gradients and adds the
// latent gradient into dlatent_accum (which must be pre-sized T x H).
void HeadBackward(const HeadParams& p, const Matrix& latent,
                  const Matrix& logp, const Matrix& dlogp, HeadGrads* grads,
                  Matrix* dlatent_accum);

// Flat view over a parameter tensor, used by the optimizer, checkpoints and
// finite-difference tests.
struct TensorRef {
  std::string name;
  std::vector<double>* data = nullptr;
  std::vector<int> dims;
};

std::vector<TensorRef> EncoderTensors(EncoderParams* p, const std::string& prefix);
std::vector<TensorRef> HeadTensors(HeadParams* p, const std::string& prefix);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  int64_t step = 0;
  std::vector<std::vector<double>> m, v;
  void Init(const std::vector<TensorRef>& params);
};

// Standard Adam with bias correction; deterministic.
void AdamStep(AdamState* state, const std::vector<TensorRef>& params,
              const std::vector<TensorRef>& grads);

// Checkpoint tensor table: magic "CFCK", little-endian, float64 payloads.
struct NamedTensor {
  std::string name;
  std::vector<int> dims;
  std::vector<double> data;
};

void WriteTensorFile(const std::string& path,
                     const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> ReadTensorFile(const std::string& path);

}  // namespace condctc

#endif  // CONDCTC_NNET_H_
