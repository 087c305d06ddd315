// condctc/common.h

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

#ifndef CONDCTC_COMMON_H_
#define CONDCTC_COMMON_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace condctc {

// Error classes map 1:1 onto the CLI exit codes (config=2, data=3, compute=4).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};
class ComputeError : public std::runtime_error {
 public:
  explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) with the usual max shift; tolerates -inf arguments.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  double m = a > b ? a : b;
  return m + std::log1p(std::exp((a > b ? b : a) - m));
}

double LogSumExp(const double* x, int n);

// Row-major double matrix. The numeric workhorse for posteriors, latents
// and parameters; kept deliberately plain so inner loops vectorize.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  double* Row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* Row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  void SetZero() { std::fill(data.begin(), data.end(), 0.0); }
  bool SameShape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// Row-major float32 matrix; the on-disk and in-memory shape of acoustic
// features (T x D).  Training math promotes entries to double.
struct FeatureSeq {
  int rows = 0, cols = 0;  // T x D
  std::vector<float> data;

  FeatureSeq() = default;
  FeatureSeq(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  float& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  float operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  const float* Row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
};

struct FrameSpan {
  int32_t begin = 0, end = 0;  // [begin, end)
  bool operator==(const FrameSpan& o) const { return begin == o.begin && end == o.end; }
};

// Deterministic RNG. All distributions are hand-rolled so that streams are
// reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t NextU64() { return eng_(); }

  // Uniform in [0, 1).
  double UniformDouble() { return (eng_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * UniformDouble(); }

  // Uniform integer in [lo, hi], inclusive.
  int UniformInt(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Standard normal via Box-Muller, one spare cached.
  double Gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = UniformDouble();
    } while (u1 <= 0.0);
    u2 = UniformDouble();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

uint64_t Fnv1a64(const void* bytes, size_t n);
inline uint64_t Fnv1a64(const std::string& s) { return Fnv1a64(s.data(), s.size()); }
std::string HexU64(uint64_t v);

// Writes via a temp file in the same directory, then renames into place.
void AtomicWriteFile(const std::string& path,
                     const std::function<void(std::ostream&)>& writer);

std::string ReadFileToString(const std::string& path);
bool FileExists(const std::string& path);
void MakeDirs(const std::string& path);
// Directory part of a path ("" if none).
std::string DirName(const std::string& path);
std::string JoinPath(const std::string& a, const std::string& b);

std::vector<std::string> SplitString(const std::string& s, char sep);
std::vector<std::string> SplitWhitespace(const std::string& s);

// Formats a double with enough digits to round-trip exactly.
std::string FormatFull(double v);

// Runs fn(0..n-1) on up to `threads` workers. Results must be written to
// per-index slots; the call returns after all indices complete.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

double NowSeconds();

}  // namespace condctc

#endif  // CONDCTC_COMMON_H_
