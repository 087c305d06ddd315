// condctc/lexicon.h

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

#ifndef CONDCTC_LEXICON_H_
#define CONDCTC_LEXICON_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "condctc/common.h"

namespace condctc {

enum class Lang : uint8_t { kL1 = 0, kL2 = 1, kSpecial = 2 };

const char* LangName(Lang lang);

// A label sequence holds token indices into a Vocab. Sequences never contain
// the blank; <NULL> appears only in segmentation-masked targets.
using LabelSeq = std::vector<int32_t>;

// Bilingual token inventory with a fixed layout:
//   [0]=<blk>  [1]=<NULL>  [2 .. 2+n_l1)=L1 tokens  [2+n_l1 .. size)=L2 tokens
// The layout makes the monolingual<->bilingual projection a constant-offset
// map and gives a deterministic serialization. Immutable after construction.
class Vocab {
 public:
  Vocab() = default;  // empty placeholder; populate via Build/Read

  static constexpr int32_t kBlankId = 0;
  static constexpr int32_t kNullId = 1;
  static constexpr int32_t kFirstToken = 2;

  // Layout rule above; both lists must be non-empty, internally unique and
  // mutually disjoint. Token strings must be plain words: no whitespace, no
  // '|', and none of the reserved literals.
  static Vocab Build(const std::vector<std::string>& l1_tokens,
                     const std::vector<std::string>& l2_tokens);

  int32_t Size() const { return static_cast<int32_t>(tokens_.size()); }
  int32_t NumL1() const { return n_l1_; }
  int32_t NumL2() const { return n_l2_; }
  int32_t blank_id() const { return kBlankId; }
  int32_t null_id() const { return kNullId; }

  Lang LangOf(int32_t id) const;
  bool IsReal(int32_t id) const { return id >= kFirstToken && id < Size(); }
  const std::string& Token(int32_t id) const { return tokens_[id]; }
  // -1 when unknown.
  int32_t IdOf(const std::string& token) const;

  // Space-joined token strings <-> label sequences.
  std::string ToString(const LabelSeq& y) const;
  LabelSeq Parse(const std::string& text) const;  // throws DataError on unknown token

  // Hash of the serialized form; used to pin checkpoints and LM files to a
  // vocabulary.
  uint64_t Hash() const;

  std::string Serialize() const;
  void Write(const std::string& path) const;
  static Vocab Read(const std::string& path);
  static Vocab Deserialize(const std::string& text);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t> index_;
  int32_t n_l1_ = 0, n_l2_ = 0;
};

// Bijection between a monolingual head's output indices and the bilingual
// vocabulary: mono {0=blank, 1=<NULL>, 2..2+n) <-> full {0, 1, offset..offset+n).
struct MonoView {
  Lang lang = Lang::kL1;
  int32_t size = 0;      // 2 + n_lang
  int32_t offset = 0;    // first full-vocab id of this language block
  int32_t n_lang = 0;

  int32_t ToFull(int32_t mono_id) const {
    return mono_id < Vocab::kFirstToken ? mono_id
                                        : mono_id - Vocab::kFirstToken + offset;
  }
  // -1 for ids outside the view (foreign tokens).
  int32_t ToMono(int32_t full_id) const {
    if (full_id < Vocab::kFirstToken) return full_id;
    int32_t rel = full_id - offset;
    return (rel >= 0 && rel < n_lang) ? rel + Vocab::kFirstToken : -1;
  }
};

MonoView MakeMonoView(const Vocab& v, Lang lang);

struct LangSpan {
  int32_t begin = 0, end = 0;  // [begin, end) positions in the label sequence
  Lang lang = Lang::kL1;
  bool operator==(const LangSpan& o) const {
    return begin == o.begin && end == o.end && lang == o.lang;
  }
};

// Maximal contiguous same-language runs; concatenated they reproduce y.
// y must not contain the blank.
std::vector<LangSpan> LanguageSpans(const LabelSeq& y, const Vocab& v);

}  // namespace condctc

#endif  // CONDCTC_LEXICON_H_
