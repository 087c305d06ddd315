// condctc/lexicon.cc

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

#include "condctc/lexicon.h"

#include <algorithm>
#include <sstream>

namespace condctc {

namespace {

const char* kBlankToken = "<blk>";
const char* kNullToken = "<NULL>";
const char* kEosToken = "</s>";

void CheckTokenString(const std::string& tok) {
  if (tok.empty()) throw DataError("empty token string");
  for (char c : tok) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '|')
      throw DataError("token contains forbidden character: '" + tok + "'");
  }
  if (tok == kBlankToken || tok == kNullToken || tok == kEosToken)
    throw DataError("token collides with reserved symbol: '" + tok + "'");
}

}  // namespace

const char* LangName(Lang lang) {
  switch (lang) {
    case Lang::kL1: return "L1";
    case Lang::kL2: return "L2";
    default: return "SPECIAL";
  }
}

Vocab Vocab::Build(const std::vector<std::string>& l1_tokens,
                   const std::vector<std::string>& l2_tokens) {
  if (l1_tokens.empty() || l2_tokens.empty())
    throw DataError("both language token lists must be non-empty");
  Vocab v;
  v.tokens_.reserve(2 + l1_tokens.size() + l2_tokens.size());
  v.tokens_.push_back(kBlankToken);
  v.tokens_.push_back(kNullToken);
  for (const auto& t : l1_tokens) {
    CheckTokenString(t);
    v.tokens_.push_back(t);
  }
  for (const auto& t : l2_tokens) {
    CheckTokenString(t);
    v.tokens_.push_back(t);
  }
  v.n_l1_ = static_cast<int32_t>(l1_tokens.size());
  v.n_l2_ = static_cast<int32_t>(l2_tokens.size());
  for (int32_t i = 0; i < v.Size(); ++i) {
    auto ins = v.index_.emplace(v.tokens_[i], i);
    if (!ins.second)
      throw DataError("duplicate or overlapping token: '" + v.tokens_[i] + "'");
  }
  return v;
}

Lang Vocab::LangOf(int32_t id) const {
  if (id < kFirstToken) return Lang::kSpecial;
  if (id < kFirstToken + n_l1_) return Lang::kL1;
  return Lang::kL2;
}

int32_t Vocab::IdOf(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

std::string Vocab::ToString(const LabelSeq& y) const {
  std::string out;
  for (size_t i = 0; i < y.size(); ++i) {
    if (i) out += ' ';
    out += tokens_[y[i]];
  }
  return out;
}

LabelSeq Vocab::Parse(const std::string& text) const {
  LabelSeq out;
  for (const auto& tok : SplitWhitespace(text)) {
    int32_t id = IdOf(tok);
    if (id < 0) throw DataError("unknown token: '" + tok + "'");
    out.push_back(id);
  }
  return out;
}

uint64_t Vocab::Hash() const { return Fnv1a64(Serialize()); }

std::string Vocab::Serialize() const {
  std::ostringstream os;
  os << "#L1=" << n_l1_ << "\n";
  for (const auto& t : tokens_) os << t << "\n";
  return os.str();
}

void Vocab::Write(const std::string& path) const {
  std::string text = Serialize();
  AtomicWriteFile(path, [&](std::ostream& os) { os << text; });
}

Vocab Vocab::Read(const std::string& path) {
  return Deserialize(ReadFileToString(path));
}

Vocab Vocab::Deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("#L1=", 0) != 0)
    throw DataError("vocab file missing #L1= header");
  int n_l1 = 0;
  try {
    n_l1 = std::stoi(line.substr(4));
  } catch (...) {
    throw DataError("bad #L1= header: " + line);
  }
  std::vector<std::string> toks;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    toks.push_back(line);
  }
  if (toks.size() < 4) throw DataError("vocab file too short");
  if (toks[0] != kBlankToken || toks[1] != kNullToken)
    throw DataError("vocab lines 0/1 must be <blk> and <NULL>");
  if (n_l1 < 1 || static_cast<size_t>(n_l1) + 3 > toks.size())
    throw DataError("vocab #L1 count out of range");
  std::vector<std::string> l1(toks.begin() + 2, toks.begin() + 2 + n_l1);
  std::vector<std::string> l2(toks.begin() + 2 + n_l1, toks.end());
  return Build(l1, l2);
}

MonoView MakeMonoView(const Vocab& v, Lang lang) {
  if (lang != Lang::kL1 && lang != Lang::kL2)
    throw ConfigError("monolingual view requires L1 or L2");
  MonoView mv;
  mv.lang = lang;
  mv.n_lang = lang == Lang::kL1 ? v.NumL1() : v.NumL2();
  mv.offset = lang == Lang::kL1 ? Vocab::kFirstToken
                                : Vocab::kFirstToken + v.NumL1();
  mv.size = Vocab::kFirstToken + mv.n_lang;
  return mv;
}

std::vector<LangSpan> LanguageSpans(const LabelSeq& y, const Vocab& v) {
  std::vector<LangSpan> spans;
  for (size_t i = 0; i < y.size(); ++i) {
    Lang lang = v.LangOf(y[i]);
    if (!spans.empty() && spans.back().lang == lang) {
      spans.back().end = static_cast<int32_t>(i + 1);
    } else {
      spans.push_back({static_cast<int32_t>(i), static_cast<int32_t>(i + 1), lang});
    }
  }
  return spans;
}

}  // namespace condctc
