// condctc/targets.cc

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

#include "condctc/targets.h"

#include <fstream>

namespace condctc {

const char* SchemeName(Scheme s) {
  return s == Scheme::kSegmentation ? "seg" : "tra";
}

Scheme ParseScheme(const std::string& name) {
  if (name == "seg" || name == "SEGMENTATION") return Scheme::kSegmentation;
  if (name == "tra" || name == "TRANSLITERATION")
    return Scheme::kTransliteration;
  throw ConfigError("unknown target scheme: '" + name + "'");
}

namespace {

// One view's masked sequence: native tokens kept, each maximal foreign span
// collapsed to a single <NULL>.
LabelSeq MaskOneView(const LabelSeq& y, const Vocab& v, Lang native) {
  LabelSeq out;
  for (const auto& span : LanguageSpans(y, v)) {
    if (span.lang == native) {
      for (int32_t i = span.begin; i < span.end; ++i) out.push_back(y[i]);
    } else {
      out.push_back(Vocab::kNullId);
    }
  }
  return out;
}

}  // namespace

TargetPair MaskSegmentation(const LabelSeq& y, const Vocab& v) {
  for (int32_t id : y)
    if (!v.IsReal(id))
      throw ComputeError("segmentation masking expects a clean transcript");
  TargetPair pair;
  pair.scheme = Scheme::kSegmentation;
  pair.y_l1 = MaskOneView(y, v, Lang::kL1);
  pair.y_l2 = MaskOneView(y, v, Lang::kL2);
  return pair;
}

LabelSeq PseudoLabel(const MonoPgFn& asr, const FeatureSeq& x,
                     const MonoView& view) {
  Matrix pg = asr(x);
  if (pg.cols != view.size)
    throw ComputeError("pseudo-labeler posteriorgram does not match the view");
  LabelSeq mono =
      Collapse(GreedyDecode(pg), Vocab::kBlankId, Vocab::kNullId);
  LabelSeq full;
  full.reserve(mono.size());
  for (int32_t m : mono) full.push_back(view.ToFull(m));
  return full;
}

std::optional<LabelSeq> StitchView(const LabelSeq& y, const Vocab& v,
                                   const MonoView& view,
                                   const Matrix& pg_view,
                                   int64_t* empty_segments) {
  const Lang native = view.lang;
  LabelSeq masked_full = MaskOneView(y, v, native);
  // Masked view in mono index space for the alignment.
  LabelSeq masked_mono;
  masked_mono.reserve(masked_full.size());
  for (int32_t id : masked_full) {
    int32_t m = view.ToMono(id);
    if (m < 0) throw ComputeError("masked view contains a foreign token");
    masked_mono.push_back(m);
  }
  auto fa = ForcedAlign(pg_view, masked_mono, Vocab::kBlankId);
  if (!fa.has_value()) return std::nullopt;

  const int T = pg_view.rows;
  LabelSeq out;
  for (size_t i = 0; i < masked_mono.size(); ++i) {
    if (masked_mono[i] != Vocab::kNullId) {
      out.push_back(masked_full[i]);
      continue;
    }
    // The foreign region gets every frame between the neighbouring native
    // tokens (utterance edges when there is no neighbour).
    int begin = i == 0 ? 0 : fa->label_spans[i - 1].end;
    int end = i + 1 < masked_mono.size() ? fa->label_spans[i + 1].begin : T;
    Matrix slice(end - begin, pg_view.cols);
    for (int t = begin; t < end; ++t)
      for (int k = 0; k < pg_view.cols; ++k) slice(t - begin, k) = pg_view(t, k);
    LabelSeq mono =
        Collapse(GreedyDecode(slice), Vocab::kBlankId, Vocab::kNullId);
    if (mono.empty() && empty_segments) *empty_segments += 1;
    for (int32_t m : mono) out.push_back(view.ToFull(m));
  }
  return out;
}

std::optional<TargetPair> StitchCsTargets(const LabelSeq& y,
                                          const FeatureSeq& x, const Vocab& v,
                                          const MonoPgFn& pg_l1_fn,
                                          const MonoPgFn& pg_l2_fn,
                                          int64_t* empty_segments) {
  TargetPair pair;
  pair.scheme = Scheme::kTransliteration;
  auto l1 = StitchView(y, v, MakeMonoView(v, Lang::kL1), pg_l1_fn(x),
                       empty_segments);
  if (!l1.has_value()) return std::nullopt;
  auto l2 = StitchView(y, v, MakeMonoView(v, Lang::kL2), pg_l2_fn(x),
                       empty_segments);
  if (!l2.has_value()) return std::nullopt;
  pair.y_l1 = std::move(*l1);
  pair.y_l2 = std::move(*l2);
  return pair;
}

std::vector<UtteranceTargets> MakeTrainingTargets(
    const std::vector<const Utterance*>& utts, Scheme scheme, const Vocab& v,
    const MonoPgFn* pg_l1_fn, const MonoPgFn* pg_l2_fn, TargetReport* report) {
  TargetReport local;
  TargetReport* rep = report ? report : &local;
  std::vector<UtteranceTargets> out;
  out.reserve(utts.size());

  if (scheme == Scheme::kSegmentation) {
    for (const Utterance* u : utts)
      out.push_back({u->id, MaskSegmentation(u->transcript, v)});
    return out;
  }

  if (!pg_l1_fn || !pg_l2_fn)
    throw ConfigError(
        "transliteration targets require trained monolingual pseudo-labelers");
  MonoView view_l1 = MakeMonoView(v, Lang::kL1);
  MonoView view_l2 = MakeMonoView(v, Lang::kL2);
  for (const Utterance* u : utts) {
    TargetPair pair;
    pair.scheme = Scheme::kTransliteration;
    if (u->category == Category::kCs) {
      auto stitched = StitchCsTargets(u->transcript, u->feats, v, *pg_l1_fn,
                                      *pg_l2_fn, &rep->empty_segments);
      if (!stitched.has_value()) {
        rep->skipped_ids.push_back(u->id);
        continue;
      }
      pair = std::move(*stitched);
    } else if (u->category == Category::kMonoL1) {
      pair.y_l1 = u->transcript;
      pair.y_l2 = PseudoLabel(*pg_l2_fn, u->feats, view_l2);
      if (pair.y_l2.empty()) rep->empty_pseudolabels += 1;
    } else {
      pair.y_l2 = u->transcript;
      pair.y_l1 = PseudoLabel(*pg_l1_fn, u->feats, view_l1);
      if (pair.y_l1.empty()) rep->empty_pseudolabels += 1;
    }
    out.push_back({u->id, std::move(pair)});
  }
  return out;
}

void WriteTargets(const std::vector<UtteranceTargets>& targets, const Vocab& v,
                  const std::string& path) {
  AtomicWriteFile(path, [&](std::ostream& os) {
    for (const auto& t : targets) {
      os << t.id << '\t' << SchemeName(t.pair.scheme) << '\t'
         << v.ToString(t.pair.y_l1) << '\t' << v.ToString(t.pair.y_l2) << "\n";
    }
  });
}

std::vector<UtteranceTargets> ReadTargets(const std::string& path,
                                          const Vocab& v) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open targets file: " + path);
  std::vector<UtteranceTargets> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() != 4)
      throw DataError("bad targets line: " + line);
    UtteranceTargets t;
    t.id = fields[0];
    t.pair.scheme = ParseScheme(fields[1]);
    t.pair.y_l1 = v.Parse(fields[2]);
    t.pair.y_l2 = v.Parse(fields[3]);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace condctc
