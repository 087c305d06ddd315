// tests/cli-test.cc

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

// End-to-end checks of the condctc binary: exit codes, idempotence,
// documented defaults in --help, and the subcommand pipeline against the
// experiment command.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "condctc/common.h"
#include "condctc/lexicon.h"
#include "condctc/synthdata.h"

using namespace condctc;

namespace {

const char* kScratch = "cli-test-scratch";

int Run(const std::string& args, std::string* output = nullptr) {
  std::string cmd = std::string(CONDCTC_BIN) + " " + args;
  std::string out_file = std::string(kScratch) + "/cmd-output.txt";
  cmd += " > " + out_file + " 2>&1";
  int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream is(out_file);
    std::ostringstream os;
    os << is.rdbuf();
    *output = os.str();
  }
  return WEXITSTATUS(status);
}

std::string TinyGenFlags(const std::string& out) {
  return "gen-data --out " + out +
         " --seed 5 --n-l1 4 --n-l2 4 --feat-dim 6 --train-mono 6"
         " --train-cs 4 --dev-per-category 2";
}

}  // namespace

TEST_CASE("cli lifecycle") {
  std::filesystem::remove_all(kScratch);
  MakeDirs(kScratch);
  std::string data = std::string(kScratch) + "/data";

  SUBCASE("gen-data is idempotent and guards the output dir") {
    CHECK(Run(TinyGenFlags(data)) == 0);
    std::string vocab1 = ReadFileToString(data + "/vocab.txt");
    std::string manifest1 = ReadFileToString(data + "/train_mono.tsv");
    std::string feat1 = ReadFileToString(data + "/feats/trcs-0000.feat");

    // Same out dir without --force: config error, exit 2.
    CHECK(Run(TinyGenFlags(data)) == 2);

    // With --force: byte-identical regeneration.
    CHECK(Run(TinyGenFlags(data) + " --force") == 0);
    CHECK(ReadFileToString(data + "/vocab.txt") == vocab1);
    CHECK(ReadFileToString(data + "/train_mono.tsv") == manifest1);
    CHECK(ReadFileToString(data + "/feats/trcs-0000.feat") == feat1);
  }

  SUBCASE("help lists the documented defaults") {
    std::string out;
    CHECK(Run("train --help", &out) == 0);
    CHECK(out.find("--lambda1") != std::string::npos);
    CHECK(out.find("0.7") != std::string::npos);
    CHECK(out.find("--epochs") != std::string::npos);
    CHECK(out.find("40") != std::string::npos);

    CHECK(Run("decode --help", &out) == 0);
    CHECK(out.find("--lambda2") != std::string::npos);
    CHECK(out.find("0.8") != std::string::npos);
    CHECK(out.find("--beam") != std::string::npos);
    CHECK(out.find("default: 10") != std::string::npos);

    CHECK(Run("bogus-command", &out) == 2);
    std::string unknown_flag_out;
    CHECK(Run("train --bogus-flag 1", &unknown_flag_out) == 2);
  }

  SUBCASE("missing data is a data error (exit 3)") {
    CHECK(Run("train-lm --data " + std::string(kScratch) +
              "/nope --out x.lm") == 3);
  }

  SUBCASE("score on identical refs and hyps is all zeros") {
    REQUIRE(Run(TinyGenFlags(data)) == 0);
    // Build a hypothesis file straight from the dev manifest transcripts.
    Vocab vocab = Vocab::Read(data + "/vocab.txt");
    auto utts = ReadManifest(data + "/dev.tsv", vocab, false);
    std::string hyp_path = std::string(kScratch) + "/perfect.tsv";
    AtomicWriteFile(hyp_path, [&](std::ostream& os) {
      for (const auto& u : utts)
        os << u.id << "\t0\t" << vocab.ToString(u.transcript) << "\n";
    });
    std::string out;
    CHECK(Run("score --data " + data + " --hyps " + hyp_path, &out) == 0);
    CHECK(out.find("FULL        0.00%") != std::string::npos);
    CHECK(out.find("CS          0.00%") != std::string::npos);

    // Mismatched ids are a data error.
    AtomicWriteFile(hyp_path, [&](std::ostream& os) {
      os << "ghost\t0\tm1\n";
    });
    CHECK(Run("score --data " + data + " --hyps " + hyp_path) == 3);
  }

  SUBCASE("experiment row matches a manual chain of the other subcommands") {
    REQUIRE(Run(TinyGenFlags(data)) == 0);
    std::string work = std::string(kScratch) + "/work";
    std::string train_common =
        " --epochs 2 --batch-size 4 --seed 1 --lr 0.001";

    // Manual chain: monolingual pseudo-labelers, LM, transliteration model,
    // decode, score.
    std::string m = std::string(kScratch) + "/manual";
    MakeDirs(m);
    CHECK(Run("train --data " + data + " --out " + m +
              "/pl_l1.ckpt --model vanilla --view l1" + train_common) == 0);
    CHECK(Run("train --data " + data + " --out " + m +
              "/pl_l2.ckpt --model vanilla --view l2" + train_common) == 0);
    CHECK(Run("train-lm --data " + data + " --out " + m +
              "/lm.txt --text cs+mono") == 0);
    CHECK(Run("train --data " + data + " --out " + m +
              "/tra.ckpt --model cond --scheme tra --pseudolabel-from " + m +
              "/pl_l1.ckpt," + m + "/pl_l2.ckpt" + train_common) == 0);
    CHECK(Run("decode --data " + data + " --model " + m + "/tra.ckpt --lm " +
              m + "/lm.txt --out " + m + "/hyp.tsv") == 0);
    std::string score_out;
    CHECK(Run("score --data " + data + " --hyps " + m + "/hyp.tsv",
              &score_out) == 0);

    // The experiment command over the same settings.
    std::string exp_out;
    CHECK(Run("experiment --data " + data + " --work " + work +
              " --condition B --models cond-tra --seeds 1" + train_common,
              &exp_out) == 0);

    // Same decodes byte-for-byte, and the scored rates agree.
    CHECK(ReadFileToString(m + "/hyp.tsv") ==
          ReadFileToString(work + "/hyps/B_cond-tra_s1.tsv"));
    std::string tsv = ReadFileToString(work + "/results/experiment_B.tsv");
    // Pull the FULL rate from the score output ("FULL  xx.xx%  ...").
    size_t pos = score_out.find('%');
    REQUIRE(pos != std::string::npos);
    size_t start = score_out.find_first_not_of(' ', 4);
    std::string full_rate = score_out.substr(start, pos - start);
    CHECK(tsv.find("cond-tra\tB\t1\tbi+l1+l2+lm\t" + full_rate) !=
          std::string::npos);

    // scheme tra without pseudo-labelers is a config error.
    CHECK(Run("train --data " + data + " --out " + m +
              "/bad.ckpt --model cond --scheme tra" + train_common) == 2);
  }

  std::filesystem::remove_all(kScratch);
}
