// condctc/options.h

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

#ifndef CONDCTC_OPTIONS_H_
#define CONDCTC_OPTIONS_H_

#include <map>
#include <string>
#include <vector>

#include "condctc/common.h"

namespace condctc {

// Flag registry for one subcommand. Resolution per option:
//   command line > config file (--config, flat key=value) > environment
//   (CONDCTC_<NAME>) > built-in default.
// Unknown command-line flags are rejected; config files may carry keys for
// other subcommands and unknown keys there are ignored.
class OptionSet {
 public:
  OptionSet(std::string command, std::string description);

  void AddString(const std::string& name, std::string* target,
                 const std::string& help);
  void AddInt(const std::string& name, int64_t* target,
              const std::string& help);
  void AddUint64(const std::string& name, uint64_t* target,
                 const std::string& help);
  void AddDouble(const std::string& name, double* target,
                 const std::string& help);
  void AddBool(const std::string& name, bool* target, const std::string& help);

  // Accepts "--name value", "--name=value" and bare "--name" for bools.
  // Throws ConfigError on unknown flags, bad values or stray positionals.
  // When --help appears, help_requested() is set and parsing stops.
  void Parse(const std::vector<std::string>& args);

  bool help_requested() const { return help_requested_; }
  std::string Help() const;
  // True when the option was set by any source other than its default.
  bool Given(const std::string& name) const;

  static std::string EnvName(const std::string& flag);

 private:
  enum class Type { kString, kInt, kUint64, kDouble, kBool };
  struct Opt {
    Type type;
    void* target;
    std::string help;
    std::string default_repr;
    bool given = false;
  };
  void SetValue(const std::string& name, Opt* opt, const std::string& value);

  std::string command_, description_;
  std::string config_path_placeholder_;  // backing store for --config
  std::vector<std::string> order_;
  std::map<std::string, Opt> opts_;
  bool help_requested_ = false;
};

// Comma-separated helpers for list-valued flags.
std::vector<uint64_t> ParseSeedList(const std::string& text);
std::vector<double> ParseDoubleList(const std::string& text);

}  // namespace condctc

#endif  // CONDCTC_OPTIONS_H_
