// condctc/options.cc

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

#include "condctc/options.h"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace condctc {

OptionSet::OptionSet(std::string command, std::string description)
    : command_(std::move(command)), description_(std::move(description)) {
  AddString("config", &config_path_placeholder_, "flat key=value config file");
}

namespace {
std::string Trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace

void OptionSet::AddString(const std::string& name, std::string* target,
                          const std::string& help) {
  order_.push_back(name);
  opts_[name] = {Type::kString, target, help, *target};
}

void OptionSet::AddInt(const std::string& name, int64_t* target,
                       const std::string& help) {
  order_.push_back(name);
  opts_[name] = {Type::kInt, target, help, std::to_string(*target)};
}

void OptionSet::AddUint64(const std::string& name, uint64_t* target,
                          const std::string& help) {
  order_.push_back(name);
  opts_[name] = {Type::kUint64, target, help, std::to_string(*target)};
}

void OptionSet::AddDouble(const std::string& name, double* target,
                          const std::string& help) {
  order_.push_back(name);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", *target);
  opts_[name] = {Type::kDouble, target, help, buf};
}

void OptionSet::AddBool(const std::string& name, bool* target,
                        const std::string& help) {
  order_.push_back(name);
  opts_[name] = {Type::kBool, target, help, *target ? "true" : "false"};
}

std::string OptionSet::EnvName(const std::string& flag) {
  std::string out = "CONDCTC_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

void OptionSet::SetValue(const std::string& name, Opt* opt,
                         const std::string& value) {
  try {
    size_t used = 0;
    switch (opt->type) {
      case Type::kString:
        *static_cast<std::string*>(opt->target) = value;
        break;
      case Type::kInt:
        *static_cast<int64_t*>(opt->target) = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        break;
      case Type::kUint64:
        *static_cast<uint64_t*>(opt->target) = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        break;
      case Type::kDouble:
        *static_cast<double*>(opt->target) = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        break;
      case Type::kBool: {
        if (value == "true" || value == "1" || value == "yes")
          *static_cast<bool*>(opt->target) = true;
        else if (value == "false" || value == "0" || value == "no")
          *static_cast<bool*>(opt->target) = false;
        else
          throw std::invalid_argument(value);
        break;
      }
    }
  } catch (const std::exception&) {
    throw ConfigError("bad value for --" + name + ": '" + value + "'");
  }
  opt->given = true;
}

void OptionSet::Parse(const std::vector<std::string>& args) {
  std::map<std::string, std::string> cmdline;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "--help" || arg == "-h") {
      help_requested_ = true;
      return;
    }
    if (arg.rfind("--", 0) != 0)
      throw ConfigError("unexpected positional argument: '" + arg + "'");
    std::string name = arg.substr(2);
    std::string value;
    bool has_value = false;
    size_t eq = name.find('=');
    if (eq != std::string::npos) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
      has_value = true;
    }
    auto it = opts_.find(name);
    if (it == opts_.end()) throw ConfigError("unknown flag: --" + name);
    if (!has_value) {
      if (it->second.type == Type::kBool) {
        value = "true";  // bare boolean flag
      } else {
        if (i + 1 >= args.size())
          throw ConfigError("flag --" + name + " needs a value");
        value = args[++i];
      }
    }
    if (cmdline.count(name))
      throw ConfigError("flag --" + name + " given twice");
    cmdline[name] = value;
  }

  // Config path itself resolves from command line, then environment.
  std::string config_path;
  if (cmdline.count("config")) {
    config_path = cmdline["config"];
  } else if (const char* env = std::getenv(EnvName("config").c_str())) {
    config_path = env;
  }
  std::map<std::string, std::string> config_values;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file: " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      std::string t = Trim(line);
      if (t.empty() || t[0] == '#') continue;
      size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) +
                          " is not key=value: " + line);
      // Keys unknown to this subcommand are allowed (shared config files).
      config_values[Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
    }
  }

  for (const std::string& name : order_) {
    Opt& opt = opts_[name];
    if (cmdline.count(name)) {
      SetValue(name, &opt, cmdline[name]);
    } else if (config_values.count(name)) {
      SetValue(name, &opt, config_values[name]);
    } else if (const char* env = std::getenv(EnvName(name).c_str())) {
      SetValue(name, &opt, env);
    }
  }
}

std::string OptionSet::Help() const {
  std::ostringstream os;
  os << "condctc " << command_ << ": " << description_ << "\n\nOptions:\n";
  for (const std::string& name : order_) {
    const Opt& opt = opts_.at(name);
    os << "  --" << name;
    if (opt.type != Type::kBool) os << " <value>";
    os << "  (default: " << (opt.default_repr.empty() ? "\"\"" : opt.default_repr)
       << ")\n      " << opt.help << "\n";
  }
  os << "\nPrecedence: flag > config file > environment (" << "CONDCTC_*"
     << ") > default.\n";
  return os.str();
}

bool OptionSet::Given(const std::string& name) const {
  auto it = opts_.find(name);
  return it != opts_.end() && it->second.given;
}

std::vector<uint64_t> ParseSeedList(const std::string& text) {
  std::vector<uint64_t> out;
  for (const auto& part : SplitString(text, ',')) {
    std::string t = Trim(part);
    if (t.empty()) continue;
    try {
      out.push_back(std::stoull(t));
    } catch (...) {
      throw ConfigError("bad seed list entry: '" + t + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : SplitString(text, ',')) {
    std::string t = Trim(part);
    if (t.empty()) continue;
    try {
      out.push_back(std::stod(t));
    } catch (...) {
      throw ConfigError("bad numeric list entry: '" + t + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty numeric list");
  return out;
}

}  // namespace condctc
