// Copyright 2026 The fedss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fedss command-line front end: cluster, knee, simulate, train, compare.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "fedss/app.h"
#include "fedss/config.h"
#include "fedss/errors.h"

#ifndef FEDSS_DEFAULT_DATA_DIR
#define FEDSS_DEFAULT_DATA_DIR "data"
#endif

namespace {

struct CommandOptions {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
};

std::string FlagName(const std::string& key) {
  std::string name = "--";
  for (char c : key) name += (c == '_') ? '-' : c;
  return name;
}

void AddConfigOptions(CLI::App* cmd, CommandOptions& opts) {
  cmd->add_option("--config", opts.config_file, "JSON config file");
  for (const auto& [key, kind] : fedss::ConfigKeys()) {
    if (kind == fedss::KeyKind::kBool) {
      opts.flags[key] = false;
      cmd->add_flag(FlagName(key), opts.flags[key]);
    } else {
      cmd->add_option(FlagName(key), opts.values[key]);
    }
  }
}

nlohmann::json Overrides(const CommandOptions& opts, const CLI::App* cmd) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [key, text] : opts.values) {
    if (cmd->count(FlagName(key)) > 0) doc[key] = fedss::ValueFromText(key, text);
  }
  for (const auto& [key, set] : opts.flags) {
    if (cmd->count(FlagName(key)) > 0) doc[key] = set;
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FedSS client-selection simulator"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    fedss::ConfigUse use;
    void (*run)(const fedss::RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"cluster", "Group clients into equal-size clusters by round time",
       fedss::ConfigUse::kSinglePolicy, fedss::app::RunCluster},
      {"knee", "Sweep the cluster count and locate the knee",
       fedss::ConfigUse::kSinglePolicy, fedss::app::RunKnee},
      {"simulate", "Simulate round times under one policy",
       fedss::ConfigUse::kSinglePolicy, fedss::app::RunSimulate},
      {"train", "Federated training on synthetic non-IID data",
       fedss::ConfigUse::kSinglePolicy, fedss::app::RunTrain},
      {"compare", "Run random, fedcs and fedss on one population",
       fedss::ConfigUse::kAllPolicies, fedss::app::RunCompare},
  };

  std::map<std::string, CommandOptions> options;
  std::map<std::string, CLI::App*> subcommands;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    AddConfigOptions(sub, options[c.name]);
    subcommands[c.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fedss::ExitCode(fedss::ErrorCategory::kConfig);
  }

  for (const auto& c : commands) {
    CLI::App* sub = subcommands[c.name];
    if (!sub->parsed()) continue;
    const CommandOptions& opts = options[c.name];
    try {
      nlohmann::json file = nlohmann::json::object();
      if (!opts.config_file.empty()) file = fedss::LoadJsonFile(opts.config_file);
      const fedss::RunConfig config = fedss::ParseConfig(
          file, Overrides(opts, sub), c.use, FEDSS_DEFAULT_DATA_DIR);
      c.run(config, std::cout);
      return 0;
    } catch (const fedss::Error& e) {
      std::cerr << "error[" << fedss::CategoryName(e.category()) << "]: "
                << e.what() << '\n';
      return fedss::ExitCode(e.category());
    } catch (const std::exception& e) {
      std::cerr << "error[internal]: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
