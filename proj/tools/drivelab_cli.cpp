// Copyright 2026 The drivelab Authors
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

#include "drivelab/drivelab.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct Failure
{
  dl_status status;
  std::string message;
};

void check(dl_status status)
{
  if (status != DL_OK) {
    throw Failure{status, dl_last_error()};
  }
}

std::string json_escape(const std::string & s)
{
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

class OwnedString
{
public:
  OwnedString() = default;
  OwnedString(const OwnedString &) = delete;
  OwnedString & operator=(const OwnedString &) = delete;
  ~OwnedString() { dl_string_free(ptr_); }
  char ** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

private:
  char * ptr_{nullptr};
};

void emit(const std::string & text, const std::string & out_path)
{
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Failure{DL_IO_ERROR, out_path + ": cannot write"};
  }
  out << text;
  if (!out) {
    throw Failure{DL_IO_ERROR, out_path + ": write failed"};
  }
}

std::vector<const char *> c_paths(const std::vector<std::string> & paths)
{
  std::vector<const char *> out;
  for (const auto & p : paths) {
    out.push_back(p.c_str());
  }
  return out;
}

const char * or_null(const std::string & s)
{
  return s.empty() ? nullptr : s.c_str();
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"drivelab: scene labeling, QA generation, synthesis and plan evaluation"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string out;
  bool plots = false;
  bool print_config = false;

  app.add_option("--config", config_path, "JSON config file layered over the defaults")
  ->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override one config key, e.g. metrics.w_lon=1.5")
  ->allow_extra_args(false);
  app.add_option("--seed", seed, "Seed for QA sampling, fixture tokens and synthesis");
  app.add_option("--jobs", jobs, "Worker threads for per-scene work")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output file (text commands) or directory");
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");

  std::vector<std::string> scenes;
  std::string overrides;
  std::string labels;
  std::string templates;
  std::string spec;
  std::string plans;
  std::string planner;

  auto * validate = app.add_subcommand("validate", "Check scene files against the schema");
  validate->add_option("scenes", scenes, "Scene files or directories")->required();

  auto * label = app.add_subcommand("label", "Write label JSON-lines");
  label->add_option("scenes", scenes, "Scene files or directories")->required();
  label->add_option("--overrides", overrides, "Label override sidecar")->check(CLI::ExistingFile);

  auto * gen_qa = app.add_subcommand("gen-qa", "Write QA JSON-lines");
  gen_qa->add_option("scenes", scenes, "Scene files or directories")->required();
  gen_qa->add_option("--labels", labels, "Label JSON-lines; computed when omitted")
  ->check(CLI::ExistingFile);
  gen_qa->add_option("--templates", templates, "Template JSON; built-in when omitted")
  ->check(CLI::ExistingFile);

  auto * synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("spec", spec, "Corpus spec JSON {KIND: count}")->required()
  ->check(CLI::ExistingFile);

  auto * tokenize = app.add_subcommand("tokenize", "Write fixture token bundles");
  tokenize->add_option("scenes", scenes, "Scene files or directories")->required();

  auto * plan = app.add_subcommand("plan", "Run a baseline planner and write a plan file");
  plan->add_option("scenes", scenes, "Scene files or directories")->required();
  plan->add_option("--planner", planner, "replay, constant_velocity or lane_follow");

  auto * evaluate = app.add_subcommand("evaluate", "Score a plan file");
  evaluate->add_option("plans", plans, "Plan JSON-lines")->required()->check(CLI::ExistingFile);
  evaluate->add_option("scenes", scenes, "Scene files or directories")->required();
  evaluate->add_flag("--plots", plots, "Write per-sample SVG plots");

  CLI11_PARSE(app, argc, argv);

  dl_config * config = nullptr;
  int exit_code = 0;
  try {
    check(dl_config_new(&config));
    if (!config_path.empty()) {
      check(dl_config_load_file(config, config_path.c_str()));
    }
    for (const auto & kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw Failure{DL_CONFIG_ERROR, "--set expects key=value, got '" + kv + "'"};
      }
      check(dl_config_set(config, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (seed) {
      check(dl_config_set_seed(config, *seed));
    }
    if (print_config) {
      OwnedString text;
      check(dl_config_to_json(config, text.out()));
      std::cout << text.str() << "\n";
      dl_config_free(config);
      return 0;
    }

    if (app.get_subcommands().empty()) {
      throw Failure{DL_INVALID_ARGUMENT, "a subcommand is required (see --help)"};
    }
    const auto paths = c_paths(scenes);
    if (validate->parsed()) {
      OwnedString text;
      std::size_t invalid = 0;
      check(dl_run_validate(paths.data(), paths.size(), jobs, text.out(), &invalid));
      emit(text.str(), out);
      exit_code = invalid == 0 ? 0 : static_cast<int>(DL_SCHEMA_ERROR);
    } else if (label->parsed()) {
      OwnedString text;
      check(dl_run_label(config, paths.data(), paths.size(), or_null(overrides), jobs,
        text.out()));
      emit(text.str(), out);
    } else if (gen_qa->parsed()) {
      OwnedString text;
      check(dl_run_gen_qa(config, paths.data(), paths.size(), or_null(labels),
        or_null(templates), jobs, text.out()));
      emit(text.str(), out);
    } else if (synth->parsed()) {
      if (out.empty()) {
        throw Failure{DL_INVALID_ARGUMENT, "synth needs --out <directory>"};
      }
      OwnedString manifest;
      check(dl_run_synth(config, spec.c_str(), out.c_str(), manifest.out()));
      std::cout << manifest.str();
    } else if (tokenize->parsed()) {
      if (out.empty()) {
        throw Failure{DL_INVALID_ARGUMENT, "tokenize needs --out <directory>"};
      }
      std::size_t n = 0;
      check(dl_run_tokenize(config, paths.data(), paths.size(), out.c_str(), jobs, &n));
      std::cout << "{\"bundles\": " << n << "}\n";
    } else if (plan->parsed()) {
      OwnedString text;
      check(dl_run_plan(config, or_null(planner), paths.data(), paths.size(), jobs,
        text.out()));
      emit(text.str(), out);
    } else if (evaluate->parsed()) {
      if (out.empty()) {
        throw Failure{DL_INVALID_ARGUMENT, "evaluate needs --out <directory>"};
      }
      OwnedString csv;
      check(dl_run_evaluate(config, plans.c_str(), paths.data(), paths.size(), out.c_str(),
        plots ? 1 : 0, jobs, csv.out()));
      std::cout << csv.str();
    }
  } catch (const Failure & f) {
    std::cerr << "{\"error\": \"" << dl_status_name(f.status) << "\", \"message\": \"" <<
      json_escape(f.message) << "\"}\n";
    exit_code = static_cast<int>(f.status);
  }
  dl_config_free(config);
  return exit_code;
}
