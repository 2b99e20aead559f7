// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

// gatroute: experiment driver over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gatroute/gatroute.h"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> configs;
  long steps = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string topology;
  bool quiet = false;
};

int report_failure(const char* what) {
  std::cerr << "gatroute: " << what << ": " << gr_last_error();
  if (gr_last_error_line() > 0) std::cerr << " (line " << gr_last_error_line() << ")";
  std::cerr << '\n';
  return 1;
}

struct ConfigHandle {
  gr_config* p = nullptr;
  ~ConfigHandle() { gr_config_free(p); }
};

bool open_config(const std::string& path, const Options& opt, ConfigHandle& h) {
  if (gr_config_load(path.c_str(), &h.p) != GR_OK) return false;
  if (opt.seed && gr_config_set_seed(h.p, *opt.seed) != GR_OK) return false;
  if (!opt.topology.empty() && gr_config_set_topology(h.p, opt.topology.c_str()) != GR_OK) return false;
  return true;
}

int emit(gr_report* report, const Options& opt) {
  const char* csv = gr_report_csv(report);
  if (opt.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) {
      std::cerr << "gatroute: cannot write " << opt.out << '\n';
      gr_report_free(report);
      return 1;
    }
    f << csv;
    if (const char* summary = gr_report_summary_csv(report); summary[0] != '\0') {
      std::ofstream s(opt.out + ".summary.csv", std::ios::binary);
      s << summary;
    }
  }
  if (!opt.quiet) std::cerr << gr_report_summary_text(report);
  gr_report_free(report);
  return 0;
}

void print_progress(const char* message, void*) { std::cerr << message << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-routing simulator with graph-attention multi-agent learners"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "Override the base seed");
    sub->add_option("--out", opt.out, "Write CSV here instead of stdout (summary goes to <out>.summary.csv)");
    sub->add_option("--topology", opt.topology, "Override the topology (file or grid:RxC)");
    sub->add_flag("-q,--quiet", opt.quiet, "No progress or summary on stderr");
  };

  auto* pre = app.add_subcommand("pretrain", "Pre-train a network on Q-routing data and evaluate it");
  pre->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  pre->add_option("--steps", opt.steps, "Pre-train gradient updates")->required()->check(CLI::NonNegativeNumber);
  add_common(pre);

  auto* sweep = app.add_subcommand("sweep", "Run the load schedule of one config");
  sweep->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(sweep);

  auto* cmp = app.add_subcommand("compare", "Run several configs on one schedule and tabulate them");
  cmp->add_option("--configs", opt.configs, "Experiment configs (JSON)")->required()->check(CLI::ExistingFile);
  add_common(cmp);

  CLI11_PARSE(app, argc, argv);
  if (!opt.quiet) gr_set_progress(print_progress, nullptr);

  gr_report* report = nullptr;
  if (*pre || *sweep) {
    ConfigHandle cfg;
    if (!open_config(opt.config, opt, cfg)) return report_failure(opt.config.c_str());
    gr_status st = *pre ? gr_run_pretrain(cfg.p, opt.steps, &report) : gr_run_sweep(cfg.p, &report);
    if (st != GR_OK) return report_failure(*pre ? "pretrain" : "sweep");
  } else {
    std::vector<ConfigHandle> handles(opt.configs.size());
    std::vector<const gr_config*> list;
    for (std::size_t k = 0; k < opt.configs.size(); ++k) {
      if (!open_config(opt.configs[k], opt, handles[k])) return report_failure(opt.configs[k].c_str());
      list.push_back(handles[k].p);
    }
    if (gr_run_compare(list.data(), list.size(), &report) != GR_OK) return report_failure("compare");
  }
  return emit(report, opt);
}
