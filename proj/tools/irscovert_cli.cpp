// SPDX-License-Identifier: Apache-2.0
//
// irscovert: covert beamforming for IRS-assisted MISO links
// Copyright (C) 2026 The irscovert authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// irscovert command-line driver: single designs, seeded sweeps, detection
// reports and the oracle self-check.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irscovert/experiment.hpp"
#include "irscovert/oracles.hpp"

namespace {

using namespace irscovert;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int jobs = 1;
};

ScenarioConfig load_config(const CommonOptions& o) {
  ScenarioConfig c = o.config.empty() ? ScenarioConfig{} : read_config_file(o.config);
  if (o.seed) c.master_seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  c.validate();
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// One design on the first grid point of the config, or on a channel file.
int run_single(Method method, const CommonOptions& o, const std::string& channel_path,
               const std::string& cdf_out, const std::string& kl_case) {
  ScenarioConfig c = load_config(o);
  GridPoint g = expand_grid(c).front();
  g.method = method;
  if (is_robust(method) && !kl_case.empty()) {
    g.method = kl_case_from_string(kl_case) == KlCase::Kl01 ? Method::RobustKl01 : Method::RobustKl10;
  }
  ChannelSet ch;
  if (channel_path.empty()) {
    ch = trial_channels(c, g, 0);
  } else {
    ch = read_channel_file(channel_path);
    g.n_tx = ch.n_tx();
    g.n_irs = ch.n_irs();
  }
  const DesignOutcome d = run_design(c, g, ch, algorithm_seed(c, g, 0), !cdf_out.empty());
  Json j{{"solution", solution_to_json(d.solution)},
         {"report", report_to_json(d.report)},
         {"kl_case", to_string(d.kl_case)},
         {"grid",
          {{"N", g.n_tx}, {"M", g.n_irs}, {"P_total_dBm", g.p_total_dbm},
           {"epsilon", g.epsilon}, {"v_w", g.v_w}}},
         {"channel_seed", channel_path.empty() ? Json(channel_seed(c, g, 0)) : Json(nullptr)}};
  if (d.sampling) {
    j["sampling"] = {{"nominal_kl", d.sampling->nominal_kl},
                     {"max_kl", d.sampling->max_kl},
                     {"violation_fraction", d.sampling->violation_fraction},
                     {"samples", c.kl_samples}};
  }
  emit(o.out, j.dump(2) + "\n");
  if (!cdf_out.empty()) {
    if (!d.sampling) throw ContractViolation("--cdf-out needs a positive v_w or eval_v_w");
    write_text_file(cdf_out, cdf_csv(*d.sampling));
  }
  return 0;
}

int finish_sweep(const SweepResult& r, const ScenarioConfig& c, const CommonOptions& o,
                 const std::string& command, double seconds) {
  emit(o.out, r.csv);
  if (!o.out.empty() && o.out != "-") {
    write_manifest(o.out, c, command, seconds, r.records.size(), r.failures);
  }
  std::cerr << command << ": " << r.records.size() << " trials, " << r.failures << " failed, "
            << seconds << " s\n";
  if (r.failure_fraction() > 0.05) {
    std::cerr << command << ": failure fraction " << r.failure_fraction() << " exceeds 5%\n";
    return 3;
  }
  return 0;
}

int run_validate(int scale) {
  using namespace irscovert::oracles;
  const CheckResult checks[] = {
      sdp_max_eigenvalue(10 * scale, 101),
      transmit_null_space(10 * scale, 102),
      projection_contract(10 * scale, 103),
      detection_monte_carlo(100000 * static_cast<std::size_t>(scale), 104, scale >= 10 ? 2e-3 : 6e-3),
      covert_interval_residuals(),
  };
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

void add_common(CLI::App* app, CommonOptions& o, bool sweep) {
  app->add_option("--config", o.config, "scenario config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output path ('-' or empty for stdout)");
  app->add_option("--seed", o.seed, "override master_seed");
  if (sweep) {
    app->add_option("--trials", o.trials, "override trials")->check(CLI::PositiveNumber);
    app->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert beamforming designs for IRS-assisted MISO links"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(IRSCOVERT_GIT_DESCRIBE));

  CommonOptions opts;
  std::string channel_path, cdf_out, kl_case;
  int validate_scale = 1;

  auto* perfect = app.add_subcommand("perfect", "perfect warden CSI design (alternating SDR)");
  auto* discrete = app.add_subcommand("discrete", "discrete phase-shift design");
  auto* robust = app.add_subcommand("robust", "robust design under ellipsoidal warden CSI errors");
  auto* noirs = app.add_subcommand("no-irs", "baseline without the surface");
  for (auto* sc : {perfect, discrete, robust, noirs}) {
    add_common(sc, opts, false);
    sc->add_option("--channel", channel_path, "channel realization (JSON) instead of a seeded draw")
        ->check(CLI::ExistingFile);
  }
  robust->add_option("--kl-case", kl_case, "kl01 or kl10")->check(CLI::IsMember({"kl01", "kl10"}));
  robust->add_option("--cdf-out", cdf_out, "write the sampled divergence CDF (kl_value,cdf)");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over the config grid");
  add_common(sweep, opts, true);
  auto* detect = app.add_subcommand("detect", "detection report of robust designs over the grid");
  add_common(detect, opts, true);
  auto* validate = app.add_subcommand("validate", "run the oracle checks");
  validate->add_option("--scale", validate_scale, "instance-count multiplier")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*perfect) return run_single(Method::Perfect, opts, channel_path, "", "");
    if (*discrete) return run_single(Method::Discrete, opts, channel_path, "", "");
    if (*noirs) return run_single(Method::NoIrs, opts, channel_path, "", "");
    if (*robust) return run_single(Method::RobustKl01, opts, channel_path, cdf_out, kl_case);
    if (*sweep || *detect) {
      if (opts.config.empty()) throw ContractViolation("--config is required");
      const ScenarioConfig c = load_config(opts);
      const auto t0 = std::chrono::steady_clock::now();
      const SweepResult r = *sweep ? run_sweep(c, opts.jobs) : run_detection_report(c, opts.jobs);
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return finish_sweep(r, c, opts, *sweep ? "sweep" : "detect", s);
    }
    if (*validate) return run_validate(validate_scale);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
