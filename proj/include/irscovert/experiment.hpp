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

#ifndef IRSCOVERT_EXPERIMENT_HPP
#define IRSCOVERT_EXPERIMENT_HPP

// Scenario configs, seeded Monte Carlo sweeps and their CSV/JSON outputs.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "irscovert/channel.hpp"
#include "irscovert/channel_io.hpp"
#include "irscovert/covert_discrete.hpp"
#include "irscovert/covert_perfect.hpp"
#include "irscovert/covert_robust.hpp"
#include "irscovert/detection.hpp"

#ifndef IRSCOVERT_GIT_DESCRIBE
#define IRSCOVERT_GIT_DESCRIBE "unknown"
#endif

namespace irscovert {

struct ScenarioConfig {
  std::string name = "default";
  Geometry geometry;
  FadingParams fading;
  std::vector<Index> n_tx{4};
  std::vector<Index> n_irs{4};
  int phase_bits = 2;
  double sigma_b2_dbm = -80.0;
  double sigma_w2_dbm = -80.0;
  std::vector<double> p_total_dbm{-10.0};
  std::vector<double> epsilon{0.1};
  std::vector<double> v_w{2e-4};
  // Ellipsoid size used when sampling channel errors for validation; the
  // design's own v_w when unset.
  std::optional<double> eval_v_w;
  KlCase kl_case = KlCase::Kl01;  // divergence reported for non-robust methods
  std::vector<Method> methods{Method::Perfect};
  int trials = 1;
  std::uint64_t master_seed = 1;
  double convergence_eps = 1e-4;
  int max_outer_iters = 50;
  std::size_t randomization_samples = 200;
  std::size_t kl_samples = 1000;

  void validate() const {
    geometry.validate();
    fading.validate();
    if (n_tx.empty() || n_irs.empty() || p_total_dbm.empty() || epsilon.empty() || v_w.empty() ||
        methods.empty()) {
      throw ContractViolation("ScenarioConfig: sweep lists must be nonempty");
    }
    for (Index n : n_tx) if (n < 1) throw DomainError("ScenarioConfig: n_tx must be >= 1");
    for (Index m : n_irs) if (m < 0) throw DomainError("ScenarioConfig: n_irs must be >= 0");
    for (double e : epsilon) if (!(e > 0.0 && e < 1.0)) throw DomainError("ScenarioConfig: epsilon must be in (0, 1)");
    for (double v : v_w) if (!(v >= 0.0)) throw DomainError("ScenarioConfig: v_w must be >= 0");
    if (eval_v_w && !(*eval_v_w >= 0.0)) throw DomainError("ScenarioConfig: eval_v_w must be >= 0");
    if (trials < 1) throw DomainError("ScenarioConfig: trials must be >= 1");
    if (phase_bits < 1 || phase_bits > 30) throw DomainError("ScenarioConfig: phase_bits must be in [1, 30]");
    if (kl_samples < 1) throw DomainError("ScenarioConfig: kl_samples must be >= 1");
    CovertParams p = covert_params(p_total_dbm.front(), epsilon.front());
    p.validate();
  }

  CovertParams covert_params(double p_dbm, double eps) const {
    CovertParams p;
    p.p_total = dbm_to_watts(p_dbm);
    p.sigma_b2 = dbm_to_watts(sigma_b2_dbm);
    p.sigma_w2 = dbm_to_watts(sigma_w2_dbm);
    p.epsilon = eps;
    p.convergence_eps = convergence_eps;
    p.max_outer_iters = max_outer_iters;
    p.randomization_samples = randomization_samples;
    return p;
  }
};

namespace detail {

template <class T, class F>
std::vector<T> scalar_or_list(const Json& j, F convert) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(convert(e));
  } else {
    out.push_back(convert(j));
  }
  return out;
}

inline Point point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ContractViolation("point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json point_to_json(const Point& p) { return Json::array({p.x, p.y}); }

}  // namespace detail

inline ScenarioConfig config_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "name", "geometry", "n_tx", "n_irs", "phase_bits", "zeta0_db", "path_loss_exponents",
      "rician_k", "rician_k_ai", "rician_k_ib", "rician_k_iw", "sigma_b2_dbm", "sigma_w2_dbm",
      "p_total_dbm", "epsilon", "v_w", "eval_v_w", "kl_case", "method", "trials", "master_seed",
      "convergence_eps", "max_outer_iters", "randomization_samples", "kl_samples"};
  if (!j.is_object()) throw ContractViolation("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ContractViolation("config: unknown key '" + key + "'");
  }
  ScenarioConfig c;
  auto num = [](const Json& e) { return e.get<double>(); };
  auto idx = [](const Json& e) { return static_cast<Index>(e.get<long long>()); };
  if (j.contains("name")) c.name = j["name"].get<std::string>();
  if (j.contains("geometry")) {
    const Json& g = j["geometry"];
    static const std::set<std::string> gk = {"alice", "bob", "willie", "irs"};
    for (const auto& [key, value] : g.items()) {
      if (!gk.count(key)) throw ContractViolation("config: unknown geometry key '" + key + "'");
    }
    if (g.contains("alice")) c.geometry.alice = detail::point_from_json(g["alice"]);
    if (g.contains("bob")) c.geometry.bob = detail::point_from_json(g["bob"]);
    if (g.contains("willie")) c.geometry.willie = detail::point_from_json(g["willie"]);
    if (g.contains("irs")) c.geometry.irs = detail::point_from_json(g["irs"]);
  }
  if (j.contains("n_tx")) c.n_tx = detail::scalar_or_list<Index>(j["n_tx"], idx);
  if (j.contains("n_irs")) c.n_irs = detail::scalar_or_list<Index>(j["n_irs"], idx);
  if (j.contains("phase_bits")) c.phase_bits = j["phase_bits"].get<int>();
  if (j.contains("zeta0_db")) c.fading.zeta0_db = j["zeta0_db"].get<double>();
  if (j.contains("path_loss_exponents")) {
    const Json& a = j["path_loss_exponents"];
    static const std::set<std::string> ak = {"ab", "aw", "ai", "ib", "iw"};
    for (const auto& [key, value] : a.items()) {
      if (!ak.count(key)) throw ContractViolation("config: unknown path-loss key '" + key + "'");
    }
    if (a.contains("ab")) c.fading.alpha.ab = a["ab"].get<double>();
    if (a.contains("aw")) c.fading.alpha.aw = a["aw"].get<double>();
    if (a.contains("ai")) c.fading.alpha.ai = a["ai"].get<double>();
    if (a.contains("ib")) c.fading.alpha.ib = a["ib"].get<double>();
    if (a.contains("iw")) c.fading.alpha.iw = a["iw"].get<double>();
  }
  if (j.contains("rician_k")) c.fading.rician_k = j["rician_k"].get<double>();
  if (j.contains("rician_k_ai")) c.fading.rician_k_ai = j["rician_k_ai"].get<double>();
  if (j.contains("rician_k_ib")) c.fading.rician_k_ib = j["rician_k_ib"].get<double>();
  if (j.contains("rician_k_iw")) c.fading.rician_k_iw = j["rician_k_iw"].get<double>();
  if (j.contains("sigma_b2_dbm")) c.sigma_b2_dbm = j["sigma_b2_dbm"].get<double>();
  if (j.contains("sigma_w2_dbm")) c.sigma_w2_dbm = j["sigma_w2_dbm"].get<double>();
  if (j.contains("p_total_dbm")) c.p_total_dbm = detail::scalar_or_list<double>(j["p_total_dbm"], num);
  if (j.contains("epsilon")) c.epsilon = detail::scalar_or_list<double>(j["epsilon"], num);
  if (j.contains("v_w")) c.v_w = detail::scalar_or_list<double>(j["v_w"], num);
  if (j.contains("eval_v_w")) c.eval_v_w = j["eval_v_w"].get<double>();
  if (j.contains("kl_case")) c.kl_case = kl_case_from_string(j["kl_case"].get<std::string>());
  if (j.contains("method")) {
    c.methods = detail::scalar_or_list<Method>(
        j["method"], [](const Json& e) { return method_from_string(e.get<std::string>()); });
  }
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("convergence_eps")) c.convergence_eps = j["convergence_eps"].get<double>();
  if (j.contains("max_outer_iters")) c.max_outer_iters = j["max_outer_iters"].get<int>();
  if (j.contains("randomization_samples")) c.randomization_samples = j["randomization_samples"].get<std::size_t>();
  if (j.contains("kl_samples")) c.kl_samples = j["kl_samples"].get<std::size_t>();
  c.validate();
  return c;
}

inline ScenarioConfig read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  try {
    return config_from_json(Json::parse(is));
  } catch (const Json::exception& e) {
    throw ContractViolation("config " + path + ": " + e.what());
  }
}

inline Json config_to_json(const ScenarioConfig& c) {
  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  Json j{{"name", c.name},
         {"geometry",
          {{"alice", detail::point_to_json(c.geometry.alice)},
           {"bob", detail::point_to_json(c.geometry.bob)},
           {"willie", detail::point_to_json(c.geometry.willie)},
           {"irs", detail::point_to_json(c.geometry.irs)}}},
         {"n_tx", c.n_tx},
         {"n_irs", c.n_irs},
         {"phase_bits", c.phase_bits},
         {"zeta0_db", c.fading.zeta0_db},
         {"path_loss_exponents",
          {{"ab", c.fading.alpha.ab},
           {"aw", c.fading.alpha.aw},
           {"ai", c.fading.alpha.ai},
           {"ib", c.fading.alpha.ib},
           {"iw", c.fading.alpha.iw}}},
         {"rician_k", c.fading.rician_k},
         {"sigma_b2_dbm", c.sigma_b2_dbm},
         {"sigma_w2_dbm", c.sigma_w2_dbm},
         {"p_total_dbm", c.p_total_dbm},
         {"epsilon", c.epsilon},
         {"v_w", c.v_w},
         {"kl_case", to_string(c.kl_case)},
         {"method", methods},
         {"trials", c.trials},
         {"master_seed", c.master_seed},
         {"convergence_eps", c.convergence_eps},
         {"max_outer_iters", c.max_outer_iters},
         {"randomization_samples", c.randomization_samples},
         {"kl_samples", c.kl_samples}};
  if (c.fading.rician_k_ai) j["rician_k_ai"] = *c.fading.rician_k_ai;
  if (c.fading.rician_k_ib) j["rician_k_ib"] = *c.fading.rician_k_ib;
  if (c.fading.rician_k_iw) j["rician_k_iw"] = *c.fading.rician_k_iw;
  if (c.eval_v_w) j["eval_v_w"] = *c.eval_v_w;
  return j;
}

// One point of the Cartesian sweep grid.
struct GridPoint {
  std::size_t index = 0;
  std::size_t n_index = 0;
  std::size_t m_index = 0;
  Index n_tx = 0;
  Index n_irs = 0;
  double p_total_dbm = 0.0;
  double epsilon = 0.0;
  double v_w = 0.0;
  Method method = Method::Perfect;
};

// Order: n_tx, n_irs, p_total, epsilon, v_w, method (last varies fastest).
inline std::vector<GridPoint> expand_grid(const ScenarioConfig& c) {
  std::vector<GridPoint> out;
  for (std::size_t a = 0; a < c.n_tx.size(); ++a)
    for (std::size_t b = 0; b < c.n_irs.size(); ++b)
      for (double p : c.p_total_dbm)
        for (double e : c.epsilon)
          for (double v : c.v_w)
            for (Method m : c.methods) {
              GridPoint g;
              g.index = out.size();
              g.n_index = a;
              g.m_index = b;
              g.n_tx = c.n_tx[a];
              g.n_irs = c.n_irs[b];
              g.p_total_dbm = p;
              g.epsilon = e;
              g.v_w = v;
              g.method = m;
              out.push_back(g);
            }
  return out;
}

// The channel draw depends only on the array sizes and the trial, so every
// power, epsilon, v_w and method sees the same realizations.
inline std::uint64_t channel_seed(const ScenarioConfig& c, const GridPoint& g, int trial) {
  return derive_seed(c.master_seed, {0, g.n_index, g.m_index, static_cast<std::uint64_t>(trial)});
}

inline std::uint64_t algorithm_seed(const ScenarioConfig& c, const GridPoint& g, int trial) {
  return derive_seed(c.master_seed, {1, g.index, static_cast<std::uint64_t>(trial)});
}

inline ChannelSet trial_channels(const ScenarioConfig& c, const GridPoint& g, int trial) {
  Geometry geo = c.geometry;
  geo.n_tx = g.n_tx;
  geo.n_irs = g.n_irs;
  return sample_channels(geo, c.fading, channel_seed(c, g, trial));
}

inline bool is_robust(Method m) { return m == Method::RobustKl01 || m == Method::RobustKl10; }

struct DesignOutcome {
  BeamformerSolution solution;
  DetectionReport report;
  KlCase kl_case = KlCase::Kl01;
  std::optional<KlSampling> sampling;
};

// Runs one method on one channel realization and evaluates it at the warden.
inline DesignOutcome run_design(const ScenarioConfig& c, const GridPoint& g, const ChannelSet& ch,
                                std::uint64_t seed, bool keep_cdf = false) {
  const CovertParams p = c.covert_params(g.p_total_dbm, g.epsilon);
  DesignOutcome out;
  out.kl_case = c.kl_case;
  switch (g.method) {
    case Method::Perfect:
      out.solution = alternate_optimize(ch, p, seed);
      break;
    case Method::Discrete:
      out.solution = discrete_design(ch, p, PhaseCodebook(c.phase_bits), seed);
      break;
    case Method::NoIrs:
      out.solution = no_irs_baseline(ch, p);
      break;
    case Method::RobustKl01:
    case Method::RobustKl10: {
      RobustParams rp;
      static_cast<CovertParams&>(rp) = p;
      rp.kl_case = g.method == Method::RobustKl01 ? KlCase::Kl01 : KlCase::Kl10;
      out.kl_case = rp.kl_case;
      out.solution = robust_alternate(ch, EllipsoidModel::balls(g.n_tx, g.n_irs, g.v_w), rp, seed).solution;
      break;
    }
  }
  out.report = nominal_report(ch, out.solution.w_b, out.solution.q, p.sigma_w2);
  const double eval_v = c.eval_v_w.value_or(g.v_w);
  if (eval_v > 0.0) {
    out.sampling = worst_case_kl(ch, out.solution.w_b, out.solution.q,
                                 EllipsoidModel::balls(g.n_tx, g.n_irs, eval_v), p.sigma_w2,
                                 g.epsilon, out.kl_case, c.kl_samples, derive_seed(seed, {99}));
    if (!keep_cdf) out.sampling->sorted_kl.clear();
  }
  return out;
}

inline Json solution_to_json(const BeamformerSolution& s) {
  return Json{{"method", to_string(s.method)},
              {"rate_bits", s.rate_bits},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"baseline", s.baseline},
              {"covert_residual", s.covert_residual},
              {"phase_bits", s.phase_bits},
              {"phase_indices", s.phase_indices},
              {"w_b", vector_to_json(s.w_b)},
              {"q", vector_to_json(s.q)},
              {"objective_trace", s.objective_trace},
              {"residual_trace", s.residual_trace}};
}

inline Json report_to_json(const DetectionReport& r) {
  return Json{{"lambda0", r.lambda0}, {"lambda1", r.lambda1}, {"threshold", r.threshold},
              {"p_fa", r.p_fa},       {"p_md", r.p_md},       {"kl_01", r.kl_01},
              {"kl_10", r.kl_10},     {"xi", r.xi}};
}

namespace detail {

// Shortest representation that round-trips.
inline std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

inline Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace detail

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

struct TrialRecord {
  GridPoint grid;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<DesignOutcome> outcome;
  std::string error;
};

struct SweepResult {
  std::vector<TrialRecord> records;
  std::size_t failures = 0;
  std::string csv;

  double failure_fraction() const {
    return records.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(records.size());
  }
};

inline const char* sweep_csv_header() {
  return "row_type,grid_index,trial,seed,method,N,M,L,P_total_dBm,epsilon,v_w,kl_case,"
         "rate_bits,iterations,covert_residual,p_fa,p_md,kl_01,kl_10,max_sampled_kl,"
         "violation_fraction,error";
}

inline std::vector<TrialRecord> run_trials(const ScenarioConfig& c, int jobs,
                                           const std::function<bool(Method)>& include) {
  std::vector<TrialRecord> records;
  for (const GridPoint& g : expand_grid(c)) {
    if (!include(g.method)) continue;
    for (int t = 0; t < c.trials; ++t) {
      TrialRecord r;
      r.grid = g;
      r.trial = t;
      r.seed = channel_seed(c, g, t);
      records.push_back(r);
    }
  }
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    TrialRecord& r = records[i];
    try {
      const ChannelSet ch = trial_channels(c, r.grid, r.trial);
      r.outcome = run_design(c, r.grid, ch, algorithm_seed(c, r.grid, r.trial));
    } catch (const std::exception& e) {
      r.error = detail::sanitize(e.what());
    }
  });
  return records;
}

namespace detail {

inline std::string grid_prefix(const ScenarioConfig& c, const GridPoint& g, KlCase kc) {
  std::ostringstream os;
  os << to_string(g.method) << ',' << g.n_tx << ',' << g.n_irs << ','
     << (g.method == Method::Discrete ? std::to_string(c.phase_bits) : std::string()) << ','
     << fmt(g.p_total_dbm) << ',' << fmt(g.epsilon) << ',' << fmt(g.v_w) << ',' << to_string(kc);
  return os.str();
}

}  // namespace detail

// Trial rows in grid order, then one mean and one std row per grid point.
inline SweepResult run_sweep(const ScenarioConfig& c, int jobs = 1) {
  c.validate();
  SweepResult res;
  res.records = run_trials(c, jobs, [](Method) { return true; });
  std::ostringstream os;
  os << sweep_csv_header() << '\n';
  const auto grid = expand_grid(c);
  std::vector<std::vector<std::vector<double>>> agg(grid.size(), std::vector<std::vector<double>>(9));
  std::vector<std::size_t> grid_failures(grid.size(), 0);
  for (const TrialRecord& r : res.records) {
    const GridPoint& g = r.grid;
    const KlCase kc = r.outcome ? r.outcome->kl_case
                                : (g.method == Method::RobustKl10 ? KlCase::Kl10
                                   : g.method == Method::RobustKl01 ? KlCase::Kl01 : c.kl_case);
    os << "trial," << g.index << ',' << r.trial << ',' << r.seed << ','
       << detail::grid_prefix(c, g, kc) << ',';
    if (!r.outcome) {
      ++res.failures;
      ++grid_failures[g.index];
      os << ",,,,,,,,," << r.error << '\n';
      continue;
    }
    const DesignOutcome& o = *r.outcome;
    const std::vector<double> vals = {o.solution.rate_bits,
                                      static_cast<double>(o.solution.iterations),
                                      o.solution.covert_residual,
                                      o.report.p_fa,
                                      o.report.p_md,
                                      o.report.kl_01,
                                      o.report.kl_10,
                                      o.sampling ? o.sampling->max_kl : std::nan(""),
                                      o.sampling ? o.sampling->violation_fraction : std::nan("")};
    os << detail::fmt(vals[0]) << ',' << o.solution.iterations;
    for (std::size_t k = 2; k < 7; ++k) os << ',' << detail::fmt(vals[k]);
    if (o.sampling) {
      os << ',' << detail::fmt(vals[7]) << ',' << detail::fmt(vals[8]);
    } else {
      os << ",,";
    }
    os << ",\n";
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (!std::isnan(vals[k])) agg[g.index][k].push_back(vals[k]);
    }
  }
  for (const GridPoint& g : grid) {
    const KlCase kc = g.method == Method::RobustKl10 ? KlCase::Kl10
                      : g.method == Method::RobustKl01 ? KlCase::Kl01 : c.kl_case;
    for (const char* kind : {"mean", "std"}) {
      os << kind << ',' << g.index << ",,," << detail::grid_prefix(c, g, kc);
      for (std::size_t k = 0; k < 9; ++k) {
        os << ',';
        if (agg[g.index][k].empty()) continue;
        const detail::Stats s = detail::stats(agg[g.index][k]);
        os << detail::fmt(std::string(kind) == "mean" ? s.mean : s.std);
      }
      os << ',';
      if (grid_failures[g.index] > 0) os << "failures=" << grid_failures[g.index];
      os << '\n';
    }
  }
  res.csv = os.str();
  return res;
}

inline const char* detection_csv_header() {
  return "row_type,grid_index,trial,seed,method,N,M,L,P_total_dBm,epsilon,v_w,kl_case,rate_bits,"
         "lambda0,lambda1,threshold,p_fa,p_md,kl_01,kl_10,xi,pfa_le_pmd,xi_ge_1_minus_eps,error";
}

// Robust designs over the grid with one detection-report row per trial; the
// two flag columns check p_fa <= p_md and p_fa + p_md >= 1 - epsilon.
// Non-robust methods in the config are skipped; with none left the KL01
// robust design is used.
inline SweepResult run_detection_report(ScenarioConfig c, int jobs = 1) {
  std::vector<Method> robust;
  for (Method m : c.methods) if (is_robust(m)) robust.push_back(m);
  if (robust.empty()) robust.push_back(Method::RobustKl01);
  c.methods = robust;
  c.validate();
  SweepResult res;
  res.records = run_trials(c, jobs, [](Method) { return true; });
  std::ostringstream os;
  os << detection_csv_header() << '\n';
  const auto grid = expand_grid(c);
  std::vector<std::vector<std::vector<double>>> agg(grid.size(), std::vector<std::vector<double>>(11));
  std::vector<std::size_t> grid_failures(grid.size(), 0);
  for (const TrialRecord& r : res.records) {
    const GridPoint& g = r.grid;
    const KlCase kc = g.method == Method::RobustKl10 ? KlCase::Kl10 : KlCase::Kl01;
    os << "trial," << g.index << ',' << r.trial << ',' << r.seed << ','
       << detail::grid_prefix(c, g, kc) << ',';
    if (!r.outcome) {
      ++res.failures;
      ++grid_failures[g.index];
      os << ",,,,,,,,,,," << r.error << '\n';
      continue;
    }
    const DetectionReport& d = r.outcome->report;
    const double flag_order = d.p_fa <= d.p_md ? 1.0 : 0.0;
    const double flag_sum = d.xi >= 1.0 - g.epsilon ? 1.0 : 0.0;
    const std::vector<double> vals = {r.outcome->solution.rate_bits, d.lambda0, d.lambda1, d.threshold,
                                      d.p_fa, d.p_md, d.kl_01, d.kl_10, d.xi, flag_order, flag_sum};
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k > 0) os << ',';
      os << (k >= 9 ? std::to_string(static_cast<int>(vals[k])) : detail::fmt(vals[k]));
      agg[g.index][k].push_back(vals[k]);
    }
    os << ",\n";
  }
  for (const GridPoint& g : grid) {
    const KlCase kc = g.method == Method::RobustKl10 ? KlCase::Kl10 : KlCase::Kl01;
    for (const char* kind : {"mean", "std"}) {
      os << kind << ',' << g.index << ",,," << detail::grid_prefix(c, g, kc);
      for (std::size_t k = 0; k < 11; ++k) {
        os << ',';
        if (agg[g.index][k].empty()) continue;
        const detail::Stats s = detail::stats(agg[g.index][k]);
        os << detail::fmt(std::string(kind) == "mean" ? s.mean : s.std);
      }
      os << ',';
      if (grid_failures[g.index] > 0) os << "failures=" << grid_failures[g.index];
      os << '\n';
    }
  }
  res.csv = os.str();
  return res;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

// <csv>.manifest.json: config echo, build version and run statistics.
inline void write_manifest(const std::string& csv_path, const ScenarioConfig& c,
                           const std::string& command, double wall_seconds,
                           std::size_t rows, std::size_t failures) {
  const Json j{{"command", command},
               {"config", config_to_json(c)},
               {"git_describe", IRSCOVERT_GIT_DESCRIBE},
               {"wall_time_s", wall_seconds},
               {"trial_rows", rows},
               {"failures", failures},
               {"csv", csv_path}};
  write_text_file(csv_path + ".manifest.json", j.dump(2) + "\n");
}

inline std::string cdf_csv(const KlSampling& s) {
  std::ostringstream os;
  os << "kl_value,cdf\n";
  for (std::size_t i = 0; i < s.sorted_kl.size(); ++i) {
    os << detail::fmt(s.sorted_kl[i]) << ',' << detail::fmt(s.cdf_at(i)) << '\n';
  }
  return os.str();
}

}  // namespace irscovert

#endif  // IRSCOVERT_EXPERIMENT_HPP
