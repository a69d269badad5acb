// Copyright 2026 The lgmpc Authors
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

#pragma once

// Command-line front end; main() only forwards to run_cli so tests can drive it in-process.

#include <CLI11.hpp>

#include <lgmpc/lgmpc.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace lgmpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Default output directory when --out is not given.
inline constexpr const char * kOutDirEnv = "LGMPC_OUT_DIR";

struct Overrides
{
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> alpha;
  std::optional<std::string> controller;
  int verbosity = 0;
};

inline ScenarioConfig apply(const Overrides & o, ScenarioConfig c)
{
  if (o.seed) { c.seed = *o.seed; }
  if (o.duration) { c.duration = *o.duration; }
  if (o.alpha) { c.mpc.alpha = *o.alpha; }
  if (o.controller) { c.controller = *o.controller == "baseline" ? ControllerKind::Baseline : ControllerKind::Mpc; }
  return c;
}

inline std::filesystem::path output_dir(const Overrides & o)
{
  if (!o.out_dir.empty()) { return o.out_dir; }
  if (const char * env = std::getenv(kOutDirEnv); env && *env) { return env; }
  return ".";
}

inline int csv_column_index(const std::string & name)
{
  const auto cols = csv_columns();
  return static_cast<int>(std::find(cols.begin(), cols.end(), name) - cols.begin()) + 1;
}

inline std::string gnuplot_script(const std::string & csv)
{
  const int er = csv_column_index("eRpar_1");
  const int eo = csv_column_index("eOmega_1");
  const int u  = csv_column_index("u_1");
  std::ostringstream s;
  s << "# gnuplot -p " << csv.substr(0, csv.size() - 4) << ".gp\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set multiplot layout 3,1\n"
    << "set xlabel 'Time [s]'\n"
    << "set ylabel 'e_R parallel'\n"
    << "plot for [i=" << er << ":" << er + 2 << "] '" << csv << "' using 2:i with lines\n"
    << "set ylabel 'e_Omega [rad/s]'\n"
    << "plot for [i=" << eo << ":" << eo + 2 << "] '" << csv << "' using 2:i with lines\n"
    << "set ylabel 'u [N m]'\n"
    << "plot for [i=" << u << ":" << u + 2 << "] '" << csv << "' using 2:i with steps\n"
    << "unset multiplot\n";
  return s.str();
}

inline Json summary_json(const SimSummary & s)
{
  return Json{{"settling_time", detail::number_or_null(s.settling_time)},
    {"settled", s.settled},
    {"max_abs_u", s.max_abs_u},
    {"saturated_samples", s.saturated_samples},
    {"rms_eR_par_tail", s.rms_eR_par_tail},
    {"rms_eOmega_tail", s.rms_eOmega_tail},
    {"peak_eR_par", s.peak_eR_par},
    {"peak_eOmega", s.peak_eOmega},
    {"tracking_cost", s.tracking_cost}};
}

/// Runs one scenario and writes <scenario>_<seed>.csv, .gp and _summary.json.
inline SimSummary run_and_write(const ScenarioConfig & cfg, const Overrides & o, std::ostream & out)
{
  const SimLog log     = run_scenario(cfg);
  const SimSummary sum = summarize(log, 0.02, cfg.mpc);
  const auto dir       = output_dir(o);
  std::filesystem::create_directories(dir);

  const std::string csv = csv_file_name(log);
  const std::string stem = csv.substr(0, csv.size() - 4);
  {
    std::ofstream f(dir / csv, std::ios::binary);
    if (!f) { throw Error("cannot write " + (dir / csv).string()); }
    write_csv(f, log);
  }
  std::ofstream(dir / (stem + ".gp")) << gnuplot_script(csv);
  std::ofstream(dir / (stem + "_summary.json")) << summary_json(sum).dump(2) << '\n';

  out << cfg.name << ": " << log.rows.size() << " samples -> " << (dir / csv).string() << '\n'
      << "  settling time (|eR_par| < 0.02): " << (sum.settled ? std::to_string(sum.settling_time) + " s" : "not settled") << '\n'
      << "  max |u_i|: " << sum.max_abs_u << " N m, saturated samples: " << sum.saturated_samples << '\n'
      << "  RMS |eR_par| over final 25%: " << sum.rms_eR_par_tail << '\n';
  if (o.verbosity > 0) {
    for (const SimRow & r : log.rows) {
      out << "  t=" << std::setw(5) << r.t << "  |eR_par|=" << r.norm_eR_par << "  |eOmega|=" << r.norm_eOmega << "  qp_it=" << r.qp_iterations
          << '\n';
    }
  }
  return sum;
}

struct CheckResult
{
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Reference bounds, alpha h condition, weights and control box.
inline std::vector<CheckResult> check_config(const ScenarioConfig & cfg)
{
  std::vector<CheckResult> out;

  try {
    const auto traj = make_reference(cfg);
    const ReferenceBounds b = verify_assumption2(*traj, uniform_grid(0.0, cfg.duration, cfg.mpc.h));
    std::ostringstream d;
    d << "beta_l = " << b.beta_l << ", beta_u = " << b.beta_u;
    out.push_back({"reference bounds (R0 R0^T uniformly positive definite)", true, d.str()});
  } catch (const std::exception & e) {
    out.push_back({"reference bounds (R0 R0^T uniformly positive definite)", false, e.what()});
  }

  const TransversalCheck tc = check_transversal_condition(cfg.mpc.alpha, cfg.mpc.h);
  {
    std::ostringstream d;
    d << "alpha h = " << cfg.mpc.alpha * cfg.mpc.h << ", bound " << tc.bound << ", margin " << tc.margin;
    out.push_back({"transversal condition 0 < alpha h < 1", tc.stable, d.str()});
  }

  const std::pair<const char *, const Mat3 *> weights[] = {{"Q_R", &cfg.mpc.Q_R},
    {"Q_Omega", &cfg.mpc.Q_Omega},
    {"Q_u", &cfg.mpc.Q_u},
    {"Qf_R", &cfg.mpc.Qf_R},
    {"Qf_Omega", &cfg.mpc.Qf_Omega}};
  std::string bad;
  for (const auto & [name, q] : weights) {
    if (!is_psd(*q)) { bad += std::string(bad.empty() ? "" : ", ") + name; }
  }
  out.push_back({"weights symmetric positive semidefinite", bad.empty(), bad.empty() ? "ok" : "not PSD: " + bad});

  const bool box_ok = (cfg.mpc.u_box.lower.array() < cfg.mpc.u_box.upper.array()).all();
  out.push_back({"control box lower < upper", box_ok, box_ok ? "ok" : "empty or inverted interval"});

  auto state_box_ok = [](const std::optional<Box3> & b) { return !b || (b->lower.array() < b->upper.array()).all(); };
  const bool sb = state_box_ok(cfg.mpc.eR_box) && state_box_ok(cfg.mpc.eOmega_box);
  out.push_back({"state boxes lower < upper", sb, sb ? "ok" : "empty or inverted interval"});

  const bool misc = cfg.duration > 0.0 && cfg.noise_sigma >= 0.0 && cfg.mpc.N >= 1 && cfg.initial.attitude_scale > 0.0;
  out.push_back({"duration > 0, sigma >= 0, N >= 1, det X0 > 0", misc, misc ? "ok" : "invalid scalar setting"});
  return out;
}

inline int run_check(const ScenarioConfig & cfg, std::ostream & out)
{
  bool all = true;
  for (const CheckResult & r : check_config(cfg)) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << " -- " << r.detail << '\n';
    all = all && r.pass;
  }
  return all ? kExitOk : kExitCheckFailed;
}

inline ScenarioConfig with_parameter(ScenarioConfig c, const std::string & param, double v)
{
  if (param == "N") {
    c.mpc.N = static_cast<std::size_t>(v);
  } else if (param == "u_bound") {
    c.mpc.u_box = Box3::symmetric(v);
  } else if (param == "sigma_w") {
    c.noise_sigma = v;
  } else if (param == "alpha_h") {
    c.mpc.alpha = v / c.mpc.h;
  } else {
    throw ConfigError("sweep: unknown parameter " + param);
  }
  std::ostringstream name;
  name << c.name << "_" << param << "_" << v;
  c.name = name.str();
  return c;
}

struct SweepRow
{
  double value = 0.0;
  bool ok = false;
  std::string error;
  SimSummary summary;
};

/// One run per value in parallel workers, all sharing the base seed.
inline std::vector<SweepRow> sweep(const ScenarioConfig & base, const std::string & param, const std::vector<double> & values, const Overrides & o, std::ostream & out)
{
  std::vector<SweepRow> rows(values.size());
  std::mutex console;
  std::size_t next = 0;
  std::mutex queue;

  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(queue);
        if (next >= values.size()) { return; }
        i = next++;
      }
      rows[i].value = values[i];
      std::ostringstream local;
      try {
        const ScenarioConfig c = with_parameter(base, param, values[i]);
        rows[i].summary = run_and_write(c, o, local);
        rows[i].ok      = true;
      } catch (const std::exception & e) {
        rows[i].error = e.what();
        local << param << " = " << values[i] << ": FAILED: " << e.what() << '\n';
      }
      std::lock_guard lock(console);
      out << local.str();
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min<std::size_t>(values.size(), std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) { pool.emplace_back(worker); }
  for (auto & t : pool) { t.join(); }
  return rows;
}

inline void write_sweep_table(std::ostream & os, const std::string & param, const std::vector<SweepRow> & rows)
{
  os << param << ",status,settling_time,rms_eR_par_tail,saturated_samples,max_abs_u,tracking_cost\n";
  for (const SweepRow & r : rows) {
    os << format_double(r.value) << ',' << (r.ok ? "ok" : "failed") << ',' << format_double(r.summary.settling_time) << ','
       << format_double(r.summary.rms_eR_par_tail) << ',' << r.summary.saturated_samples << ',' << format_double(r.summary.max_abs_u)
       << ',' << format_double(r.summary.tracking_cost) << '\n';
  }
}

inline std::vector<double> parse_values(const std::string & text)
{
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) { continue; }
    std::size_t used = 0;
    const double x   = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) { throw ConfigError("sweep: bad value '" + item + "'"); }
    v.push_back(x);
  }
  return v;
}

inline int run_cli(int argc, const char * const * argv, std::ostream & out = std::cout, std::ostream & err = std::cerr)
{
  CLI::App app{"Tracking MPC for rigid-body attitude on SO(3) via stable embedding"};
  app.require_subcommand(1);

  Overrides o;
  std::vector<CLI::Option *> verbose_flags;
  auto add_common = [&o, &verbose_flags](CLI::App * sub) {
    sub->add_option("--out", o.out_dir, "Output directory (default $" + std::string(kOutDirEnv) + " or .)");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--duration", o.duration, "Simulated time [s]");
    sub->add_option("--alpha", o.alpha, "Embedding gain alpha");
    sub->add_option("--controller", o.controller, "Controller")->check(CLI::IsMember({"mpc", "baseline"}));
    verbose_flags.push_back(sub->add_flag("-v,--verbose", "Verbose output"));
  };

  auto * run = app.add_subcommand("run", "Run a scenario from a config file");
  run->add_option("--config", o.config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(run);

  CLI::App * cases[3];
  for (int i = 0; i < 3; ++i) {
    static const char * const descr[] = {
      "Loose control box +-10, no noise", "Tight control box +-6", "Measurement noise sigma_w = 0.03, box +-10"};
    cases[i] = app.add_subcommand("case" + std::to_string(i + 1), descr[i]);
    cases[i]->add_option("--config", o.config_path, "Overlay config (JSON)")->check(CLI::ExistingFile);
    add_common(cases[i]);
  }

  auto * check = app.add_subcommand("check", "Validate a config: reference bounds, alpha h, weights, boxes");
  check->add_option("--config", o.config_path, "Scenario config (JSON); the case 1 setup when omitted")->check(CLI::ExistingFile);
  add_common(check);

  std::string param;
  std::string values_text;
  auto * sw = app.add_subcommand("sweep", "Run one scenario per parameter value and tabulate");
  sw->add_option("--param", param, "Parameter")->required()->check(CLI::IsMember({"N", "u_bound", "sigma_w", "alpha_h"}));
  sw->add_option("--values", values_text, "Comma-separated values")->required();
  sw->add_option("--config", o.config_path, "Base config (JSON); case 1 when omitted")->check(CLI::ExistingFile);
  add_common(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  for (const CLI::Option * v : verbose_flags) { o.verbosity += int(v->count()); }

  try {
    auto base_for = [&](int which) {
      ScenarioConfig c = builtin_case(which);
      if (!o.config_path.empty()) { c = load_config(o.config_path, c); }
      return apply(o, c);
    };

    if (run->parsed()) {
      run_and_write(apply(o, load_config(o.config_path)), o, out);
      return kExitOk;
    }
    for (int i = 0; i < 3; ++i) {
      if (cases[i]->parsed()) {
        run_and_write(base_for(i + 1), o, out);
        return kExitOk;
      }
    }
    if (check->parsed()) { return run_check(base_for(1), out); }
    if (sw->parsed()) {
      const std::vector<double> values = parse_values(values_text);
      if (values.empty()) {
        out << "sweep: no values, nothing to do\n";
        return kExitOk;
      }
      const ScenarioConfig base = base_for(1);
      const auto rows           = sweep(base, param, values, o, out);
      const auto dir            = output_dir(o);
      std::ofstream table(dir / ("sweep_" + param + ".csv"));
      write_sweep_table(table, param, rows);
      write_sweep_table(out, param, rows);
      return kExitOk;
    }
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace lgmpc::cli
