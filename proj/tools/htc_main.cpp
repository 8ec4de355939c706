// Command-line front end: closed-form analysis, Monte Carlo simulation,
// analytic-vs-simulated sweep tables (CSV), and SNR-outage power sizing.
//
// Exit codes: 0 success, 2 config unreadable/invalid, 3 infeasible protocol
// parameters (the message names the violated bound), 4 parameter domain
// error, 1 anything unexpected.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "htc/htc.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> cycles;
  std::string grid;
};

htc::cfg::RunConfig load(const Options& opt) {
  htc::cfg::Value tree = htc::cfg::parse_file(opt.config_path);
  for (const std::string& assignment : opt.overrides) {
    htc::cfg::apply_override(tree, assignment);
  }
  htc::cfg::RunConfig rc = htc::cfg::extract_run_config(tree);
  if (opt.seed) rc.seed = *opt.seed;
  if (opt.cycles) rc.cycles = *opt.cycles;
  return rc;
}

void require_model(const htc::cfg::RunConfig& rc) {
  if (!rc.arrival) throw htc::config_error("config: missing [arrival] (or A = {...})");
  if (!rc.packet) throw htc::config_error("config: missing [packet] (or X = {...})");
  if (!rc.has_protocol) throw htc::config_error("config: missing [protocol] section");
}

void print_constants(const htc::RenewalConstants& k) {
  std::cout << "constants: lambda=" << htc::format_sig(k.arrival_rate)
            << " x_bar=" << htc::format_sig(k.mean_packet)
            << " gamma_sq=" << htc::format_sig(k.gamma_sq)
            << " c1=" << htc::format_sig(k.c1) << " c2=" << htc::format_sig(k.c2)
            << " c3=" << htc::format_sig(k.c3) << "\n";
}

void print_aux(const htc::Metrics& m) {
  for (const auto& [key, value] : m.aux) {
    if (key == "clt_warning") continue;
    std::cout << "  " << key << " = " << htc::format_sig(value) << "\n";
  }
}

void warn_if_small_threshold(const htc::Metrics& m) {
  if (m.aux.count("clt_warning") > 0) {
    std::cerr << "warning: threshold is below 5x the mean packet size; the "
                 "normal approximation behind these figures degrades for "
                 "small thresholds\n";
  }
}

int cmd_analyze(const Options& opt) {
  const htc::cfg::RunConfig rc = load(opt);
  require_model(rc);
  const htc::RenewalConstants k = htc::derive_constants(*rc.arrival, *rc.packet);
  const htc::Metrics m = htc::analyze(k, rc.protocol);

  std::cout << "mode: " << htc::mode_name(rc.protocol.mode) << "\n"
            << "arrival: " << rc.arrival->describe() << "\n"
            << "packet: " << rc.packet->describe() << "\n";
  print_constants(k);
  std::cout << "rho = " << htc::format_sig(m.rho) << "\n"
            << "omega = " << htc::format_sig(m.omega) << "\n";
  if (m.t_c > 0) std::cout << "t_c = " << htc::format_sig(m.t_c) << "\n";
  print_aux(m);
  warn_if_small_threshold(m);
  return 0;
}

int cmd_simulate(const Options& opt) {
  const htc::cfg::RunConfig rc = load(opt);
  require_model(rc);
  const htc::RenewalConstants k = htc::derive_constants(*rc.arrival, *rc.packet);
  const htc::SimConfig sim{rc.protocol, *rc.arrival, *rc.packet,
                           rc.cycles,   rc.seed,     rc.residual_mode};
  const htc::Metrics m = htc::analyze(k, rc.protocol);
  const htc::SimResult r = htc::simulate(sim);

  std::cout << "mode: " << htc::mode_name(rc.protocol.mode) << "\n"
            << "seed: " << r.seed << "\n"
            << "cycles: " << r.cycles << "\n"
            << "rho: sim " << htc::format_sig(r.rho_hat) << " +/- "
            << htc::format_sig(r.ci_rho) << ", analytic " << htc::format_sig(m.rho) << "\n"
            << "omega: sim " << htc::format_sig(r.omega_hat) << " +/- "
            << htc::format_sig(r.ci_omega) << ", analytic " << htc::format_sig(m.omega)
            << "\n"
            << "mean_tau_c = " << htc::format_sig(r.mean_tau_c) << "\n"
            << "mean_tau_d = " << htc::format_sig(r.mean_tau_d) << "\n";
  if (rc.protocol.mode != htc::EsiMode::TwoBit) {
    std::cout << "outage_freq = " << htc::format_sig(r.outage_freq) << "\n";
  }
  if (rc.protocol.mode == htc::EsiMode::TwoBit) {
    std::cout << "overshoot_mean = " << htc::format_sig(r.overshoot_mean) << "\n";
  }
  if (rc.protocol.mode == htc::EsiMode::ZeroBitDischarge) {
    std::cout << "full_discharge_freq = " << htc::format_sig(r.full_discharge_freq)
              << "\n";
  }
  warn_if_small_threshold(m);
  return 0;
}

std::vector<double> resolve_grid(const Options& opt, const htc::cfg::RunConfig& rc) {
  if (!opt.grid.empty()) {
    std::vector<double> grid;
    std::stringstream ss(opt.grid);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        grid.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw htc::config_error("--grid: malformed number '" + token + "'");
      }
    }
    if (grid.empty()) throw htc::config_error("--grid: empty grid");
    return grid;
  }
  if (!rc.sweep_grid.empty()) return rc.sweep_grid;
  return {5, 10, 20, 30, 50, 75, 100};
}

int cmd_sweep(const Options& opt) {
  const htc::cfg::RunConfig rc = load(opt);
  require_model(rc);
  const std::vector<double> grid = resolve_grid(opt, rc);
  const htc::SimConfig base{rc.protocol, *rc.arrival, *rc.packet,
                            rc.cycles,   rc.seed,     rc.residual_mode};
  const std::vector<htc::SweepRow> rows = htc::sweep(base, grid);

  std::cerr << "sweep: mode=" << htc::mode_name(rc.protocol.mode)
            << " base_seed=" << rc.seed << " cycles=" << rc.cycles
            << " rows=" << rows.size() << "\n";
  if (opt.out_path.empty()) {
    htc::write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw htc::config_error("cannot open output file: " + opt.out_path);
    htc::write_sweep_csv(out, rows);
    std::cerr << "wrote " << opt.out_path << "\n";
  }
  return 0;
}

int cmd_power(const Options& opt) {
  const htc::cfg::RunConfig rc = load(opt);
  if (!rc.link) throw htc::config_error("config: missing [link] section");
  const double p = htc::transmit_power(*rc.link);
  std::cout << "fading: " << rc.link->fading.describe() << "\n"
            << "p = " << htc::format_sig(p) << "\n";
  if (rc.link->symbol_duration > 0 && rc.arrival && rc.packet && p > 0) {
    const htc::RenewalConstants k = htc::derive_constants(*rc.arrival, *rc.packet);
    const htc::SymbolRate s = htc::symbol_rate(k, p, rc.link->symbol_duration);
    std::cout << "symbol_energy_u = " << htc::format_sig(s.threshold) << "\n"
              << "rho = " << htc::format_sig(s.rho) << "\n"
              << "symbol_rate = " << htc::format_sig(s.rate) << "\n"
              << "omega_exact = " << htc::format_sig(s.omega_exact) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-triggered harvest-then-consume protocol analytics"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "config file path")->required();
    sub->add_option("--set", opt.overrides, "override, e.g. --set protocol.u=20")
        ->take_all();
  };
  const auto add_sim_flags = [&opt](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "override sim.seed");
    sub->add_option("--cycles", opt.cycles, "override sim.cycles");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "closed-form metrics for the configured mode");
  add_common(analyze);
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run of the configured mode");
  add_common(simulate);
  add_sim_flags(simulate);
  CLI::App* sweep = app.add_subcommand("sweep", "analytic-vs-simulated table over a threshold grid (CSV)");
  add_common(sweep);
  add_sim_flags(sweep);
  sweep->add_option("--out", opt.out_path, "CSV output path (default: stdout)");
  sweep->add_option("--grid", opt.grid, "comma-separated thresholds, e.g. 5,10,20");
  CLI::App* power = app.add_subcommand("power", "transmit power from the SNR outage constraint");
  add_common(power);

  try {
    app.parse(argc, argv);
    if (*analyze) return cmd_analyze(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*power) return cmd_power(opt);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const htc::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const htc::feasibility_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const htc::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
