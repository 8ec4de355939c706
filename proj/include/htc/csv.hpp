#pragma once

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "htc/simulator.hpp"

namespace htc {

/// Shortest decimal representation that round-trips the double. Locale
/// independent ('.' decimal point) by construction.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

/// Fixed significant digits for human-readable reports.
inline std::string format_sig(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline constexpr const char* kSweepCsvHeader =
    "u,rho_analytic,omega_analytic,rho_sim,rho_ci,omega_sim,omega_ci,outage_freq,seed";

/// Deterministic CSV emission of a sweep table: '\n' newlines, full-precision
/// values, fixed column order. Identical rows serialize to identical bytes.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& row : rows) {
    out << format_double(row.threshold) << ',' << format_double(row.analytic.rho) << ','
        << format_double(row.analytic.omega) << ',' << format_double(row.sim.rho_hat)
        << ',' << format_double(row.sim.ci_rho) << ',' << format_double(row.sim.omega_hat)
        << ',' << format_double(row.sim.ci_omega) << ','
        << format_double(row.sim.outage_freq) << ',' << row.sim.seed << '\n';
  }
}

}  // namespace htc
