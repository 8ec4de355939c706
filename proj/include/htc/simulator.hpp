#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "htc/analytic.hpp"
#include "htc/distribution.hpp"
#include "htc/errors.hpp"
#include "htc/renewal.hpp"
#include "htc/rng.hpp"

namespace htc {

/// Distribution of the first inter-arrival gap of each cycle. The stationary
/// residual matches a recharge process observed from a random time origin;
/// FreshStart draws the first gap from the plain arrival law and exists to
/// quantify how much that modeling choice matters.
enum class ResidualMode { StationaryResidual, FreshStart };

struct SimConfig {
  ProtocolConfig protocol;
  DistributionSpec arrival;  // inter-arrival times A
  DistributionSpec packet;   // energy packet sizes X
  std::uint64_t cycles = 10'000;
  std::uint64_t seed = 0;
  ResidualMode residual_mode = ResidualMode::StationaryResidual;
};

inline void validate(const SimConfig& cfg) {
  validate(cfg.protocol);
  if (cfg.cycles < 100) throw domain_error("sim: cycles must be >= 100");
}

/// One harvest-consume cycle as realized by the simulator.
struct CycleRecord {
  double tau_c = 0;             // harvest duration
  double tau_d = 0;             // consume duration
  double energy_at_switch = 0;  // U at the moment the consume phase starts
  double overshoot = 0;         // energy_at_switch - u (two-bit only)
  bool outage = false;          // energy at switch-on <= required threshold
  bool full_discharge = false;  // battery drained inside the consume window
};

struct SimResult {
  double rho_hat = 0;
  double omega_hat = 0;
  double mean_tau_c = 0;
  double mean_tau_d = 0;
  double outage_freq = 0;           // one-bit / zero-bit modes; 0 for two-bit
  double overshoot_mean = 0;        // two-bit mode; 0 otherwise
  double full_discharge_freq = 0;   // zero_bit_discharge mode; 0 otherwise
  double ci_rho = 0;                // 95% half-widths from 100 batch means
  double ci_omega = 0;
  std::uint64_t seed = 0;
  std::uint64_t cycles = 0;
};

namespace detail {

inline double first_gap(const SimConfig& cfg, RandomStream& rng) {
  return cfg.residual_mode == ResidualMode::StationaryResidual
             ? cfg.arrival.sample_residual(rng)
             : cfg.arrival.sample(rng);
}

// Harvest until the stored energy reaches the threshold; at least one packet
// is always collected (u = 0 consumes the first arrival).
inline CycleRecord two_bit_cycle(const SimConfig& cfg, RandomStream& rng) {
  const double u = cfg.protocol.threshold;
  double t = first_gap(cfg, rng);
  double energy = cfg.packet.sample(rng);
  while (energy < u) {
    t += cfg.arrival.sample(rng);
    energy += cfg.packet.sample(rng);
  }
  CycleRecord rec;
  rec.tau_c = t;
  rec.energy_at_switch = energy;
  rec.overshoot = energy - u;
  rec.tau_d = energy / cfg.protocol.power;
  rec.full_discharge = true;
  return rec;
}

// Energy collected during a fixed harvest window (arrivals at exactly the
// window end count, matching the right-continuity of the recharge process).
inline double harvest_window(const SimConfig& cfg, double t_c, RandomStream& rng) {
  double t = first_gap(cfg, rng);
  double energy = 0;
  while (t <= t_c) {
    energy += cfg.packet.sample(rng);
    t += cfg.arrival.sample(rng);
  }
  return energy;
}

inline CycleRecord one_bit_cycle(const SimConfig& cfg, double t_c, RandomStream& rng) {
  CycleRecord rec;
  rec.tau_c = t_c;
  rec.energy_at_switch = harvest_window(cfg, t_c, rng);
  rec.tau_d = rec.energy_at_switch / cfg.protocol.power;
  rec.outage = rec.energy_at_switch <= cfg.protocol.threshold;
  rec.full_discharge = true;  // consume phase runs until empty
  return rec;
}

inline CycleRecord zero_bit_cycle(const SimConfig& cfg, double t_c, double period,
                                  double required, RandomStream& rng) {
  CycleRecord rec;
  rec.tau_c = t_c;
  rec.tau_d = period - t_c;  // blind consume window; leftovers are discarded
  rec.energy_at_switch = harvest_window(cfg, t_c, rng);
  rec.outage = rec.energy_at_switch <= required;
  rec.full_discharge =
      rec.energy_at_switch / cfg.protocol.power <= period - t_c;
  return rec;
}

struct ZeroBitPlan {
  double t_c = 0;
  double period = 0;
  double required = 0;  // threshold the outage event is measured against
};

inline ZeroBitPlan zero_bit_plan(const SimConfig& cfg, const RenewalConstants& k) {
  ZeroBitPlan plan;
  if (cfg.protocol.mode == EsiMode::ZeroBit) {
    const Metrics m = zero_bit_duty_cycle(k, cfg.protocol.power, cfg.protocol.period,
                                          cfg.protocol.outage_target);
    plan.t_c = m.t_c;
    plan.period = cfg.protocol.period;
    plan.required = m.aux.at("implied_threshold");
  } else {  // ZeroBitDischarge
    plan.t_c = one_bit_switch_time(k, cfg.protocol.threshold, cfg.protocol.outage_target);
    plan.period = zero_bit_discharge_period(k, plan.t_c, cfg.protocol.power,
                                            cfg.protocol.discharge_target);
    plan.required = cfg.protocol.threshold;
  }
  return plan;
}

// Ratio-of-sums estimators with 95% confidence half-widths via batch means.
class Aggregator {
 public:
  explicit Aggregator(std::uint64_t cycles) : cycles_(cycles) {}

  void add(const CycleRecord& rec) {
    sum_tau_c_ += rec.tau_c;
    sum_tau_d_ += rec.tau_d;
    sum_overshoot_ += rec.overshoot;
    outages_ += rec.outage ? 1 : 0;
    discharges_ += rec.full_discharge ? 1 : 0;
    batch_tau_c_ += rec.tau_c;
    batch_tau_d_ += rec.tau_d;
    ++batch_count_;
    ++index_;
    if (index_ * kBatches >= (batch_ + 1) * cycles_) close_batch();
  }

  SimResult finish(const SimConfig& cfg) const {
    const double n = static_cast<double>(cycles_);
    const double total = sum_tau_c_ + sum_tau_d_;
    SimResult r;
    r.rho_hat = sum_tau_d_ / total;
    r.omega_hat = n / total;
    r.mean_tau_c = sum_tau_c_ / n;
    r.mean_tau_d = sum_tau_d_ / n;
    r.outage_freq = static_cast<double>(outages_) / n;
    if (cfg.protocol.mode == EsiMode::TwoBit) {
      r.overshoot_mean = sum_overshoot_ / n;
    }
    if (cfg.protocol.mode == EsiMode::ZeroBitDischarge) {
      r.full_discharge_freq = static_cast<double>(discharges_) / n;
    }
    r.ci_rho = half_width(rho_batches_);
    r.ci_omega = half_width(omega_batches_);
    r.seed = cfg.seed;
    r.cycles = cycles_;
    return r;
  }

 private:
  static constexpr std::uint64_t kBatches = 100;

  void close_batch() {
    const double total = batch_tau_c_ + batch_tau_d_;
    rho_batches_.push_back(batch_tau_d_ / total);
    omega_batches_.push_back(static_cast<double>(batch_count_) / total);
    batch_tau_c_ = batch_tau_d_ = 0;
    batch_count_ = 0;
    ++batch_;
  }

  static double half_width(const std::vector<double>& batches) {
    const std::size_t b = batches.size();
    if (b < 2) return 0;
    double mean = 0;
    for (double v : batches) mean += v;
    mean /= static_cast<double>(b);
    double ss = 0;
    for (double v : batches) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(b - 1));
    return 1.96 * sd / std::sqrt(static_cast<double>(b));
  }

  std::uint64_t cycles_;
  std::uint64_t index_ = 0;
  std::uint64_t batch_ = 0;
  double sum_tau_c_ = 0, sum_tau_d_ = 0, sum_overshoot_ = 0;
  std::uint64_t outages_ = 0, discharges_ = 0;
  double batch_tau_c_ = 0, batch_tau_d_ = 0;
  std::uint64_t batch_count_ = 0;
  std::vector<double> rho_batches_, omega_batches_;
};

template <typename CycleFn>
SimResult run(const SimConfig& cfg, CycleFn&& cycle) {
  RandomStream rng(cfg.seed);
  Aggregator agg(cfg.cycles);
  for (std::uint64_t i = 0; i < cfg.cycles; ++i) agg.add(cycle(rng));
  return agg.finish(cfg);
}

template <typename CycleFn>
std::vector<CycleRecord> run_records(const SimConfig& cfg, CycleFn&& cycle) {
  RandomStream rng(cfg.seed);
  std::vector<CycleRecord> records;
  records.reserve(cfg.cycles);
  for (std::uint64_t i = 0; i < cfg.cycles; ++i) records.push_back(cycle(rng));
  return records;
}

template <typename Consumer>
auto dispatch(const SimConfig& cfg, Consumer&& consume) {
  validate(cfg);
  const RenewalConstants k = derive_constants(cfg.arrival, cfg.packet);
  switch (cfg.protocol.mode) {
    case EsiMode::TwoBit:
      return consume([&](RandomStream& rng) { return two_bit_cycle(cfg, rng); });
    case EsiMode::OneBit: {
      const double t_c =
          one_bit_switch_time(k, cfg.protocol.threshold, cfg.protocol.outage_target);
      return consume([&, t_c](RandomStream& rng) { return one_bit_cycle(cfg, t_c, rng); });
    }
    case EsiMode::ZeroBit:
    case EsiMode::ZeroBitDischarge: {
      const ZeroBitPlan plan = zero_bit_plan(cfg, k);
      return consume([&, plan](RandomStream& rng) {
        return zero_bit_cycle(cfg, plan.t_c, plan.period, plan.required, rng);
      });
    }
  }
  throw domain_error("simulate: unknown mode");
}

}  // namespace detail

/// Run the configured protocol for cfg.cycles harvest-consume cycles.
/// Deterministic: (config, seed) fixes every output bit.
inline SimResult simulate(const SimConfig& cfg) {
  return detail::dispatch(cfg, [&](auto&& cycle) { return detail::run(cfg, cycle); });
}

inline SimResult simulate_two_bit(const SimConfig& cfg) {
  if (cfg.protocol.mode != EsiMode::TwoBit) {
    throw domain_error("simulate_two_bit: protocol mode is not two_bit");
  }
  return simulate(cfg);
}

inline SimResult simulate_one_bit(const SimConfig& cfg) {
  if (cfg.protocol.mode != EsiMode::OneBit) {
    throw domain_error("simulate_one_bit: protocol mode is not one_bit");
  }
  return simulate(cfg);
}

inline SimResult simulate_zero_bit(const SimConfig& cfg) {
  if (cfg.protocol.mode != EsiMode::ZeroBit &&
      cfg.protocol.mode != EsiMode::ZeroBitDischarge) {
    throw domain_error("simulate_zero_bit: protocol mode is not zero_bit");
  }
  return simulate(cfg);
}

/// Per-cycle records from the identical random stream `simulate` consumes;
/// used for distributional checks against the closed-form CDFs.
inline std::vector<CycleRecord> simulate_cycles(const SimConfig& cfg) {
  return detail::dispatch(cfg,
                          [&](auto&& cycle) { return detail::run_records(cfg, cycle); });
}

/// One sweep row: threshold, closed-form metrics, and the paired simulation.
struct SweepRow {
  double threshold = 0;
  Metrics analytic;
  SimResult sim;
};

/// Analytic-versus-simulated table over a strictly increasing threshold grid.
/// Each row runs on an independent substream derived from the base seed, so
/// any row can be reproduced in isolation from the seed it reports.
///
/// Zero-bit modes are swept by threshold too: for ZeroBit the period is the
/// unique T = t_c(u) + u/p consistent with consuming exactly u per cycle, and
/// for ZeroBitDischarge the period follows from the theta3 constraint.
inline std::vector<SweepRow> sweep(const SimConfig& base, std::span<const double> grid) {
  if (grid.empty()) throw domain_error("sweep: threshold grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw domain_error("sweep: threshold grid must be strictly increasing");
    }
  }
  const RenewalConstants k = derive_constants(base.arrival, base.packet);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SimConfig cfg = base;
    cfg.seed = RandomStream::derive_seed(base.seed, i);
    cfg.protocol.threshold = grid[i];
    if (base.protocol.mode == EsiMode::ZeroBit) {
      const double t_c = one_bit_switch_time(k, grid[i], cfg.protocol.outage_target);
      cfg.protocol.period = t_c + grid[i] / cfg.protocol.power;
    }
    SweepRow row;
    row.threshold = grid[i];
    row.analytic = analyze(k, cfg.protocol);
    row.sim = simulate(cfg);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace htc
