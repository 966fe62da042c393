#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtnlab/contact.hpp"
#include "dtnlab/mobility.hpp"

namespace dtnlab {

// One simulated scenario. Units: meters, seconds, nodes/km^2.
struct SimConfig {
  double density = 0.0;        // nodes/km^2; used when node_count == 0
  int node_count = 0;          // explicit M; overrides density when > 0
  double side = 0.0;           // L, m
  double range = 0.0;          // R, m
  MobilityConfig mobility;     // mobility.side is forced to `side` at run time
  double dt = 0.0;             // step, s; 0 selects min(1, 0.05*R/v_max)
  double transfer_delay = 0.0; // d, s; 0 means instantaneous cluster infection
  double horizon = 0.0;        // s
  double stop_fraction = 0.99; // full-trace runs stop once N >= stop_fraction*M
  std::uint64_t seed = 1;

  int resolved_node_count() const;   // M = round(density * (side/1000)^2)
  double resolved_dt() const;
  void validate() const;
};

enum class TraceMode : std::uint8_t {
  DeliveryOnly,  // stop at delivery or horizon; records N only at t = 0
  FullTrace      // record N every step; stop at stop_fraction*M or horizon
};

// Per-run record. `n_steps` holds (step index, N) at every step where N
// changed, starting with step 0; N is constant between entries and after the
// last entry up to `last_step`.
struct RunTrace {
  std::vector<std::pair<std::int32_t, std::int32_t>> n_steps;
  std::int32_t last_step = 0;
  std::optional<double> delivery_time;
  std::int32_t source = -1;
  std::int32_t destination = -1;

  std::int32_t n_at_step(std::int32_t step) const;
  std::int32_t initial_infected() const { return n_steps.front().second; }
  std::int32_t final_infected() const { return n_steps.back().second; }
};

struct EnsembleStats {
  int runs = 0;
  int node_count = 0;
  double dt = 0.0;
  double horizon = 0.0;
  double stop_fraction = 0.99;
  double n0_mean = 0.0;               // mean N at t = 0
  std::vector<double> mean_n_at;      // per step; FullTrace ensembles only
  std::vector<double> delivery_times; // sorted ascending, delivered runs only

  int delivered_by(double deadline) const;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<RunTrace> traces;
};

// Runs one simulation. The run seed fixes everything: placement, motion,
// source/destination choice. Identical (cfg, run_seed, mode) triples yield
// bit-identical traces.
RunTrace run_once(const SimConfig& cfg, std::uint64_t run_seed, TraceMode mode);

// Test instrumentation: called after the infection update of every step.
struct StepView {
  std::int32_t step;
  double time;
  std::span<const Vec2> positions;
  std::span<const char> infected;
};
RunTrace run_once_observed(const SimConfig& cfg, std::uint64_t run_seed,
                           TraceMode mode,
                           const std::function<void(const StepView&)>& observer);

// Runs `runs` simulations with per-run seeds derived from base_seed and
// aggregates them in run-index order. `threads` > 1 executes runs on a
// worker pool; results are identical to the serial order by construction.
EnsembleResult run_ensemble(const SimConfig& cfg, int runs,
                            std::uint64_t base_seed, TraceMode mode,
                            int threads = 1);

// Delivery probability within the deadline. Throws HorizonExceeded when the
// deadline lies beyond the simulated horizon.
double ps(const EnsembleStats& stats, double deadline);

// Adjacency-onset log of one mobility-only run: every pair transition from
// non-adjacent to adjacent counts once, including pairs adjacent at t = 0.
struct ContactLog {
  std::uint64_t onsets = 0;
  double duration = 0.0;
};
ContactLog run_contact_log(const SimConfig& cfg, std::uint64_t run_seed,
                           double duration);

// Pairwise meeting rate: total onsets / (C(M,2) * total duration).
double estimate_pairwise_meeting_rate(std::span<const ContactLog> logs, int node_count);
double estimate_pairwise_meeting_rate(std::uint64_t onsets, int node_count,
                                      double duration);

// CSV exports. Trace rows are `run_id,t,N` (one row per change plus a final
// row); delivery rows are `run_id,delivery_time` with an empty field for
// undelivered runs.
void write_traces_csv(const std::string& path, std::span<const RunTrace> traces,
                      double dt);
void write_deliveries_csv(const std::string& path, std::span<const RunTrace> traces);

}  // namespace dtnlab
