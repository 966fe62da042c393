#include "dtnlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <thread>
#include <unordered_map>

#include "dtnlab/errors.hpp"
#include "dtnlab/rng.hpp"

namespace dtnlab {
namespace {

std::uint64_t pair_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Internal engine; reusable across runs so scratch buffers persist.
class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg)
      : cfg_(cfg), mobility_(cfg.mobility) {
    cfg_.validate();
    node_count_ = cfg_.resolved_node_count();
    dt_ = cfg_.resolved_dt();
    mobility_.side = cfg_.side;
    streams_.resize(node_count_);
  }

  double dt() const { return dt_; }
  int node_count() const { return node_count_; }

  RunTrace run(std::uint64_t run_seed, TraceMode mode,
               const std::function<void(const StepView&)>* observer = nullptr) {
    reset(run_seed);
    RunTrace trace;
    trace.source = source_;
    trace.destination = destination_;

    const std::int32_t total_steps =
        static_cast<std::int32_t>(std::floor(cfg_.horizon / dt_ + 1e-9));
    const double stop_count = cfg_.stop_fraction * node_count_;

    // t = 0: the source holds the message before any motion happens.
    if (cfg_.transfer_delay == 0.0) {
      close_clusters(0.0, trace);
    } else {
      infected_count_ = 1;
      refresh_contacts(0.0);
    }
    trace.n_steps.emplace_back(0, infected_count_);
    if (observer) {
      (*observer)(StepView{0, 0.0, positions_, infected_});
    }

    std::int32_t step = 0;
    while (step < total_steps) {
      if (stop_now(mode, trace, stop_count)) break;
      ++step;
      const double t = step * dt_;
      advance_nodes();
      if (cfg_.transfer_delay == 0.0) {
        close_clusters(t, trace);
      } else {
        // Completions of the window (t - dt, t] use the adjacency snapshot
        // taken at t - dt; the new snapshot then prunes broken transfers.
        drain_completions(t, trace, mode);
        refresh_contacts(t);
      }
      if (mode == TraceMode::FullTrace &&
          infected_count_ != trace.n_steps.back().second) {
        trace.n_steps.emplace_back(step, infected_count_);
      }
      if (observer) {
        (*observer)(StepView{step, t, positions_, infected_});
      }
    }
    trace.last_step = step;
    return trace;
  }

 private:
  void reset(std::uint64_t run_seed) {
    for (int i = 0; i < node_count_; ++i) {
      streams_[i].reseed(derive_seed(run_seed, static_cast<std::uint64_t>(i) + 1));
    }
    Rng picker(derive_seed(run_seed, 0));
    nodes_ = init_positions(mobility_, node_count_, streams_);
    positions_.resize(node_count_);
    for (int i = 0; i < node_count_; ++i) positions_[i] = nodes_[i].position;

    source_ = static_cast<std::int32_t>(picker.next_below(node_count_));
    destination_ = static_cast<std::int32_t>(picker.next_below(node_count_ - 1));
    if (destination_ >= source_) ++destination_;

    infected_.assign(node_count_, 0);
    infected_[source_] = 1;
    infected_count_ = 1;
    transfers_.clear();
    adjacency_keys_.clear();
    adjacency_offsets_.clear();
    adjacency_list_.clear();
    delivery_.reset();
  }

  void advance_nodes() {
    for (int i = 0; i < node_count_; ++i) {
      step_node(nodes_[i], dt_, mobility_, streams_[i]);
      positions_[i] = nodes_[i].position;
    }
  }

  // Zero-delay branch: every cluster holding an infected node becomes fully
  // infected at the snapshot time.
  void close_clusters(double t, RunTrace& trace) {
    const ClusterPartition partition =
        builder_.build({positions_, cfg_.range});
    cluster_hit_.assign(node_count_, 0);
    for (int i = 0; i < node_count_; ++i) {
      if (infected_[i]) cluster_hit_[partition.label[i]] = 1;
    }
    for (int i = 0; i < node_count_; ++i) {
      if (!infected_[i] && cluster_hit_[partition.label[i]]) {
        infected_[i] = 1;
        ++infected_count_;
      }
    }
    if (!delivery_ && infected_[destination_]) delivery_ = t;
    trace.delivery_time = delivery_;
  }

  // Rebuilds the adjacency snapshot, aborts transfers whose link broke, and
  // opens transfers for adjacent infected/uninfected pairs.
  void refresh_contacts(double t) {
    pairs_.clear();
    builder_.for_each_contact_pair({positions_, cfg_.range},
                                   [&](std::int32_t a, std::int32_t b) {
                                     pairs_.emplace_back(a, b);
                                   });
    adjacency_keys_.clear();
    adjacency_keys_.reserve(pairs_.size());
    for (const auto& [a, b] : pairs_) adjacency_keys_.push_back(pair_key(a, b));
    std::sort(adjacency_keys_.begin(), adjacency_keys_.end());

    for (auto it = transfers_.begin(); it != transfers_.end();) {
      const bool adjacent = std::binary_search(adjacency_keys_.begin(),
                                               adjacency_keys_.end(), it->first);
      const auto a = static_cast<std::int32_t>(it->first >> 32);
      const auto b = static_cast<std::int32_t>(it->first & 0xffffffffu);
      if (!adjacent || (infected_[a] && infected_[b])) {
        it = transfers_.erase(it);  // a broken link restarts from zero later
      } else {
        ++it;
      }
    }
    for (const auto& [a, b] : pairs_) {
      if (infected_[a] == infected_[b]) continue;
      transfers_.try_emplace(pair_key(a, b), t);
    }

    // CSR adjacency for the next window's infection cascade.
    adjacency_offsets_.assign(node_count_ + 1, 0);
    for (const auto& [a, b] : pairs_) {
      ++adjacency_offsets_[a + 1];
      ++adjacency_offsets_[b + 1];
    }
    for (int i = 0; i < node_count_; ++i) {
      adjacency_offsets_[i + 1] += adjacency_offsets_[i];
    }
    adjacency_list_.resize(pairs_.size() * 2);
    cursor_.assign(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
    for (const auto& [a, b] : pairs_) {
      adjacency_list_[cursor_[a]++] = b;
      adjacency_list_[cursor_[b]++] = a;
    }
  }

  // Processes transfer completions in (t - dt, t], iterating hops inside the
  // window; adjacency is the snapshot taken at the window start.
  void drain_completions(double t, RunTrace& trace, TraceMode mode) {
    const double d = cfg_.transfer_delay;
    using Event = std::pair<double, std::uint64_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
    for (const auto& [key, start] : transfers_) {
      if (start + d <= t) queue.emplace(start + d, key);
    }
    while (!queue.empty()) {
      const auto [when, key] = queue.top();
      queue.pop();
      const auto it = transfers_.find(key);
      if (it == transfers_.end()) continue;
      const auto a = static_cast<std::int32_t>(key >> 32);
      const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
      const std::int32_t receiver = infected_[a] ? b : a;
      transfers_.erase(it);
      if (infected_[receiver]) continue;  // lost the race to another sender
      infected_[receiver] = 1;
      ++infected_count_;
      if (!delivery_ && receiver == destination_) {
        delivery_ = when;
        trace.delivery_time = delivery_;
        if (mode == TraceMode::DeliveryOnly) return;
      }
      // The fresh holder forwards to its uninfected neighbors; it may only
      // transmit after its own transfer completed.
      for (std::int32_t k = adjacency_offsets_[receiver];
           k < adjacency_offsets_[receiver + 1]; ++k) {
        const std::int32_t other = adjacency_list_[k];
        if (infected_[other]) continue;
        const auto [slot, inserted] =
            transfers_.try_emplace(pair_key(receiver, other), when);
        if (inserted && slot->second + d <= t) {
          queue.emplace(slot->second + d, slot->first);
        }
      }
    }
    trace.delivery_time = delivery_;
  }

  bool stop_now(TraceMode mode, const RunTrace& trace, double stop_count) const {
    if (mode == TraceMode::DeliveryOnly) return trace.delivery_time.has_value();
    return static_cast<double>(infected_count_) >= stop_count;
  }

  SimConfig cfg_;
  MobilityConfig mobility_;
  int node_count_ = 0;
  double dt_ = 0.0;
  std::vector<Rng> streams_;
  std::vector<NodeKinematics> nodes_;
  std::vector<Vec2> positions_;
  std::vector<char> infected_;
  std::vector<char> cluster_hit_;
  std::int32_t infected_count_ = 0;
  std::int32_t source_ = -1;
  std::int32_t destination_ = -1;
  std::optional<double> delivery_;
  ClusterBuilder builder_;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs_;
  std::vector<std::uint64_t> adjacency_keys_;
  std::vector<std::int32_t> adjacency_offsets_;
  std::vector<std::int32_t> adjacency_list_;
  std::vector<std::int32_t> cursor_;
  std::unordered_map<std::uint64_t, double> transfers_;  // pair -> start time
};

}  // namespace

int SimConfig::resolved_node_count() const {
  if (node_count > 0) return node_count;
  const double side_km = side / 1000.0;
  return static_cast<int>(std::llround(density * side_km * side_km));
}

double SimConfig::resolved_dt() const {
  if (dt > 0.0) return dt;
  if (mobility.v_max <= 0.0) return 1.0;
  return std::min(1.0, 0.05 * range / mobility.v_max);
}

void SimConfig::validate() const {
  if (side <= 0.0) throw ConfigError("sim: side must be positive");
  if (range <= 0.0) throw ConfigError("sim: range must be positive");
  if (resolved_node_count() < 2) {
    throw EmptyNetwork("EmptyNetwork: need at least 2 nodes");
  }
  if (resolved_dt() <= 0.0) throw ConfigError("sim: dt must be positive");
  if (transfer_delay < 0.0) throw ConfigError("sim: transfer_delay must be >= 0");
  if (horizon <= 0.0) throw ConfigError("sim: horizon must be positive");
  if (stop_fraction <= 0.0 || stop_fraction > 1.0) {
    throw ConfigError("sim: stop_fraction must be in (0,1]");
  }
  MobilityConfig mob = mobility;
  mob.side = side;
  mob.validate();
}

std::int32_t RunTrace::n_at_step(std::int32_t step) const {
  std::int32_t value = n_steps.front().second;
  for (const auto& [at, n] : n_steps) {
    if (at > step) break;
    value = n;
  }
  return value;
}

int EnsembleStats::delivered_by(double deadline) const {
  return static_cast<int>(std::upper_bound(delivery_times.begin(),
                                           delivery_times.end(), deadline) -
                          delivery_times.begin());
}

RunTrace run_once(const SimConfig& cfg, std::uint64_t run_seed, TraceMode mode) {
  Simulator sim(cfg);
  return sim.run(run_seed, mode);
}

RunTrace run_once_observed(const SimConfig& cfg, std::uint64_t run_seed,
                           TraceMode mode,
                           const std::function<void(const StepView&)>& observer) {
  Simulator sim(cfg);
  return sim.run(run_seed, mode, &observer);
}

EnsembleResult run_ensemble(const SimConfig& cfg, int runs,
                            std::uint64_t base_seed, TraceMode mode,
                            int threads) {
  if (runs < 1) throw ConfigError("sim: runs must be >= 1");
  std::vector<RunTrace> traces(runs);
  if (threads <= 1) {
    Simulator sim(cfg);
    for (int i = 0; i < runs; ++i) {
      traces[i] = sim.run(derive_seed(base_seed, i), mode);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      Simulator sim(cfg);
      for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
        traces[i] = sim.run(derive_seed(base_seed, i), mode);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EnsembleResult result;
  result.stats.runs = runs;
  result.stats.node_count = cfg.resolved_node_count();
  result.stats.dt = cfg.resolved_dt();
  result.stats.horizon = cfg.horizon;
  result.stats.stop_fraction = cfg.stop_fraction;
  double n0_sum = 0.0;
  for (const auto& trace : traces) {
    n0_sum += trace.initial_infected();
    if (trace.delivery_time) {
      result.stats.delivery_times.push_back(*trace.delivery_time);
    }
  }
  std::sort(result.stats.delivery_times.begin(), result.stats.delivery_times.end());
  result.stats.n0_mean = n0_sum / runs;

  if (mode == TraceMode::FullTrace) {
    std::int32_t max_step = 0;
    for (const auto& trace : traces) max_step = std::max(max_step, trace.last_step);
    std::vector<double> sums(max_step + 1, 0.0);
    for (const auto& trace : traces) {
      std::size_t seg = 0;
      std::int32_t current = trace.n_steps.front().second;
      for (std::int32_t j = 0; j <= max_step; ++j) {
        // Runs that stopped early stay frozen at their final count.
        while (seg < trace.n_steps.size() && trace.n_steps[seg].first <= j) {
          current = trace.n_steps[seg].second;
          ++seg;
        }
        sums[j] += current;
      }
    }
    result.stats.mean_n_at.resize(sums.size());
    for (std::size_t j = 0; j < sums.size(); ++j) {
      result.stats.mean_n_at[j] = sums[j] / runs;
    }
    // Truncate just past T_l, the first step where the ensemble mean reaches
    // stop_fraction * M.
    const double stop_count = cfg.stop_fraction * result.stats.node_count;
    for (std::size_t j = 0; j < result.stats.mean_n_at.size(); ++j) {
      if (result.stats.mean_n_at[j] >= stop_count) {
        result.stats.mean_n_at.resize(j + 1);
        break;
      }
    }
  }
  result.traces = std::move(traces);
  return result;
}

double ps(const EnsembleStats& stats, double deadline) {
  if (deadline > stats.horizon) {
    throw HorizonExceeded("sim: deadline exceeds simulated horizon");
  }
  return static_cast<double>(stats.delivered_by(deadline)) / stats.runs;
}

ContactLog run_contact_log(const SimConfig& cfg, std::uint64_t run_seed,
                           double duration) {
  cfg.validate();
  if (duration <= 0.0) throw ConfigError("sim: duration must be positive");
  const int node_count = cfg.resolved_node_count();
  const double dt = cfg.resolved_dt();
  MobilityConfig mobility = cfg.mobility;
  mobility.side = cfg.side;

  std::vector<Rng> streams(node_count);
  for (int i = 0; i < node_count; ++i) {
    streams[i].reseed(derive_seed(run_seed, static_cast<std::uint64_t>(i) + 1));
  }
  auto nodes = init_positions(mobility, node_count, streams);
  std::vector<Vec2> positions(node_count);
  ClusterBuilder builder;
  std::vector<std::uint64_t> previous, current;

  ContactLog log;
  const auto steps = static_cast<std::int64_t>(std::floor(duration / dt + 1e-9));
  log.duration = steps * dt;
  for (std::int64_t j = 0; j <= steps; ++j) {
    if (j > 0) {
      for (int i = 0; i < node_count; ++i) {
        step_node(nodes[i], dt, mobility, streams[i]);
      }
    }
    for (int i = 0; i < node_count; ++i) positions[i] = nodes[i].position;
    current.clear();
    builder.for_each_contact_pair({positions, cfg.range},
                                  [&](std::int32_t a, std::int32_t b) {
                                    current.push_back(pair_key(a, b));
                                  });
    std::sort(current.begin(), current.end());
    for (const std::uint64_t key : current) {
      if (!std::binary_search(previous.begin(), previous.end(), key)) ++log.onsets;
    }
    previous.swap(current);
  }
  return log;
}

double estimate_pairwise_meeting_rate(std::uint64_t onsets, int node_count,
                                      double duration) {
  if (node_count < 2) throw InvalidInput("pmr: need at least 2 nodes");
  if (duration <= 0.0) throw InvalidInput("pmr: duration must be positive");
  const double pairs = 0.5 * static_cast<double>(node_count) *
                       static_cast<double>(node_count - 1);
  return static_cast<double>(onsets) / (pairs * duration);
}

double estimate_pairwise_meeting_rate(std::span<const ContactLog> logs,
                                      int node_count) {
  std::uint64_t onsets = 0;
  double duration = 0.0;
  for (const auto& log : logs) {
    onsets += log.onsets;
    duration += log.duration;
  }
  return estimate_pairwise_meeting_rate(onsets, node_count, duration);
}

void write_traces_csv(const std::string& path, std::span<const RunTrace> traces,
                      double dt) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "run_id,t,N\n");
  for (std::size_t run = 0; run < traces.size(); ++run) {
    const auto& trace = traces[run];
    for (const auto& [step, n] : trace.n_steps) {
      std::fprintf(f, "%zu,%.10g,%d\n", run, step * dt, n);
    }
    if (trace.n_steps.back().first != trace.last_step) {
      std::fprintf(f, "%zu,%.10g,%d\n", run, trace.last_step * dt,
                   trace.final_infected());
    }
  }
  std::fclose(f);
}

void write_deliveries_csv(const std::string& path,
                          std::span<const RunTrace> traces) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "run_id,delivery_time\n");
  for (std::size_t run = 0; run < traces.size(); ++run) {
    if (traces[run].delivery_time) {
      std::fprintf(f, "%zu,%.10g\n", run, *traces[run].delivery_time);
    } else {
      std::fprintf(f, "%zu,\n", run);
    }
  }
  std::fclose(f);
}

}  // namespace dtnlab
