#pragma once

#include <cstdint>
#include <vector>

#include "dtnlab/geometry.hpp"
#include "dtnlab/rng.hpp"

namespace dtnlab {

enum class MobilityKind : std::uint8_t { RandomDirection, Tvc };

// Time-variant community parameters. Epoch durations are exponentially
// distributed; after each epoch the node pauses uniform [0, max_pause] and
// then picks the next epoch kind from a two-state Markov chain with
// P(local->local) = p_local and P(roam->roam) = p_roam.
struct TvcConfig {
  double community_side = 0.0;  // L_c, m
  double mean_local = 0.0;      // mean local-epoch duration, s
  double mean_roam = 0.0;       // mean roaming-epoch duration, s
  double max_pause = 0.0;       // s
  double p_local = 0.0;
  double p_roam = 0.0;
};

struct MobilityConfig {
  MobilityKind kind = MobilityKind::RandomDirection;
  double v_min = 0.0;       // m/s
  double v_max = 0.0;       // m/s; speeds are drawn uniformly from (v_min, v_max]
  double travel_time = 0.0; // t_r: travel durations are uniform on (0, t_r], s
  double side = 0.0;        // L, m
  TvcConfig tvc;

  // Throws ConfigError on violated invariants. v_min == v_max is accepted as
  // a degenerate constant-speed network (v_max = 0 freezes all nodes).
  void validate() const;
};

enum class MotionMode : std::uint8_t {
  Travel,       // random-direction travel over the whole area
  LocalEpoch,   // TVC: travel confined to the node's community square
  RoamEpoch,    // TVC: travel over the whole area
  Pause,        // TVC: stationary between epochs
  Transitional  // TVC: straight line toward a point inside the community
};

struct NodeKinematics {
  Vec2 position;
  double heading = 0.0;          // radians
  double speed = 0.0;            // m/s
  double phase_remaining = 0.0;  // s left in the current phase
  MotionMode mode = MotionMode::Travel;
  MotionMode after_pause = MotionMode::LocalEpoch;  // chain draw, set on entering Pause
  Vec2 community;                // lower-left corner of the community square (TVC)
  Vec2 transition_target;        // destination of the current Transitional phase
};

// Initial state of one node: position uniform on [0,L)^2, a fresh motion
// phase entered at a uniformly random residual fraction, and (TVC) a
// uniformly placed community. Consumes only the given stream.
NodeKinematics init_node(const MobilityConfig& cfg, Rng& rng);

// Initial placement of `count` nodes, node i drawn from streams[i].
// Throws EmptyNetwork when count == 0.
std::vector<NodeKinematics> init_positions(const MobilityConfig& cfg, int count,
                                           std::vector<Rng>& streams);

// Advances one node by dt seconds under the random-direction model with
// specular reflection at the boundaries of [0,L]^2.
void step_random_direction(NodeKinematics& state, double dt,
                           const MobilityConfig& cfg, Rng& rng);

// Advances one node by dt seconds under the TVC model.
void step_tvc(NodeKinematics& state, double dt, const MobilityConfig& cfg,
              Rng& rng);

// Dispatches on cfg.kind.
inline void step_node(NodeKinematics& state, double dt,
                      const MobilityConfig& cfg, Rng& rng) {
  if (cfg.kind == MobilityKind::RandomDirection) {
    step_random_direction(state, dt, cfg, rng);
  } else {
    step_tvc(state, dt, cfg, rng);
  }
}

}  // namespace dtnlab
