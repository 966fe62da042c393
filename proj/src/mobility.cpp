#include "dtnlab/mobility.hpp"

#include <cmath>

#include "dtnlab/errors.hpp"

namespace dtnlab {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reflects x into [lo, hi] by folding over the period 2*(hi-lo). `flip`
// reports whether the outgoing direction component changes sign, which is
// independent of how many whole periods were folded away.
double fold(double x, double lo, double hi, bool& flip) {
  const double span = hi - lo;
  double u = x - lo;
  if (u >= 0.0 && u <= span) {  // common case: no boundary crossing
    flip = false;
    return x;
  }
  const double period = 2.0 * span;
  double r = std::fmod(u, period);
  if (r < 0.0) r += period;
  if (r > span) {
    r = period - r;
    flip = true;
  } else {
    flip = false;
  }
  return lo + r;
}

double draw_speed(const MobilityConfig& cfg, Rng& rng) {
  if (cfg.v_max > cfg.v_min) return rng.uniform_open_closed(cfg.v_min, cfg.v_max);
  return cfg.v_max;  // degenerate constant-speed network
}

void redraw_travel(NodeKinematics& state, const MobilityConfig& cfg, Rng& rng) {
  state.heading = rng.uniform(0.0, kTwoPi);
  state.speed = draw_speed(cfg, rng);
  state.phase_remaining = rng.uniform_open_closed(0.0, cfg.travel_time);
}

// Straight motion with specular reflection inside [lo_x,hi_x]x[lo_y,hi_y].
void advance_travel(NodeKinematics& state, double seconds, double lo_x,
                    double hi_x, double lo_y, double hi_y) {
  if (seconds <= 0.0 || state.speed <= 0.0) return;
  double dir_x = std::cos(state.heading);
  double dir_y = std::sin(state.heading);
  const double step = state.speed * seconds;
  bool flip_x = false;
  bool flip_y = false;
  state.position.x = fold(state.position.x + dir_x * step, lo_x, hi_x, flip_x);
  state.position.y = fold(state.position.y + dir_y * step, lo_y, hi_y, flip_y);
  if (flip_x || flip_y) {
    if (flip_x) dir_x = -dir_x;
    if (flip_y) dir_y = -dir_y;
    state.heading = std::atan2(dir_y, dir_x);
  }
}

bool inside_community(const NodeKinematics& state, const TvcConfig& tvc) {
  return state.position.x >= state.community.x &&
         state.position.x <= state.community.x + tvc.community_side &&
         state.position.y >= state.community.y &&
         state.position.y <= state.community.y + tvc.community_side;
}

void enter_local_epoch(NodeKinematics& state, const MobilityConfig& cfg,
                       Rng& rng) {
  state.mode = MotionMode::LocalEpoch;
  state.heading = rng.uniform(0.0, kTwoPi);
  state.speed = draw_speed(cfg, rng);
  state.phase_remaining = rng.exponential(cfg.tvc.mean_local);
}

void enter_roam_epoch(NodeKinematics& state, const MobilityConfig& cfg,
                      Rng& rng) {
  state.mode = MotionMode::RoamEpoch;
  state.heading = rng.uniform(0.0, kTwoPi);
  state.speed = draw_speed(cfg, rng);
  state.phase_remaining = rng.exponential(cfg.tvc.mean_roam);
}

// Straight-line leg toward a uniformly chosen point inside the community.
void enter_transitional(NodeKinematics& state, const MobilityConfig& cfg,
                        Rng& rng) {
  const double side = cfg.tvc.community_side;
  state.transition_target.x = state.community.x + rng.next_double() * side;
  state.transition_target.y = state.community.y + rng.next_double() * side;
  state.speed = draw_speed(cfg, rng);
  const double dx = state.transition_target.x - state.position.x;
  const double dy = state.transition_target.y - state.position.y;
  const double dist = std::hypot(dx, dy);
  state.mode = MotionMode::Transitional;
  state.heading = std::atan2(dy, dx);
  state.phase_remaining = (dist > 0.0 && state.speed > 0.0) ? dist / state.speed : 0.0;
}

void enter_pause(NodeKinematics& state, bool was_local,
                 const MobilityConfig& cfg, Rng& rng) {
  state.mode = MotionMode::Pause;
  state.phase_remaining = rng.uniform(0.0, cfg.tvc.max_pause);
  const double stay = was_local ? cfg.tvc.p_local : cfg.tvc.p_roam;
  const bool same = rng.bernoulli(stay);
  state.after_pause = (was_local == same) ? MotionMode::LocalEpoch : MotionMode::RoamEpoch;
}

// Leaves Pause: a local choice made outside the community goes through a
// transitional leg first.
void enter_after_pause(NodeKinematics& state, const MobilityConfig& cfg,
                       Rng& rng) {
  if (state.after_pause == MotionMode::LocalEpoch) {
    if (inside_community(state, cfg.tvc)) {
      enter_local_epoch(state, cfg, rng);
    } else {
      enter_transitional(state, cfg, rng);
    }
  } else {
    enter_roam_epoch(state, cfg, rng);
  }
}

}  // namespace

void MobilityConfig::validate() const {
  if (side <= 0.0) throw ConfigError("mobility: side length must be positive");
  if (v_min < 0.0 || v_max < v_min || !std::isfinite(v_max)) {
    throw ConfigError("mobility: need 0 <= v_min <= v_max < inf");
  }
  if (kind == MobilityKind::RandomDirection) {
    if (travel_time <= 0.0) throw ConfigError("mobility: travel_time must be positive");
  } else {
    if (tvc.community_side <= 0.0 || tvc.community_side > side) {
      throw ConfigError("mobility: need 0 < community_side <= side");
    }
    if (tvc.mean_local <= 0.0 || tvc.mean_roam <= 0.0) {
      throw ConfigError("mobility: epoch duration means must be positive");
    }
    if (tvc.max_pause < 0.0) throw ConfigError("mobility: max_pause must be >= 0");
    if (tvc.p_local < 0.0 || tvc.p_local > 1.0 || tvc.p_roam < 0.0 || tvc.p_roam > 1.0) {
      throw ConfigError("mobility: chain probabilities must be in [0,1]");
    }
  }
}

NodeKinematics init_node(const MobilityConfig& cfg, Rng& rng) {
  NodeKinematics state;
  state.position.x = rng.uniform(0.0, cfg.side);
  state.position.y = rng.uniform(0.0, cfg.side);
  if (cfg.kind == MobilityKind::RandomDirection) {
    state.mode = MotionMode::Travel;
    redraw_travel(state, cfg, rng);
    state.phase_remaining *= rng.next_double();  // uniform residual fraction
    return state;
  }
  const double corner_max = cfg.side - cfg.tvc.community_side;
  state.community.x = rng.next_double() * corner_max;
  state.community.y = rng.next_double() * corner_max;
  // Initial epoch kind from the chain's stationary distribution.
  const double leave_local = 1.0 - cfg.tvc.p_local;
  const double leave_roam = 1.0 - cfg.tvc.p_roam;
  const double denom = leave_local + leave_roam;
  const double p_stationary_local = denom > 0.0 ? leave_roam / denom : 0.5;
  if (rng.bernoulli(p_stationary_local)) {
    if (inside_community(state, cfg.tvc)) {
      enter_local_epoch(state, cfg, rng);
      state.phase_remaining *= rng.next_double();
    } else {
      enter_transitional(state, cfg, rng);
    }
  } else {
    enter_roam_epoch(state, cfg, rng);
    state.phase_remaining *= rng.next_double();
  }
  return state;
}

std::vector<NodeKinematics> init_positions(const MobilityConfig& cfg, int count,
                                           std::vector<Rng>& streams) {
  if (count < 1) throw EmptyNetwork();
  std::vector<NodeKinematics> nodes;
  nodes.reserve(count);
  for (int i = 0; i < count; ++i) nodes.push_back(init_node(cfg, streams[i]));
  return nodes;
}

void step_random_direction(NodeKinematics& state, double dt,
                           const MobilityConfig& cfg, Rng& rng) {
  double remaining = dt;
  while (remaining > 0.0) {
    if (state.phase_remaining <= 0.0) redraw_travel(state, cfg, rng);
    const double advance = std::min(remaining, state.phase_remaining);
    advance_travel(state, advance, 0.0, cfg.side, 0.0, cfg.side);
    state.phase_remaining -= advance;
    remaining -= advance;
    if (state.phase_remaining <= 0.0) redraw_travel(state, cfg, rng);
  }
}

void step_tvc(NodeKinematics& state, double dt, const MobilityConfig& cfg,
              Rng& rng) {
  double remaining = dt;
  while (remaining > 0.0) {
    const double advance = std::min(remaining, state.phase_remaining);
    switch (state.mode) {
      case MotionMode::LocalEpoch:
        advance_travel(state, advance, state.community.x,
                       state.community.x + cfg.tvc.community_side,
                       state.community.y,
                       state.community.y + cfg.tvc.community_side);
        break;
      case MotionMode::RoamEpoch:
      case MotionMode::Travel:
        advance_travel(state, advance, 0.0, cfg.side, 0.0, cfg.side);
        break;
      case MotionMode::Transitional:
        if (advance > 0.0 && state.speed > 0.0) {
          state.position.x += std::cos(state.heading) * state.speed * advance;
          state.position.y += std::sin(state.heading) * state.speed * advance;
        }
        break;
      case MotionMode::Pause:
        break;
    }
    state.phase_remaining -= advance;
    remaining -= advance;
    if (state.phase_remaining <= 0.0) {
      switch (state.mode) {
        case MotionMode::LocalEpoch:
          enter_pause(state, /*was_local=*/true, cfg, rng);
          break;
        case MotionMode::RoamEpoch:
        case MotionMode::Travel:
          enter_pause(state, /*was_local=*/false, cfg, rng);
          break;
        case MotionMode::Transitional:
          state.position = state.transition_target;  // land exactly
          enter_local_epoch(state, cfg, rng);
          break;
        case MotionMode::Pause:
          enter_after_pause(state, cfg, rng);
          break;
      }
    }
  }
}

}  // namespace dtnlab
