#pragma once

#include "fasense/scenario.hpp"

namespace testutil {

/// Desk-sized scenario for fast pipeline tests.
inline fasense::Scenario small_scenario(std::uint64_t seed = 7) {
  fasense::Scenario sc;
  sc.region_size = {400.0, 400.0};
  sc.num_targets = 2;
  sc.altitude = 80.0;
  sc.q_init = {0.0, 200.0};
  sc.q_final = {400.0, 200.0};
  sc.mission_duration = 30.0;
  sc.num_slots = 6;
  sc.v_max = 20.0;  // 5 steps x 5 s x 20 m/s = 500 m reach for the 400 m crossing
  sc.num_tx = 4;
  sc.num_rx = 4;
  sc.frames_per_slot = 64;
  sc.pso.iterations = 8;
  sc.pso.particles = 8;
  sc.ao.max_iterations = 3;
  sc.seed = seed;
  return fasense::validated_or_throw(sc);
}

}  // namespace testutil
