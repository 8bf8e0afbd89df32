#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fasense/geometry.hpp"

namespace fasense {

/// Swarm hyperparameters for the per-slot antenna position search.
struct PsoConfig {
  int iterations = 50;      // T_max
  int particles = 50;       // P
  double c1 = 1.5;          // cognitive acceleration
  double c2 = 1.5;          // social acceleration
  double omega_max = 0.9;   // initial inertia weight
  double omega_min = 0.4;   // final inertia weight
  double penalty = 1e6;     // constraint-violation penalty factor (eta)
};

/// Outer alternating-optimization loop controls.
struct AoConfig {
  int max_iterations = 20;  // l_max
  double epsilon = 1e-4;    // absolute objective-improvement stop threshold [rad^-2]
};

/// Geometry used for the fixed receive array in the transmit-only scheme.
enum class ReceiveUlaGeometry { kMaxSpread, kHalfWavelength };

/**
 * Full experiment description. Configured fields use human units (dBm,
 * multiples of the wavelength); validate() derives the SI-unit working
 * fields. Immutable after validation, safe to share across workers.
 */
struct Scenario {
  // --- configured ---
  Vec2 region_size{800.0, 800.0};   // mission area edge lengths [m]
  int num_targets = 6;              // K
  std::vector<Vec2> targets;        // drawn uniformly from `seed` when empty
  double altitude = 100.0;          // H [m]
  Vec2 q_init{0.0, 400.0};          // UAV start [m]
  Vec2 q_final{800.0, 400.0};       // UAV end [m]
  double mission_duration = 45.0;   // T [s]
  int num_slots = 20;               // N
  double v_max = 20.0;              // [m/s]
  double p_max_dbm = 30.0;          // transmit power budget [dBm]
  int num_tx = 12;                  // M_t
  int num_rx = 12;                  // M_r
  double wavelength = 0.0107;       // lambda [m]
  double aperture_wavelengths = 20.0;    // D / lambda
  double min_spacing_wavelengths = 0.5;  // D_min / lambda
  std::vector<double> rcs_m2;       // per-target |alpha|^2 [m^2]; filled with 1.0 when empty
  double noise_dbm = -90.0;         // receiver noise power [dBm]
  int frames_per_slot = 200;        // N_bar
  PsoConfig pso;
  AoConfig ao;
  ReceiveUlaGeometry tfao_receive = ReceiveUlaGeometry::kMaxSpread;
  std::uint64_t seed = 1;

  // --- derived by validate() ---
  double slot_duration = 0.0;  // tau = T / N [s]
  double p_max_w = 0.0;        // [W]
  double noise_w = 0.0;        // [W]
  double aperture = 0.0;       // D [m]
  double min_spacing = 0.0;    // D_min [m]
  std::vector<std::complex<double>> rcs;  // alpha_k (zero phase; only |alpha|^2 matters)
};

bool operator==(const Scenario& a, const Scenario& b);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Uniform draws in the region; prefix-stable in k (the first k targets of a
/// given seed never change when k grows, keeping target-count sweeps nested).
std::vector<Vec2> draw_targets(int count, const Vec2& region_size, std::uint64_t seed);

/// Computes derived fields (unit conversions, tau, target draws) and checks
/// every invariant. Returns one named message per violation; empty means
/// valid. Idempotent.
std::vector<std::string> validate(Scenario& s);

/// validate() that throws ScenarioError with all messages joined.
Scenario validated_or_throw(Scenario s);

/// The stock configuration used by experiments when no file is given.
Scenario default_scenario();

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Reads and validates a scenario file (JSON, units as in the field list).
/// Unknown keys produce warnings, missing required keys name the field.
Scenario load_scenario(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Writes the scenario with resolved target positions; load(save(s)) == s.
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace fasense
