#include "fasense/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fasense/rng.hpp"

namespace fasense {

using nlohmann::ordered_json;

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::vector<Vec2> draw_targets(int count, const Vec2& region_size, std::uint64_t seed) {
  RngStream rng = RngStream(seed).derive({stream_tag::kTargets});
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    double x = rng.uniform(0.0, region_size.x());
    double y = rng.uniform(0.0, region_size.y());
    out.emplace_back(x, y);
  }
  return out;
}

bool operator==(const Scenario& a, const Scenario& b) {
  auto vec_eq = [](const std::vector<Vec2>& u, const std::vector<Vec2>& v) {
    if (u.size() != v.size()) return false;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i] != v[i]) return false;
    return true;
  };
  return a.region_size == b.region_size && a.num_targets == b.num_targets &&
         vec_eq(a.targets, b.targets) && a.altitude == b.altitude && a.q_init == b.q_init &&
         a.q_final == b.q_final && a.mission_duration == b.mission_duration &&
         a.num_slots == b.num_slots && a.v_max == b.v_max && a.p_max_dbm == b.p_max_dbm &&
         a.num_tx == b.num_tx && a.num_rx == b.num_rx && a.wavelength == b.wavelength &&
         a.aperture_wavelengths == b.aperture_wavelengths &&
         a.min_spacing_wavelengths == b.min_spacing_wavelengths && a.rcs_m2 == b.rcs_m2 &&
         a.noise_dbm == b.noise_dbm && a.frames_per_slot == b.frames_per_slot &&
         a.pso.iterations == b.pso.iterations && a.pso.particles == b.pso.particles &&
         a.pso.c1 == b.pso.c1 && a.pso.c2 == b.pso.c2 && a.pso.omega_max == b.pso.omega_max &&
         a.pso.omega_min == b.pso.omega_min && a.pso.penalty == b.pso.penalty &&
         a.ao.max_iterations == b.ao.max_iterations && a.ao.epsilon == b.ao.epsilon &&
         a.tfao_receive == b.tfao_receive && a.seed == b.seed &&
         a.slot_duration == b.slot_duration && a.p_max_w == b.p_max_w &&
         a.noise_w == b.noise_w && a.aperture == b.aperture && a.min_spacing == b.min_spacing &&
         a.rcs == b.rcs;
}

std::vector<std::string> validate(Scenario& s) {
  std::vector<std::string> errors;
  auto require = [&errors](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  require(s.region_size.x() > 0 && s.region_size.y() > 0, "region_size_m must be positive");
  require(s.num_targets >= 1, "num_targets must be at least 1");
  require(s.num_slots >= 2, "num_slots must be at least 2");
  require(s.num_tx >= 2, "num_tx must be at least 2");
  require(s.num_rx >= 2, "num_rx must be at least 2");
  require(s.frames_per_slot > s.num_tx, "frames_per_slot must exceed num_tx");
  require(s.altitude > 0, "altitude_m must be positive");
  require(s.mission_duration > 0, "mission_duration_s must be positive");
  require(s.v_max > 0, "v_max_mps must be positive");
  require(s.wavelength > 0, "wavelength_m must be positive");
  require(s.aperture_wavelengths > 0, "aperture_wavelengths must be positive");
  require(s.min_spacing_wavelengths > 0, "min_spacing_wavelengths must be positive");
  require(s.pso.iterations >= 1, "pso.iterations must be at least 1");
  require(s.pso.particles >= 1, "pso.particles must be at least 1");
  require(s.pso.omega_max >= s.pso.omega_min, "pso.omega_max must be >= pso.omega_min");
  require(s.pso.penalty > 0, "pso.penalty must be positive");
  require(s.ao.max_iterations >= 1, "ao.max_iterations must be at least 1");
  require(s.ao.epsilon > 0, "ao.epsilon must be positive");
  if (!errors.empty()) return errors;  // derived quantities need sane inputs

  // Unit conversions and derived fields. Re-running changes nothing because
  // every derivation reads only configured fields.
  s.slot_duration = s.mission_duration / s.num_slots;
  s.p_max_w = dbm_to_watts(s.p_max_dbm);
  s.noise_w = dbm_to_watts(s.noise_dbm);
  s.aperture = s.aperture_wavelengths * s.wavelength;
  s.min_spacing = s.min_spacing_wavelengths * s.wavelength;

  if (s.targets.empty()) {
    s.targets = draw_targets(s.num_targets, s.region_size, s.seed);
  }
  if (s.rcs_m2.empty()) {
    s.rcs_m2.assign(static_cast<std::size_t>(s.num_targets), 1.0);
  } else if (s.rcs_m2.size() == 1 && s.num_targets > 1) {
    s.rcs_m2.assign(static_cast<std::size_t>(s.num_targets), s.rcs_m2[0]);
  }
  s.rcs.clear();
  for (double m2 : s.rcs_m2) s.rcs.emplace_back(std::sqrt(std::max(m2, 0.0)), 0.0);

  require(static_cast<int>(s.targets.size()) == s.num_targets,
          "target_positions_m count must equal num_targets");
  require(static_cast<int>(s.rcs_m2.size()) == s.num_targets,
          "rcs_m2 count must equal num_targets");
  for (double m2 : s.rcs_m2) require(m2 > 0, "rcs_m2 entries must be positive");
  require(s.aperture >= (s.num_tx - 1) * s.min_spacing,
          "aperture too small for spacing: need aperture >= (num_tx-1)*min_spacing");
  require(s.aperture >= (s.num_rx - 1) * s.min_spacing,
          "aperture too small for spacing: need aperture >= (num_rx-1)*min_spacing");
  require((s.q_final - s.q_init).norm() <=
              (s.num_slots - 1) * s.slot_duration * s.v_max + 1e-9,
          "endpoints unreachable: |q_final - q_init| exceeds (N-1)*tau*v_max");
  return errors;
}

Scenario validated_or_throw(Scenario s) {
  std::vector<std::string> errors = validate(s);
  if (!errors.empty()) {
    std::string joined = "invalid scenario:";
    for (const auto& e : errors) joined += "\n  - " + e;
    throw ScenarioError(joined);
  }
  return s;
}

Scenario default_scenario() { return validated_or_throw(Scenario{}); }

namespace {

class JsonFieldReader {
 public:
  JsonFieldReader(const ordered_json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {}

  template <typename T>
  T get(const char* key) {
    if (!j_.contains(key)) {
      throw ScenarioError("scenario parse error: missing field \"" + prefix_ + key + "\"");
    }
    seen_.push_back(key);
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ScenarioError("scenario parse error: field \"" + prefix_ + key + "\": " + e.what());
    }
  }

  bool has(const char* key) {
    if (j_.contains(key)) {
      seen_.push_back(key);
      return true;
    }
    return false;
  }

  const ordered_json& raw(const char* key) { return j_.at(key); }

  void warn_unknown(std::vector<std::string>* warnings) const {
    if (!warnings) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const auto& k : seen_)
        if (k == it.key()) known = true;
      if (!known) warnings->push_back("unknown scenario key \"" + prefix_ + it.key() + "\" ignored");
    }
  }

 private:
  const ordered_json& j_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

Vec2 to_vec2(const ordered_json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) {
    throw ScenarioError("scenario parse error: field \"" + name + "\" must be [x, y]");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

Scenario load_scenario(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("scenario parse error in " + path + ": " + e.what());
  }

  Scenario s;
  JsonFieldReader r(j, "");
  s.region_size = to_vec2(r.get<ordered_json>("region_size_m"), "region_size_m");
  s.num_targets = r.get<int>("num_targets");
  if (r.has("target_positions_m")) {
    s.targets.clear();
    for (const auto& t : r.raw("target_positions_m")) {
      s.targets.push_back(to_vec2(t, "target_positions_m"));
    }
  }
  s.altitude = r.get<double>("altitude_m");
  s.q_init = to_vec2(r.get<ordered_json>("q_init_m"), "q_init_m");
  s.q_final = to_vec2(r.get<ordered_json>("q_final_m"), "q_final_m");
  s.mission_duration = r.get<double>("mission_duration_s");
  s.num_slots = r.get<int>("num_slots");
  s.v_max = r.get<double>("v_max_mps");
  s.p_max_dbm = r.get<double>("p_max_dbm");
  s.num_tx = r.get<int>("num_tx");
  s.num_rx = r.get<int>("num_rx");
  s.wavelength = r.get<double>("wavelength_m");
  s.aperture_wavelengths = r.get<double>("aperture_wavelengths");
  s.min_spacing_wavelengths = r.get<double>("min_spacing_wavelengths");
  if (r.has("rcs_m2")) {
    const auto& rc = r.raw("rcs_m2");
    s.rcs_m2.clear();
    if (rc.is_array()) {
      for (const auto& v : rc) s.rcs_m2.push_back(v.get<double>());
    } else {
      s.rcs_m2.push_back(rc.get<double>());
    }
  }
  s.noise_dbm = r.get<double>("noise_dbm");
  s.frames_per_slot = r.get<int>("frames_per_slot");
  {
    const ordered_json pj = r.get<ordered_json>("pso");
    JsonFieldReader pr(pj, "pso.");
    s.pso.iterations = pr.get<int>("iterations");
    s.pso.particles = pr.get<int>("particles");
    s.pso.c1 = pr.get<double>("c1");
    s.pso.c2 = pr.get<double>("c2");
    s.pso.omega_max = pr.get<double>("omega_max");
    s.pso.omega_min = pr.get<double>("omega_min");
    s.pso.penalty = pr.get<double>("penalty");
    pr.warn_unknown(warnings);
  }
  {
    const ordered_json aj = r.get<ordered_json>("ao");
    JsonFieldReader ar(aj, "ao.");
    s.ao.max_iterations = ar.get<int>("max_iterations");
    s.ao.epsilon = ar.get<double>("epsilon");
    ar.warn_unknown(warnings);
  }
  if (r.has("tfao_receive")) {
    const std::string g = r.raw("tfao_receive").get<std::string>();
    if (g == "max_spread") {
      s.tfao_receive = ReceiveUlaGeometry::kMaxSpread;
    } else if (g == "half_wavelength") {
      s.tfao_receive = ReceiveUlaGeometry::kHalfWavelength;
    } else {
      throw ScenarioError(
          "scenario parse error: tfao_receive must be \"max_spread\" or \"half_wavelength\"");
    }
  }
  s.seed = r.get<std::uint64_t>("seed");
  r.warn_unknown(warnings);

  return validated_or_throw(std::move(s));
}

void save_scenario(const Scenario& s, const std::string& path) {
  ordered_json j;
  j["region_size_m"] = {s.region_size.x(), s.region_size.y()};
  j["num_targets"] = s.num_targets;
  ordered_json targets = ordered_json::array();
  for (const auto& t : s.targets) targets.push_back({t.x(), t.y()});
  j["target_positions_m"] = targets;
  j["altitude_m"] = s.altitude;
  j["q_init_m"] = {s.q_init.x(), s.q_init.y()};
  j["q_final_m"] = {s.q_final.x(), s.q_final.y()};
  j["mission_duration_s"] = s.mission_duration;
  j["num_slots"] = s.num_slots;
  j["v_max_mps"] = s.v_max;
  j["p_max_dbm"] = s.p_max_dbm;
  j["num_tx"] = s.num_tx;
  j["num_rx"] = s.num_rx;
  j["wavelength_m"] = s.wavelength;
  j["aperture_wavelengths"] = s.aperture_wavelengths;
  j["min_spacing_wavelengths"] = s.min_spacing_wavelengths;
  j["rcs_m2"] = s.rcs_m2;
  j["noise_dbm"] = s.noise_dbm;
  j["frames_per_slot"] = s.frames_per_slot;
  j["pso"] = {{"iterations", s.pso.iterations}, {"particles", s.pso.particles},
              {"c1", s.pso.c1},                 {"c2", s.pso.c2},
              {"omega_max", s.pso.omega_max},   {"omega_min", s.pso.omega_min},
              {"penalty", s.pso.penalty}};
  j["ao"] = {{"max_iterations", s.ao.max_iterations}, {"epsilon", s.ao.epsilon}};
  j["tfao_receive"] =
      s.tfao_receive == ReceiveUlaGeometry::kMaxSpread ? "max_spread" : "half_wavelength";
  j["seed"] = s.seed;

  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ScenarioError("I/O failure writing scenario file: " + path);
}

}  // namespace fasense
