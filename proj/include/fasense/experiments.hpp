#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fasense/ao.hpp"
#include "fasense/baselines.hpp"

namespace fasense {

/// Shortest round-trip decimal form; infinities print as "inf"/"-inf".
std::string format_double(double v);

/// Seeded-median aggregation over full pipeline runs for one swept variable.
enum class SweepVariable { kPowerDbm, kApertureWavelengths, kTargetCount };

struct SweepSpec {
  SweepVariable variable = SweepVariable::kPowerDbm;
  std::vector<double> values;        // non-empty, strictly increasing
  std::vector<SchemeId> schemes;
  std::vector<std::uint64_t> seeds;  // replicates, aggregated by median
};

SweepSpec default_power_sweep(std::uint64_t base_seed, int n_seeds);
SweepSpec default_region_sweep(std::uint64_t base_seed, int n_seeds);
SweepSpec default_target_sweep(std::uint64_t base_seed, int n_seeds);

/// Re-validates the base with a new seed; targets that were drawn from the
/// old seed (rather than pinned in the config) are redrawn.
Scenario reseeded(Scenario base, std::uint64_t seed);

/// Applies one sweep value plus a seed to the base scenario.
Scenario sweep_scenario(const Scenario& base, SweepVariable variable, double value,
                        std::uint64_t seed);

// --- per-run outputs ---

void write_crb_per_target_csv(const CrbReport& report, const std::string& path);
void write_convergence_csv(const std::vector<TracePoint>& trace, const std::string& path);

/// Writes solution.json, crb_per_target.csv, convergence.csv (and line-chart
/// SVGs when plots is set) into out_dir, plus the resolved scenario.
void save_results(const Scenario& sc, const Solution& sol, const std::string& out_dir,
                  bool plots = false);

// --- figure-class experiments ---

struct ConvergenceRow {
  SchemeId scheme;
  std::uint64_t seed = 0;
  int iteration = 0;
  double avg_crb = 0.0;  // [rad^2]
};

std::vector<ConvergenceRow> exp_convergence(const Scenario& base,
                                            const std::vector<SchemeId>& schemes,
                                            const std::vector<std::uint64_t>& seeds, int threads);
void write_convergence_rows_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

struct BeampatternResult {
  std::vector<std::pair<double, double>> grid;  // (theta_rad, gain_w)
  struct TargetMarker {
    int target = 0;  // 1-based
    double theta = 0.0;
    double gain = 0.0;
  };
  std::vector<TargetMarker> targets;
};

/// Beampattern over a theta grid (default 721 points on [0, pi/2]) at the
/// given 1-based slot, with per-target markers. Throws if the slot is out of
/// range.
BeampatternResult exp_beampattern(const Scenario& sc, const Solution& sol, int slot_index,
                                  int grid_points = 721);
void write_beampattern_csv(const BeampatternResult& bp, const std::string& grid_path,
                           const std::string& targets_path);

struct TargetCrbRow {
  int slot = 0;    // 1-based
  int target = 0;  // 1-based
  double crb = 0.0;
};

/// Per-slot CRB for the selected 1-based target ids.
std::vector<TargetCrbRow> exp_target_crb(const Solution& sol, const std::vector<int>& target_ids);
void write_target_crb_csv(const std::vector<TargetCrbRow>& rows, const std::string& path);

struct SweepCell {
  double value = 0.0;
  SchemeId scheme;
  std::uint64_t seed = 0;
  double avg_crb = 0.0;
};

struct SweepSummary {
  double value = 0.0;
  SchemeId scheme;
  double median_avg_crb = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepSummary> medians;
};

/// Full pipeline per (value, scheme, seed); medians over seeds per
/// (value, scheme). Throws on an invalid spec.
SweepResult exp_sweep(const SweepSpec& spec, const Scenario& base, int threads);
void write_sweep_csvs(const SweepResult& result, SweepVariable variable,
                      const std::string& cells_path, const std::string& medians_path);

/// Minimal static SVG line chart; one polyline per series.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series, bool log_y);

const char* sweep_variable_column(SweepVariable variable);

}  // namespace fasense
