#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fasense/experiments.hpp"
#include "fasense/oracles.hpp"

namespace {

using namespace fasense;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  int seeds = 5;
  std::string scheme = "proposed";
  std::string out_dir = "out";
  bool plot = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Scenario file (JSON)");
  cmd->add_option("--seed", args.seed, "Base RNG seed (overrides the scenario's)");
  cmd->add_option("--seeds", args.seeds, "Number of replicate seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--scheme", args.scheme, "Scheme: proposed|tfao|sula|dula");
  cmd->add_option("--out-dir", args.out_dir, "Output directory");
  cmd->add_flag("--plot", args.plot, "Also emit SVG line charts");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = hardware)");
}

Scenario base_scenario(const CommonArgs& args) {
  Scenario sc;
  if (args.config.empty()) {
    sc = default_scenario();
  } else {
    std::vector<std::string> warnings;
    sc = load_scenario(args.config, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  if (args.seed) sc = reseeded(sc, *args.seed);
  return sc;
}

SchemeId scheme_or_throw(const std::string& name) {
  const auto id = parse_scheme(name);
  if (!id) throw std::runtime_error("unknown scheme: " + name);
  return *id;
}

std::vector<std::uint64_t> seed_list(const Scenario& sc, const CommonArgs& args) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < args.seeds; ++i) seeds.push_back(sc.seed + static_cast<std::uint64_t>(i));
  return seeds;
}

Solution run_and_save(const Scenario& sc, const CommonArgs& args) {
  const SchemeId scheme = scheme_or_throw(args.scheme);
  Solution sol = run_scheme(scheme, sc, args.threads);
  audit_solution(sc, sol);
  save_results(sc, sol, args.out_dir, args.plot);
  std::printf("%s: objective %s rad^-2, avg CRB %s rad^2, %d iterations%s\n",
              scheme_name(scheme).c_str(), format_double(sol.report.reciprocal_objective).c_str(),
              format_double(sol.report.avg_crb).c_str(), sol.iterations_used,
              sol.converged ? " (converged)" : "");
  return sol;
}

void emit_sweep(const SweepSpec& spec, const Scenario& sc, const CommonArgs& args,
                const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const SweepResult result = exp_sweep(spec, sc, args.threads);
  const fs::path dir(args.out_dir);
  write_sweep_csvs(result, spec.variable, (dir / (stem + ".csv")).string(),
                   (dir / (stem + "_median.csv")).string());
  if (args.plot) {
    std::vector<PlotSeries> series;
    for (SchemeId scheme : spec.schemes) {
      PlotSeries s{scheme_name(scheme), {}};
      for (const auto& m : result.medians) {
        if (m.scheme == scheme) s.points.emplace_back(m.value, m.median_avg_crb);
      }
      series.push_back(std::move(s));
    }
    write_svg_chart((dir / (stem + ".svg")).string(), stem, sweep_variable_column(spec.variable),
                    "median avg CRB [rad^2]", series, true);
  }
  std::printf("%s: %zu cells, medians in %s\n", stem.c_str(), result.cells.size(),
              (dir / (stem + "_median.csv")).string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV fluid-antenna multi-target sensing simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  int slot_index = 10;
  std::vector<int> target_ids;

  CLI::App* cmd_run = app.add_subcommand("run", "Run one scheme and dump the solution");
  add_common(cmd_run, args);

  CLI::App* cmd_conv =
      app.add_subcommand("convergence", "Per-iteration average CRB for every scheme");
  add_common(cmd_conv, args);

  CLI::App* cmd_beam = app.add_subcommand("beampattern", "Beampattern gain over angle at a slot");
  add_common(cmd_beam, args);
  cmd_beam->add_option("--slot", slot_index, "1-based slot index");

  CLI::App* cmd_tcrb = app.add_subcommand("target-crb", "Per-slot CRB for selected targets");
  add_common(cmd_tcrb, args);
  cmd_tcrb->add_option("--targets", target_ids, "1-based target ids (default 1,3,5)")
      ->delimiter(',');

  CLI::App* cmd_sp = app.add_subcommand("sweep-power", "Average CRB vs maximum transmit power");
  add_common(cmd_sp, args);
  CLI::App* cmd_sr = app.add_subcommand("sweep-region", "Average CRB vs antenna region size");
  add_common(cmd_sr, args);
  CLI::App* cmd_st = app.add_subcommand("sweep-targets", "Average CRB vs number of targets");
  add_common(cmd_st, args);

  CLI::App* cmd_oracle = app.add_subcommand("oracle", "Run the certificate suite");
  add_common(cmd_oracle, args);

  CLI11_PARSE(app, argc, argv);

  try {
    namespace fs = std::filesystem;
    if (cmd_run->parsed()) {
      const Scenario sc = base_scenario(args);
      run_and_save(sc, args);
    } else if (cmd_conv->parsed()) {
      const Scenario sc = base_scenario(args);
      const std::vector<SchemeId> schemes = {SchemeId::kProposed, SchemeId::kTfao,
                                             SchemeId::kSula, SchemeId::kDula};
      const auto rows = exp_convergence(sc, schemes, seed_list(sc, args), args.threads);
      fs::create_directories(args.out_dir);
      const fs::path dir(args.out_dir);
      write_convergence_rows_csv(rows, (dir / "convergence_schemes.csv").string());
      if (args.plot) {
        std::vector<PlotSeries> series;
        for (SchemeId scheme : schemes) {
          PlotSeries s{scheme_name(scheme), {}};
          for (const auto& r : rows) {
            if (r.scheme == scheme && r.seed == sc.seed && std::isfinite(r.avg_crb)) {
              s.points.emplace_back(r.iteration, r.avg_crb);
            }
          }
          series.push_back(std::move(s));
        }
        write_svg_chart((dir / "convergence_schemes.svg").string(), "Convergence by scheme",
                        "iteration", "avg CRB [rad^2]", series, true);
      }
      std::printf("convergence: %zu rows written\n", rows.size());
    } else if (cmd_beam->parsed()) {
      const Scenario sc = base_scenario(args);
      const Solution sol = run_and_save(sc, args);
      const BeampatternResult bp = exp_beampattern(sc, sol, slot_index);
      const fs::path dir(args.out_dir);
      write_beampattern_csv(bp, (dir / "beampattern.csv").string(),
                            (dir / "beampattern_targets.csv").string());
      if (args.plot) {
        PlotSeries s{"gain", bp.grid};
        write_svg_chart((dir / "beampattern.svg").string(),
                        "Beampattern at slot " + std::to_string(slot_index), "theta [rad]",
                        "gain [W]", {s}, false);
      }
    } else if (cmd_tcrb->parsed()) {
      const Scenario sc = base_scenario(args);
      const Solution sol = run_and_save(sc, args);
      if (target_ids.empty()) {
        for (int id : {1, 3, 5}) {
          if (id <= sc.num_targets) target_ids.push_back(id);
        }
      }
      const auto rows = exp_target_crb(sol, target_ids);
      write_target_crb_csv(rows, (fs::path(args.out_dir) / "target_crb.csv").string());
    } else if (cmd_sp->parsed()) {
      const Scenario sc = base_scenario(args);
      emit_sweep(default_power_sweep(sc.seed, args.seeds), sc, args, "sweep_power");
    } else if (cmd_sr->parsed()) {
      const Scenario sc = base_scenario(args);
      emit_sweep(default_region_sweep(sc.seed, args.seeds), sc, args, "sweep_region");
    } else if (cmd_st->parsed()) {
      const Scenario sc = base_scenario(args);
      emit_sweep(default_target_sweep(sc.seed, args.seeds), sc, args, "sweep_targets");
    } else if (cmd_oracle->parsed()) {
      const std::uint64_t seed = args.seed.value_or(1);
      const CertificateReport report = run_certificates(seed);
      for (const auto& line : report.lines) {
        std::printf("[%s] %-24s %-12s %s\n", line.pass ? "PASS" : "FAIL", line.name.c_str(),
                    format_double(line.value).c_str(), line.detail.c_str());
      }
      return report.all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
