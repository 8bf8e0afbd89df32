#include "fasense/baselines.hpp"

#include <stdexcept>

namespace fasense {

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kProposed: return "proposed";
    case SchemeId::kTfao: return "tfao";
    case SchemeId::kSula: return "sula";
    case SchemeId::kDula: return "dula";
  }
  return "unknown";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
  if (name == "proposed") return SchemeId::kProposed;
  if (name == "tfao") return SchemeId::kTfao;
  if (name == "sula") return SchemeId::kSula;
  if (name == "dula") return SchemeId::kDula;
  return std::nullopt;
}

VecX sula_layout(int count, double aperture, double min_spacing) {
  if (count < 2) throw std::invalid_argument("sula_layout needs at least two elements");
  if (aperture / (count - 1) < min_spacing - kSpacingTol) {
    throw std::invalid_argument("sula_layout: spacing below the minimum element distance");
  }
  return max_spread_coords(count, aperture);
}

VecX dula_layout(int count, double wavelength, double aperture) {
  if (count < 2) throw std::invalid_argument("dula_layout needs at least two elements");
  if ((count - 1) * 0.5 * wavelength > aperture + kSpacingTol) {
    throw std::invalid_argument("dula_layout: half-wavelength span exceeds the aperture");
  }
  return uniform_coords(count, 0.5 * wavelength);
}

Solution run_scheme(SchemeId scheme, const Scenario& sc, int threads,
                    const std::optional<WarmStart>& warm) {
  AoOptions opts;
  opts.threads = threads;
  opts.warm_start = warm;
  switch (scheme) {
    case SchemeId::kProposed:
      opts.layout_mode = LayoutMode::kOptimizeBoth;
      break;
    case SchemeId::kTfao: {
      opts.layout_mode = LayoutMode::kOptimizeTransmitOnly;
      const VecX rx = sc.tfao_receive == ReceiveUlaGeometry::kMaxSpread
                          ? sula_layout(sc.num_rx, sc.aperture, sc.min_spacing)
                          : dula_layout(sc.num_rx, sc.wavelength, sc.aperture);
      const double dense_span = (sc.num_tx - 1) * 0.5 * sc.wavelength;
      const VecX tx = dense_span <= sc.aperture ? uniform_coords(sc.num_tx, 0.5 * sc.wavelength)
                                                : max_spread_coords(sc.num_tx, sc.aperture);
      opts.initial_layout = ArrayLayout{tx, rx};
      break;
    }
    case SchemeId::kSula: {
      opts.layout_mode = LayoutMode::kFrozen;
      opts.initial_layout = ArrayLayout{sula_layout(sc.num_tx, sc.aperture, sc.min_spacing),
                                        sula_layout(sc.num_rx, sc.aperture, sc.min_spacing)};
      break;
    }
    case SchemeId::kDula: {
      opts.layout_mode = LayoutMode::kFrozen;
      opts.initial_layout = ArrayLayout{dula_layout(sc.num_tx, sc.wavelength, sc.aperture),
                                        dula_layout(sc.num_rx, sc.wavelength, sc.aperture)};
      break;
    }
  }
  return run_ao(sc, opts);
}

}  // namespace fasense
