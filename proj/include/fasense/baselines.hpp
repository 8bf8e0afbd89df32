#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fasense/ao.hpp"

namespace fasense {

enum class SchemeId { kProposed, kTfao, kSula, kDula };

std::string scheme_name(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);

/// Sparse uniform array: spacing aperture/(count-1), spanning [0, aperture].
/// Throws if that spacing falls below min_spacing.
VecX sula_layout(int count, double aperture, double min_spacing);

/// Dense uniform array: half-wavelength spacing anchored at 0. Throws if the
/// span exceeds the aperture.
VecX dula_layout(int count, double wavelength, double aperture);

/**
 * Runs the full pipeline under one of the comparison schemes:
 *  - proposed: both arrays repositioned per slot;
 *  - tfao: transmit repositioned, receive fixed at the configured uniform
 *    geometry (max spread by default);
 *  - sula / dula: both arrays fixed at the respective uniform geometry, the
 *    position stage skipped (trajectory and beamforming still optimized).
 */
Solution run_scheme(SchemeId scheme, const Scenario& sc, int threads = 0,
                    const std::optional<WarmStart>& warm = std::nullopt);

}  // namespace fasense
