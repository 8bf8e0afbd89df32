#pragma once

#include <complex>

#include "fasense/geometry.hpp"
#include "fasense/rng.hpp"

namespace fasense {

/**
 * Waveform-level simulation used to validate the statistical model; the
 * optimization pipeline works on covariances analytically and never samples
 * frames.
 */

/// Draws `frames` i.i.d. zero-mean circularly symmetric complex Gaussian
/// columns with covariance R (via the Hermitian square root of R, eigenvalues
/// below 1e-12 * trace clamped to zero). Throws if R is not Hermitian PSD
/// within tolerance.
CMatX sample_waveform(const CMatX& covariance, int frames, RngStream& rng);

/// (1/N) X X^H; Hermitian PSD by construction.
CMatX sample_covariance(const CMatX& frames);

/// Rank-1 target response: (alpha / (2 d)) * b a^H.
CMatX response_matrix(std::complex<double> alpha, double dist, const CVecX& rx_steering,
                      const CVecX& tx_steering);

/// W X plus i.i.d. complex Gaussian noise with per-entry variance noise_w.
CMatX simulate_echo(const CMatX& response, const CMatX& frames, double noise_w, RngStream& rng);

}  // namespace fasense
