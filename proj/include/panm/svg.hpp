#pragma once

#include <string>
#include <vector>

#include "panm/experiments.hpp"
#include "panm/model.hpp"

namespace panm {

/// Static figures. Every renderer embeds `meta` (typically the full flag
/// set of the producing command) as an XML comment for provenance.

/// |Q(f)| over [0,1) with vertical markers at true (green) and recovered
/// (red) frequencies.
std::string svg_dual_polynomial(const std::vector<double>& magnitudes,
                                const std::vector<double>& truth_freqs,
                                const std::vector<double>& est_freqs,
                                const std::string& meta);

/// Stem plot of |q(k)| over k in J, the level lambda, and markers on the
/// detected impulse support.
std::string svg_dual_magnitude(const PilotGrid& grid, const CVector& q, double lambda,
                               const std::vector<int>& impulses, const std::string& meta);

/// Success-rate heatmap; white is full recovery, black is full failure.
std::string svg_phase_heatmap(const PhaseGrid& grid, const std::string& meta);

/// Mean MSE against SNR per estimator, log-scale ordinate.
std::string svg_mse_sweep(const std::vector<SweepPoint>& points, const std::string& meta);

}  // namespace panm
