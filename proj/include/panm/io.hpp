#pragma once

#include <string>
#include <vector>

#include "panm/experiments.hpp"
#include "panm/localize.hpp"
#include "panm/model.hpp"

namespace panm {

/// Writes via a temp file in the same directory followed by a rename, so
/// interrupted runs never leave partial files.
void atomic_write_file(const std::string& path, const std::string& content);

/// Floats in CSV output carry 9 significant digits.
std::string fmt9(double v);

std::string measurement_csv(const PilotGrid& grid, const CVector& y);
std::string dual_csv(const PilotGrid& grid, const CVector& q);
std::string estimate_csv(const EstimateResult& est);
std::string impulse_csv(const EstimateResult& est);
std::string phase_csv(const PhaseGrid& grid);
std::string sweep_csv(const std::vector<SweepPoint>& points);

struct DualCsv {
  std::vector<int> k;
  CVector q;
};
DualCsv read_dual_csv(const std::string& path);
PhaseGrid read_phase_csv(const std::string& path);
std::vector<SweepPoint> read_sweep_csv(const std::string& path);

}  // namespace panm
