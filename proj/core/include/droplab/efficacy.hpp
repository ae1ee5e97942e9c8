#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "droplab/photometry.hpp"

namespace droplab {

inline constexpr const char* kControlLabel = "none";

struct TrialRecord {
  std::string trial_id;
  std::string mask_label;  // kControlLabel for the unmasked control
  SeriesMetrics metrics;
  std::optional<double> loudness_db;
};

struct MaskSummary {
  std::string label;
  int trials = 0;
  double mean_peak = 0.0;
  double stddev_peak = 0.0;  // population
  double cv = 0.0;
  double mean_baseline = 0.0;
  // 1 - (mean peak - mean baseline) / (control mean peak - control mean baseline), clamped to [0, 1].
  std::optional<double> blocking_efficiency;
  bool clamped = false;             // efficiency fell outside [0, 1] before clamping
  bool degenerate_control = false;  // control shows no signal above its baseline
  std::vector<double> track_radii_um;  // optional, filled by callers that run tracking
};

struct EfficacyReport {
  std::string control_label = kControlLabel;
  std::vector<MaskSummary> masks;    // sorted by label
  std::vector<std::string> ranking;  // ascending mean peak, ties by label

  const MaskSummary& mask(const std::string& label) const;
  bool has_efficiency() const;
};

struct ReportOptions {
  std::string control_label = kControlLabel;
  // When true a missing control group is an error (MissingControl); when
  // false efficiencies are simply omitted without one.
  bool require_efficiency = true;
};

// Pure function of the trial set: trials are ordered by trial_id before any
// accumulation, so input order never changes the result. Throws EmptyInput,
// DuplicateTrialId, InvalidField (empty mask label) or MissingControl.
EfficacyReport build_report(std::span<const TrialRecord> trials, const ReportOptions& options = {});

// True iff the report's ranking restricted to expected_order equals it.
// Throws UnknownLabel for labels not in the report.
bool rank_consistency(const EfficacyReport& report, std::span<const std::string> expected_order);

nlohmann::json report_to_json(const EfficacyReport& report);

}  // namespace droplab
