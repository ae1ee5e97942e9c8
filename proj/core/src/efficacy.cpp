#include "droplab/efficacy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "droplab/error.hpp"

namespace droplab {

const MaskSummary& EfficacyReport::mask(const std::string& label) const {
  for (const auto& m : masks) {
    if (m.label == label) return m;
  }
  throw Error(ErrorCode::UnknownLabel, "no mask '" + label + "' in report");
}

bool EfficacyReport::has_efficiency() const {
  return std::any_of(masks.begin(), masks.end(), [](const MaskSummary& m) { return m.blocking_efficiency.has_value(); });
}

EfficacyReport build_report(std::span<const TrialRecord> trials, const ReportOptions& options) {
  if (trials.empty()) throw Error(ErrorCode::EmptyInput, "no trials");

  std::vector<const TrialRecord*> ordered;
  ordered.reserve(trials.size());
  for (const auto& t : trials) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const TrialRecord* a, const TrialRecord* b) { return a->trial_id < b->trial_id; });
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i]->trial_id.empty()) throw Error(ErrorCode::MissingTrialId, "trial without id");
    if (ordered[i]->mask_label.empty()) throw Error(ErrorCode::InvalidField, "trial " + ordered[i]->trial_id + " has no mask label");
    if (i > 0 && ordered[i]->trial_id == ordered[i - 1]->trial_id)
      throw Error(ErrorCode::DuplicateTrialId, "trial id '" + ordered[i]->trial_id + "' appears twice");
  }

  std::map<std::string, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord* t : ordered) groups[t->mask_label].push_back(t);

  EfficacyReport report;
  report.control_label = options.control_label;
  for (const auto& [label, members] : groups) {
    MaskSummary s;
    s.label = label;
    s.trials = static_cast<int>(members.size());
    double peak_sum = 0.0;
    double baseline_sum = 0.0;
    for (const TrialRecord* t : members) {
      peak_sum += t->metrics.peak_value;
      baseline_sum += t->metrics.baseline;
    }
    s.mean_peak = peak_sum / s.trials;
    s.mean_baseline = baseline_sum / s.trials;
    double sq = 0.0;
    for (const TrialRecord* t : members) sq += (t->metrics.peak_value - s.mean_peak) * (t->metrics.peak_value - s.mean_peak);
    s.stddev_peak = std::sqrt(sq / s.trials);
    s.cv = s.mean_peak != 0.0 ? s.stddev_peak / s.mean_peak : 0.0;
    report.masks.push_back(std::move(s));
  }

  const auto control = std::find_if(report.masks.begin(), report.masks.end(),
                                    [&](const MaskSummary& m) { return m.label == options.control_label; });
  if (control == report.masks.end()) {
    if (options.require_efficiency)
      throw Error(ErrorCode::MissingControl, "no trials labelled '" + options.control_label + "'");
  } else {
    const double control_signal = control->mean_peak - control->mean_baseline;
    for (auto& m : report.masks) {
      if (!(control_signal > 0.0)) {
        m.blocking_efficiency = 0.0;
        m.degenerate_control = true;
        continue;
      }
      const double raw = 1.0 - (m.mean_peak - m.mean_baseline) / control_signal;
      m.clamped = raw < 0.0 || raw > 1.0;
      m.blocking_efficiency = std::clamp(raw, 0.0, 1.0);
    }
    // Exactly zero for the control itself.
    if (control_signal > 0.0) {
      control->blocking_efficiency = 0.0;
      control->clamped = false;
    }
  }

  std::vector<const MaskSummary*> by_peak;
  for (const auto& m : report.masks) by_peak.push_back(&m);
  std::sort(by_peak.begin(), by_peak.end(), [](const MaskSummary* a, const MaskSummary* b) {
    return a->mean_peak != b->mean_peak ? a->mean_peak < b->mean_peak : a->label < b->label;
  });
  for (const MaskSummary* m : by_peak) report.ranking.push_back(m->label);
  return report;
}

bool rank_consistency(const EfficacyReport& report, std::span<const std::string> expected_order) {
  const std::set<std::string> expected(expected_order.begin(), expected_order.end());
  for (const auto& label : expected_order) {
    if (std::find(report.ranking.begin(), report.ranking.end(), label) == report.ranking.end())
      throw Error(ErrorCode::UnknownLabel, "mask '" + label + "' is not in the report");
  }
  std::vector<std::string> restricted;
  for (const auto& label : report.ranking) {
    if (expected.count(label) > 0) restricted.push_back(label);
  }
  return std::equal(restricted.begin(), restricted.end(), expected_order.begin(), expected_order.end());
}

nlohmann::json report_to_json(const EfficacyReport& report) {
  nlohmann::json j;
  j["control_label"] = report.control_label;
  j["ranking"] = report.ranking;
  j["masks"] = nlohmann::json::array();
  for (const auto& m : report.masks) {
    nlohmann::json row;
    row["label"] = m.label;
    row["trials"] = m.trials;
    row["mean_peak"] = m.mean_peak;
    row["stddev_peak"] = m.stddev_peak;
    row["cv"] = m.cv;
    row["mean_baseline"] = m.mean_baseline;
    row["blocking_efficiency"] = m.blocking_efficiency ? nlohmann::json(*m.blocking_efficiency) : nlohmann::json();
    row["clamped"] = m.clamped;
    row["degenerate_control"] = m.degenerate_control;
    if (!m.track_radii_um.empty()) row["track_radii_um"] = m.track_radii_um;
    j["masks"].push_back(std::move(row));
  }
  return j;
}

}  // namespace droplab
