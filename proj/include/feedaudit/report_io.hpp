#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedaudit/baselines.hpp"
#include "feedaudit/factors.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/selection.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings echoed at the top of every report.
struct Provenance {
  std::string config;  // serialized AuditConfig
  std::uint64_t seed = 0;
};

/// "#feedaudit-<kind> v1", then "#seed <n>" and one "#config <line>" per
/// config line.
void write_header(std::ostream& out, std::string_view kind, const Provenance& provenance);

/// Consumes leading '#' lines; throws FormatError unless the first names
/// `kind`. Returns the remaining header lines without their '#'.
std::vector<std::string> read_header(std::istream& in, std::string_view kind);

std::string format_real(double value);

// label table: user_id, index, video_id, label, fired features
void write_label_table(std::ostream& out, const Dataset& dataset, const LabeledDataset& labels,
                       const Provenance& provenance);
LabeledDataset read_label_table(std::istream& in);

void write_curve_csv(std::ostream& out, const MeanExploitCurve& curve, const Provenance& provenance);
MeanExploitCurve read_curve_csv(std::istream& in);

/// Long format: user_id, index, alpha.
void write_series_csv(std::ostream& out, const LabeledDataset& labels, std::size_t window,
                      const Provenance& provenance);

void write_floor_csv(std::ostream& out, const NoiseFloor& floor, const Provenance& provenance);
NoiseFloor read_floor_csv(std::istream& in);

void write_scores_csv(std::ostream& out, const Dataset& dataset, const std::vector<ItemScore>& scores,
                      const Provenance& provenance);

void write_selection_json(std::ostream& out, const SelectionReport& report, const Provenance& provenance);

void write_factor_report(std::ostream& out, const FactorReport& report, const Provenance& provenance);
/// Per-user factor values next to the exploit fraction used for grouping.
void write_factor_users(std::ostream& out, const FactorReport& report,
                        const std::map<std::string, double>& per_user_exploit, const Provenance& provenance);

void write_interests(std::ostream& out, const Dataset& dataset, const Provenance& provenance);

}  // namespace feedaudit
