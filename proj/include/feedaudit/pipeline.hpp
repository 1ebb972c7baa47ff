#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedaudit/baselines.hpp"
#include "feedaudit/config.hpp"
#include "feedaudit/factors.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/preprocess.hpp"
#include "feedaudit/report_io.hpp"
#include "feedaudit/selection.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

/// A failure inside one named pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct Prepared {
  Dataset dataset;
  ParseReport parse;
  std::vector<std::string> excluded;  // users shorter than N
  std::optional<HashtagClustering> clustering;
};

/// parse, prefix N, filter, embed/cluster/canonicalize, interests.
Prepared prepare(const AuditConfig& config, std::istream& traces);
/// Same stages on an already parsed dataset.
Prepared prepare(const AuditConfig& config, Dataset parsed);

struct AuditResult {
  Prepared prepared;
  LabeledDataset labels;
  MeanExploitCurve curve;
  NoiseFloor floor;
  std::vector<ItemScore> scores;
  std::optional<SelectionReport> selection;
  std::map<std::string, double> per_user_exploit;  // mean of alpha after warm-up
  std::optional<FactorReport> factors;             // absent below four users
};

/// label, metrics, baselines, scores, optional selection, factors.
AuditResult analyze(const AuditConfig& config, Prepared prepared);

AuditResult run_pipeline(const AuditConfig& config, std::istream& traces);

Provenance provenance_of(const AuditConfig& config);

/// Writes every report of `result` into `dir` (created if missing).
void write_bundle(const std::string& dir, const AuditConfig& config, const AuditResult& result);

std::map<std::string, double> per_user_exploit(const LabeledDataset& labels, std::size_t window,
                                               std::size_t warmup);

}  // namespace feedaudit
