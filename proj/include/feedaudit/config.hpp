#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedaudit/features.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/stats.hpp"

namespace feedaudit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuditConfig {
  std::size_t N = 1000;
  std::size_t W = 50;
  std::size_t X = 25;
  std::size_t Y = 25;
  std::vector<std::string> features = default_feature_names();
  std::vector<FeatureSpec> custom_features;
  std::optional<double> tau;
  std::size_t trials = 10;
  double sigma = 0.70;
  double per_user_fraction = 0.10;
  std::string stoplist;  // empty: no global stoplist
  std::uint64_t seed = 0;
  std::optional<std::size_t> score_sample_size;

  bool cluster = true;
  std::string clustering;  // precomputed hashtag map; skips embedding
  std::size_t min_count = 10;
  std::size_t embedding_window = 7;
  std::size_t embedding_dim = 100;
  std::size_t embedding_epochs = 5;
  bool select = false;
  std::vector<std::string> candidates;  // empty: the twelve catalogue features
  double epsilon = 0.01;
  TTestVariant t_test = TTestVariant::Student;
  RhoDenominator rho_denominator = RhoDenominator::AllUsers;
  bool score = true;

  /// Labeling set: catalogue names followed by custom features.
  FeatureSet feature_set() const;
  FeatureSet candidate_set() const;
};

/// Throws ConfigError on violated invariants or unreadable paths.
void validate(const AuditConfig& config);

/// Flat "key = value" document; lines starting with '#' are comments; unknown keys are
/// errors. Relative paths resolve against `base_dir`.
AuditConfig parse_config(std::istream& in, const std::string& base_dir = ".");
AuditConfig load_config(const std::string& path);

/// Every key in a fixed order, one "key = value" per line; parse_config
/// reads it back to an equal config.
std::string serialize_config(const AuditConfig& config);

}  // namespace feedaudit
