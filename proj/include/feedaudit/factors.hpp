#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feedaudit/stats.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

/// Engagement factors of one user; each lies in [0, 1].
struct FactorVector {
  std::optional<double> watch_pct;  // absent when no event has a duration
  double early_skip_rate = 0.0;
  double fraction_liked = 0.0;
  double fraction_from_following = 0.0;
};

inline constexpr std::size_t kFactorCount = 4;
inline constexpr std::array<std::string_view, kFactorCount> kFactorNames = {
    "Watch Percentage", "Early Skip Rate", "Fraction Liked", "Fraction from Following"};

/// Dwell below this many seconds counts as an early skip.
inline constexpr double kEarlySkipSeconds = 1.0;

FactorVector compute_factors(const UserTimeline& timeline);

struct QuartileGroups {
  std::vector<std::string> top;     // TQ
  std::vector<std::string> bottom;  // BQ
};

/// Users sorted ascending by (exploit fraction, user_id); BQ is the first
/// ceil(m/4), TQ the last ceil(m/4).
QuartileGroups quartile_groups(const std::map<std::string, double>& per_user_exploit,
                               std::optional<std::size_t> group_size = std::nullopt);

enum class Impact { High, Medium, Low };

/// High below 1e-3, Medium below 0.05, Low otherwise.
Impact impact_level(double p);
std::string_view to_string(Impact impact);

struct FactorRow {
  std::string factor;
  double bottom_mean = 0.0;
  double top_mean = 0.0;
  TTestResult test;
  Impact impact = Impact::Low;
};

struct FactorReport {
  std::vector<FactorRow> rows;
  std::size_t top_size = 0;
  std::size_t bottom_size = 0;
  TTestVariant variant = TTestVariant::Student;
  QuartileGroups groups;
  std::vector<std::pair<std::string, FactorVector>> per_user;
};

/// Compares TQ and BQ on every factor; `per_user_exploit` must cover every
/// timeline of the dataset.
FactorReport factor_report(const Dataset& dataset, const std::map<std::string, double>& per_user_exploit,
                           TTestVariant variant = TTestVariant::Student,
                           std::optional<std::size_t> group_size = std::nullopt);

}  // namespace feedaudit
