#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "feedaudit/metrics.hpp"

namespace feedaudit {

double user_exploit_fraction(const LabeledTimeline& labeled, std::size_t i, std::size_t window, std::uint64_t subset) {
  if (window == 0) throw MetricsError("window must be positive");
  if (i == 0 || i > labeled.size()) throw MetricsError(fmt::format("index {} outside [1, {}]", i, labeled.size()));
  const std::size_t lo = i > window ? i - window : 1;
  std::size_t count = 0;
  for (std::size_t j = lo; j < i; ++j)
    if (labeled.fired[j - 1] & subset) ++count;
  return double(count) / double(window);
}

ExploitSeries exploit_series(const LabeledTimeline& labeled, std::size_t window, std::uint64_t subset) {
  if (window == 0) throw MetricsError("window must be positive");
  ExploitSeries out{labeled.user_id, std::vector<double>(labeled.size()), window};
  // running count of exploit labels over the trailing window
  std::size_t count = 0;
  for (std::size_t i = 1; i <= labeled.size(); ++i) {
    out.alpha[i - 1] = double(count) / double(window);
    if (labeled.fired[i - 1] & subset) ++count;
    if (i > window && (labeled.fired[i - window - 1] & subset)) --count;
  }
  return out;
}

MeanExploitCurve mean_exploit_curve(const LabeledDataset& labeled, std::size_t window, std::uint64_t subset) {
  if (labeled.timelines.empty()) throw MetricsError("no labeled timelines");
  const std::size_t n = labeled.timelines.front().size();
  for (const auto& t : labeled.timelines)
    if (t.size() != n)
      throw MetricsError(fmt::format("timeline '{}' has length {}, expected {}", t.user_id, t.size(), n));

  MeanExploitCurve curve{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), labeled.user_count(), window};
  std::vector<ExploitSeries> series;
  series.reserve(labeled.user_count());
  for (const auto& t : labeled.timelines) series.push_back(exploit_series(t, window, subset));
  const double m = double(series.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (const auto& s : series) sum += s.alpha[i];
    const double mean = sum / m;
    double ss = 0;
    for (const auto& s : series) ss += (s.alpha[i] - mean) * (s.alpha[i] - mean);
    curve.mean[i] = mean;
    curve.stddev[i] = std::sqrt(ss / m);
  }
  return curve;
}

double mean_after(const std::vector<double>& per_index, std::size_t warmup) {
  if (warmup >= per_index.size()) return std::numeric_limits<double>::quiet_NaN();
  return mean_between(per_index, warmup + 1, per_index.size());
}

double mean_between(const std::vector<double>& per_index, std::size_t first, std::size_t last) {
  if (first == 0 || last < first || last > per_index.size())
    throw MetricsError(fmt::format("bad index range [{}, {}]", first, last));
  double sum = 0;
  for (std::size_t i = first; i <= last; ++i) sum += per_index[i - 1];
  return sum / double(last - first + 1);
}

std::vector<double> overall_exploit_fractions(const LabeledDataset& labeled, std::uint64_t subset) {
  std::vector<double> out;
  for (const auto& t : labeled.timelines)
    out.push_back(t.size() ? double(t.exploit_count(subset)) / double(t.size()) : 0.0);
  return out;
}

std::vector<double> post_warmup_user_means(const LabeledDataset& labeled, std::size_t window, std::size_t warmup,
                                           std::uint64_t subset) {
  std::vector<double> out;
  for (const auto& t : labeled.timelines) out.push_back(mean_after(exploit_series(t, window, subset).alpha, warmup));
  return out;
}

}  // namespace feedaudit
