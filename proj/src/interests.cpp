#include <algorithm>
#include <cmath>
#include <set>

#include "feedaudit/preprocess.hpp"

namespace feedaudit {

std::map<std::string, std::size_t> document_frequencies(const Dataset& dataset) {
  std::map<std::string, std::size_t> df;
  for (const auto& t : dataset.timelines) {
    std::set<std::string> seen;
    for (const auto& e : t.events) seen.insert(e.hashtags.begin(), e.hashtags.end());
    for (const auto& h : seen) ++df[h];
  }
  return df;
}

std::vector<TfIdfEntry> tfidf_table(const UserTimeline& timeline,
                                    const std::map<std::string, std::size_t>& document_frequency,
                                    std::size_t user_count) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& e : timeline.events)
    for (const auto& h : e.hashtags) {
      ++counts[h];
      ++total;
    }
  std::vector<TfIdfEntry> rows;
  if (total == 0) return rows;
  for (const auto& [tag, c] : counts) {
    auto it = document_frequency.find(tag);
    const double df = it == document_frequency.end() ? 0.0 : double(it->second);
    const double tf = double(c) / double(total);
    const double idf = std::log(double(user_count) / (1.0 + df)) + 1.0;
    rows.push_back({tag, c, tf * idf});
  }
  std::sort(rows.begin(), rows.end(), [](const TfIdfEntry& a, const TfIdfEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.count != b.count) return a.count > b.count;
    return a.tag < b.tag;
  });
  return rows;
}

std::vector<std::string> top_interests_tfidf(const UserTimeline& timeline,
                                             const std::map<std::string, std::size_t>& document_frequency,
                                             std::size_t user_count, std::size_t k) {
  auto rows = tfidf_table(timeline, document_frequency, user_count);
  std::vector<std::string> out;
  for (std::size_t r = 0; r < rows.size() && r < k; ++r) out.push_back(rows[r].tag);
  return out;
}

void assign_popular_interests(Dataset& dataset, std::size_t k) {
  const auto df = document_frequencies(dataset);
  const auto m = dataset.user_count();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t u = 0; u < m; ++u)
    dataset.timelines[u].popular_interests = top_interests_tfidf(dataset.timelines[u], df, m, k);
}

}  // namespace feedaudit
