#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "feedaudit/preprocess.hpp"

namespace feedaudit {

const std::string& HashtagClustering::canonical(const std::string& tag) const {
  auto it = assignment.find(tag);
  if (it == assignment.end()) return tag;
  return representative[it->second];
}

namespace {

std::vector<float> unit(const float* v, std::size_t dim) {
  double n = 0;
  for (std::size_t k = 0; k < dim; ++k) n += double(v[k]) * v[k];
  n = std::sqrt(n);
  std::vector<float> out(v, v + dim);
  if (n > 0)
    for (auto& x : out) x = static_cast<float>(x / n);
  return out;
}

}  // namespace

HashtagClustering cluster_hashtags(const EmbeddingTable& embeddings,
                                   const std::vector<std::string>& hashtags_by_frequency, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw PreprocessError(fmt::format("sigma must lie in (0, 1), got {}", sigma));

  const std::size_t D = embeddings.dim;
  HashtagClustering out;
  out.sigma = sigma;
  std::vector<std::vector<double>> sums;  // sum of unit member vectors, per cluster

  for (const auto& tag : hashtags_by_frequency) {
    if (out.assignment.count(tag)) continue;
    auto it = embeddings.index.find(tag);
    if (it == embeddings.index.end()) {
      out.assignment.emplace(tag, out.representative.size());
      out.representative.push_back(tag);
      out.members.push_back({tag});
      out.centers.emplace_back();
      sums.emplace_back();
      continue;
    }
    const auto v = unit(&embeddings.vectors[it->second * D], D);

    std::size_t best = out.representative.size();
    double best_sim = -2.0;
    for (std::size_t c = 0; c < out.centers.size(); ++c) {
      if (out.centers[c].empty()) continue;
      const double sim = cosine_similarity(v.data(), out.centers[c].data(), D);
      if (sim > best_sim) {
        best_sim = sim;
        best = c;
      }
    }

    if (best < out.centers.size() && best_sim >= sigma) {
      auto& s = sums[best];
      for (std::size_t k = 0; k < D; ++k) s[k] += v[k];
      std::vector<float> mean(s.begin(), s.end());
      out.centers[best] = unit(mean.data(), D);
      out.members[best].push_back(tag);
      out.assignment.emplace(tag, best);
    } else {
      out.assignment.emplace(tag, out.representative.size());
      out.representative.push_back(tag);
      out.members.push_back({tag});
      out.centers.push_back(v);
      sums.emplace_back(v.begin(), v.end());
    }
  }
  return out;
}

std::vector<std::string> hashtags_by_frequency(const Dataset& dataset) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : dataset.timelines)
    for (const auto& e : t.events)
      for (const auto& h : e.hashtags) ++counts[h];
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(v.size());
  for (auto& [tag, c] : v) out.push_back(std::move(tag));
  return out;
}

Dataset canonicalize(const Dataset& dataset, const HashtagClustering& clustering) {
  Dataset out = dataset;
  for (auto& t : out.timelines) {
    for (auto& e : t.events) {
      for (auto& h : e.hashtags) h = clustering.canonical(h);
      std::sort(e.hashtags.begin(), e.hashtags.end());
      e.hashtags.erase(std::unique(e.hashtags.begin(), e.hashtags.end()), e.hashtags.end());
    }
    for (auto& h : t.declared_interests) h = clustering.canonical(h);
    std::sort(t.declared_interests.begin(), t.declared_interests.end());
    t.declared_interests.erase(std::unique(t.declared_interests.begin(), t.declared_interests.end()),
                               t.declared_interests.end());
  }
  return out;
}

void write_clustering(std::ostream& out, const HashtagClustering& clustering) {
  out << "#feedaudit-clusters v1 sigma=" << fmt::format("{}", clustering.sigma) << '\n';
  for (const auto& [tag, c] : clustering.assignment) out << tag << '\t' << clustering.representative[c] << '\n';
}

HashtagClustering read_clustering(std::istream& in) {
  HashtagClustering out;
  std::map<std::string, std::size_t> rep_index;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (line.empty() || (line[0] == '#' && tab == std::string::npos && line.rfind("#feedaudit-", 0) == 0)) continue;
    if (tab == std::string::npos) throw PreprocessError("clustering row without a tab: " + line);
    std::string tag = line.substr(0, tab), rep = line.substr(tab + 1);
    auto [it, inserted] = rep_index.emplace(rep, out.representative.size());
    if (inserted) {
      out.representative.push_back(rep);
      out.members.emplace_back();
      out.centers.emplace_back();
    }
    out.members[it->second].push_back(tag);
    out.assignment[tag] = it->second;
  }
  return out;
}

}  // namespace feedaudit
