#include "feedaudit/preprocess.hpp"

#include <fstream>
#include <istream>

#include <fmt/format.h>

namespace feedaudit {

Dataset filter_generic_hashtags(const Dataset& dataset, const std::set<std::string>& global_stoplist,
                                double per_user_fraction) {
  if (!(per_user_fraction > 0.0 && per_user_fraction <= 1.0))
    throw PreprocessError(fmt::format("per_user_fraction must lie in (0, 1], got {}", per_user_fraction));

  std::set<std::string> stop;
  for (const auto& s : global_stoplist) stop.insert(canonical_hashtag(s));

  Dataset out = dataset;
  for (auto& t : out.timelines) {
    if (t.events.empty()) continue;
    std::map<std::string, std::size_t> counts;
    for (const auto& e : t.events)
      for (const auto& h : e.hashtags) ++counts[h];
    const double n = static_cast<double>(t.events.size());
    std::set<std::string> generic;
    for (const auto& [tag, c] : counts)
      if (static_cast<double>(c) >= per_user_fraction * n) generic.insert(tag);
    for (auto& e : t.events)
      std::erase_if(e.hashtags, [&](const std::string& h) { return stop.count(h) || generic.count(h); });
  }
  return out;
}

std::set<std::string> read_stoplist(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto tag = canonical_hashtag(line);
    if (!tag.empty()) out.insert(tag);
  }
  return out;
}

std::set<std::string> read_stoplist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreprocessError("cannot open stoplist: " + path);
  return read_stoplist(in);
}

}  // namespace feedaudit
