#include "feedaudit/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace feedaudit {

void validate(const FeatureSpec& spec) {
  if (spec.name.empty()) throw FeatureError("feature name is empty");
  if (spec.scope == Scope::Local) {
    if (!spec.window || *spec.window == 0)
      throw FeatureError(fmt::format("local feature '{}' needs a positive window", spec.name));
    if (spec.basis == MatchBasis::InterestSet)
      throw FeatureError(fmt::format("feature '{}': interest-set basis is global only", spec.name));
  } else if (spec.window) {
    throw FeatureError(fmt::format("global feature '{}' must not carry a window", spec.name));
  }
  if (spec.basis == MatchBasis::InterestSet && spec.gate != Gate::None)
    throw FeatureError(fmt::format("feature '{}': interest-set basis takes no engagement gate", spec.name));
}

std::size_t FeatureSet::add(FeatureSpec spec) {
  validate(spec);
  if (find(spec.name)) throw FeatureError(fmt::format("duplicate feature name '{}'", spec.name));
  if (specs_.size() == kMaxFeatures) throw FeatureError("feature set is full");
  specs_.push_back(std::move(spec));
  return specs_.size() - 1;
}

std::optional<std::size_t> FeatureSet::find(std::string_view name) const {
  for (std::size_t k = 0; k < specs_.size(); ++k)
    if (specs_[k].name == name) return k;
  return std::nullopt;
}

std::vector<std::string> FeatureSet::names() const {
  std::vector<std::string> out;
  for (const auto& s : specs_) out.push_back(s.name);
  return out;
}

std::uint64_t FeatureSet::all_mask() const {
  return specs_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << specs_.size()) - 1;
}

std::uint64_t FeatureSet::mask_of(const std::vector<std::string>& names) const {
  std::uint64_t m = 0;
  for (const auto& n : names) {
    auto k = find(n);
    if (!k) throw FeatureError(fmt::format("feature '{}' is not in the set", n));
    m |= std::uint64_t{1} << *k;
  }
  return m;
}

namespace {

FeatureSpec local(std::string name, MatchBasis basis, Gate gate, std::size_t window) {
  return {std::move(name), Scope::Local, basis, gate, window, InterestSource::Popular};
}

FeatureSpec global(std::string name, MatchBasis basis, Gate gate,
                   InterestSource source = InterestSource::Popular) {
  return {std::move(name), Scope::Global, basis, gate, std::nullopt, source};
}

}  // namespace

std::vector<FeatureSpec> catalogue_features(std::size_t window) {
  using B = MatchBasis;
  return {
      local("generic_hashtag_local", B::Hashtag, Gate::None, window),
      local("generic_creator_local", B::Creator, Gate::None, window),
      local("likes_hashtag_local", B::Hashtag, Gate::Liked, window),
      local("likes_creator_local", B::Creator, Gate::Liked, window),
      local("watched_hashtag_local", B::Hashtag, Gate::WatchedToEnd, window),
      local("watched_creator_local", B::Creator, Gate::WatchedToEnd, window),
      local("shares_hashtag_local", B::Hashtag, Gate::Shared, window),
      local("shares_creator_local", B::Creator, Gate::Shared, window),
      global("favoriteVideos_hashtag_global", B::Hashtag, Gate::Favorited),
      global("favoriteVideos_creator_global", B::Creator, Gate::Favorited),
      global("following_global", B::Hashtag, Gate::Followed),
      global("inferred_interests_global", B::InterestSet, Gate::None),
  };
}

std::optional<FeatureSpec> known_feature(std::string_view name, std::size_t window) {
  for (auto& f : catalogue_features(window))
    if (f.name == name) return f;
  if (name == "following_creator_global") return global("following_creator_global", MatchBasis::Creator, Gate::Followed);
  if (name == "declared_interests_global")
    return global("declared_interests_global", MatchBasis::InterestSet, Gate::None, InterestSource::Declared);
  return std::nullopt;
}

FeatureSet make_feature_set(const std::vector<std::string>& names, std::size_t window) {
  FeatureSet set;
  for (const auto& n : names) {
    auto f = known_feature(n, window);
    if (!f) throw FeatureError(fmt::format("unknown feature '{}'", n));
    set.add(std::move(*f));
  }
  return set;
}

FeatureSet catalogue_feature_set(std::size_t window) {
  FeatureSet set;
  for (auto& f : catalogue_features(window)) set.add(std::move(f));
  return set;
}

const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> names = {
      "generic_creator_local",  "likes_hashtag_local",           "likes_creator_local", "watched_hashtag_local",
      "watched_creator_local", "favoriteVideos_hashtag_global", "following_global",
  };
  return names;
}

namespace {

constexpr std::array<std::string_view, kGateCount> kGateNames = {"none",   "liked",     "watched_to_end",
                                                                 "shared", "favorited", "followed"};

}  // namespace

std::string_view to_string(Scope s) { return s == Scope::Local ? "local" : "global"; }

std::string_view to_string(MatchBasis b) {
  switch (b) {
    case MatchBasis::Hashtag:
      return "hashtag";
    case MatchBasis::Creator:
      return "creator";
    case MatchBasis::InterestSet:
      return "interest_set";
  }
  return "?";
}

std::string_view to_string(Gate g) { return kGateNames[static_cast<std::size_t>(g)]; }

FeatureSpec parse_feature_block(std::string_view block) {
  FeatureSpec spec;
  bool has_scope = false, has_basis = false;
  std::size_t pos = 0;
  while (pos < block.size()) {
    while (pos < block.size() && (std::isspace(static_cast<unsigned char>(block[pos])) || block[pos] == ','))
      ++pos;
    std::size_t end = pos;
    while (end < block.size() && !std::isspace(static_cast<unsigned char>(block[end])) && block[end] != ',') ++end;
    if (end == pos) break;
    auto pair = block.substr(pos, end - pos);
    pos = end;
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw FeatureError(fmt::format("expected key=value, got '{}'", pair));
    auto key = pair.substr(0, eq), value = pair.substr(eq + 1);
    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "scope") {
      if (value == "local")
        spec.scope = Scope::Local;
      else if (value == "global")
        spec.scope = Scope::Global;
      else
        throw FeatureError(fmt::format("unknown scope '{}'", value));
      has_scope = true;
    } else if (key == "basis") {
      if (value == "hashtag")
        spec.basis = MatchBasis::Hashtag;
      else if (value == "creator")
        spec.basis = MatchBasis::Creator;
      else if (value == "interest_set" || value == "popular_interests")
        spec.basis = MatchBasis::InterestSet, spec.interests = InterestSource::Popular;
      else if (value == "declared_interests")
        spec.basis = MatchBasis::InterestSet, spec.interests = InterestSource::Declared;
      else
        throw FeatureError(fmt::format("unknown basis '{}'", value));
      has_basis = true;
    } else if (key == "gate") {
      auto it = std::find(kGateNames.begin(), kGateNames.end(), value);
      if (it == kGateNames.end()) throw FeatureError(fmt::format("unknown gate '{}'", value));
      spec.gate = static_cast<Gate>(it - kGateNames.begin());
    } else if (key == "window") {
      std::size_t w = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
      if (ec != std::errc{} || p != value.data() + value.size()) throw FeatureError(fmt::format("bad window '{}'", value));
      spec.window = w;
    } else if (key == "interests") {
      if (value == "popular")
        spec.interests = InterestSource::Popular;
      else if (value == "declared")
        spec.interests = InterestSource::Declared;
      else
        throw FeatureError(fmt::format("unknown interest source '{}'", value));
    } else {
      throw FeatureError(fmt::format("unknown feature key '{}'", key));
    }
  }
  if (!has_scope || !has_basis) throw FeatureError("feature block needs scope and basis");
  FeatureSpec check = spec;
  if (check.scope == Scope::Local && !check.window) check.window = 1;
  validate(check);
  return spec;
}

std::string describe(const FeatureSpec& spec) {
  std::string out = fmt::format("name={} scope={} basis={} gate={}", spec.name, to_string(spec.scope),
                                to_string(spec.basis), to_string(spec.gate));
  if (spec.window) out += fmt::format(" window={}", *spec.window);
  if (spec.basis == MatchBasis::InterestSet)
    out += spec.interests == InterestSource::Popular ? " interests=popular" : " interests=declared";
  return out;
}

}  // namespace feedaudit
