#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedaudit {

enum class Scope { Local, Global };

enum class MatchBasis { Hashtag, Creator, InterestSet };

enum class InterestSource { Popular, Declared };

/// Engagement required on the earlier item r_j for it to count.
enum class Gate { None, Liked, WatchedToEnd, Shared, Favorited, Followed };
inline constexpr std::size_t kGateCount = 6;

/// Declarative activation rule for one feature.
struct FeatureSpec {
  std::string name;
  Scope scope = Scope::Local;
  MatchBasis basis = MatchBasis::Hashtag;
  Gate gate = Gate::None;
  std::optional<std::size_t> window;  // local scope only
  InterestSource interests = InterestSource::Popular;  // interest-set basis only

  bool operator==(const FeatureSpec&) const = default;
};

class FeatureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws FeatureError when the fields are inconsistent.
void validate(const FeatureSpec& spec);

/// Ordered feature set; a feature's position is its bit in fired masks.
class FeatureSet {
 public:
  static constexpr std::size_t kMaxFeatures = 64;

  FeatureSet() = default;

  /// Registers a feature; rejects duplicate names and invalid specs.
  std::size_t add(FeatureSpec spec);

  std::size_t size() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }
  const FeatureSpec& operator[](std::size_t k) const { return specs_[k]; }
  auto begin() const { return specs_.begin(); }
  auto end() const { return specs_.end(); }

  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> names() const;
  std::uint64_t all_mask() const;
  std::uint64_t mask_of(const std::vector<std::string>& names) const;

 private:
  std::vector<FeatureSpec> specs_;
};

/// The twelve hashtag/creator/interest features of the reference catalogue.
std::vector<FeatureSpec> catalogue_features(std::size_t window);

/// Catalogue plus following_creator_global and declared_interests_global.
std::optional<FeatureSpec> known_feature(std::string_view name, std::size_t window);

/// Builds a set from catalogue names; throws FeatureError on unknown names.
FeatureSet make_feature_set(const std::vector<std::string>& names, std::size_t window);

FeatureSet catalogue_feature_set(std::size_t window);

/// The seven-feature default labeling set.
const std::vector<std::string>& default_feature_names();

/// Parses "name=x scope=local basis=hashtag gate=liked window=50" (spaces
/// or commas between pairs). A local block may omit window; the result then
/// needs one before FeatureSet::add accepts it.
FeatureSpec parse_feature_block(std::string_view block);
std::string describe(const FeatureSpec& spec);

std::string_view to_string(Scope s);
std::string_view to_string(MatchBasis b);
std::string_view to_string(Gate g);

}  // namespace feedaudit
