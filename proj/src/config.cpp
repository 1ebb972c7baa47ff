#include "feedaudit/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace feedaudit {

namespace fs = std::filesystem;

FeatureSet AuditConfig::feature_set() const {
  FeatureSet set = make_feature_set(features, W);
  for (auto spec : custom_features) {
    if (spec.scope == Scope::Local && !spec.window) spec.window = W;
    set.add(std::move(spec));
  }
  return set;
}

FeatureSet AuditConfig::candidate_set() const {
  if (candidates.empty()) return catalogue_feature_set(W);
  return make_feature_set(candidates, W);
}

void validate(const AuditConfig& c) {
  if (c.W < 1) throw ConfigError("W must be at least 1");
  if (c.N <= c.W) throw ConfigError(fmt::format("N ({}) must exceed W ({})", c.N, c.W));
  if (c.X < 1 || c.Y < 1) throw ConfigError("interest radii X and Y must be at least 1");
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ConfigError(fmt::format("sigma {} outside (0, 1)", c.sigma));
  if (!(c.per_user_fraction > 0.0 && c.per_user_fraction <= 1.0))
    throw ConfigError(fmt::format("per_user_fraction {} outside (0, 1]", c.per_user_fraction));
  if (c.tau && !(*c.tau > 0.0)) throw ConfigError("tau must be positive");
  if (c.score_sample_size && *c.score_sample_size == 0) throw ConfigError("score_sample_size must be positive");
  if (c.epsilon < 0.0) throw ConfigError("epsilon must be non-negative");
  if (c.embedding_dim < 2 || c.embedding_epochs < 1 || c.embedding_window < 1)
    throw ConfigError("embedding_dim >= 2, embedding_epochs >= 1 and embedding_window >= 1 required");
  if (!c.stoplist.empty() && !fs::is_regular_file(c.stoplist))
    throw ConfigError(fmt::format("stoplist '{}' not found", c.stoplist));
  if (!c.clustering.empty() && !fs::is_regular_file(c.clustering))
    throw ConfigError(fmt::format("clustering '{}' not found", c.clustering));
  try {
    c.feature_set();
    if (c.select) c.candidate_set();
  } catch (const FeatureError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, v));
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, v));
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? ", " : "") + items[k];
  return out;
}

}  // namespace

AuditConfig parse_config(std::istream& in, const std::string& base_dir) {
  AuditConfig c;
  bool features_set = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    try {
      if (key == "N") c.N = parse_size(key, v);
      else if (key == "W") c.W = parse_size(key, v);
      else if (key == "X") c.X = parse_size(key, v);
      else if (key == "Y") c.Y = parse_size(key, v);
      else if (key == "features") {
        if (!features_set) c.features.clear();
        features_set = true;
        for (auto& f : parse_list(v)) c.features.push_back(f);
      } else if (key == "feature") c.custom_features.push_back(parse_feature_block(v));
      else if (key == "tau") c.tau = v == "auto" ? std::nullopt : std::optional<double>(parse_real(key, v));
      else if (key == "trials") c.trials = parse_size(key, v);
      else if (key == "sigma") c.sigma = parse_real(key, v);
      else if (key == "per_user_fraction") c.per_user_fraction = parse_real(key, v);
      else if (key == "stoplist") c.stoplist = resolve(base_dir, v);
      else if (key == "seed") c.seed = parse_u64(key, v);
      else if (key == "score_sample_size")
        c.score_sample_size = v == "all" ? std::nullopt : std::optional<std::size_t>(parse_size(key, v));
      else if (key == "cluster") c.cluster = parse_bool(key, v);
      else if (key == "clustering") c.clustering = resolve(base_dir, v);
      else if (key == "min_count") c.min_count = parse_size(key, v);
      else if (key == "embedding_window") c.embedding_window = parse_size(key, v);
      else if (key == "embedding_dim") c.embedding_dim = parse_size(key, v);
      else if (key == "embedding_epochs") c.embedding_epochs = parse_size(key, v);
      else if (key == "select") c.select = parse_bool(key, v);
      else if (key == "candidates") c.candidates = parse_list(v);
      else if (key == "epsilon") c.epsilon = parse_real(key, v);
      else if (key == "score") c.score = parse_bool(key, v);
      else if (key == "t_test") {
        if (v == "student") c.t_test = TTestVariant::Student;
        else if (v == "welch") c.t_test = TTestVariant::Welch;
        else throw ConfigError(fmt::format("t_test: expected student or welch, got '{}'", v));
      } else if (key == "rho_denominator") {
        if (v == "m") c.rho_denominator = RhoDenominator::AllUsers;
        else if (v == "m-1") c.rho_denominator = RhoDenominator::OtherUsers;
        else throw ConfigError(fmt::format("rho_denominator: expected m or m-1, got '{}'", v));
      } else throw ConfigError(fmt::format("unknown key '{}'", key));
    } catch (const FeatureError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  validate(c);
  return c;
}

AuditConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  return parse_config(in, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

std::string serialize_config(const AuditConfig& c) {
  std::string out;
  auto put = [&out](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  put("N", std::to_string(c.N));
  put("W", std::to_string(c.W));
  put("X", std::to_string(c.X));
  put("Y", std::to_string(c.Y));
  put("features", join(c.features));
  for (const auto& f : c.custom_features) put("feature", describe(f));
  put("tau", c.tau ? fmt::format("{}", *c.tau) : "auto");
  put("trials", std::to_string(c.trials));
  put("sigma", fmt::format("{}", c.sigma));
  put("per_user_fraction", fmt::format("{}", c.per_user_fraction));
  if (!c.stoplist.empty()) put("stoplist", c.stoplist);
  put("seed", std::to_string(c.seed));
  put("score_sample_size", c.score_sample_size ? std::to_string(*c.score_sample_size) : "all");
  put("cluster", c.cluster ? "true" : "false");
  if (!c.clustering.empty()) put("clustering", c.clustering);
  put("min_count", std::to_string(c.min_count));
  put("embedding_window", std::to_string(c.embedding_window));
  put("embedding_dim", std::to_string(c.embedding_dim));
  put("embedding_epochs", std::to_string(c.embedding_epochs));
  put("select", c.select ? "true" : "false");
  if (!c.candidates.empty()) put("candidates", join(c.candidates));
  put("epsilon", fmt::format("{}", c.epsilon));
  put("t_test", c.t_test == TTestVariant::Student ? "student" : "welch");
  put("rho_denominator", c.rho_denominator == RhoDenominator::AllUsers ? "m" : "m-1");
  put("score", c.score ? "true" : "false");
  return out;
}

}  // namespace feedaudit
