#include "feedaudit/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "feedaudit/rng.hpp"

namespace feedaudit {

namespace fs = std::filesystem;

StageError::StageError(std::string stage, const std::string& what)
    : std::runtime_error(fmt::format("{} stage failed: {}", stage, what)), stage_(std::move(stage)) {}

namespace {

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

Prepared prepare(const AuditConfig& config, std::istream& traces) {
  ParseReport report;
  Dataset parsed = stage("parse", [&] {
    auto d = parse_traces(traces, {}, &report);
    if (d.user_count() == 0) throw TraceError("no recommendation events in input");
    return d;
  });
  auto out = prepare(config, std::move(parsed));
  out.parse = std::move(report);
  return out;
}

Prepared prepare(const AuditConfig& config, Dataset parsed) {
  Prepared out;
  stage("config", [&] {
    validate(config);
    return 0;
  });
  out.dataset = stage("prefix", [&] {
    auto d = take_prefix_all(parsed, config.N, &out.excluded);
    if (d.user_count() == 0)
      throw TraceError(fmt::format("no user has at least N = {} recommendations", config.N));
    return d;
  });
  out.dataset = stage("filter", [&] {
    std::set<std::string> stop;
    if (!config.stoplist.empty()) stop = read_stoplist_file(config.stoplist);
    return filter_generic_hashtags(out.dataset, stop, config.per_user_fraction);
  });
  if (!config.clustering.empty()) {
    out.clustering = stage("cluster", [&] {
      std::ifstream in(config.clustering);
      if (!in) throw TraceError(fmt::format("cannot open '{}'", config.clustering));
      return read_clustering(in);
    });
  } else if (config.cluster) {
    auto embeddings = stage("embed", [&] {
      CbowOptions o;
      o.min_count = config.min_count;
      o.window = config.embedding_window;
      o.dim = config.embedding_dim;
      o.epochs = config.embedding_epochs;
      o.seed = derive_seed(config.seed, "cbow", 0);
      return train_cbow(hashtag_corpus(out.dataset), o);
    });
    out.clustering = stage("cluster", [&] {
      return cluster_hashtags(embeddings, hashtags_by_frequency(out.dataset), config.sigma);
    });
  }
  if (out.clustering) out.dataset = stage("canonicalize", [&] { return canonicalize(out.dataset, *out.clustering); });
  stage("interests", [&] {
    assign_popular_interests(out.dataset, config.X);
    for (auto& t : out.dataset.timelines)
      if (t.declared_interests.size() > config.Y) t.declared_interests.resize(config.Y);
    return 0;
  });
  return out;
}

std::map<std::string, double> per_user_exploit(const LabeledDataset& labels, std::size_t window,
                                               std::size_t warmup) {
  const auto means = post_warmup_user_means(labels, window, warmup);
  std::map<std::string, double> out;
  for (std::size_t u = 0; u < labels.user_count(); ++u) out.emplace(labels.timelines[u].user_id, means[u]);
  return out;
}

AuditResult analyze(const AuditConfig& config, Prepared prepared) {
  AuditResult r;
  r.prepared = std::move(prepared);
  const auto& data = r.prepared.dataset;
  const FeatureSet features = stage("label", [&] { return config.feature_set(); });
  const auto encoded = stage("label", [&] { return encode(data); });
  r.labels = stage("label", [&] { return label_dataset(encoded, features); });
  r.curve = stage("metrics", [&] { return mean_exploit_curve(r.labels, config.W); });
  r.per_user_exploit = stage("metrics", [&] { return per_user_exploit(r.labels, config.W, config.W); });
  r.floor = stage("baseline", [&] {
    RandomizationOptions o{config.trials, derive_seed(config.seed, "baseline", 0), config.X};
    return noise_floor(data, features, config.W, o);
  });
  if (config.score) {
    r.scores = stage("score", [&] {
      PersonalizationScorer scorer(encoded, features, r.labels);
      ScoreOptions o{config.rho_denominator, config.score_sample_size, derive_seed(config.seed, "score", 0)};
      return scorer.score_all(o);
    });
  }
  if (config.select) {
    r.selection = stage("select", [&] {
      SelectionOptions o;
      o.window = config.W;
      o.trials = config.trials;
      o.seed = derive_seed(config.seed, "select", 0);
      o.tau = config.tau;
      o.epsilon = config.epsilon;
      o.interest_radius = config.X;
      return select_features(data, config.candidate_set(), o);
    });
  }
  if (data.user_count() >= 4) {
    r.factors = stage("factors", [&] { return factor_report(data, r.per_user_exploit, config.t_test); });
  }
  return r;
}

AuditResult run_pipeline(const AuditConfig& config, std::istream& traces) {
  return analyze(config, prepare(config, traces));
}

Provenance provenance_of(const AuditConfig& config) { return {serialize_config(config), config.seed}; }

namespace {

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError("report", fmt::format("cannot write '{}'", path.string()));
  body(out);
  if (!out) throw StageError("report", fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

void write_bundle(const std::string& dir, const AuditConfig& config, const AuditResult& r) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw StageError("report", fmt::format("cannot create '{}': {}", dir, ec.message()));
  const Provenance prov = provenance_of(config);
  const auto& data = r.prepared.dataset;

  write_file(root / "manifest.txt", [&](std::ostream& out) {
    write_header(out, "manifest", prov);
    out << "users " << data.user_count() << '\n';
    out << "excluded_users " << r.prepared.excluded.size() << '\n';
    for (const auto& u : r.prepared.excluded) out << "excluded " << u << '\n';
    out << "parsed_records " << r.prepared.parse.records << '\n';
    out << "skipped_lines " << r.prepared.parse.skipped_lines << '\n';
    out << "duplicates " << r.prepared.parse.duplicates << '\n';
    if (r.prepared.clustering) out << "clusters " << r.prepared.clustering->cluster_count() << '\n';
    out << "trials " << r.floor.trials << '\n';
  });
  write_file(root / "traces.jsonl", [&](std::ostream& out) { write_traces(out, data); });
  if (r.prepared.clustering)
    write_file(root / "clusters.tsv", [&](std::ostream& out) { write_clustering(out, *r.prepared.clustering); });
  write_file(root / "interests.tsv", [&](std::ostream& out) { write_interests(out, data, prov); });
  write_file(root / "labels.tsv", [&](std::ostream& out) { write_label_table(out, data, r.labels, prov); });
  write_file(root / "curve.csv", [&](std::ostream& out) { write_curve_csv(out, r.curve, prov); });
  write_file(root / "series.csv", [&](std::ostream& out) { write_series_csv(out, r.labels, config.W, prov); });
  write_file(root / "floor.csv", [&](std::ostream& out) { write_floor_csv(out, r.floor, prov); });
  if (config.score)
    write_file(root / "scores.csv", [&](std::ostream& out) { write_scores_csv(out, data, r.scores, prov); });
  if (r.selection)
    write_file(root / "selection.json", [&](std::ostream& out) { write_selection_json(out, *r.selection, prov); });
  if (r.factors) {
    write_file(root / "factors.csv", [&](std::ostream& out) { write_factor_report(out, *r.factors, prov); });
    write_file(root / "factor_users.csv",
               [&](std::ostream& out) { write_factor_users(out, *r.factors, r.per_user_exploit, prov); });
  }
}

}  // namespace feedaudit
