#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "feedaudit/pipeline.hpp"
#include "feedaudit/rng.hpp"
#include "feedaudit/simulator.hpp"

using namespace feedaudit;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
};

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Audit configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the configured seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = runtime default)");
}

AuditConfig load(const Common& c) {
  AuditConfig config = c.config_path.empty() ? AuditConfig{} : load_config(c.config_path);
  if (c.seed) config.seed = *c.seed;
  if (c.threads > 0) omp_set_num_threads(static_cast<int>(c.threads));
  return config;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(fmt::format("cannot open '{}'", path));
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(fmt::format("cannot write '{}'", path));
  return out;
}

Dataset read_prefixed(const std::string& path, const AuditConfig& config) {
  auto in = open_in(path);
  std::vector<std::string> excluded;
  Dataset d = take_prefix_all(parse_traces(in), config.N, &excluded);
  for (const auto& u : excluded) std::cerr << fmt::format("note: '{}' has fewer than N = {} items\n", u, config.N);
  if (d.user_count() == 0) throw CliError(fmt::format("no user has at least N = {} recommendations", config.N));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exploit/explore audit of recommendation timelines"};
  app.require_subcommand(1);

  Common common;
  std::string input, output, truth_path, series_path, clusters_out, embeddings_out;
  bool strict = false;
  std::size_t trials = 0, users = 1, steps = 0;
  std::string policy;
  double exploit_rate = 0.5;
  std::vector<double> weights;

  auto* ingest = app.add_subcommand("ingest", "Validate a trace file and report parse statistics");
  ingest->add_option("traces", input)->required();
  ingest->add_option("-o,--out", output, "Write the normalized traces here");
  ingest->add_flag("--strict", strict, "Fail on the first malformed line");
  add_common(ingest, common);

  auto* preprocess = app.add_subcommand("preprocess", "Prefix, filter, cluster hashtags and infer interests");
  preprocess->add_option("traces", input)->required();
  preprocess->add_option("-o,--out", output)->required();
  preprocess->add_option("--clusters", clusters_out, "Write the hashtag map here");
  add_common(preprocess, common);

  auto* label = app.add_subcommand("label", "Label every item exploit or explore");
  label->add_option("traces", input)->required();
  label->add_option("-o,--out", output)->required();
  add_common(label, common);

  auto* metrics = app.add_subcommand("metrics", "Mean exploit curve from a label table");
  metrics->add_option("labels", input)->required();
  metrics->add_option("-o,--out", output)->required();
  metrics->add_option("--series", series_path, "Also write per-user exploit series");
  add_common(metrics, common);

  auto* score = app.add_subcommand("score", "Personalization score of every item");
  score->add_option("traces", input)->required();
  score->add_option("-o,--out", output)->required();
  add_common(score, common);

  auto* baseline = app.add_subcommand("baseline", "Index-randomized noise floor");
  baseline->add_option("traces", input)->required();
  baseline->add_option("-o,--out", output)->required();
  baseline->add_option("--trials", trials, "Randomized trials (default from config)");
  add_common(baseline, common);

  auto* simulate = app.add_subcommand("simulate", "Run scripted bots against the synthetic platform");
  simulate->add_option("--policy", policy, "bot1 .. bot5")->required();
  simulate->add_option("-o,--out", output)->required();
  simulate->add_option("--truth", truth_path, "Ground-truth sidecar (default: <out>.truth.tsv)");
  simulate->add_option("--users", users, "Bots to run");
  simulate->add_option("--steps", steps, "Items per bot (default N)");
  simulate->add_option("--exploit-rate", exploit_rate, "Probability of an exploit recommendation")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--basis-weights", weights, "liked-hashtag followed-creator watched-hashtag viewed-creator")
      ->expected(4);
  add_common(simulate, common);

  auto* select = app.add_subcommand("select-features", "Rank candidate features and eliminate noisy ones");
  select->add_option("traces", input)->required();
  select->add_option("-o,--out", output)->required();
  add_common(select, common);

  auto* factors = app.add_subcommand("factors", "Engagement factors of top vs bottom quartile users");
  factors->add_option("traces", input)->required();
  factors->add_option("-o,--out", output)->required();
  add_common(factors, common);

  auto* report = app.add_subcommand("report", "Run every stage and write a report bundle");
  report->add_option("traces", input)->required();
  report->add_option("-o,--out", output, "Bundle directory")->required();
  add_common(report, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return app.exit(e);
  }

  try {
    const AuditConfig config = load(common);
    const Provenance prov = provenance_of(config);

    if (*ingest) {
      auto in = open_in(input);
      ParseReport rep;
      const Dataset d = parse_traces(in, {strict}, &rep);
      std::size_t events = 0, short_users = 0;
      for (const auto& t : d.timelines) {
        events += t.size();
        if (t.size() < config.N) ++short_users;
      }
      std::cout << fmt::format("users {}\nevents {}\nlines {}\nskipped {}\nduplicates {}\nshorter_than_N {}\n",
                               d.user_count(), events, rep.lines_read, rep.skipped_lines, rep.duplicates,
                               short_users);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
      if (!output.empty()) write_traces_file(output, d);
      if (d.user_count() == 0) throw CliError("no recommendation events in input");
    } else if (*preprocess) {
      auto in = open_in(input);
      const Prepared p = prepare(config, in);
      write_traces_file(output, p.dataset);
      if (!clusters_out.empty() && p.clustering) {
        auto out = open_out(clusters_out);
        write_clustering(out, *p.clustering);
      }
      std::cerr << fmt::format("{} users kept, {} excluded\n", p.dataset.user_count(), p.excluded.size());
    } else if (*label) {
      const Dataset d = read_prefixed(input, config);
      const auto labels = label_dataset(encode(d), config.feature_set());
      auto out = open_out(output);
      write_label_table(out, d, labels, prov);
    } else if (*metrics) {
      auto in = open_in(input);
      std::string first;
      std::getline(in, first);
      if (first.rfind("#feedaudit-labels", 0) != 0)
        throw CliError(fmt::format("'{}' is not a label table; run `feedaudit label` on the traces first", input));
      in.seekg(0);
      const auto labels = read_label_table(in);
      auto out = open_out(output);
      write_curve_csv(out, mean_exploit_curve(labels, config.W), prov);
      if (!series_path.empty()) {
        auto s = open_out(series_path);
        write_series_csv(s, labels, config.W, prov);
      }
    } else if (*score) {
      const Dataset d = read_prefixed(input, config);
      const auto features = config.feature_set();
      const auto encoded = encode(d);
      const auto labels = label_dataset(encoded, features);
      PersonalizationScorer scorer(encoded, features, labels);
      ScoreOptions o{config.rho_denominator, config.score_sample_size, derive_seed(config.seed, "score", 0)};
      auto out = open_out(output);
      write_scores_csv(out, d, scorer.score_all(o), prov);
    } else if (*baseline) {
      const Dataset d = read_prefixed(input, config);
      RandomizationOptions o{trials ? trials : config.trials, derive_seed(config.seed, "baseline", 0), config.X};
      auto out = open_out(output);
      write_floor_csv(out, noise_floor(d, config.feature_set(), config.W, o), prov);
    } else if (*simulate) {
      PlatformConfig platform;
      platform.exploit_rate = exploit_rate;
      platform.seed = derive_seed(config.seed, "platform", 0);
      if (!weights.empty()) std::copy(weights.begin(), weights.end(), platform.basis_weights.begin());
      const Cohort cohort =
          generate_cohort({bot_policy(policy)}, platform, users, steps ? steps : config.N, config.seed);
      write_traces_file(output, cohort.dataset);
      auto truth = open_out(truth_path.empty() ? output + ".truth.tsv" : truth_path);
      write_ground_truth(truth, cohort);
    } else if (*select) {
      const Dataset d = read_prefixed(input, config);
      SelectionOptions o;
      o.window = config.W;
      o.trials = config.trials;
      o.seed = derive_seed(config.seed, "select", 0);
      o.tau = config.tau;
      o.epsilon = config.epsilon;
      o.interest_radius = config.X;
      const auto rep = select_features(d, config.candidate_set(), o);
      auto out = open_out(output);
      write_selection_json(out, rep, prov);
    } else if (*factors) {
      const Dataset d = read_prefixed(input, config);
      const auto labels = label_dataset(encode(d), config.feature_set());
      const auto exploit = per_user_exploit(labels, config.W, config.W);
      auto out = open_out(output);
      write_factor_report(out, factor_report(d, exploit, config.t_test), prov);
    } else if (*report) {
      auto in = open_in(input);
      const auto result = run_pipeline(config, in);
      write_bundle(output, config, result);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
