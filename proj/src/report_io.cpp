#include "feedaudit/report_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace feedaudit {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError(fmt::format("bad number '{}'", s));
  return v;
}

std::size_t parse_index(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError(fmt::format("bad index '{}'", s));
  return v;
}

std::string header_value(const std::vector<std::string>& header, std::string_view key) {
  for (const auto& h : header)
    if (h.size() > key.size() && h.compare(0, key.size(), key) == 0 && h[key.size()] == ' ')
      return h.substr(key.size() + 1);
  return {};
}

bool next_row(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

void write_header(std::ostream& out, std::string_view kind, const Provenance& provenance) {
  out << "#feedaudit-" << kind << " v1\n";
  out << "#seed " << provenance.seed << '\n';
  std::stringstream ss(provenance.config);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) out << "#config " << line << '\n';
}

std::vector<std::string> read_header(std::istream& in, std::string_view kind) {
  std::string first;
  if (!std::getline(in, first)) throw FormatError(fmt::format("empty input, expected a {} file", kind));
  if (!first.empty() && first.back() == '\r') first.pop_back();
  const std::string expected = fmt::format("#feedaudit-{} v1", kind);
  if (first != expected) {
    if (first.rfind("#feedaudit-", 0) == 0)
      throw FormatError(fmt::format("expected a {} file, found '{}'", kind, first));
    throw FormatError(fmt::format("missing '{}' header", expected));
  }
  std::vector<std::string> header;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header.push_back(line.substr(1));
  }
  return header;
}

void write_label_table(std::ostream& out, const Dataset& dataset, const LabeledDataset& labels,
                       const Provenance& provenance) {
  if (dataset.user_count() != labels.user_count()) throw FormatError("labels and dataset differ in user count");
  write_header(out, "labels", provenance);
  out << "#features ";
  for (std::size_t k = 0; k < labels.feature_names.size(); ++k) out << (k ? "," : "") << labels.feature_names[k];
  out << "\nuser_id\tindex\tvideo_id\tlabel\tfired\n";
  for (std::size_t u = 0; u < labels.user_count(); ++u) {
    const auto& lt = labels.timelines[u];
    const auto& tl = dataset.timelines[u];
    if (lt.user_id != tl.user_id || lt.size() > tl.size())
      throw FormatError(fmt::format("labels for '{}' do not match the dataset", lt.user_id));
    for (std::size_t i = 1; i <= lt.size(); ++i) {
      const auto names = fired_names(lt.fired[i - 1], labels.feature_names);
      std::string fired = names.empty() ? "-" : names.front();
      for (std::size_t k = 1; k < names.size(); ++k) fired += "," + names[k];
      out << lt.user_id << '\t' << i << '\t' << tl.events[i - 1].video_id << '\t'
          << (lt.label(i) == Label::Exploit ? "exploit" : "explore") << '\t' << fired << '\n';
    }
  }
}

LabeledDataset read_label_table(std::istream& in) {
  const auto header = read_header(in, "labels");
  LabeledDataset out;
  const auto features = header_value(header, "features");
  if (!features.empty()) out.feature_names = split(features, ',');
  std::string line;
  if (!next_row(in, line) || line.rfind("user_id\t", 0) != 0) throw FormatError("label table: missing column row");
  std::size_t row = 0;
  while (next_row(in, line)) {
    ++row;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) throw FormatError(fmt::format("label table row {}: expected 5 columns", row));
    const std::size_t index = parse_index(cols[1]);
    if (out.timelines.empty() || out.timelines.back().user_id != cols[0]) {
      out.timelines.push_back({cols[0], {}});
    }
    auto& lt = out.timelines.back();
    if (index != lt.size() + 1)
      throw FormatError(fmt::format("label table row {}: index {} out of sequence for '{}'", row, index, cols[0]));
    std::uint64_t mask = 0;
    if (cols[4] != "-") {
      for (const auto& name : split(cols[4], ',')) {
        std::size_t k = 0;
        while (k < out.feature_names.size() && out.feature_names[k] != name) ++k;
        if (k == out.feature_names.size())
          throw FormatError(fmt::format("label table row {}: unknown feature '{}'", row, name));
        mask |= std::uint64_t{1} << k;
      }
    }
    const bool exploit = cols[3] == "exploit";
    if (!exploit && cols[3] != "explore") throw FormatError(fmt::format("label table row {}: bad label", row));
    if (exploit != (mask != 0)) throw FormatError(fmt::format("label table row {}: label disagrees with fired", row));
    lt.fired.push_back(mask);
  }
  return out;
}

void write_curve_csv(std::ostream& out, const MeanExploitCurve& curve, const Provenance& provenance) {
  write_header(out, "curve", provenance);
  out << "#users " << curve.users << "\n#window " << curve.window << '\n';
  out << "index,mean,stddev\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << i + 1 << ',' << format_real(curve.mean[i]) << ',' << format_real(curve.stddev[i]) << '\n';
}

MeanExploitCurve read_curve_csv(std::istream& in) {
  const auto header = read_header(in, "curve");
  MeanExploitCurve c;
  if (auto v = header_value(header, "users"); !v.empty()) c.users = parse_index(v);
  if (auto v = header_value(header, "window"); !v.empty()) c.window = parse_index(v);
  std::string line;
  if (!next_row(in, line)) throw FormatError("curve: missing column row");
  while (next_row(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() != 3) throw FormatError("curve: expected 3 columns");
    c.mean.push_back(parse_double(cols[1]));
    c.stddev.push_back(parse_double(cols[2]));
  }
  return c;
}

void write_series_csv(std::ostream& out, const LabeledDataset& labels, std::size_t window,
                      const Provenance& provenance) {
  write_header(out, "series", provenance);
  out << "user_id,index,alpha\n";
  for (const auto& lt : labels.timelines) {
    const auto s = exploit_series(lt, window);
    for (std::size_t i = 0; i < s.alpha.size(); ++i)
      out << lt.user_id << ',' << i + 1 << ',' << format_real(s.alpha[i]) << '\n';
  }
}

void write_floor_csv(std::ostream& out, const NoiseFloor& floor, const Provenance& provenance) {
  write_header(out, "floor", provenance);
  out << "#trials " << floor.trials << "\n#users " << floor.curve.users << "\n#window " << floor.curve.window
      << '\n';
  out << "index,mean,stddev,trial_stddev\n";
  for (std::size_t i = 0; i < floor.curve.size(); ++i)
    out << i + 1 << ',' << format_real(floor.curve.mean[i]) << ',' << format_real(floor.curve.stddev[i]) << ','
        << format_real(floor.trial_stddev[i]) << '\n';
}

NoiseFloor read_floor_csv(std::istream& in) {
  const auto header = read_header(in, "floor");
  NoiseFloor f;
  if (auto v = header_value(header, "trials"); !v.empty()) f.trials = parse_index(v);
  if (auto v = header_value(header, "users"); !v.empty()) f.curve.users = parse_index(v);
  if (auto v = header_value(header, "window"); !v.empty()) f.curve.window = parse_index(v);
  std::string line;
  if (!next_row(in, line)) throw FormatError("floor: missing column row");
  while (next_row(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw FormatError("floor: expected 4 columns");
    f.curve.mean.push_back(parse_double(cols[1]));
    f.curve.stddev.push_back(parse_double(cols[2]));
    f.trial_stddev.push_back(parse_double(cols[3]));
  }
  return f;
}

void write_scores_csv(std::ostream& out, const Dataset& dataset, const std::vector<ItemScore>& scores,
                      const Provenance& provenance) {
  write_header(out, "scores", provenance);
  out << "user_id,index,video_id,label,rho\n";
  for (const auto& s : scores) {
    const auto& tl = dataset.timelines.at(s.user);
    out << tl.user_id << ',' << s.index << ',' << tl.events.at(s.index - 1).video_id << ','
        << (s.label == Label::Exploit ? "exploit" : "explore") << ',' << format_real(s.rho) << '\n';
  }
}

namespace {

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

}  // namespace

void write_selection_json(std::ostream& out, const SelectionReport& report, const Provenance& provenance) {
  write_header(out, "selection", provenance);
  nlohmann::ordered_json j;
  j["tau"] = real_json(report.tau);
  j["trials"] = report.trials;
  j["warmup"] = report.warmup;
  j["epsilon"] = report.epsilon;
  j["seed"] = report.seed;
  auto& cands = j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : report.candidates) {
    nlohmann::ordered_json row;
    row["name"] = c.name;
    row["real_mean"] = real_json(c.real_mean);
    row["randomized_mean"] = real_json(c.randomized_mean);
    row["snr"] = real_json(c.snr);
    row["retained"] = c.retained;
    cands.push_back(row);
  }
  j["retained"] = report.retained;
  j["retained_snr"] = real_json(report.retained_snr);
  auto& trace = j["trace"] = nlohmann::ordered_json::array();
  for (const auto& s : report.trace) {
    nlohmann::ordered_json row;
    row["removed"] = s.removed;
    row["subset_snr"] = real_json(s.subset_snr);
    row["subsets_evaluated"] = s.subsets_evaluated;
    trace.push_back(row);
  }
  j["round_sizes"] = report.round_sizes;
  j["final_set"] = report.final_set;
  j["final_snr"] = real_json(report.final_snr);
  j["stop_reason"] = report.stop_reason;
  out << j.dump(2) << '\n';
}

void write_factor_report(std::ostream& out, const FactorReport& report, const Provenance& provenance) {
  write_header(out, "factors", provenance);
  out << "#tq_size " << report.top_size << "\n#bq_size " << report.bottom_size << "\n#t_test "
      << (report.variant == TTestVariant::Student ? "student" : "welch") << '\n';
  out << "factor,bq_mean,tq_mean,t,df,p,impact\n";
  for (const auto& r : report.rows)
    out << r.factor << ',' << format_real(r.bottom_mean) << ',' << format_real(r.top_mean) << ','
        << format_real(r.test.t) << ',' << format_real(r.test.df) << ',' << format_real(r.test.p) << ','
        << to_string(r.impact) << '\n';
}

void write_factor_users(std::ostream& out, const FactorReport& report,
                        const std::map<std::string, double>& per_user_exploit, const Provenance& provenance) {
  write_header(out, "factor-users", provenance);
  out << "user_id,exploit_fraction,group,watch_pct,early_skip_rate,fraction_liked,fraction_from_following\n";
  auto group_of = [&report](const std::string& u) -> std::string_view {
    for (const auto& t : report.groups.top)
      if (t == u) return "TQ";
    for (const auto& b : report.groups.bottom)
      if (b == u) return "BQ";
    return "-";
  };
  for (const auto& [user, f] : report.per_user)
    out << user << ',' << format_real(per_user_exploit.at(user)) << ',' << group_of(user) << ','
        << (f.watch_pct ? format_real(*f.watch_pct) : "nan") << ',' << format_real(f.early_skip_rate) << ','
        << format_real(f.fraction_liked) << ',' << format_real(f.fraction_from_following) << '\n';
}

void write_interests(std::ostream& out, const Dataset& dataset, const Provenance& provenance) {
  write_header(out, "interests", provenance);
  out << "user_id\tpopular\tdeclared\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
    return s.empty() ? std::string("-") : s;
  };
  for (const auto& t : dataset.timelines)
    out << t.user_id << '\t' << join(t.popular_interests) << '\t' << join(t.declared_interests) << '\n';
}

}  // namespace feedaudit
