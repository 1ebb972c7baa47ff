#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "feedaudit/preprocess.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

std::vector<float> EmbeddingTable::vector_of(const std::string& token) const {
  auto it = index.find(token);
  if (it == index.end()) return {};
  auto first = vectors.begin() + static_cast<std::ptrdiff_t>(it->second * dim);
  return {first, first + static_cast<std::ptrdiff_t>(dim)};
}

double cosine_similarity(const float* a, const float* b, std::size_t dim) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < dim; ++k) {
    dot += double(a[k]) * b[k];
    na += double(a[k]) * a[k];
    nb += double(b[k]) * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::vector<std::vector<std::string>> hashtag_corpus(const Dataset& dataset) {
  std::map<std::string, const std::vector<std::string>*> by_video;
  for (const auto& t : dataset.timelines)
    for (const auto& e : t.events)
      if (!e.hashtags.empty()) by_video.emplace(e.video_id, &e.hashtags);
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(by_video.size());
  for (const auto& [id, tags] : by_video) corpus.push_back(*tags);
  return corpus;
}

namespace {

constexpr std::size_t kUnigramTableSize = 1 << 20;

std::vector<std::uint32_t> unigram_table(const std::vector<std::uint64_t>& counts) {
  std::vector<std::uint32_t> table(kUnigramTableSize);
  double total = 0;
  for (auto c : counts) total += std::pow(double(c), 0.75);
  std::size_t word = 0;
  double cumulative = std::pow(double(counts[0]), 0.75) / total;
  for (std::size_t a = 0; a < table.size(); ++a) {
    table[a] = static_cast<std::uint32_t>(word);
    if (double(a) / double(table.size()) > cumulative && word + 1 < counts.size()) {
      ++word;
      cumulative += std::pow(double(counts[word]), 0.75) / total;
    }
  }
  return table;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EmbeddingTable train_cbow(const std::vector<std::vector<std::string>>& corpus, const CbowOptions& options) {
  if (corpus.empty()) throw PreprocessError("embedding corpus is empty");
  if (options.dim < 2) throw PreprocessError("embedding dimension must be at least 2");
  if (options.window == 0) throw PreprocessError("context window must be positive");

  std::map<std::string, std::uint64_t> raw_counts;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence) ++raw_counts[tok];

  std::vector<std::pair<std::string, std::uint64_t>> vocab;
  for (const auto& [tok, c] : raw_counts)
    if (c >= options.min_count) vocab.emplace_back(tok, c);
  if (vocab.empty())
    throw PreprocessError(fmt::format(
        "empty vocabulary: no token occurs at least {} times; lower min_count", options.min_count));
  std::stable_sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  EmbeddingTable table;
  table.dim = options.dim;
  table.vocab_min_count = options.min_count;
  table.context_window = options.window;
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    table.tokens.push_back(vocab[k].first);
    table.counts.push_back(vocab[k].second);
    table.index.emplace(vocab[k].first, k);
  }

  const std::size_t V = vocab.size(), D = options.dim;
  Rng rng(options.seed);
  table.vectors.resize(V * D);
  for (auto& x : table.vectors) x = static_cast<float>((uniform01(rng) - 0.5) / double(D));
  std::vector<float> output(V * D, 0.0f);
  const auto negatives_table = unigram_table(table.counts);

  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t total_words = 0;
  for (const auto& s : corpus) {
    std::vector<std::uint32_t> ids;
    for (const auto& tok : s)
      if (auto it = table.index.find(tok); it != table.index.end()) ids.push_back(static_cast<std::uint32_t>(it->second));
    total_words += ids.size();
    if (ids.size() >= 2) sentences.push_back(std::move(ids));
  }

  std::vector<double> hidden(D), hidden_err(D);
  const double total_steps = double(total_words) * double(options.epochs) + 1.0;
  std::uint64_t processed = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& sentence : sentences) {
      const std::size_t len = sentence.size();
      for (std::size_t pos = 0; pos < len; ++pos, ++processed) {
        const double alpha = std::max(options.learning_rate * (1.0 - double(processed) / total_steps),
                                      options.learning_rate * 1e-4);
        // word2vec shrinks the effective window by a random amount
        const std::size_t shrink = uniform_below(rng, options.window);
        const std::size_t reach = options.window - shrink;
        std::fill(hidden.begin(), hidden.end(), 0.0);
        std::fill(hidden_err.begin(), hidden_err.end(), 0.0);
        std::size_t context = 0;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(len - 1, pos + reach);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          const float* v = &table.vectors[sentence[c] * D];
          for (std::size_t k = 0; k < D; ++k) hidden[k] += v[k];
          ++context;
        }
        if (context == 0) continue;
        for (auto& h : hidden) h /= double(context);

        const std::uint32_t word = sentence[pos];
        for (std::size_t d = 0; d <= options.negatives; ++d) {
          std::uint32_t target;
          double label;
          if (d == 0) {
            target = word;
            label = 1.0;
          } else {
            target = negatives_table[uniform_below(rng, negatives_table.size())];
            if (target == word) continue;
            label = 0.0;
          }
          float* out = &output[target * D];
          double f = 0.0;
          for (std::size_t k = 0; k < D; ++k) f += hidden[k] * out[k];
          const double g = (label - sigmoid(f)) * alpha;
          for (std::size_t k = 0; k < D; ++k) hidden_err[k] += g * out[k];
          for (std::size_t k = 0; k < D; ++k) out[k] += static_cast<float>(g * hidden[k]);
        }
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          float* v = &table.vectors[sentence[c] * D];
          for (std::size_t k = 0; k < D; ++k) v[k] += static_cast<float>(hidden_err[k]);
        }
      }
    }
  }
  return table;
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim << '\n';
  for (std::size_t w = 0; w < table.size(); ++w) {
    out << table.tokens[w];
    for (std::size_t k = 0; k < table.dim; ++k) out << ' ' << fmt::format("{:.6f}", table.vectors[w * table.dim + k]);
    out << '\n';
  }
}

EmbeddingTable read_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::size_t V = 0;
  std::string header;
  if (!std::getline(in, header)) throw PreprocessError("embedding file is empty");
  std::istringstream hs(header);
  if (!(hs >> V >> table.dim) || table.dim == 0) throw PreprocessError("bad embedding header: " + header);
  table.vectors.reserve(V * table.dim);
  std::string line;
  while (table.tokens.size() < V && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    for (std::size_t k = 0; k < table.dim; ++k) {
      float x;
      if (!(ls >> x)) throw PreprocessError("short embedding row for token " + tok);
      table.vectors.push_back(x);
    }
    table.index.emplace(tok, table.tokens.size());
    table.tokens.push_back(tok);
    table.counts.push_back(0);
  }
  if (table.tokens.size() != V) throw PreprocessError("embedding file has fewer rows than its header states");
  return table;
}

}  // namespace feedaudit
