#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedaudit/trace.hpp"

namespace feedaudit {

class PreprocessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Generic hashtag filtering
// ---------------------------------------------------------------------------

/// Removes stoplisted tags everywhere and, per user, any tag present on at
/// least `per_user_fraction` of that user's events.
Dataset filter_generic_hashtags(const Dataset& dataset, const std::set<std::string>& global_stoplist,
                                double per_user_fraction);

std::set<std::string> read_stoplist(std::istream& in);
std::set<std::string> read_stoplist_file(const std::string& path);

// ---------------------------------------------------------------------------
// CBOW embeddings
// ---------------------------------------------------------------------------

struct EmbeddingTable {
  std::size_t dim = 0;
  std::size_t vocab_min_count = 0;
  std::size_t context_window = 0;
  std::vector<std::string> tokens;             // vocabulary, descending count
  std::vector<std::uint64_t> counts;           // corpus count per token
  std::vector<float> vectors;                  // tokens.size() x dim, row major
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return tokens.size(); }
  bool contains(const std::string& token) const { return index.count(token) != 0; }
  std::vector<float> vector_of(const std::string& token) const;
};

struct CbowOptions {
  std::size_t min_count = 10;
  std::size_t window = 7;
  std::size_t dim = 100;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
};

/// Continuous-bag-of-words with negative sampling. Training is sequential so
/// that the result is a pure function of (corpus, options).
EmbeddingTable train_cbow(const std::vector<std::vector<std::string>>& corpus, const CbowOptions& options);

/// One sentence per distinct video: its hashtag list.
std::vector<std::vector<std::string>> hashtag_corpus(const Dataset& dataset);

double cosine_similarity(const float* a, const float* b, std::size_t dim);

/// Text format: first line "V D", then token followed by D reals per line.
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embeddings(std::istream& in);

// ---------------------------------------------------------------------------
// Fuzzy hashtag clustering
// ---------------------------------------------------------------------------

struct HashtagClustering {
  double sigma = 0.0;
  std::map<std::string, std::size_t> assignment;
  std::vector<std::vector<float>> centers;   // unit norm; empty for vectorless singletons
  std::vector<std::string> representative;   // per cluster
  std::vector<std::vector<std::string>> members;

  std::size_t cluster_count() const { return representative.size(); }
  /// Representative label for a tag; unknown tags map to themselves.
  const std::string& canonical(const std::string& tag) const;
};

/// Greedy single pass over `hashtags_by_frequency` (most frequent first).
HashtagClustering cluster_hashtags(const EmbeddingTable& embeddings,
                                   const std::vector<std::string>& hashtags_by_frequency, double sigma);

/// Tags ordered by descending corpus count, ties lexicographic.
std::vector<std::string> hashtags_by_frequency(const Dataset& dataset);

Dataset canonicalize(const Dataset& dataset, const HashtagClustering& clustering);

void write_clustering(std::ostream& out, const HashtagClustering& clustering);
/// Reads a (hashtag, representative) map; centers are not persisted.
HashtagClustering read_clustering(std::istream& in);

// ---------------------------------------------------------------------------
// TF-IDF interests
// ---------------------------------------------------------------------------

/// Number of users whose timeline contains each tag.
std::map<std::string, std::size_t> document_frequencies(const Dataset& dataset);

struct TfIdfEntry {
  std::string tag;
  std::size_t count = 0;
  double score = 0.0;
};

/// Full tf-idf table for one user, best first.
std::vector<TfIdfEntry> tfidf_table(const UserTimeline& timeline,
                                    const std::map<std::string, std::size_t>& document_frequency,
                                    std::size_t user_count);

std::vector<std::string> top_interests_tfidf(const UserTimeline& timeline,
                                             const std::map<std::string, std::size_t>& document_frequency,
                                             std::size_t user_count, std::size_t k);

/// Fills popular_interests for every user (document frequencies shared).
void assign_popular_interests(Dataset& dataset, std::size_t k);

}  // namespace feedaudit
