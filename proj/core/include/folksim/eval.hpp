#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "folksim/baselines.hpp"
#include "folksim/corpus.hpp"
#include "folksim/mrs.hpp"
#include "folksim/similarity.hpp"

namespace folksim {

struct SplitSpec {
  double train_fraction = 0.9;
  int repeats = 10;
  std::uint64_t seed = 0;
};

// Parameters of the synthetic corpus generator. n_tags is the vocabulary
// capacity: reserved synonym-group tags plus a power-law noise pool; rarely
// drawn pool tags may stay unused unless the corpus has unstructured
// resources to absorb a coverage pass (see generate_synthetic).
struct SynthSpec {
  std::uint32_t n_users = 0;
  std::uint32_t n_resources = 0;
  std::uint32_t n_tags = 0;
  double tag_popularity_exponent = 2.0;
  std::uint32_t tags_min = 2;  // tags per bookmark, uniform range
  std::uint32_t tags_max = 2;
  std::uint32_t synonym_groups = 0;
  std::uint64_t seed = 0;
};

struct RatioResult {
  double ratio = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t hits = 0;
};

struct ExperimentConfig {
  EngineConfig engine;
  SimRankConfig simrank;
  LsiConfig lsi;
  int threads = 1;
};

struct ReportRow {
  std::string method;
  int q = 0;
  bool enriched = false;
  double mean_ratio = 0.0;
  std::vector<double> per_repeat;
  std::size_t skipped = 0;  // summed over repeats
};

struct EvalReport {
  std::vector<ReportRow> rows;
};

// Seeded partition with |train| = round(train_fraction * N); distinct
// repeat indices give distinct partitions. Bookmark order within each part
// follows the input order.
std::pair<std::vector<Bookmark>, std::vector<Bookmark>> split_bookmarks(
    const std::vector<Bookmark>& bookmarks, const SplitSpec& spec, int repeat_index);

// Synthetic folksonomy: per-resource tagger groups draw bookmarks whose
// tag choices follow a discrete power law, with synonym_groups planted
// clusters of interchangeable labels. Deterministic given spec.seed.
Folksonomy generate_synthetic(const SynthSpec& spec);

// Fraction of test bookmarks whose resource ranks in the top q when its
// tag set (restricted to tags present in the index) queries the index.
// st, when given, expands each query; test bookmarks with no in-index tags
// are skipped and tallied.
RatioResult retrieved_ratio(const TagResourceMatrix& index,
                            const std::vector<Bookmark>& test_bookmarks,
                            const SimilarityMatrix* st, int q);

// Full protocol: per repeat, split, compute each method's similarities on
// the train side, enrich the train bookmarks, and measure retrieved_ratio
// for every q. methods may contain: none, cosine, simrank, lsi, mrs.
EvalReport run_retrieval_experiment(const Folksonomy& f, const SplitSpec& split,
                                    const std::vector<std::string>& methods,
                                    const std::vector<int>& qs,
                                    const ExperimentConfig& cfg);

// JSON array of rows {method, q, enriched, mean_ratio, per_repeat, skipped}.
std::string report_to_json(const EvalReport& report);

void write_report_tsv(const EvalReport& report, std::ostream& out);

}  // namespace folksim
