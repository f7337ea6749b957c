#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "folksim/corpus.hpp"
#include "folksim/similarity.hpp"

namespace folksim {

struct ExpansionResult {
  std::vector<std::uint32_t> original;                  // sorted input set
  std::vector<std::pair<std::uint32_t, double>> added;  // score desc, ties by index asc
  int k_used = 0;
};

// Number of expansion tags for a query of n tags: ceil(n / 2) when n > 6,
// otherwise 3.
int expansion_size(std::size_t n);

// Score of candidate t_i against one query tag t_j:
// st(t_i, t_j) * ln(count(t_i)) * IRF(t_i). Unused candidates score 0, and
// singletons score 0 through ln(1).
double pair_score(std::uint32_t t_i, std::uint32_t t_j, const SimilarityMatrix& st,
                  const TagResourceMatrix& tr);

// Sum of pair scores of t_i over the query set.
double total_score(std::uint32_t t_i, const std::vector<std::uint32_t>& t_set,
                   const SimilarityMatrix& st, const TagResourceMatrix& tr);

// Top-k positive-scoring candidates outside t_set; k defaults to
// expansion_size(|t_set|). Fewer are returned when fewer candidates score
// above zero.
ExpansionResult expand_tag_set(const std::vector<std::uint32_t>& t_set,
                               const SimilarityMatrix& st, const TagResourceMatrix& tr,
                               std::optional<int> k_override = std::nullopt);

// Unions each bookmark's tag set with its expansion; order preserved.
std::vector<Bookmark> enrich_bookmarks(const std::vector<Bookmark>& bookmarks,
                                       const SimilarityMatrix& st,
                                       const TagResourceMatrix& tr);

}  // namespace folksim
