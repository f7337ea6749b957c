#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "folksim/corpus.hpp"
#include "folksim/similarity.hpp"

namespace folksim {

struct QueryResult {
  std::vector<std::pair<std::uint32_t, double>> ranked;  // relevance desc, ties by index asc
  int q = 0;
  std::vector<std::uint32_t> expanded_query;  // sorted set actually scored
};

// TR[t, r] * IRF(t); zero when the tag does not label the resource.
double tfidf_weight(std::uint32_t t, std::uint32_t r, const TagResourceMatrix& tr);

// Ranks resources by summed TF-IDF over the query set. When st is given,
// the query is first expanded with its expansion_size top tags. Resources
// with zero relevance are excluded; at most q results are returned.
QueryResult rank_resources(const std::vector<std::uint32_t>& t_set, int q,
                           const TagResourceMatrix& tr,
                           const SimilarityMatrix* st = nullptr);

// Emits `rank<TAB>resource_id<TAB>relevance` rows using original resource
// identifiers.
void write_query_result(const QueryResult& result,
                        const std::vector<std::string>& resource_ids,
                        std::ostream& out);

}  // namespace folksim
