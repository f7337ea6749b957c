#include "folksim/search.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "folksim/expand.hpp"

namespace folksim {

double tfidf_weight(std::uint32_t t, std::uint32_t r, const TagResourceMatrix& tr) {
  if (t >= tr.n_t || r >= tr.n_r) {
    throw std::out_of_range("index out of range");
  }
  const auto c = tr.count(t, r);
  if (c == 0) return 0.0;
  return static_cast<double>(c) * inverse_resource_frequency(tr, t);
}

QueryResult rank_resources(const std::vector<std::uint32_t>& t_set, int q,
                           const TagResourceMatrix& tr, const SimilarityMatrix* st) {
  if (t_set.empty()) {
    throw std::invalid_argument("query tag set must be nonempty");
  }
  if (q < 1) {
    throw std::invalid_argument("q must be positive");
  }

  QueryResult result;
  result.q = q;
  if (st != nullptr) {
    const auto expansion = expand_tag_set(t_set, *st, tr);
    result.expanded_query = expansion.original;
    for (const auto& [t, score] : expansion.added) result.expanded_query.push_back(t);
    std::sort(result.expanded_query.begin(), result.expanded_query.end());
  } else {
    result.expanded_query = t_set;
    std::sort(result.expanded_query.begin(), result.expanded_query.end());
    result.expanded_query.erase(
        std::unique(result.expanded_query.begin(), result.expanded_query.end()),
        result.expanded_query.end());
    for (const auto t : result.expanded_query) {
      if (t >= tr.n_t) {
        throw std::runtime_error("unknown tag index " + std::to_string(t));
      }
    }
  }

  // Accumulate relevance over posting lists in ascending tag order so the
  // floating-point sums are reproducible.
  std::vector<double> relevance(tr.n_r, 0.0);
  for (const auto t : result.expanded_query) {
    const std::size_t df = tr.row_size(t);
    if (df == 0) continue;
    const double irf = std::log(static_cast<double>(tr.n_r) / static_cast<double>(df));
    if (irf == 0.0) continue;
    for (std::size_t e = tr.row_ptr[t]; e < tr.row_ptr[t + 1]; ++e) {
      relevance[tr.col[e]] += static_cast<double>(tr.val[e]) * irf;
    }
  }

  std::vector<std::pair<std::uint32_t, double>> hits;
  for (std::uint32_t r = 0; r < tr.n_r; ++r) {
    if (relevance[r] > 0.0) hits.emplace_back(r, relevance[r]);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (hits.size() > static_cast<std::size_t>(q)) {
    hits.resize(static_cast<std::size_t>(q));
  }
  result.ranked = std::move(hits);
  return result;
}

void write_query_result(const QueryResult& result,
                        const std::vector<std::string>& resource_ids,
                        std::ostream& out) {
  int rank = 1;
  for (const auto& [r, rel] : result.ranked) {
    out << rank++ << '\t' << resource_ids[r] << '\t' << format_score(rel) << '\n';
  }
}

}  // namespace folksim
