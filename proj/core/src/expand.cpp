#include "folksim/expand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace folksim {
namespace {

// ln(count) * IRF for every tag; zero for tags that cannot be recommended
// (unused, singleton, or labeling every resource).
std::vector<double> recommendation_weights(const TagResourceMatrix& tr) {
  std::vector<double> w(tr.n_t, 0.0);
  for (std::uint32_t t = 0; t < tr.n_t; ++t) {
    std::uint64_t cnt = 0;
    for (std::size_t e = tr.row_ptr[t]; e < tr.row_ptr[t + 1]; ++e) cnt += tr.val[e];
    if (cnt < 2) continue;  // ln(1) = 0, unused tags score 0
    const auto df = static_cast<double>(tr.row_size(t));
    const double irf = std::log(static_cast<double>(tr.n_r) / df);
    w[t] = std::log(static_cast<double>(cnt)) * irf;
  }
  return w;
}

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

ExpansionResult expand_with_weights(const std::vector<std::uint32_t>& t_set,
                                    const SimilarityMatrix& st,
                                    const std::vector<double>& w, int k) {
  ExpansionResult result;
  result.original = sorted_unique(t_set);
  result.k_used = k;

  std::vector<std::pair<std::uint32_t, double>> scored;
  const auto n = static_cast<std::uint32_t>(w.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    if (std::binary_search(result.original.begin(), result.original.end(), i)) continue;
    double sim_sum = 0.0;
    for (const auto j : result.original) sim_sum += st.at(i, j);
    const double score = w[i] * sim_sum;
    if (score > 0.0) scored.emplace_back(i, score);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > static_cast<std::size_t>(k)) {
    scored.resize(static_cast<std::size_t>(k));
  }
  result.added = std::move(scored);
  return result;
}

}  // namespace

int expansion_size(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("tag set must be nonempty");
  }
  if (n > 6) {
    return static_cast<int>((n + 1) / 2);  // ceil(n / 2)
  }
  return 3;
}

double pair_score(std::uint32_t t_i, std::uint32_t t_j, const SimilarityMatrix& st,
                  const TagResourceMatrix& tr) {
  if (t_i >= tr.n_t || t_j >= tr.n_t) {
    throw std::out_of_range("tag index out of range");
  }
  std::uint64_t cnt = 0;
  for (std::size_t e = tr.row_ptr[t_i]; e < tr.row_ptr[t_i + 1]; ++e) cnt += tr.val[e];
  if (cnt == 0) return 0.0;  // unused tags cannot be recommended
  const double irf = inverse_resource_frequency(tr, t_i);
  return st.at(t_i, t_j) * std::log(static_cast<double>(cnt)) * irf;
}

double total_score(std::uint32_t t_i, const std::vector<std::uint32_t>& t_set,
                   const SimilarityMatrix& st, const TagResourceMatrix& tr) {
  if (t_set.empty()) {
    throw std::invalid_argument("tag set must be nonempty");
  }
  double total = 0.0;
  for (const auto t_j : sorted_unique(t_set)) {
    total += pair_score(t_i, t_j, st, tr);
  }
  return total;
}

ExpansionResult expand_tag_set(const std::vector<std::uint32_t>& t_set,
                               const SimilarityMatrix& st, const TagResourceMatrix& tr,
                               std::optional<int> k_override) {
  if (t_set.empty()) {
    throw std::invalid_argument("tag set must be nonempty");
  }
  for (const auto t : t_set) {
    if (t >= tr.n_t) {
      throw std::runtime_error("unknown tag index " + std::to_string(t));
    }
  }
  const int k = k_override.value_or(expansion_size(t_set.size()));
  if (k < 0) {
    throw std::invalid_argument("expansion size must be nonnegative");
  }
  return expand_with_weights(t_set, st, recommendation_weights(tr), k);
}

std::vector<Bookmark> enrich_bookmarks(const std::vector<Bookmark>& bookmarks,
                                       const SimilarityMatrix& st,
                                       const TagResourceMatrix& tr) {
  const auto w = recommendation_weights(tr);
  std::vector<Bookmark> enriched;
  enriched.reserve(bookmarks.size());
  for (const auto& b : bookmarks) {
    const auto expansion =
        expand_with_weights(b.tag_set, st, w, expansion_size(b.tag_set.size()));
    Bookmark e;
    e.user = b.user;
    e.resource = b.resource;
    e.tag_set = expansion.original;
    for (const auto& [t, score] : expansion.added) e.tag_set.push_back(t);
    std::sort(e.tag_set.begin(), e.tag_set.end());
    enriched.push_back(std::move(e));
  }
  return enriched;
}

}  // namespace folksim
