#pragma once

#include <cstdint>
#include <utility>

#include "folksim/corpus.hpp"
#include "folksim/similarity.hpp"

namespace folksim {

struct SimRankConfig {
  double c1 = 0.8;
  double c2 = 0.8;
  int iterations = 10;
};

struct LsiConfig {
  int k = 64;
  int power_iterations = 8;
  std::uint64_t seed = 0;
};

// Plain cosine between TR rows; zero rows keep identity similarities.
SimilarityMatrix cosine_similarity_matrix(const TagResourceMatrix& tr);

// SimRank over the bipartite support graph of TR (counts ignored).
// Both matrices update simultaneously from the previous pair, starting at
// identity, for exactly cfg.iterations steps; self-similarity is pinned
// to 1 and indices with empty neighbor sets score 0 against everything
// else.
std::pair<SimilarityMatrix, SimilarityMatrix> simrank_compute(
    const TagResourceMatrix& tr, const SimRankConfig& cfg);

// Rank-k latent-space cosine between tags via seeded randomized subspace
// iteration on TR * TR^T. Negative latent similarities clamp to 0 so the
// result satisfies the [0, 1] similarity contract.
SimilarityMatrix lsi_similarity_matrix(const TagResourceMatrix& tr,
                                       const LsiConfig& cfg);

}  // namespace folksim
