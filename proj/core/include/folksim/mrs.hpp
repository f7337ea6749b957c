#pragma once

#include <cstdint>
#include <vector>

#include "folksim/corpus.hpp"
#include "folksim/dense.hpp"
#include "folksim/similarity.hpp"

namespace folksim {

enum class DeltaNorm {
  kEntrywise,  // sum of absolute values (default)
  kInduced,    // maximum absolute column sum
};

struct EngineConfig {
  double psi = 0.5;         // off-diagonal transfer weight, in [0,1]
  double epsilon = 0.1;     // stop once both deltas fall below this
  int max_iters = 30;
  double tau = 1e-4;        // final matrices drop entries below this
  std::uint32_t size_limit = 5000;  // largest max(n_t, n_r) iterated densely
  DeltaNorm delta_norm = DeltaNorm::kEntrywise;
};

// Throws std::invalid_argument when a field is out of range.
void validate(const EngineConfig& cfg);

struct TraceEntry {
  int k = 0;
  double delta_t = 0.0;
  double delta_r = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceEntry> entries;
  bool converged = false;
  int iterations_run = 0;
};

struct StepResult {
  SimilarityMatrix st;
  SimilarityMatrix sr;
  // Indices whose TR row/column is entirely zero; they keep identity
  // similarities instead of producing NaN.
  std::vector<std::uint32_t> zero_tags;
  std::vector<std::uint32_t> zero_resources;
};

struct EngineResult {
  SimilarityMatrix st;
  SimilarityMatrix sr;
  ConvergenceTrace trace;
  std::vector<std::uint32_t> zero_tags;
  std::vector<std::uint32_t> zero_resources;
};

// Identity similarity: every index similar only to itself.
SimilarityMatrix init_similarity(std::uint32_t n);

// One simultaneous update of both similarity matrices from the same
// previous pair. No sparsification is applied to the outputs.
StepResult mrs_step(const TagResourceMatrix& tr, const SimilarityMatrix& st_prev,
                    const SimilarityMatrix& sr_prev, double psi, int threads = 1);

// Reference implementation of a single entry by direct summation; exists
// as an independent test oracle for mrs_step. kind selects the tag-side or
// resource-side update.
enum class PairKind { kTag, kResource };
double pairwise_step_oracle(const TagResourceMatrix& tr,
                            const SimilarityMatrix& st_prev,
                            const SimilarityMatrix& sr_prev, double psi,
                            std::uint32_t a, std::uint32_t b, PairKind kind);

// Unnormalized score for the same entry (the weighted sum before the
// normalization divide); exposed so the psi-monotonicity property can be
// checked on the raw intermediates.
double pairwise_raw_score(const TagResourceMatrix& tr,
                          const SimilarityMatrix& st_prev,
                          const SimilarityMatrix& sr_prev, double psi,
                          std::uint32_t a, std::uint32_t b, PairKind kind);

// Relative change between consecutive iterates: ||curr - prev|| / ||curr||.
double convergence_delta(const SimilarityMatrix& curr, const SimilarityMatrix& prev,
                         DeltaNorm norm = DeltaNorm::kEntrywise);

// Same measure on raw dense iterates, which, unlike SimilarityMatrix, may
// carry a non-unit diagonal.
double convergence_delta(const Dense& curr, const Dense& prev,
                         DeltaNorm norm = DeltaNorm::kEntrywise);

// Full iteration from identity until both deltas drop below epsilon or
// max_iters is reached; final matrices are sparsified by tau. Results are
// independent of the thread count.
EngineResult compute_similarities(const TagResourceMatrix& tr, const EngineConfig& cfg,
                                  int threads = 1);

}  // namespace folksim
