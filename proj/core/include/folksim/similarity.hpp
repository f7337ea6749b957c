#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace folksim {

// Symmetric similarity matrix with implicit unit diagonal. Only strictly
// off-diagonal entries are stored (for a < b); everything else reads as 0,
// and (a, a) reads as 1.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::uint32_t n) : n_(n) {}

  // Identity matrix of size n: every index similar only to itself.
  static SimilarityMatrix identity(std::uint32_t n);

  std::uint32_t size() const { return n_; }
  std::size_t stored() const { return entries_.size(); }

  double at(std::uint32_t a, std::uint32_t b) const;

  // Stores value for the unordered pair {a, b}; a == b is rejected since
  // the diagonal is pinned to 1. Zero values clear the entry.
  void set(std::uint32_t a, std::uint32_t b, double value);

  // Drops stored entries with value < tau (the diagonal is implicit and
  // always survives).
  void sparsify(double tau);

  // Stored off-diagonal entries as (a, b, value) with a < b, sorted.
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> sorted_entries() const;

  const std::unordered_map<std::uint64_t, double>& raw() const { return entries_; }

 private:
  std::uint32_t n_ = 0;
  std::unordered_map<std::uint64_t, double> entries_;  // key (min << 32) | max
};

// Serialization: `# key: value` header lines followed by
// `a<TAB>b<TAB>score` rows (a < b, 9 significant digits). The header always
// carries `n`; callers add method parameters.
void write_similarity(const SimilarityMatrix& sm, std::ostream& out,
                      const std::vector<std::pair<std::string, std::string>>& header);

struct LoadedSimilarity {
  SimilarityMatrix matrix;
  std::map<std::string, std::string> header;
};

LoadedSimilarity read_similarity(std::istream& in);

// Formats a double with 9 significant digits (round-trip stable for the
// persistence format).
std::string format_score(double v);

}  // namespace folksim
