#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace folksim {

// One (user, resource, tag) labeling event, as indices into the interned
// identifier tables.
struct Assignment {
  std::uint32_t user = 0;
  std::uint32_t resource = 0;
  std::uint32_t tag = 0;

  bool operator==(const Assignment&) const = default;
};

// A tripartite tagging corpus: interned identifiers plus the deduplicated
// assignment set in first-appearance order.
struct Folksonomy {
  std::vector<std::string> users;
  std::vector<std::string> resources;
  std::vector<std::string> tags;
  std::vector<Assignment> assignments;

  std::uint32_t n_users() const { return static_cast<std::uint32_t>(users.size()); }
  std::uint32_t n_resources() const { return static_cast<std::uint32_t>(resources.size()); }
  std::uint32_t n_tags() const { return static_cast<std::uint32_t>(tags.size()); }
};

// Sparse tag-by-resource count matrix with both row (tag) and column
// (resource) adjacency. Counts are numbers of distinct users; absent
// entries are zero.
struct TagResourceMatrix {
  std::uint32_t n_t = 0;
  std::uint32_t n_r = 0;

  // CSR over tags: for tag t, entries [row_ptr[t], row_ptr[t+1]) hold
  // (col[i] = resource, val[i] = count) with resources ascending.
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<std::uint32_t> val;

  // CSC over resources: for resource r, entries [col_ptr[r], col_ptr[r+1])
  // hold (row[i] = tag, cval[i] = count) with tags ascending.
  std::vector<std::size_t> col_ptr;
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> cval;

  std::size_t nnz() const { return col.size(); }
  std::size_t row_size(std::uint32_t t) const { return row_ptr[t + 1] - row_ptr[t]; }
  std::size_t col_size(std::uint32_t r) const { return col_ptr[r + 1] - col_ptr[r]; }

  // Count for (t, r); zero when the entry is absent.
  std::uint32_t count(std::uint32_t t, std::uint32_t r) const;
};

// One user's tag set on one resource.
struct Bookmark {
  std::uint32_t user = 0;
  std::uint32_t resource = 0;
  std::vector<std::uint32_t> tag_set;  // sorted, deduplicated, nonempty

  bool operator==(const Bookmark&) const = default;
};

// Corpus summary; histograms bucket values into {1, 2, 3, 4, >=5}.
struct CorpusStats {
  std::uint32_t n_users = 0;
  std::uint32_t n_resources = 0;
  std::uint32_t n_tags = 0;
  std::size_t n_assignments = 0;
  std::array<std::size_t, 5> distinct_tags_per_resource{};
  std::array<std::size_t, 5> uses_per_tag{};
};

// Parses `user<TAB>resource<TAB>tag` lines (UTF-8, `#` comments ignored,
// extra fields ignored). Duplicate triples collapse; identifiers are
// interned in first-appearance order. Throws std::runtime_error naming the
// line number on malformed lines, and "empty corpus" when no assignments
// survive.
Folksonomy ingest_assignments(std::istream& in);

// Writes assignments in stored order so that re-ingesting reproduces the
// identical Folksonomy.
void write_assignments(const Folksonomy& f, std::ostream& out);

TagResourceMatrix build_tag_resource_matrix(const Folksonomy& f);

// Same matrix from a bookmark subset, keeping the full (n_t, n_r) shape so
// indices stay comparable across different subsets of one corpus.
TagResourceMatrix build_tag_resource_matrix(const std::vector<Bookmark>& bookmarks,
                                            std::uint32_t n_t, std::uint32_t n_r);

// One bookmark per distinct (user, resource) pair, ordered by user index
// then resource index.
std::vector<Bookmark> group_bookmarks(const Folksonomy& f);

// Total number of times tag t appears (sum of row t).
std::uint64_t tag_count(const TagResourceMatrix& tr, std::uint32_t t);

// ln(n_r / df_t) where df_t is the number of resources tag t labels.
// Throws when the tag labels no resources.
double inverse_resource_frequency(const TagResourceMatrix& tr, std::uint32_t t);

CorpusStats corpus_stats(const Folksonomy& f, const TagResourceMatrix& tr);

}  // namespace folksim
