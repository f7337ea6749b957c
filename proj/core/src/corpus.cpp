#include "folksim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace folksim {
namespace {

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& index,
                     std::vector<std::string>& table, const std::string& id) {
  auto it = index.find(id);
  if (it != index.end()) return it->second;
  const auto pos = static_cast<std::uint32_t>(table.size());
  index.emplace(id, pos);
  table.push_back(id);
  return pos;
}

std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::uint32_t TagResourceMatrix::count(std::uint32_t t, std::uint32_t r) const {
  const auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[t]);
  const auto end = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[t + 1]);
  const auto it = std::lower_bound(begin, end, r);
  if (it == end || *it != r) return 0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

Folksonomy ingest_assignments(std::istream& in) {
  Folksonomy f;
  std::unordered_map<std::string, std::uint32_t> user_index, resource_index, tag_index;
  // Dedup key: user and resource packed into 64 bits, tag checked per bucket.
  std::unordered_map<std::uint64_t, std::unordered_set<std::uint32_t>> seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected at least 3 tab-separated fields");
    }
    auto tab3 = line.find('\t', tab2 + 1);
    if (tab3 == std::string::npos) tab3 = line.size();

    const std::string user = line.substr(0, tab1);
    const std::string resource = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string tag = line.substr(tab2 + 1, tab3 - tab2 - 1);
    if (user.empty() || resource.empty() || tag.empty()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": empty field");
    }

    Assignment a;
    a.user = intern(user_index, f.users, user);
    a.resource = intern(resource_index, f.resources, resource);
    a.tag = intern(tag_index, f.tags, tag);
    if (seen[pack(a.user, a.resource)].insert(a.tag).second) {
      f.assignments.push_back(a);
    }
  }
  if (f.assignments.empty()) {
    throw std::runtime_error("empty corpus");
  }
  return f;
}

void write_assignments(const Folksonomy& f, std::ostream& out) {
  for (const auto& a : f.assignments) {
    out << f.users[a.user] << '\t' << f.resources[a.resource] << '\t'
        << f.tags[a.tag] << '\n';
  }
}

namespace {

TagResourceMatrix assemble_matrix(std::unordered_map<std::uint64_t, std::uint32_t>&& cells,
                                  std::uint32_t n_t, std::uint32_t n_r) {
  TagResourceMatrix tr;
  tr.n_t = n_t;
  tr.n_r = n_r;

  std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());

  tr.row_ptr.assign(tr.n_t + 1, 0);
  tr.col.reserve(sorted.size());
  tr.val.reserve(sorted.size());
  for (const auto& [key, c] : sorted) {
    ++tr.row_ptr[(key >> 32) + 1];
    tr.col.push_back(static_cast<std::uint32_t>(key & 0xffffffffu));
    tr.val.push_back(c);
  }
  for (std::size_t t = 0; t < tr.n_t; ++t) tr.row_ptr[t + 1] += tr.row_ptr[t];

  // Column adjacency from the same cells, resource-major.
  for (auto& [key, c] : sorted) {
    key = (key << 32) | (key >> 32);  // swap to (resource, tag)
  }
  std::sort(sorted.begin(), sorted.end());
  tr.col_ptr.assign(tr.n_r + 1, 0);
  tr.row.reserve(sorted.size());
  tr.cval.reserve(sorted.size());
  for (const auto& [key, c] : sorted) {
    ++tr.col_ptr[(key >> 32) + 1];
    tr.row.push_back(static_cast<std::uint32_t>(key & 0xffffffffu));
    tr.cval.push_back(c);
  }
  for (std::size_t r = 0; r < tr.n_r; ++r) tr.col_ptr[r + 1] += tr.col_ptr[r];

  return tr;
}

}  // namespace

TagResourceMatrix build_tag_resource_matrix(const Folksonomy& f) {
  if (f.assignments.empty()) {
    throw std::invalid_argument("empty folksonomy");
  }
  // Distinct users per (tag, resource): assignments are already unique
  // triples, so each assignment contributes exactly one to its cell.
  std::unordered_map<std::uint64_t, std::uint32_t> cells;
  cells.reserve(f.assignments.size());
  for (const auto& a : f.assignments) {
    ++cells[pack(a.tag, a.resource)];
  }
  return assemble_matrix(std::move(cells), f.n_tags(), f.n_resources());
}

TagResourceMatrix build_tag_resource_matrix(const std::vector<Bookmark>& bookmarks,
                                            std::uint32_t n_t, std::uint32_t n_r) {
  std::unordered_map<std::uint64_t, std::uint32_t> cells;
  for (const auto& b : bookmarks) {
    if (b.resource >= n_r) {
      throw std::out_of_range("bookmark resource index out of range");
    }
    for (const auto t : b.tag_set) {
      if (t >= n_t) {
        throw std::out_of_range("bookmark tag index out of range");
      }
      ++cells[pack(t, b.resource)];
    }
  }
  return assemble_matrix(std::move(cells), n_t, n_r);
}

std::vector<Bookmark> group_bookmarks(const Folksonomy& f) {
  if (f.assignments.empty()) {
    throw std::invalid_argument("empty folksonomy");
  }
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> groups;
  for (const auto& a : f.assignments) {
    groups[pack(a.user, a.resource)].push_back(a.tag);
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(groups.size());
  for (const auto& [key, tags] : groups) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  std::vector<Bookmark> bookmarks;
  bookmarks.reserve(keys.size());
  for (const auto key : keys) {
    Bookmark b;
    b.user = static_cast<std::uint32_t>(key >> 32);
    b.resource = static_cast<std::uint32_t>(key & 0xffffffffu);
    b.tag_set = groups[key];
    std::sort(b.tag_set.begin(), b.tag_set.end());
    bookmarks.push_back(std::move(b));
  }
  return bookmarks;
}

std::uint64_t tag_count(const TagResourceMatrix& tr, std::uint32_t t) {
  if (t >= tr.n_t) {
    throw std::out_of_range("tag index " + std::to_string(t) + " out of range");
  }
  std::uint64_t total = 0;
  for (std::size_t i = tr.row_ptr[t]; i < tr.row_ptr[t + 1]; ++i) total += tr.val[i];
  return total;
}

double inverse_resource_frequency(const TagResourceMatrix& tr, std::uint32_t t) {
  if (t >= tr.n_t) {
    throw std::out_of_range("tag index " + std::to_string(t) + " out of range");
  }
  const std::size_t df = tr.row_size(t);
  if (df == 0) {
    throw std::runtime_error("tag unused");
  }
  return std::log(static_cast<double>(tr.n_r) / static_cast<double>(df));
}

CorpusStats corpus_stats(const Folksonomy& f, const TagResourceMatrix& tr) {
  CorpusStats s;
  s.n_users = f.n_users();
  s.n_resources = f.n_resources();
  s.n_tags = f.n_tags();
  s.n_assignments = f.assignments.size();

  auto bucket = [](std::uint64_t v) { return v >= 5 ? 4 : static_cast<int>(v) - 1; };
  for (std::uint32_t r = 0; r < tr.n_r; ++r) {
    const auto distinct = tr.col_size(r);
    if (distinct > 0) ++s.distinct_tags_per_resource[static_cast<std::size_t>(bucket(distinct))];
  }
  for (std::uint32_t t = 0; t < tr.n_t; ++t) {
    const auto uses = tag_count(tr, t);
    if (uses > 0) ++s.uses_per_tag[static_cast<std::size_t>(bucket(uses))];
  }
  return s;
}

}  // namespace folksim
