#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "folksim/corpus.hpp"

namespace folksim::testutil {

inline Folksonomy corpus_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return ingest_assignments(in);
}

// Builds a matrix from (tag, resource, count) cells by synthesizing one
// bookmark per contributing user.
inline TagResourceMatrix tr_from_cells(
    const std::vector<std::array<std::uint32_t, 3>>& cells, std::uint32_t n_t,
    std::uint32_t n_r) {
  std::vector<Bookmark> bms;
  for (const auto& c : cells) {
    for (std::uint32_t u = 0; u < c[2]; ++u) {
      bms.push_back(Bookmark{u, c[1], {c[0]}});
    }
  }
  return build_tag_resource_matrix(bms, n_t, n_r);
}

// Runs f, returning the exception message or "" when nothing was thrown.
inline std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace folksim::testutil
