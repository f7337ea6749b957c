#include "folksim/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace folksim {
namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

SimilarityMatrix SimilarityMatrix::identity(std::uint32_t n) {
  if (n == 0) {
    throw std::invalid_argument("similarity matrix dimension must be positive");
  }
  return SimilarityMatrix(n);
}

double SimilarityMatrix::at(std::uint32_t a, std::uint32_t b) const {
  if (a >= n_ || b >= n_) {
    throw std::out_of_range("similarity index out of range");
  }
  if (a == b) return 1.0;
  const auto it = entries_.find(pair_key(a, b));
  return it == entries_.end() ? 0.0 : it->second;
}

void SimilarityMatrix::set(std::uint32_t a, std::uint32_t b, double value) {
  if (a >= n_ || b >= n_) {
    throw std::out_of_range("similarity index out of range");
  }
  if (a == b) {
    throw std::invalid_argument("diagonal entries are fixed at 1");
  }
  if (value == 0.0) {
    entries_.erase(pair_key(a, b));
  } else {
    entries_[pair_key(a, b)] = value;
  }
}

void SimilarityMatrix::sparsify(double tau) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second < tau) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>
SimilarityMatrix::sorted_entries() const {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
  out.reserve(entries_.size());
  for (const auto& [key, v] : entries_) {
    out.emplace_back(static_cast<std::uint32_t>(key >> 32),
                     static_cast<std::uint32_t>(key & 0xffffffffu), v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_similarity(const SimilarityMatrix& sm, std::ostream& out,
                      const std::vector<std::pair<std::string, std::string>>& header) {
  out << "# n: " << sm.size() << '\n';
  for (const auto& [key, value] : header) {
    out << "# " << key << ": " << value << '\n';
  }
  for (const auto& [a, b, v] : sm.sorted_entries()) {
    out << a << '\t' << b << '\t' << format_score(v) << '\n';
  }
}

LoadedSimilarity read_similarity(std::istream& in) {
  LoadedSimilarity loaded;
  std::string line;
  std::size_t line_no = 0;
  bool have_n = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      const auto strip = [](std::string& s) {
        const auto b = s.find_first_not_of(' ');
        const auto e = s.find_last_not_of(' ');
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
      };
      strip(key);
      strip(value);
      loaded.header[key] = value;
      if (key == "n") {
        loaded.matrix = SimilarityMatrix(
            static_cast<std::uint32_t>(std::stoul(value)));
        have_n = true;
      }
      continue;
    }
    if (!have_n) {
      throw std::runtime_error("similarity file lacks '# n:' header before data");
    }
    std::uint32_t a = 0, b = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%u\t%u\t%lf", &a, &b, &v) != 3) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 'a<TAB>b<TAB>score'");
    }
    loaded.matrix.set(a, b, v);
  }
  if (!have_n) {
    throw std::runtime_error("similarity file lacks '# n:' header");
  }
  return loaded;
}

}  // namespace folksim
