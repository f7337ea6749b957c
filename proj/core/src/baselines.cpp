#include "folksim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "folksim/dense.hpp"
#include "folksim/rng.hpp"

namespace folksim {
namespace {

// Sparse dot of two CSR rows (column-sorted) by two-pointer merge.
double row_dot(const TagResourceMatrix& tr, std::uint32_t a, std::uint32_t b) {
  std::size_t i = tr.row_ptr[a], j = tr.row_ptr[b];
  const std::size_t ie = tr.row_ptr[a + 1], je = tr.row_ptr[b + 1];
  double acc = 0.0;
  while (i < ie && j < je) {
    if (tr.col[i] < tr.col[j]) {
      ++i;
    } else if (tr.col[i] > tr.col[j]) {
      ++j;
    } else {
      acc += static_cast<double>(tr.val[i]) * static_cast<double>(tr.val[j]);
      ++i;
      ++j;
    }
  }
  return acc;
}

// OUT = B * M * B^T over the binary support of the adjacency rows.
Dense support_sandwich(const std::vector<std::size_t>& ptr,
                       const std::vector<std::uint32_t>& idx,
                       std::size_t n_rows, const Dense& m) {
  const std::size_t inner = m.rows();
  Dense out(n_rows, n_rows, 0.0);
  std::vector<double> tmp(inner);
  for (std::size_t a = 0; a < n_rows; ++a) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t e = ptr[a]; e < ptr[a + 1]; ++e) {
      const double* mrow = m.row(idx[e]);
      for (std::size_t j = 0; j < inner; ++j) tmp[j] += mrow[j];
    }
    double* orow = out.row(a);
    for (std::size_t b = a; b < n_rows; ++b) {
      double acc = 0.0;
      for (std::size_t e = ptr[b]; e < ptr[b + 1]; ++e) acc += tmp[idx[e]];
      orow[b] = acc;
    }
  }
  for (std::size_t a = 0; a < n_rows; ++a) {
    for (std::size_t b = a + 1; b < n_rows; ++b) out.at(b, a) = out.at(a, b);
  }
  return out;
}

Dense simrank_side(const std::vector<std::size_t>& ptr,
                   const std::vector<std::uint32_t>& idx, std::size_t n_rows,
                   const Dense& m, double c) {
  Dense raw = support_sandwich(ptr, idx, n_rows, m);
  Dense next(n_rows, n_rows, 0.0);
  for (std::size_t a = 0; a < n_rows; ++a) {
    const auto deg_a = static_cast<double>(ptr[a + 1] - ptr[a]);
    for (std::size_t b = a + 1; b < n_rows; ++b) {
      const auto deg_b = static_cast<double>(ptr[b + 1] - ptr[b]);
      if (deg_a > 0.0 && deg_b > 0.0) {
        const double v = c * raw.at(a, b) / (deg_a * deg_b);
        next.at(a, b) = v;
        next.at(b, a) = v;
      }
    }
    next.at(a, a) = 1.0;
  }
  return next;
}

SimilarityMatrix dense_to_similarity(const Dense& d) {
  const auto n = static_cast<std::uint32_t>(d.rows());
  SimilarityMatrix sm(n);
  for (std::uint32_t a = 0; a + 1 < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double v = d.at(a, b);
      if (v != 0.0) sm.set(a, b, v);
    }
  }
  return sm;
}

// Modified Gram-Schmidt with a second pass; near-dependent columns zero
// out and drop from the basis.
void orthonormalize(Dense& x) {
  const std::size_t n = x.rows(), k = x.cols();
  for (std::size_t c = 0; c < k; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += x.at(i, p) * x.at(i, c);
        for (std::size_t i = 0; i < n; ++i) x.at(i, c) -= proj * x.at(i, p);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += x.at(i, c) * x.at(i, c);
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      for (std::size_t i = 0; i < n; ++i) x.at(i, c) = 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) x.at(i, c) /= norm;
    }
  }
}

}  // namespace

SimilarityMatrix cosine_similarity_matrix(const TagResourceMatrix& tr) {
  SimilarityMatrix sm(tr.n_t);
  std::vector<double> norms(tr.n_t, 0.0);
  for (std::uint32_t t = 0; t < tr.n_t; ++t) {
    norms[t] = std::sqrt(row_dot(tr, t, t));
  }
  for (std::uint32_t a = 0; a + 1 < tr.n_t; ++a) {
    if (norms[a] == 0.0) continue;
    for (std::uint32_t b = a + 1; b < tr.n_t; ++b) {
      if (norms[b] == 0.0) continue;
      const double dot = row_dot(tr, a, b);
      if (dot != 0.0) sm.set(a, b, dot / (norms[a] * norms[b]));
    }
  }
  return sm;
}

std::pair<SimilarityMatrix, SimilarityMatrix> simrank_compute(
    const TagResourceMatrix& tr, const SimRankConfig& cfg) {
  if (cfg.c1 < 0.0 || cfg.c1 > 1.0 || cfg.c2 < 0.0 || cfg.c2 > 1.0) {
    throw std::invalid_argument("SimRank constants must lie in [0, 1]");
  }
  if (cfg.iterations < 1) {
    throw std::invalid_argument("SimRank needs at least one iteration");
  }
  Dense st = Dense::identity(tr.n_t);
  Dense sr = Dense::identity(tr.n_r);
  for (int it = 0; it < cfg.iterations; ++it) {
    Dense st_next = simrank_side(tr.row_ptr, tr.col, tr.n_t, sr, cfg.c1);
    Dense sr_next = simrank_side(tr.col_ptr, tr.row, tr.n_r, st, cfg.c2);
    st = std::move(st_next);
    sr = std::move(sr_next);
  }
  return {dense_to_similarity(st), dense_to_similarity(sr)};
}

SimilarityMatrix lsi_similarity_matrix(const TagResourceMatrix& tr,
                                       const LsiConfig& cfg) {
  const std::uint32_t n = tr.n_t;
  const auto max_k = std::min(tr.n_t, tr.n_r);
  if (cfg.k < 1 || static_cast<std::uint32_t>(cfg.k) > max_k) {
    throw std::invalid_argument("latent dimension k must lie in [1, min(n_t, n_r)]");
  }
  if (cfg.power_iterations < 1) {
    throw std::invalid_argument("power_iterations must be at least 1");
  }
  const auto k = static_cast<std::size_t>(cfg.k);

  // Gram matrix TR * TR^T accumulated per resource column.
  Dense gram(n, n, 0.0);
  for (std::uint32_t r = 0; r < tr.n_r; ++r) {
    for (std::size_t e = tr.col_ptr[r]; e < tr.col_ptr[r + 1]; ++e) {
      for (std::size_t g = e; g < tr.col_ptr[r + 1]; ++g) {
        const double v = static_cast<double>(tr.cval[e]) * static_cast<double>(tr.cval[g]);
        gram.at(tr.row[e], tr.row[g]) += v;
        if (e != g) gram.at(tr.row[g], tr.row[e]) += v;
      }
    }
  }

  auto multiply = [&](const Dense& x) {
    Dense y(n, k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* grow = gram.row(i);
      double* yrow = y.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double g = grow[j];
        if (g == 0.0) continue;
        const double* xrow = x.row(j);
        for (std::size_t c = 0; c < k; ++c) yrow[c] += g * xrow[c];
      }
    }
    return y;
  };

  Rng rng(cfg.seed);
  Dense q(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) q.at(i, c) = rng.gaussian();
  }
  orthonormalize(q);
  for (int p = 0; p < cfg.power_iterations; ++p) {
    q = multiply(q);
    orthonormalize(q);
  }

  // Latent similarities: S = Q (Q^T G Q) Q^T restricted to the dominant
  // subspace; basis rotation cancels, so no eigen-decomposition is needed.
  const Dense t = multiply(q);
  Dense h(k, k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += q.at(i, c) * t.at(i, d);
      h.at(c, d) = acc;
    }
  }
  Dense z(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < k; ++d) {
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) acc += q.at(i, c) * h.at(c, d);
      z.at(i, d) = acc;
    }
  }

  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < k; ++c) acc += z.at(i, c) * q.at(i, c);
    diag[i] = acc;
  }

  SimilarityMatrix sm(n);
  for (std::uint32_t a = 0; a + 1 < n; ++a) {
    if (diag[a] <= 1e-12) continue;
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (diag[b] <= 1e-12) continue;
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) acc += z.at(a, c) * q.at(b, c);
      const double v = std::clamp(acc / std::sqrt(diag[a] * diag[b]), 0.0, 1.0);
      if (v != 0.0) sm.set(a, b, v);
    }
  }
  return sm;
}

}  // namespace folksim
