#include "folksim/mrs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "folksim/dense.hpp"

namespace folksim {
namespace {

Dense to_dense(const SimilarityMatrix& sm) {
  const std::uint32_t n = sm.size();
  Dense d(n, n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) d.at(i, i) = 1.0;
  for (const auto& [key, v] : sm.raw()) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    d.at(a, b) = v;
    d.at(b, a) = v;
  }
  return d;
}

SimilarityMatrix from_dense(const Dense& d) {
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

// Raw sandwich product OUT = W (Psi o M) W^T over the weighted adjacency
// rows in (ptr, idx, w): OUT[a][b] = sum_i sum_j w_a(i) w_b(j) Psi(i,j) M[i,j]
// with Psi(i,j) = 1 when i == j and psi otherwise. Only b >= a is computed;
// the caller sees the full mirrored matrix. Each output row is produced by
// exactly one thread with a fixed reduction order, so results do not depend
// on the thread count.
Dense sandwich(const std::vector<std::size_t>& ptr,
               const std::vector<std::uint32_t>& idx,
               const std::vector<double>& w, std::size_t n_rows,
               const Dense& m, double psi, int threads) {
  Dense out(n_rows, n_rows, 0.0);
  const std::size_t inner = m.rows();

  auto worker = [&](std::size_t tid, std::size_t stride) {
    std::vector<double> tmp(inner);
    for (std::size_t a = tid; a < n_rows; a += stride) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      for (std::size_t e = ptr[a]; e < ptr[a + 1]; ++e) {
        const double wa = w[e];
        const double* mrow = m.row(idx[e]);
        for (std::size_t j = 0; j < inner; ++j) tmp[j] += wa * mrow[j];
      }
      for (std::size_t j = 0; j < inner; ++j) tmp[j] *= psi;
      for (std::size_t e = ptr[a]; e < ptr[a + 1]; ++e) {
        const std::uint32_t i = idx[e];
        tmp[i] += w[e] * (1.0 - psi) * m.at(i, i);
      }
      double* orow = out.row(a);
      for (std::size_t b = a; b < n_rows; ++b) {
        double acc = 0.0;
        for (std::size_t e = ptr[b]; e < ptr[b + 1]; ++e) {
          acc += w[e] * tmp[idx[e]];
        }
        orow[b] = acc;
      }
    }
  };

  const auto n_workers = static_cast<std::size_t>(std::max(threads, 1));
  if (n_workers == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) {
      pool.emplace_back(worker, t, n_workers);
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t a = 0; a < n_rows; ++a) {
    for (std::size_t b = a + 1; b < n_rows; ++b) {
      out.at(b, a) = out.at(a, b);
    }
  }
  return out;
}

// Normalizes the raw matrix in place: entry(a,b) / sqrt(diag_a * diag_b).
// Indices with zero diagonal (all-zero adjacency rows) fall back to
// identity and are reported.
std::vector<std::uint32_t> normalize(Dense& raw) {
  const std::size_t n = raw.rows();
  std::vector<std::uint32_t> zero;
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const double d = raw.at(a, a);
    if (d > 0.0) {
      inv_sqrt[a] = 1.0 / std::sqrt(d);
    } else {
      zero.push_back(static_cast<std::uint32_t>(a));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    double* row = raw.row(a);
    const double ia = inv_sqrt[a];
    for (std::size_t b = 0; b < n; ++b) {
      row[b] = ia == 0.0 || inv_sqrt[b] == 0.0 ? 0.0 : row[b] * ia * inv_sqrt[b];
    }
    row[a] = 1.0;
  }
  return zero;
}

double dense_delta(const Dense& curr, const Dense& prev, DeltaNorm norm) {
  const std::size_t n = curr.rows();
  if (norm == DeltaNorm::kEntrywise) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
      num += std::abs(curr.data()[i] - prev.data()[i]);
      den += std::abs(curr.data()[i]);
    }
    return num / den;
  }
  // Induced 1-norm: maximum absolute column sum.
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double cd = 0.0, cc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cd += std::abs(curr.at(i, j) - prev.at(i, j));
      cc += std::abs(curr.at(i, j));
    }
    num = std::max(num, cd);
    den = std::max(den, cc);
  }
  return num / den;
}

SimilarityMatrix from_dense_sparsified(const Dense& d, double tau) {
  const auto n = static_cast<std::uint32_t>(d.rows());
  SimilarityMatrix sm(n);
  for (std::uint32_t a = 0; a + 1 < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double v = d.at(a, b);
      if (v != 0.0 && v >= tau) sm.set(a, b, v);
    }
  }
  return sm;
}

struct DenseStep {
  Dense st;
  Dense sr;
  std::vector<std::uint32_t> zero_tags;
  std::vector<std::uint32_t> zero_resources;
};

DenseStep dense_step(const TagResourceMatrix& tr,
                     const std::vector<double>& row_w,
                     const std::vector<double>& col_w, const Dense& st_prev,
                     const Dense& sr_prev, double psi, int threads) {
  DenseStep step;
  step.st = sandwich(tr.row_ptr, tr.col, row_w, tr.n_t, sr_prev, psi, threads);
  step.sr = sandwich(tr.col_ptr, tr.row, col_w, tr.n_r, st_prev, psi, threads);
  step.zero_tags = normalize(step.st);
  step.zero_resources = normalize(step.sr);
  return step;
}

std::vector<double> as_double(const std::vector<std::uint32_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

void validate(const EngineConfig& cfg) {
  if (cfg.psi < 0.0 || cfg.psi > 1.0) {
    throw std::invalid_argument("psi must lie in [0, 1]");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (cfg.max_iters < 1) {
    throw std::invalid_argument("max_iters must be at least 1");
  }
  if (cfg.tau < 0.0 || cfg.tau >= 1.0) {
    throw std::invalid_argument("tau must lie in [0, 1)");
  }
}

SimilarityMatrix init_similarity(std::uint32_t n) {
  return SimilarityMatrix::identity(n);
}

StepResult mrs_step(const TagResourceMatrix& tr, const SimilarityMatrix& st_prev,
                    const SimilarityMatrix& sr_prev, double psi, int threads) {
  if (st_prev.size() != tr.n_t || sr_prev.size() != tr.n_r) {
    throw std::invalid_argument("similarity dimensions do not match the matrix");
  }
  if (psi < 0.0 || psi > 1.0) {
    throw std::invalid_argument("psi must lie in [0, 1]");
  }
  const auto step = dense_step(tr, as_double(tr.val), as_double(tr.cval),
                               to_dense(st_prev), to_dense(sr_prev), psi, threads);
  StepResult result;
  result.st = from_dense(step.st);
  result.sr = from_dense(step.sr);
  result.zero_tags = step.zero_tags;
  result.zero_resources = step.zero_resources;
  return result;
}

double pairwise_raw_score(const TagResourceMatrix& tr,
                          const SimilarityMatrix& st_prev,
                          const SimilarityMatrix& sr_prev, double psi,
                          std::uint32_t a, std::uint32_t b, PairKind kind) {
  // Direct weighted sum over all index pairs; terms with a zero count
  // vanish, so iterating stored entries is the same sum.
  double num = 0.0;
  if (kind == PairKind::kTag) {
    for (std::size_t e = tr.row_ptr[a]; e < tr.row_ptr[a + 1]; ++e) {
      for (std::size_t g = tr.row_ptr[b]; g < tr.row_ptr[b + 1]; ++g) {
        const std::uint32_t i = tr.col[e], j = tr.col[g];
        const double factor = i == j ? 1.0 : psi;
        num += static_cast<double>(tr.val[e]) * static_cast<double>(tr.val[g]) *
               factor * sr_prev.at(i, j);
      }
    }
  } else {
    for (std::size_t e = tr.col_ptr[a]; e < tr.col_ptr[a + 1]; ++e) {
      for (std::size_t g = tr.col_ptr[b]; g < tr.col_ptr[b + 1]; ++g) {
        const std::uint32_t i = tr.row[e], j = tr.row[g];
        const double factor = i == j ? 1.0 : psi;
        num += static_cast<double>(tr.cval[e]) * static_cast<double>(tr.cval[g]) *
               factor * st_prev.at(i, j);
      }
    }
  }
  return num;
}

double pairwise_step_oracle(const TagResourceMatrix& tr,
                            const SimilarityMatrix& st_prev,
                            const SimilarityMatrix& sr_prev, double psi,
                            std::uint32_t a, std::uint32_t b, PairKind kind) {
  const std::uint32_t n = kind == PairKind::kTag ? tr.n_t : tr.n_r;
  if (a >= n || b >= n) {
    throw std::out_of_range("pair index out of range");
  }
  const double da = pairwise_raw_score(tr, st_prev, sr_prev, psi, a, a, kind);
  const double db = pairwise_raw_score(tr, st_prev, sr_prev, psi, b, b, kind);
  if (da <= 0.0 || db <= 0.0) {
    return a == b ? 1.0 : 0.0;  // zero row/column keeps identity
  }
  if (a == b) return 1.0;
  const double num = pairwise_raw_score(tr, st_prev, sr_prev, psi, a, b, kind);
  return num / std::sqrt(da * db);
}

double convergence_delta(const SimilarityMatrix& curr, const SimilarityMatrix& prev,
                         DeltaNorm norm) {
  if (curr.size() != prev.size()) {
    throw std::invalid_argument("dimension mismatch");
  }
  return dense_delta(to_dense(curr), to_dense(prev), norm);
}

double convergence_delta(const Dense& curr, const Dense& prev, DeltaNorm norm) {
  if (curr.rows() != prev.rows() || curr.cols() != prev.cols()) {
    throw std::invalid_argument("dimension mismatch");
  }
  return dense_delta(curr, prev, norm);
}

EngineResult compute_similarities(const TagResourceMatrix& tr, const EngineConfig& cfg,
                                  int threads) {
  validate(cfg);
  const std::uint32_t extent = std::max(tr.n_t, tr.n_r);
  if (extent > cfg.size_limit) {
    throw std::runtime_error(
        "matrix extent " + std::to_string(extent) + " exceeds size_limit " +
        std::to_string(cfg.size_limit) +
        "; reduce the corpus or raise --size-limit");
  }

  const auto row_w = as_double(tr.val);
  const auto col_w = as_double(tr.cval);
  Dense st_prev = Dense::identity(tr.n_t);
  Dense sr_prev = Dense::identity(tr.n_r);

  EngineResult result;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    auto step = dense_step(tr, row_w, col_w, st_prev, sr_prev, cfg.psi, threads);
    TraceEntry entry;
    entry.k = k;
    entry.delta_t = dense_delta(step.st, st_prev, cfg.delta_norm);
    entry.delta_r = dense_delta(step.sr, sr_prev, cfg.delta_norm);
    result.trace.entries.push_back(entry);
    result.zero_tags = std::move(step.zero_tags);
    result.zero_resources = std::move(step.zero_resources);
    st_prev = std::move(step.st);
    sr_prev = std::move(step.sr);
    if (entry.delta_t < cfg.epsilon && entry.delta_r < cfg.epsilon) {
      result.trace.converged = true;
      break;
    }
  }
  result.trace.iterations_run = static_cast<int>(result.trace.entries.size());
  result.st = from_dense_sparsified(st_prev, cfg.tau);
  result.sr = from_dense_sparsified(sr_prev, cfg.tau);
  return result;
}

}  // namespace folksim
