#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "folksim/baselines.hpp"
#include "folksim/corpus.hpp"
#include "folksim/dense.hpp"
#include "folksim/mrs.hpp"
#include "folksim/rng.hpp"
#include "test_util.hpp"

using namespace folksim;
using testutil::contains;
using testutil::thrown_message;
using testutil::tr_from_cells;

namespace {

// Rows [[1,1],[0,1]]: the worked two-tag example used throughout.
TagResourceMatrix two_by_two() {
  return tr_from_cells({{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}, 2, 2);
}

struct RandomInstance {
  TagResourceMatrix tr;
  double psi = 0.5;
};

// Sparse random instances mirroring the acceptance sweep, just smaller.
std::vector<RandomInstance> random_instances(int count, std::uint64_t seed,
                                             std::uint32_t max_t = 12,
                                             std::uint32_t max_r = 15) {
  const double psis[4] = {0.0, 0.3, 0.7, 1.0};
  std::vector<RandomInstance> out;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto n_t = 2 + static_cast<std::uint32_t>(rng.uniform_below(max_t - 1));
    const auto n_r = 2 + static_cast<std::uint32_t>(rng.uniform_below(max_r - 1));
    const double density = 0.05 + rng.next_double() * 0.15;
    std::vector<std::array<std::uint32_t, 3>> cells;
    for (std::uint32_t t = 0; t < n_t; ++t) {
      for (std::uint32_t r = 0; r < n_r; ++r) {
        if (rng.next_double() < density) {
          cells.push_back({t, r, 1 + static_cast<std::uint32_t>(rng.uniform_below(3))});
        }
      }
    }
    if (cells.empty()) cells.push_back({0, 0, 1});
    out.push_back({tr_from_cells(cells, n_t, n_r), psis[i % 4]});
  }
  return out;
}

}  // namespace

TEST_CASE("init_similarity is the identity") {
  const auto sm = init_similarity(3);
  CHECK(sm.size() == 3);
  CHECK(sm.at(0, 0) == 1.0);
  CHECK(sm.at(1, 1) == 1.0);
  CHECK(sm.at(0, 1) == 0.0);
  CHECK(init_similarity(1).at(0, 0) == 1.0);
  CHECK_THROWS_AS(init_similarity(0), std::invalid_argument);
}

TEST_CASE("first step reduces to cosine on the worked example") {
  const auto tr = two_by_two();
  const auto st0 = init_similarity(2);
  const auto sr0 = init_similarity(2);
  for (const double psi : {0.0, 0.5, 1.0}) {
    CAPTURE(psi);
    const auto step = mrs_step(tr, st0, sr0, psi);
    // From identity priors only diagonal terms survive, so the first
    // iterate is psi-independent.
    CHECK(step.st.at(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(step.sr.at(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("second step matches the direct-summation value") {
  const auto tr = two_by_two();
  const auto s1 = mrs_step(tr, init_similarity(2), init_similarity(2), 0.5);
  const auto s2 = mrs_step(tr, s1.st, s1.sr, 0.5);
  // Frozen from the independent per-entry oracle: the raw score is
  // 1.353553390593274 and the diagonal products are 2.707106781186548 and 1.
  CHECK(s2.st.at(0, 1) == doctest::Approx(0.822664388008036).epsilon(1e-12));
}

TEST_CASE("disjoint tags stay at identity") {
  const auto tr = tr_from_cells({{0, 0, 1}, {1, 1, 1}}, 2, 2);
  EngineConfig cfg;
  cfg.tau = 0.0;
  for (const int iters : {1, 2, 5}) {
    cfg.max_iters = iters;
    const auto res = compute_similarities(tr, cfg);
    CHECK(res.st.at(0, 1) == 0.0);
    CHECK(res.sr.at(0, 1) == 0.0);
    CHECK(res.st.at(0, 0) == 1.0);
  }
}

TEST_CASE("pairwise oracle basics") {
  const auto tr = two_by_two();
  const auto st0 = init_similarity(2);
  const auto sr0 = init_similarity(2);
  CHECK(pairwise_step_oracle(tr, st0, sr0, 0.5, 0, 0, PairKind::kTag) == 1.0);
  CHECK(pairwise_step_oracle(tr, st0, sr0, 0.5, 1, 1, PairKind::kResource) == 1.0);
  CHECK(pairwise_step_oracle(tr, st0, sr0, 0.5, 0, 1, PairKind::kTag) ==
        doctest::Approx(0.7071067811865475).epsilon(1e-12));
}

TEST_CASE("step agrees with the oracle on random instances") {
  for (const auto& [tr, psi] : random_instances(10, 91)) {
    CAPTURE(tr.n_t);
    CAPTURE(tr.n_r);
    CAPTURE(psi);
    auto st_prev = init_similarity(tr.n_t);
    auto sr_prev = init_similarity(tr.n_r);
    for (int k = 1; k <= 2; ++k) {
      const auto step = mrs_step(tr, st_prev, sr_prev, psi);
      for (std::uint32_t a = 0; a < tr.n_t; ++a) {
        for (std::uint32_t b = a; b < tr.n_t; ++b) {
          const double want = pairwise_step_oracle(tr, st_prev, sr_prev, psi, a, b,
                                                   PairKind::kTag);
          CHECK(step.st.at(a, b) == doctest::Approx(want).epsilon(1e-9));
        }
      }
      for (std::uint32_t a = 0; a < tr.n_r; ++a) {
        for (std::uint32_t b = a; b < tr.n_r; ++b) {
          const double want = pairwise_step_oracle(tr, st_prev, sr_prev, psi, a, b,
                                                   PairKind::kResource);
          CHECK(step.sr.at(a, b) == doctest::Approx(want).epsilon(1e-9));
        }
      }
      st_prev = step.st;
      sr_prev = step.sr;
    }
  }
}

TEST_CASE("psi zero reduces every iterate to plain cosine") {
  for (const auto& [tr, psi] : random_instances(6, 17)) {
    (void)psi;
    const auto cosine = cosine_similarity_matrix(tr);
    auto st_prev = init_similarity(tr.n_t);
    auto sr_prev = init_similarity(tr.n_r);
    for (int k = 1; k <= 3; ++k) {
      const auto step = mrs_step(tr, st_prev, sr_prev, 0.0);
      for (std::uint32_t a = 0; a < tr.n_t; ++a) {
        for (std::uint32_t b = a + 1; b < tr.n_t; ++b) {
          CHECK(step.st.at(a, b) == doctest::Approx(cosine.at(a, b)).epsilon(1e-9));
        }
      }
      st_prev = step.st;
      sr_prev = step.sr;
    }
  }
}

TEST_CASE("iterates keep symmetry, unit diagonal and the unit range") {
  for (const auto& [tr, psi] : random_instances(8, 29)) {
    auto st_prev = init_similarity(tr.n_t);
    auto sr_prev = init_similarity(tr.n_r);
    for (int k = 1; k <= 4; ++k) {
      const auto step = mrs_step(tr, st_prev, sr_prev, psi);
      for (std::uint32_t a = 0; a < tr.n_t; ++a) {
        CHECK(step.st.at(a, a) == 1.0);
        for (std::uint32_t b = a + 1; b < tr.n_t; ++b) {
          const double v = step.st.at(a, b);
          CHECK(v == step.st.at(b, a));
          CHECK(v >= -1e-12);
          CHECK(v <= 1.0 + 1e-12);
        }
      }
      st_prev = step.st;
      sr_prev = step.sr;
    }
  }
}

TEST_CASE("normalized iterates are not monotone in general") {
  // Rows [[3,1,1],[0,2,1],[3,0,0]] with psi 0.3: the (t0,t2) similarity
  // starts near parallel and then drops once resource structure mixes in.
  // The boundedness argument for convergence does not give entrywise
  // monotonicity of the normalized sequence, and this instance proves it.
  const auto tr = tr_from_cells(
      {{0, 0, 3}, {0, 1, 1}, {0, 2, 1}, {1, 1, 2}, {1, 2, 1}, {2, 0, 3}}, 3, 3);
  const auto s1 = mrs_step(tr, init_similarity(3), init_similarity(3), 0.3);
  const auto s2 = mrs_step(tr, s1.st, s1.sr, 0.3);
  CHECK(s1.st.at(0, 2) == doctest::Approx(0.904534034).epsilon(1e-8));
  CHECK(s2.st.at(0, 2) == doctest::Approx(0.898637621).epsilon(1e-8));
  CHECK(s2.st.at(0, 2) < s1.st.at(0, 2) - 1e-3);

  SUBCASE("the raw numerators do grow from the identity base case") {
    // sr1 dominates the identity entrywise, so every second-step raw
    // score dominates its first-step counterpart.
    for (std::uint32_t a = 0; a < 3; ++a) {
      for (std::uint32_t b = a + 1; b < 3; ++b) {
        const double raw1 = pairwise_raw_score(tr, init_similarity(3), init_similarity(3),
                                               0.3, a, b, PairKind::kTag);
        const double raw2 = pairwise_raw_score(tr, s1.st, s1.sr, 0.3, a, b, PairKind::kTag);
        CHECK(raw2 >= raw1 - 1e-12);
      }
    }
  }
}

TEST_CASE("raising psi never lowers a second-step raw score") {
  for (const auto& [tr, psi] : random_instances(6, 43)) {
    (void)psi;
    // First iterates are psi-independent, so both raw scores share priors.
    const auto s1 = mrs_step(tr, init_similarity(tr.n_t), init_similarity(tr.n_r), 0.3);
    for (std::uint32_t a = 0; a < tr.n_t; ++a) {
      for (std::uint32_t b = a + 1; b < tr.n_t; ++b) {
        const double low = pairwise_raw_score(tr, s1.st, s1.sr, 0.3, a, b, PairKind::kTag);
        const double high = pairwise_raw_score(tr, s1.st, s1.sr, 0.7, a, b, PairKind::kTag);
        CHECK(high >= low - 1e-12);
      }
    }
  }
}

TEST_CASE("convergence delta") {
  SimilarityMatrix a(2), b(2);
  CHECK(convergence_delta(a, b) == 0.0);
  b.set(0, 1, 0.5);
  CHECK(convergence_delta(b, a) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  SUBCASE("dense overload accepts non-unit diagonals") {
    const auto curr = Dense::identity(2);
    Dense prev(2, 2, 0.0);
    prev.at(0, 0) = 0.5;
    prev.at(1, 1) = 0.5;
    CHECK(convergence_delta(curr, prev) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS((void)convergence_delta(SimilarityMatrix(2), SimilarityMatrix(3)),
                    std::invalid_argument);
  }
  SUBCASE("induced norm uses the worst column") {
    Dense curr(2, 2, 0.0);
    curr.at(0, 0) = 1.0;
    curr.at(1, 1) = 1.0;
    curr.at(0, 1) = 1.0;  // column sums 1 and 2
    const Dense prev(2, 2, 0.0);
    CHECK(convergence_delta(curr, prev, DeltaNorm::kInduced) == doctest::Approx(1.0));
  }
}

TEST_CASE("config validation") {
  EngineConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.psi = 1.5;
  CHECK(contains(thrown_message([&] { validate(cfg); }), "[0, 1]"));
  cfg.psi = 0.5;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.epsilon = 0.1;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.max_iters = 30;
  cfg.tau = 1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("full iteration flow") {
  SUBCASE("identity input converges immediately") {
    const auto tr = tr_from_cells({{0, 0, 1}, {1, 1, 1}}, 2, 2);
    const auto res = compute_similarities(tr, EngineConfig{});
    CHECK(res.trace.converged);
    CHECK(res.trace.iterations_run == 1);
    CHECK(res.trace.entries[0].delta_t == 0.0);
    CHECK(res.st.stored() == 0);
  }
  SUBCASE("psi zero converges by the second step") {
    for (const auto& [tr, psi] : random_instances(4, 57)) {
      (void)psi;
      EngineConfig cfg;
      cfg.psi = 0.0;
      cfg.tau = 0.0;
      cfg.epsilon = 1e-9;  // tight enough that only an exact fixpoint stops k=1
      const auto res = compute_similarities(tr, cfg);
      CHECK(res.trace.converged);
      CHECK(res.trace.iterations_run <= 2);
      const auto& last = res.trace.entries.back();
      CHECK(last.delta_t <= 1e-12);
      CHECK(last.delta_r <= 1e-12);
    }
  }
  SUBCASE("unconverged runs are flagged, not failed") {
    const auto tr = two_by_two();
    EngineConfig cfg;
    cfg.epsilon = 1e-12;
    cfg.max_iters = 3;
    const auto res = compute_similarities(tr, cfg);
    CHECK_FALSE(res.trace.converged);
    CHECK(res.trace.iterations_run == 3);
    CHECK(res.trace.entries.size() == 3);
  }
  SUBCASE("size limit guards the dense iteration") {
    const auto tr = two_by_two();
    EngineConfig cfg;
    cfg.size_limit = 1;
    const auto msg = thrown_message([&] { (void)compute_similarities(tr, cfg); });
    CHECK(contains(msg, "size_limit"));
  }
  SUBCASE("final matrices are sparsified by tau") {
    const auto tr = two_by_two();
    EngineConfig cfg;
    cfg.tau = 0.9;  // aggressive floor keeps only near-1 entries
    const auto res = compute_similarities(tr, cfg);
    CHECK(res.st.at(0, 1) == 0.0);
    CHECK(res.st.at(0, 0) == 1.0);
  }
}

TEST_CASE("all-zero rows keep identity similarities and are reported") {
  // Tag 2 never labels anything; resource 2 is never labeled.
  const auto tr = tr_from_cells({{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}, 3, 3);
  const auto res = compute_similarities(tr, EngineConfig{});
  REQUIRE(res.zero_tags == std::vector<std::uint32_t>{2});
  REQUIRE(res.zero_resources == std::vector<std::uint32_t>{2});
  CHECK(res.st.at(2, 2) == 1.0);
  CHECK(res.st.at(0, 2) == 0.0);
  CHECK(res.st.at(1, 2) == 0.0);
  CHECK(std::isfinite(res.st.at(0, 1)));
}

TEST_CASE("results are independent of the thread count") {
  for (const auto& [tr, psi] : random_instances(4, 71, 20, 25)) {
    EngineConfig cfg;
    cfg.psi = psi;
    cfg.tau = 0.0;
    const auto lone = compute_similarities(tr, cfg, 1);
    const auto four = compute_similarities(tr, cfg, 4);
    CHECK(lone.st.sorted_entries() == four.st.sorted_entries());
    CHECK(lone.sr.sorted_entries() == four.sr.sorted_entries());
    CHECK(lone.trace.iterations_run == four.trace.iterations_run);
  }
}
