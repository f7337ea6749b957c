#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "folksim/corpus.hpp"
#include "folksim/expand.hpp"
#include "folksim/similarity.hpp"
#include "test_util.hpp"

using namespace folksim;
using testutil::contains;
using testutil::thrown_message;
using testutil::tr_from_cells;

namespace {

// Three tags over four resources; tag 0 has count 4 across two resources,
// tag 1 is a singleton, tag 2 is unused.
TagResourceMatrix scoring_fixture() {
  return tr_from_cells({{0, 0, 2}, {0, 1, 2}, {1, 2, 1}}, 3, 4);
}

SimilarityMatrix scoring_similarities() {
  SimilarityMatrix st(3);
  st.set(0, 1, 0.5);
  st.set(0, 2, 0.9);
  return st;
}

// "ml" (0) and "machine-learning" (1) co-label two resources with healthy
// counts; "java" (2) lives elsewhere; tag 3 pads the vocabulary.
TagResourceMatrix colabel_fixture() {
  return tr_from_cells({{0, 0, 2}, {0, 1, 2}, {1, 0, 2}, {1, 1, 2},
                        {2, 2, 3}, {3, 3, 2}},
                       4, 4);
}

SimilarityMatrix colabel_similarities() {
  SimilarityMatrix st(4);
  st.set(0, 1, 0.9);
  st.set(0, 2, 0.1);
  st.set(0, 3, 0.1);
  return st;
}

}  // namespace

TEST_CASE("expansion size rule") {
  CHECK(expansion_size(1) == 3);
  CHECK(expansion_size(6) == 3);
  CHECK(expansion_size(7) == 4);
  CHECK(expansion_size(13) == 7);
  for (std::size_t n = 1; n <= 20; ++n) {
    const int want = n > 6 ? static_cast<int>((n + 1) / 2) : 3;
    CHECK(expansion_size(n) == want);
  }
  CHECK_THROWS_AS(expansion_size(0), std::invalid_argument);
}

TEST_CASE("pair score") {
  const auto tr = scoring_fixture();
  const auto st = scoring_similarities();
  SUBCASE("formula on a hand instance") {
    // st 0.5, count 4, IRF ln(4/2): 0.5 * ln 4 * ln 2.
    CHECK(pair_score(0, 1, st, tr) ==
          doctest::Approx(0.4804530139182014).epsilon(1e-12));
  }
  SUBCASE("zero similarity kills the score") {
    SimilarityMatrix cold(3);
    CHECK(pair_score(0, 1, cold, tr) == 0.0);
  }
  SUBCASE("singletons score zero through ln(1)") {
    CHECK(pair_score(1, 0, st, tr) == 0.0);
  }
  SUBCASE("unused tags score zero even when similar") {
    CHECK(pair_score(2, 0, st, tr) == 0.0);
  }
  SUBCASE("out-of-range tag throws") {
    CHECK_THROWS_AS((void)pair_score(9, 0, st, tr), std::out_of_range);
  }
}

TEST_CASE("total score") {
  const auto tr = colabel_fixture();
  const auto st = colabel_similarities();
  SUBCASE("single-member set equals the pair score") {
    CHECK(total_score(1, {0}, st, tr) == pair_score(1, 0, st, tr));
  }
  SUBCASE("sums over the set") {
    const double want = pair_score(0, 1, st, tr) + pair_score(0, 2, st, tr);
    CHECK(total_score(0, {1, 2}, st, tr) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("order and duplicates do not matter") {
    CHECK(total_score(0, {1, 2}, st, tr) == total_score(0, {2, 1}, st, tr));
    CHECK(total_score(0, {1, 1}, st, tr) == total_score(0, {1}, st, tr));
  }
  SUBCASE("dissimilar to the whole set scores zero") {
    CHECK(total_score(3, {1, 2}, st, tr) == 0.0);
  }
  SUBCASE("empty set throws") {
    CHECK_THROWS_AS((void)total_score(0, {}, st, tr), std::invalid_argument);
  }
}

TEST_CASE("tag set expansion") {
  const auto tr = colabel_fixture();
  const auto st = colabel_similarities();
  SUBCASE("constant co-labeler is ranked first") {
    const auto res = expand_tag_set({0}, st, tr);
    CHECK(res.k_used == 3);
    REQUIRE(!res.added.empty());
    CHECK(res.added[0].first == 1);
    CHECK(res.added[0].second > 0.0);
    // Exhaustive check: nothing outside the query scores higher.
    for (std::uint32_t t = 0; t < tr.n_t; ++t) {
      if (t == 0) continue;
      CHECK(res.added[0].second >= total_score(t, {0}, st, tr));
    }
  }
  SUBCASE("query covering every tag has no candidates") {
    CHECK(expand_tag_set({0, 1, 2, 3}, st, tr).added.empty());
  }
  SUBCASE("identity similarities leave nothing to add") {
    CHECK(expand_tag_set({0}, SimilarityMatrix(4), tr).added.empty());
  }
  SUBCASE("unknown tag is named") {
    CHECK(contains(thrown_message([&] { (void)expand_tag_set({9}, st, tr); }),
                   "unknown tag index 9"));
  }
  SUBCASE("k override caps the list") {
    const auto res = expand_tag_set({0}, st, tr, 1);
    CHECK(res.k_used == 1);
    CHECK(res.added.size() <= 1);
    CHECK(expand_tag_set({0}, st, tr, 0).added.empty());
  }
  SUBCASE("equal scores break ties by ascending index") {
    // Tags 1 and 2 get identical weights (same counts, same df) and the
    // same similarity to the query tag.
    const auto even = tr_from_cells({{0, 0, 2}, {1, 1, 2}, {2, 2, 2}}, 3, 3);
    SimilarityMatrix flat(3);
    flat.set(0, 1, 0.4);
    flat.set(0, 2, 0.4);
    const auto res = expand_tag_set({0}, flat, even);
    REQUIRE(res.added.size() == 2);
    CHECK(res.added[0].first == 1);
    CHECK(res.added[1].first == 2);
    CHECK(res.added[0].second == res.added[1].second);
  }
  SUBCASE("scores come out sorted and positive") {
    const auto res = expand_tag_set({0}, st, tr);
    for (std::size_t i = 0; i + 1 < res.added.size(); ++i) {
      CHECK(res.added[i].second >= res.added[i + 1].second);
    }
    for (const auto& [t, score] : res.added) {
      CHECK(score > 0.0);
    }
  }
  SUBCASE("identical calls agree exactly") {
    const auto a = expand_tag_set({0, 2}, st, tr);
    const auto b = expand_tag_set({0, 2}, st, tr);
    CHECK(a.original == b.original);
    CHECK(a.added == b.added);
    CHECK(a.k_used == b.k_used);
  }
}

TEST_CASE("bookmark enrichment") {
  const auto tr = colabel_fixture();
  const auto st = colabel_similarities();
  SUBCASE("tags are added by union, order of bookmarks preserved") {
    const std::vector<Bookmark> input = {
        {0, 0, {0}},
        {1, 2, {2}},
    };
    const auto out = enrich_bookmarks(input, st, tr);
    REQUIRE(out.size() == 2);
    CHECK(out[0].user == 0);
    CHECK(out[0].resource == 0);
    CHECK(out[1].user == 1);
    CHECK(out[1].resource == 2);
    // Query {0} gains its positive-score candidates (1, 2, 3 all score > 0).
    CHECK(out[0].tag_set == std::vector<std::uint32_t>{0, 1, 2, 3});
    // Query {2} only sees tag 0 (tags 1 and 3 have similarity 0 to it).
    CHECK(out[1].tag_set == std::vector<std::uint32_t>{0, 2});
  }
  SUBCASE("grows by at most the expansion size and never removes") {
    const std::vector<Bookmark> input = {{0, 0, {0, 1}}};
    const auto out = enrich_bookmarks(input, st, tr);
    REQUIRE(out.size() == 1);
    CHECK(out[0].tag_set.size() <= 2 + 3);
    for (const auto t : input[0].tag_set) {
      CHECK(std::count(out[0].tag_set.begin(), out[0].tag_set.end(), t) == 1);
    }
    // Sorted and duplicate-free.
    CHECK(std::is_sorted(out[0].tag_set.begin(), out[0].tag_set.end()));
    CHECK(std::adjacent_find(out[0].tag_set.begin(), out[0].tag_set.end()) ==
          out[0].tag_set.end());
  }
  SUBCASE("identity similarities are a no-op") {
    const std::vector<Bookmark> input = {{0, 0, {0}}, {2, 1, {1, 0}}};
    const auto out = enrich_bookmarks(input, SimilarityMatrix(4), tr);
    REQUIRE(out.size() == 2);
    CHECK(out[0].tag_set == std::vector<std::uint32_t>{0});
    CHECK(out[1].tag_set == std::vector<std::uint32_t>{0, 1});
  }
  SUBCASE("doubled counts never resurrect a zero-similarity candidate") {
    const auto doubled = tr_from_cells({{0, 0, 4}, {0, 1, 4}, {1, 0, 4}, {1, 1, 4},
                                        {2, 2, 6}, {3, 3, 4}},
                                       4, 4);
    SimilarityMatrix narrow(4);
    narrow.set(0, 1, 0.9);  // tag 2 and 3 stay at similarity 0 to the query
    const auto res = expand_tag_set({0}, narrow, doubled);
    for (const auto& [t, score] : res.added) {
      CHECK(t == 1);
    }
  }
}
