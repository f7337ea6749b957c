#include "folksim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "folksim/expand.hpp"
#include "folksim/rng.hpp"
#include "folksim/search.hpp"

namespace folksim {
namespace {

// Generator shape constants. Together with the draw order in
// generate_synthetic they define the corpus format, so changing any of
// them changes every generated corpus.
constexpr std::uint32_t kSynonymSize = 5;   // interchangeable labels per group
constexpr std::uint32_t kContextSize = 1;   // shared context labels per group
constexpr double kContextRate = 0.90;       // chance a bookmark carries a context label
constexpr double kConfusionRate = 0.45;     // chance of one stray label from another group
constexpr std::uint32_t kTaggersMin = 1;    // users per resource, uniform range
constexpr std::uint32_t kTaggersMax = 3;

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

struct DraftBookmark {
  std::uint32_t user = 0;
  std::uint32_t resource = 0;
  std::vector<std::uint32_t> tags;  // insertion order, unique

  void add(std::uint32_t t) {
    if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
  }
};

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& index,
                     std::vector<std::string>& table, std::string id) {
  auto it = index.find(id);
  if (it != index.end()) return it->second;
  const auto pos = static_cast<std::uint32_t>(table.size());
  index.emplace(id, pos);
  table.push_back(std::move(id));
  return pos;
}

}  // namespace

std::pair<std::vector<Bookmark>, std::vector<Bookmark>> split_bookmarks(
    const std::vector<Bookmark>& bookmarks, const SplitSpec& spec, int repeat_index) {
  if (spec.repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie strictly between 0 and 1");
  }
  if (repeat_index < 0 || repeat_index >= spec.repeats) {
    throw std::invalid_argument("repeat index out of range");
  }
  const std::size_t n = bookmarks.size();
  if (n < 2) {
    throw std::invalid_argument("need at least two bookmarks to split");
  }

  auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  Rng rng(spec.seed + kGolden * static_cast<std::uint64_t>(repeat_index + 1));
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  std::vector<std::uint32_t> train_idx(perm.begin(),
                                       perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::uint32_t> test_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                                      perm.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  std::pair<std::vector<Bookmark>, std::vector<Bookmark>> out;
  out.first.reserve(train_idx.size());
  out.second.reserve(test_idx.size());
  for (const auto i : train_idx) out.first.push_back(bookmarks[i]);
  for (const auto i : test_idx) out.second.push_back(bookmarks[i]);
  return out;
}

// Draw order, which is part of the output contract: per resource, tagger
// count, then the taggers by rejection; per tagger, the tag budget, the
// synonym pick, one uniform for the context label, one uniform for the
// stray label, then pool fills; finally one index per vocabulary gap in
// the coverage pass.
Folksonomy generate_synthetic(const SynthSpec& spec) {
  if (spec.n_users == 0 || spec.n_resources == 0 || spec.n_tags == 0) {
    throw std::invalid_argument("n_users, n_resources and n_tags must be positive");
  }
  if (spec.tags_min < 1 || spec.tags_max < spec.tags_min) {
    throw std::invalid_argument("tags per bookmark range invalid");
  }
  if (spec.tags_max > spec.n_tags) {
    throw std::invalid_argument("tags per bookmark exceeds the vocabulary capacity");
  }
  if (!(spec.tag_popularity_exponent > 0.0)) {
    throw std::invalid_argument("tag_popularity_exponent must be positive");
  }
  const std::uint64_t reserved =
      static_cast<std::uint64_t>(spec.synonym_groups) * (kSynonymSize + kContextSize);
  if (reserved > spec.n_tags) {
    throw std::invalid_argument("n_tags too small for synonym_groups");
  }
  const std::uint32_t pool_base = static_cast<std::uint32_t>(reserved);
  const std::uint32_t pool_size = spec.n_tags - pool_base;

  // Popularity over the noise pool: rank r gets weight r^-exponent.
  std::vector<double> cdf(pool_size);
  if (pool_size > 0) {
    double total = 0.0;
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      cdf[i] = std::pow(static_cast<double>(i + 1), -spec.tag_popularity_exponent);
      total += cdf[i];
    }
    double acc = 0.0;
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      acc += cdf[i] / total;
      cdf[i] = acc;
    }
    cdf.back() = 1.0;
  }

  Rng rng(spec.seed);
  const std::uint32_t groups = spec.synonym_groups;
  std::vector<DraftBookmark> drafts;
  std::vector<std::size_t> unstructured;  // drafts with no synonym group

  std::vector<std::uint32_t> taggers;
  for (std::uint32_t r = 0; r < spec.n_resources; ++r) {
    const bool structured = groups > 0;
    const std::uint32_t g = structured ? r % groups : 0;

    auto k = static_cast<std::uint32_t>(rng.uniform_int(kTaggersMin, kTaggersMax));
    k = std::min(k, spec.n_users);
    taggers.clear();
    while (taggers.size() < k) {
      const auto u = static_cast<std::uint32_t>(rng.uniform_below(spec.n_users));
      if (std::find(taggers.begin(), taggers.end(), u) == taggers.end()) {
        taggers.push_back(u);
      }
    }

    for (const auto u : taggers) {
      DraftBookmark bm;
      bm.user = u;
      bm.resource = r;
      const auto budget = static_cast<std::uint32_t>(
          rng.uniform_int(spec.tags_min, spec.tags_max));

      if (structured) {
        const std::uint32_t base = g * (kSynonymSize + kContextSize);
        bm.add(base + static_cast<std::uint32_t>(rng.uniform_below(kSynonymSize)));
        if (rng.next_double() < kContextRate) {
          bm.add(base + kSynonymSize +
                 static_cast<std::uint32_t>(rng.uniform_below(kContextSize)));
        }
        if (rng.next_double() < kConfusionRate && groups > 1) {
          const auto other =
              (g + 1 + static_cast<std::uint32_t>(rng.uniform_below(groups - 1))) % groups;
          bm.add(other * (kSynonymSize + kContextSize) +
                 static_cast<std::uint32_t>(rng.uniform_below(kSynonymSize)));
        }
      } else {
        unstructured.push_back(drafts.size());
      }

      std::uint32_t attempts = 0;
      while (bm.tags.size() < budget && attempts < 10 * budget && pool_size > 0) {
        const double x = rng.next_double();
        auto idx = static_cast<std::uint32_t>(
            std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
        idx = std::min(idx, pool_size - 1);
        bm.add(pool_base + idx);
        ++attempts;
      }
      drafts.push_back(std::move(bm));
    }
  }

  // Coverage pass: park each never-drawn tag on a random bookmark so the
  // realized vocabulary matches n_tags. Only bookmarks without a synonym
  // group absorb strays; when every resource is grouped, rare pool tags
  // may stay unused.
  if (!unstructured.empty()) {
    std::vector<bool> used(spec.n_tags, false);
    for (const auto& bm : drafts) {
      for (const auto t : bm.tags) used[t] = true;
    }
    for (std::uint32_t t = 0; t < spec.n_tags; ++t) {
      if (used[t]) continue;
      const auto j = static_cast<std::size_t>(rng.uniform_below(unstructured.size()));
      drafts[unstructured[j]].tags.push_back(t);
    }
  }

  Folksonomy f;
  std::unordered_map<std::string, std::uint32_t> user_index, resource_index, tag_index;
  for (const auto& bm : drafts) {
    Assignment a;
    a.user = intern(user_index, f.users, "u" + std::to_string(bm.user));
    a.resource = intern(resource_index, f.resources, "r" + std::to_string(bm.resource));
    for (const auto t : bm.tags) {
      a.tag = intern(tag_index, f.tags, "t" + std::to_string(t));
      f.assignments.push_back(a);
    }
  }
  if (f.assignments.empty()) {
    throw std::runtime_error("generator produced an empty corpus");
  }
  return f;
}

RatioResult retrieved_ratio(const TagResourceMatrix& index,
                            const std::vector<Bookmark>& test_bookmarks,
                            const SimilarityMatrix* st, int q) {
  if (q < 1) {
    throw std::invalid_argument("q must be at least 1");
  }
  if (test_bookmarks.empty()) {
    throw std::invalid_argument("no test bookmarks");
  }

  RatioResult result;
  std::vector<std::uint32_t> restricted;
  for (const auto& bm : test_bookmarks) {
    restricted.clear();
    for (const auto t : bm.tag_set) {
      if (t < index.n_t && index.row_size(t) > 0) restricted.push_back(t);
    }
    if (restricted.empty()) {
      ++result.skipped;
      continue;
    }
    const QueryResult qr = rank_resources(restricted, q, index, st);
    ++result.evaluated;
    for (const auto& [r, rel] : qr.ranked) {
      if (r == bm.resource) {
        ++result.hits;
        break;
      }
    }
  }
  if (result.evaluated == 0) {
    throw std::runtime_error("no evaluable queries");
  }
  result.ratio = static_cast<double>(result.hits) / static_cast<double>(result.evaluated);
  return result;
}

EvalReport run_retrieval_experiment(const Folksonomy& f, const SplitSpec& split,
                                    const std::vector<std::string>& methods,
                                    const std::vector<int>& qs,
                                    const ExperimentConfig& cfg) {
  if (methods.empty()) {
    throw std::invalid_argument("no methods given");
  }
  if (qs.empty()) {
    throw std::invalid_argument("no q values given");
  }
  for (const auto q : qs) {
    if (q < 1) throw std::invalid_argument("q must be at least 1");
  }
  const std::unordered_set<std::string> known = {"none", "cosine", "simrank", "lsi", "mrs"};
  for (const auto& m : methods) {
    if (!known.count(m)) {
      throw std::invalid_argument("unknown method: " + m);
    }
  }

  const auto bookmarks = group_bookmarks(f);
  const auto n_t = f.n_tags();
  const auto n_r = f.n_resources();

  EvalReport report;
  report.rows.reserve(methods.size() * qs.size());
  for (const auto& m : methods) {
    for (const auto q : qs) {
      ReportRow row;
      row.method = m;
      row.q = q;
      row.enriched = m != "none";
      report.rows.push_back(std::move(row));
    }
  }
  auto row_at = [&](std::size_t mi, std::size_t qi) -> ReportRow& {
    return report.rows[mi * qs.size() + qi];
  };

  for (int rep = 0; rep < split.repeats; ++rep) {
    const auto [train, test] = split_bookmarks(bookmarks, split, rep);
    const auto train_tr = build_tag_resource_matrix(train, n_t, n_r);

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto& method = methods[mi];
      std::unique_ptr<SimilarityMatrix> st;
      if (method == "cosine") {
        st = std::make_unique<SimilarityMatrix>(cosine_similarity_matrix(train_tr));
      } else if (method == "simrank") {
        st = std::make_unique<SimilarityMatrix>(simrank_compute(train_tr, cfg.simrank).first);
      } else if (method == "lsi") {
        LsiConfig lsi = cfg.lsi;
        lsi.k = std::min<int>(lsi.k, static_cast<int>(std::min(n_t, n_r)));
        st = std::make_unique<SimilarityMatrix>(lsi_similarity_matrix(train_tr, lsi));
      } else if (method == "mrs") {
        st = std::make_unique<SimilarityMatrix>(
            std::move(compute_similarities(train_tr, cfg.engine, cfg.threads).st));
      }

      TagResourceMatrix enriched_tr;
      const TagResourceMatrix* index = &train_tr;
      if (st) {
        const auto enriched = enrich_bookmarks(train, *st, train_tr);
        enriched_tr = build_tag_resource_matrix(enriched, n_t, n_r);
        index = &enriched_tr;
      }

      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const auto rr = retrieved_ratio(*index, test, st.get(), qs[qi]);
        auto& row = row_at(mi, qi);
        row.per_repeat.push_back(rr.ratio);
        row.skipped += rr.skipped;
      }
    }
  }

  for (auto& row : report.rows) {
    double sum = 0.0;
    for (const auto v : row.per_repeat) sum += v;
    row.mean_ratio = sum / static_cast<double>(row.per_repeat.size());
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj;
    obj["method"] = row.method;
    obj["q"] = row.q;
    obj["enriched"] = row.enriched;
    obj["mean_ratio"] = row.mean_ratio;
    obj["per_repeat"] = row.per_repeat;
    obj["skipped"] = row.skipped;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void write_report_tsv(const EvalReport& report, std::ostream& out) {
  out << "method\tq\tenriched\tmean_ratio\n";
  for (const auto& row : report.rows) {
    out << row.method << '\t' << row.q << '\t' << (row.enriched ? 1 : 0) << '\t'
        << format_score(row.mean_ratio) << '\n';
  }
}

}  // namespace folksim
