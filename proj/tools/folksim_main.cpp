// folksim — batch front end for the folksonomy similarity pipeline.
//
// Offline artifacts (similarity TSVs, eval reports) are written by `synth`,
// `sim`, `enrich` and `eval`; `expand`, `query`, `stats` and `trace` answer
// from those artifacts. Every subcommand is deterministic for a fixed seed
// and overwrites its outputs with byte-identical content on rerun.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "folksim/baselines.hpp"
#include "folksim/corpus.hpp"
#include "folksim/eval.hpp"
#include "folksim/expand.hpp"
#include "folksim/mrs.hpp"
#include "folksim/search.hpp"
#include "folksim/similarity.hpp"

namespace {

using namespace folksim;

// Thrown for bad flag values after CLI11 parsing; maps to exit status 1,
// while errors raised by the pipeline itself map to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

Folksonomy load_corpus(const std::string& path) {
  auto in = open_input(path);
  return ingest_assignments(in);
}

LoadedSimilarity load_similarity(const std::string& path) {
  auto in = open_input(path);
  return read_similarity(in);
}

std::vector<std::uint32_t> resolve_tags(const Folksonomy& f,
                                        const std::vector<std::string>& names) {
  std::unordered_map<std::string, std::uint32_t> index;
  index.reserve(f.tags.size());
  for (std::uint32_t t = 0; t < f.n_tags(); ++t) index.emplace(f.tags[t], t);
  std::vector<std::uint32_t> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const auto it = index.find(name);
    if (it == index.end()) throw std::runtime_error("unknown tag: " + name);
    out.push_back(it->second);
  }
  return out;
}

struct EngineFlags {
  double psi = EngineConfig{}.psi;
  double epsilon = EngineConfig{}.epsilon;
  int max_iters = EngineConfig{}.max_iters;
  double tau = EngineConfig{}.tau;
  std::uint32_t size_limit = EngineConfig{}.size_limit;
  std::string delta_norm = "entrywise";
  int threads = 1;

  void add_to(CLI::App& app) {
    app.add_option("--psi", psi, "Off-diagonal transfer weight, in [0,1]");
    app.add_option("--epsilon", epsilon, "Convergence threshold on both deltas, > 0");
    app.add_option("--max-iters", max_iters, "Iteration cap, >= 1");
    app.add_option("--tau", tau, "Sparsification floor applied to persisted matrices");
    app.add_option("--size-limit", size_limit, "Largest allowed similarity dimension");
    app.add_option("--delta-norm", delta_norm, "Convergence norm: entrywise or induced")
        ->check(CLI::IsMember({"entrywise", "induced"}));
    app.add_option("--threads", threads, "Worker cap; never changes results");
  }

  EngineConfig to_config() const {
    if (psi < 0.0 || psi > 1.0) throw UsageError("--psi must lie in the valid range [0,1]");
    if (epsilon < 0.0 || epsilon > 1.0) throw UsageError("--epsilon must lie in [0,1]");
    if (max_iters < 1) throw UsageError("--max-iters must be at least 1");
    if (tau < 0.0) throw UsageError("--tau must be nonnegative");
    if (size_limit < 1) throw UsageError("--size-limit must be at least 1");
    if (threads < 1) throw UsageError("--threads must be at least 1");
    EngineConfig cfg;
    cfg.psi = psi;
    cfg.epsilon = epsilon;
    cfg.max_iters = max_iters;
    cfg.tau = tau;
    cfg.size_limit = size_limit;
    cfg.delta_norm = delta_norm == "induced" ? DeltaNorm::kInduced : DeltaNorm::kEntrywise;
    return cfg;
  }
};

struct BaselineFlags {
  double c1 = SimRankConfig{}.c1;
  double c2 = SimRankConfig{}.c2;
  int iterations = SimRankConfig{}.iterations;
  int rank = LsiConfig{}.k;
  int power_iterations = LsiConfig{}.power_iterations;
  std::uint64_t lsi_seed = LsiConfig{}.seed;

  void add_to(CLI::App& app) {
    app.add_option("--c1", c1, "Tag-side decay, in [0,1]");
    app.add_option("--c2", c2, "Resource-side decay, in [0,1]");
    app.add_option("--iterations", iterations, "Fixed iteration count, >= 1");
    app.add_option("--rank", rank, "Latent dimensions, >= 1");
    app.add_option("--power-iterations", power_iterations, "Subspace refinement steps, >= 1");
    app.add_option("--lsi-seed", lsi_seed, "Seed for the randomized subspace start");
  }

  SimRankConfig to_simrank() const {
    if (c1 < 0.0 || c1 > 1.0 || c2 < 0.0 || c2 > 1.0)
      throw UsageError("--c1/--c2 must lie in [0,1]");
    if (iterations < 1) throw UsageError("--iterations must be at least 1");
    return SimRankConfig{c1, c2, iterations};
  }

  LsiConfig to_lsi() const {
    if (rank < 1) throw UsageError("--rank must be at least 1");
    if (power_iterations < 1) throw UsageError("--power-iterations must be at least 1");
    return LsiConfig{rank, power_iterations, lsi_seed};
  }
};

std::string stats_text(const CorpusStats& s) {
  std::ostringstream out;
  out << "users\t" << s.n_users << '\n'
      << "resources\t" << s.n_resources << '\n'
      << "tags\t" << s.n_tags << '\n'
      << "assignments\t" << s.n_assignments << '\n';
  const char* labels[5] = {"1", "2", "3", "4", "5+"};
  out << "distinct_tags_per_resource";
  for (int i = 0; i < 5; ++i) out << '\t' << labels[i] << '=' << s.distinct_tags_per_resource[i];
  out << '\n' << "uses_per_tag";
  for (int i = 0; i < 5; ++i) out << '\t' << labels[i] << '=' << s.uses_per_tag[i];
  out << '\n';
  return out.str();
}

std::string similarity_text(const SimilarityMatrix& sm,
                            const std::vector<std::pair<std::string, std::string>>& header) {
  std::ostringstream out;
  write_similarity(sm, out, header);
  return out.str();
}

void append_engine_header(std::vector<std::pair<std::string, std::string>>& h,
                          const EngineFlags& flags, const EngineResult& res) {
  h.emplace_back("psi", format_score(flags.psi));
  h.emplace_back("epsilon", format_score(flags.epsilon));
  h.emplace_back("tau", format_score(flags.tau));
  h.emplace_back("max_iters", std::to_string(flags.max_iters));
  h.emplace_back("delta_norm", flags.delta_norm);
  h.emplace_back("converged", res.trace.converged ? "1" : "0");
  h.emplace_back("iterations_run", std::to_string(res.trace.iterations_run));
  for (const auto& e : res.trace.entries) {
    h.emplace_back("trace", std::to_string(e.k) + ' ' + format_score(e.delta_t) + ' ' +
                                format_score(e.delta_r));
  }
}

int cmd_stats(const std::string& input) {
  const auto f = load_corpus(input);
  const auto tr = build_tag_resource_matrix(f);
  std::cout << stats_text(corpus_stats(f, tr));
  return 0;
}

struct SynthFlags {
  std::uint32_t users = 0, resources = 0, tags = 0, groups = 0;
  double exponent = 2.0;
  std::uint32_t tags_min = 2, tags_max = 2;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_synth(const SynthFlags& fl) {
  if (fl.users < 1 || fl.resources < 1 || fl.tags < 1)
    throw UsageError("--users, --resources and --tags must be at least 1");
  if (fl.tags_min < 1 || fl.tags_max < fl.tags_min)
    throw UsageError("--tags-min/--tags-max must satisfy 1 <= min <= max");
  if (fl.tags_max > fl.tags)
    throw UsageError("--tags-max cannot exceed --tags");
  if (!(fl.exponent > 0.0)) throw UsageError("--exponent must be positive");

  SynthSpec spec;
  spec.n_users = fl.users;
  spec.n_resources = fl.resources;
  spec.n_tags = fl.tags;
  spec.tag_popularity_exponent = fl.exponent;
  spec.tags_min = fl.tags_min;
  spec.tags_max = fl.tags_max;
  spec.synonym_groups = fl.groups;
  spec.seed = fl.seed;

  const auto f = generate_synthetic(spec);
  std::ostringstream out;
  write_assignments(f, out);
  write_file(fl.output, out.str());
  return 0;
}

struct SimFlags {
  std::string input, output, resource_output, method = "mrs";
  EngineFlags engine;
  BaselineFlags baseline;
};

int cmd_sim(const SimFlags& fl) {
  const auto ecfg = fl.engine.to_config();  // validates shared flags up front
  if (!fl.resource_output.empty() && fl.method != "mrs" && fl.method != "simrank")
    throw UsageError("--resource-output requires a method with a resource side (mrs, simrank)");

  const auto f = load_corpus(fl.input);
  const auto tr = build_tag_resource_matrix(f);

  std::vector<std::pair<std::string, std::string>> header;
  header.emplace_back("kind", "tag");
  header.emplace_back("method", fl.method);

  SimilarityMatrix st, sr;
  bool has_sr = false;
  if (fl.method == "mrs") {
    const auto res = compute_similarities(tr, ecfg, fl.engine.threads);
    append_engine_header(header, fl.engine, res);
    st = res.st;
    sr = res.sr;
    has_sr = true;
  } else if (fl.method == "cosine") {
    st = cosine_similarity_matrix(tr);
    st.sparsify(ecfg.tau);
    header.emplace_back("tau", format_score(ecfg.tau));
  } else if (fl.method == "simrank") {
    const auto cfg = fl.baseline.to_simrank();
    auto pair = simrank_compute(tr, cfg);
    st = std::move(pair.first);
    sr = std::move(pair.second);
    st.sparsify(ecfg.tau);
    sr.sparsify(ecfg.tau);
    has_sr = true;
    header.emplace_back("c1", format_score(cfg.c1));
    header.emplace_back("c2", format_score(cfg.c2));
    header.emplace_back("iterations", std::to_string(cfg.iterations));
    header.emplace_back("tau", format_score(ecfg.tau));
  } else if (fl.method == "lsi") {
    auto cfg = fl.baseline.to_lsi();
    cfg.k = std::min<int>(cfg.k, static_cast<int>(std::min(tr.n_t, tr.n_r)));
    st = lsi_similarity_matrix(tr, cfg);
    st.sparsify(ecfg.tau);
    header.emplace_back("rank", std::to_string(cfg.k));
    header.emplace_back("power_iterations", std::to_string(cfg.power_iterations));
    header.emplace_back("seed", std::to_string(cfg.seed));
    header.emplace_back("tau", format_score(ecfg.tau));
  } else {
    throw UsageError("unknown method: " + fl.method);
  }

  write_file(fl.output, similarity_text(st, header));
  if (!fl.resource_output.empty() && has_sr) {
    auto rheader = header;
    rheader.front() = {"kind", "resource"};
    write_file(fl.resource_output, similarity_text(sr, rheader));
  }
  return 0;
}

struct ExpandFlags {
  std::string input, similarity;
  std::vector<std::string> tags;
  int k = -1;
};

int cmd_expand(const ExpandFlags& fl) {
  if (fl.tags.empty()) throw UsageError("--tags must list at least one tag");
  if (fl.k == 0 || fl.k < -1) throw UsageError("--k must be a positive override");

  const auto f = load_corpus(fl.input);
  const auto tr = build_tag_resource_matrix(f);
  const auto loaded = load_similarity(fl.similarity);
  if (loaded.matrix.size() != tr.n_t)
    throw std::runtime_error("similarity dimension does not match the corpus tag count");

  const auto t_set = resolve_tags(f, fl.tags);
  const auto k_override =
      fl.k > 0 ? std::optional<int>(fl.k) : std::nullopt;
  const auto result = expand_tag_set(t_set, loaded.matrix, tr, k_override);

  std::cout << "# k_used: " << result.k_used << '\n';
  for (const auto& [t, score] : result.added)
    std::cout << f.tags[t] << '\t' << format_score(score) << '\n';
  return 0;
}

struct EnrichFlags {
  std::string input, similarity, output;
};

int cmd_enrich(const EnrichFlags& fl) {
  const auto f = load_corpus(fl.input);
  const auto tr = build_tag_resource_matrix(f);
  const auto loaded = load_similarity(fl.similarity);
  if (loaded.matrix.size() != tr.n_t)
    throw std::runtime_error("similarity dimension does not match the corpus tag count");

  const auto enriched = enrich_bookmarks(group_bookmarks(f), loaded.matrix, tr);

  Folksonomy out;
  out.users = f.users;
  out.resources = f.resources;
  out.tags = f.tags;
  for (const auto& bm : enriched) {
    for (const auto t : bm.tag_set) {
      out.assignments.push_back(Assignment{bm.user, bm.resource, t});
    }
  }
  std::ostringstream text;
  write_assignments(out, text);
  write_file(fl.output, text.str());
  return 0;
}

struct QueryFlags {
  std::string input, similarity;
  std::vector<std::string> tags;
  int q = 10;
};

int cmd_query(const QueryFlags& fl) {
  if (fl.tags.empty()) throw UsageError("--tags must list at least one tag");
  if (fl.q < 1) throw UsageError("--q must be at least 1");

  const auto f = load_corpus(fl.input);
  const auto tr = build_tag_resource_matrix(f);

  std::optional<LoadedSimilarity> loaded;
  if (!fl.similarity.empty()) {
    loaded = load_similarity(fl.similarity);
    if (loaded->matrix.size() != tr.n_t)
      throw std::runtime_error("similarity dimension does not match the corpus tag count");
  }

  const auto t_set = resolve_tags(f, fl.tags);
  const auto result =
      rank_resources(t_set, fl.q, tr, loaded ? &loaded->matrix : nullptr);
  write_query_result(result, f.resources, std::cout);
  return 0;
}

struct EvalFlags {
  std::string input, output, tsv_output;
  std::vector<std::string> methods = {"none", "cosine", "simrank", "lsi", "mrs"};
  std::vector<int> qs = {5, 10, 20};
  double split = SplitSpec{}.train_fraction;
  int repeats = SplitSpec{}.repeats;
  std::uint64_t seed = 0;
  EngineFlags engine;
  BaselineFlags baseline;
};

int cmd_eval(const EvalFlags& fl) {
  if (!(fl.split > 0.0) || !(fl.split < 1.0))
    throw UsageError("--split must lie strictly between 0 and 1");
  if (fl.repeats < 1) throw UsageError("--repeats must be at least 1");
  for (const auto q : fl.qs)
    if (q < 1) throw UsageError("--q values must be at least 1");

  ExperimentConfig cfg;
  cfg.engine = fl.engine.to_config();
  cfg.simrank = fl.baseline.to_simrank();
  cfg.lsi = fl.baseline.to_lsi();
  cfg.threads = fl.engine.threads;

  SplitSpec split;
  split.train_fraction = fl.split;
  split.repeats = fl.repeats;
  split.seed = fl.seed;

  const auto f = load_corpus(fl.input);
  const auto report = run_retrieval_experiment(f, split, fl.methods, fl.qs, cfg);

  write_file(fl.output, report_to_json(report));
  if (!fl.tsv_output.empty()) {
    std::ostringstream tsv;
    write_report_tsv(report, tsv);
    write_file(fl.tsv_output, tsv.str());
  }
  return 0;
}

struct TraceFlags {
  std::string input, output;
};

int cmd_trace(const TraceFlags& fl) {
  auto in = open_input(fl.input);
  std::ostringstream out;
  out << "k\tdelta_t\tdelta_r\n";
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("# trace:", 0) != 0) continue;
    std::istringstream fields(line.substr(8));
    std::string k, dt, dr;
    if (!(fields >> k >> dt >> dr))
      throw std::runtime_error("malformed trace header line: " + line);
    out << k << '\t' << dt << '\t' << dr << '\n';
    ++rows;
  }
  if (rows == 0)
    throw std::runtime_error("no convergence trace in " + fl.input);

  if (fl.output.empty()) {
    std::cout << out.str();
  } else {
    write_file(fl.output, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"folksim — tag similarity, expansion and retrieval toolkit"};
  app.require_subcommand(1);

  std::string stats_input;
  auto* stats = app.add_subcommand("stats", "Print corpus summary statistics");
  stats->add_option("--input", stats_input, "Assignment TSV")->required();

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus TSV");
  synth->add_option("--users", synth_flags.users, "Number of users")->required();
  synth->add_option("--resources", synth_flags.resources, "Number of resources")->required();
  synth->add_option("--tags", synth_flags.tags, "Vocabulary capacity")->required();
  synth->add_option("--exponent", synth_flags.exponent, "Popularity power-law exponent");
  synth->add_option("--tags-min", synth_flags.tags_min, "Minimum tags per bookmark");
  synth->add_option("--tags-max", synth_flags.tags_max, "Maximum tags per bookmark");
  synth->add_option("--groups", synth_flags.groups, "Planted synonym groups");
  synth->add_option("--seed", synth_flags.seed, "Generator seed");
  synth->add_option("--output", synth_flags.output, "Corpus TSV path")->required();

  SimFlags sim_flags;
  auto* sim = app.add_subcommand("sim", "Compute and persist a similarity matrix");
  sim->add_option("--input", sim_flags.input, "Assignment TSV")->required();
  sim->add_option("--output", sim_flags.output, "Tag similarity TSV path")->required();
  sim->add_option("--resource-output", sim_flags.resource_output,
                  "Also write the resource similarity TSV");
  sim->add_option("--method", sim_flags.method, "mrs, cosine, simrank or lsi")
      ->check(CLI::IsMember({"mrs", "cosine", "simrank", "lsi"}));
  sim_flags.engine.add_to(*sim);
  sim_flags.baseline.add_to(*sim);

  ExpandFlags expand_flags;
  auto* expand = app.add_subcommand("expand", "Expand a tag set against a similarity artifact");
  expand->add_option("--input", expand_flags.input, "Assignment TSV")->required();
  expand->add_option("--similarity", expand_flags.similarity, "Tag similarity TSV")->required();
  expand->add_option("--tags", expand_flags.tags, "Comma-separated tag names")
      ->required()
      ->delimiter(',');
  expand->add_option("--k", expand_flags.k, "Override the expansion size");

  EnrichFlags enrich_flags;
  auto* enrich = app.add_subcommand("enrich", "Write the expansion-enriched assignment TSV");
  enrich->add_option("--input", enrich_flags.input, "Assignment TSV")->required();
  enrich->add_option("--similarity", enrich_flags.similarity, "Tag similarity TSV")->required();
  enrich->add_option("--output", enrich_flags.output, "Enriched TSV path")->required();

  QueryFlags query_flags;
  auto* query = app.add_subcommand("query", "Rank resources for a tag query");
  query->add_option("--input", query_flags.input, "Assignment TSV")->required();
  query->add_option("--tags", query_flags.tags, "Comma-separated tag names")
      ->required()
      ->delimiter(',');
  query->add_option("--q", query_flags.q, "Result list size");
  query->add_option("--similarity", query_flags.similarity,
                    "Tag similarity TSV enabling query expansion");

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Run the split/enrich/retrieve experiment");
  eval->add_option("--input", eval_flags.input, "Assignment TSV")->required();
  eval->add_option("--output", eval_flags.output, "Report JSON path")->required();
  eval->add_option("--tsv-output", eval_flags.tsv_output, "Optional report TSV path");
  eval->add_option("--methods", eval_flags.methods,
                   "Comma-separated subset of none,cosine,simrank,lsi,mrs")
      ->delimiter(',');
  eval->add_option("--q", eval_flags.qs, "Comma-separated result list sizes")->delimiter(',');
  eval->add_option("--split", eval_flags.split, "Train fraction");
  eval->add_option("--repeats", eval_flags.repeats, "Number of random splits");
  eval->add_option("--seed", eval_flags.seed, "Split seed");
  eval_flags.engine.add_to(*eval);
  eval_flags.baseline.add_to(*eval);

  TraceFlags trace_flags;
  auto* trace = app.add_subcommand("trace", "Re-emit a stored convergence trace as TSV");
  trace->add_option("--input", trace_flags.input, "Similarity TSV with trace headers")
      ->required();
  trace->add_option("--output", trace_flags.output, "Trace TSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (stats->parsed()) return cmd_stats(stats_input);
    if (synth->parsed()) return cmd_synth(synth_flags);
    if (sim->parsed()) return cmd_sim(sim_flags);
    if (expand->parsed()) return cmd_expand(expand_flags);
    if (enrich->parsed()) return cmd_enrich(enrich_flags);
    if (query->parsed()) return cmd_query(query_flags);
    if (eval->parsed()) return cmd_eval(eval_flags);
    if (trace->parsed()) return cmd_trace(trace_flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
