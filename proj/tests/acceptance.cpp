// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>

#include "hsd/analysis.hpp"
#include "hsd/baselines.hpp"
#include "hsd/fileio.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/random.hpp"
#include "hsd/synth.hpp"
#include "hsd/training.hpp"
#include "hsd_cli/cli.hpp"
#include "hsd_cli/run_config.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

HateSpeechModel toy_model(std::uint64_t seed) {
  auto [words, chars] = testing_support::toy_vocabularies();
  return HateSpeechModel(testing_support::toy_config(), words, chars, 5, seed);
}

// 1 --------------------------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string where;
  constexpr int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    HateSpeechModel model = toy_model(static_cast<std::uint64_t>(seed));
    Rng rng(1000 + static_cast<std::uint64_t>(seed));
    const ExampleInput in = testing_support::random_input(model, rng, 6);
    const auto check = oracle::check_gradients(
        model.params(), [&](ad::Tape& t) { return xent_loss(model.forward(t, in).probs, in.label); });
    if (check.max_relative_error > worst) {
      worst = check.max_relative_error;
      where = "seed " + std::to_string(seed) + " " + check.worst;
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed < 60.0, std::to_string(kSeeds) + " seeds, max relative error " + sci(worst) +
                                               " (" + where + "), " + fmt(elapsed, 1) + "s"};
}

// 2 --------------------------------------------------------------------------

Outcome normalization() {
  double worst = 0.0;
  bool negative = false;
  std::size_t vectors = 0;
  auto check = [&](const ad::Matrix& m) {
    worst = std::max(worst, std::abs(m.sum() - 1.0));
    negative = negative || m.minCoeff() < 0.0;
    ++vectors;
  };
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    auto [words, chars] = testing_support::toy_vocabularies();
    const HateSpeechModel model(testing_support::toy_config(trial % 5 == 0), words, chars, 5,
                                static_cast<std::uint64_t>(trial));
    const ExampleInput in = testing_support::random_input(model, rng, 6);
    ad::Tape tape(model.params());
    const ForwardPass pass = model.forward(tape, in);
    for (const auto& c : pass.text.char_contexts) {
      check(c.alpha_in.value());
      if (c.alpha_out.valid()) check(c.alpha_out.value());
    }
    check(pass.text.alpha.value());
    check(pass.fusion.beta.value());
    check(pass.probs.value());
  }
  return {worst <= 1e-6 && !negative, std::to_string(vectors) + " vectors, max |sum - 1| " + sci(worst) +
                                          (negative ? ", negative entry found" : "")};
}

// 3 --------------------------------------------------------------------------

Outcome pagerank_oracle() {
  Rng rng(2024);
  double worst = 0.0, worst_sum = 0.0;
  int with_dangling = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.between(2, 30));
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> index_edges;
    std::vector<bool> has_out(static_cast<std::size_t>(n), false);
    const int m = static_cast<int>(rng.between(n, 3 * n));
    // Vertex ids are zero-padded so that sorted id order equals index order.
    auto vid = [](int i) {
      return std::string(i < 10 ? "v0" : "v") + std::to_string(i);
    };
    // A chain keeps every vertex present; the last vertex stays dangling.
    std::set<std::pair<int, int>> seen;
    auto add = [&](int a, int b) {
      if (!seen.insert({a, b}).second) return;
      edges.emplace_back(vid(a), vid(b));
      index_edges.emplace_back(a, b);
      has_out[static_cast<std::size_t>(a)] = true;
    };
    for (int v = 0; v + 1 < n; ++v) add(v, v + 1);
    for (int e = 0; e < m; ++e) {
      const int a = static_cast<int>(rng.between(0, n - 2));
      add(a, static_cast<int>(rng.between(0, n - 1)));
    }
    if (std::count(has_out.begin(), has_out.end(), false) > 0) ++with_dangling;
    const FollowGraph g = FollowGraph::build(edges);
    const PageRankResult r = pagerank(g, {0.85, 1e-14, 10000});
    const std::vector<double> expected = oracle::pagerank(n, index_edges, 0.85);
    for (int v = 0; v < n; ++v) {
      worst = std::max(worst, std::abs(r.scores[static_cast<std::size_t>(g.index_of(vid(v)))] -
                                       expected[static_cast<std::size_t>(v)]));
    }
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(r.scores.begin(), r.scores.end(), 0.0) - 1.0));
  }
  return {worst <= 1e-8 && worst_sum <= 1e-9 && with_dangling == 50,
          "50 graphs (" + std::to_string(with_dangling) + " with dangling vertices), L-inf " + sci(worst) +
              ", max |sum - 1| " + sci(worst_sum)};
}

// 4 --------------------------------------------------------------------------

Outcome purity_oracle() {
  std::size_t cases = 0, mismatches = 0;
  bool identity_ok = true, single_ok = true;
  for (int n = 1; n <= 6; ++n) {
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 9;
    for (int code = 0; code < total; ++code) {
      std::vector<int> truth(static_cast<std::size_t>(n)), clusters(static_cast<std::size_t>(n));
      int rest = code;
      for (int i = 0; i < n; ++i) {
        truth[static_cast<std::size_t>(i)] = rest % 3;
        clusters[static_cast<std::size_t>(i)] = (rest / 3) % 3;
        rest /= 9;
      }
      std::map<std::string, int> t, c, single;
      for (int i = 0; i < n; ++i) {
        const std::string id = "t" + std::to_string(i);
        t[id] = truth[static_cast<std::size_t>(i)];
        c[id] = clusters[static_cast<std::size_t>(i)];
        single[id] = 0;
      }
      for (const bool by_category : {true, false}) {
        const PurityMode mode = by_category ? PurityMode::by_category : PurityMode::by_cluster;
        if (std::abs(purity(t, c, mode) - oracle::purity(truth, clusters, by_category)) > 1e-12) ++mismatches;
        ++cases;
      }
      identity_ok = identity_ok && purity(t, t) == 1.0 && purity(c, c, PurityMode::by_cluster) == 1.0;
      single_ok = single_ok && purity(t, single) == 1.0;
    }
  }
  return {mismatches == 0 && identity_ok && single_ok,
          std::to_string(cases) + " labelings, " + std::to_string(mismatches) + " mismatches, identical " +
              (identity_ok ? "1.0" : "wrong") + ", single cluster " + (single_ok ? "1.0" : "wrong")};
}

// 5 --------------------------------------------------------------------------

Outcome clustering_oracle() {
  Rng rng(5150);
  int trials = 0, mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.between(2, 8));
    const int k = static_cast<int>(rng.between(1, n));
    const int dims = static_cast<int>(rng.between(2, 3));
    std::vector<HateEmbedding> embeddings;
    std::vector<std::pair<std::string, Eigen::VectorXd>> points;
    for (int i = 0; i < n; ++i) {
      ad::Vector v(dims);
      // Small integer coordinates produce exact distance ties.
      for (int d = 0; d < dims; ++d) v(d) = static_cast<double>(rng.between(-2, 2));
      if (trial % 3 == 0) {
        for (int d = 0; d < dims; ++d) v(d) = rng.uniform(-1.0, 1.0);
      }
      const std::string id = "e" + std::to_string(i);
      embeddings.push_back({id, v});
      points.emplace_back(id, v);
    }
    const ClusterAssignment got = agglomerative_cluster(embeddings, k);
    std::map<int, std::set<std::string>> groups;
    for (const auto& [id, c] : got) groups[c].insert(id);
    std::set<std::set<std::string>> got_partition;
    for (const auto& [c, g] : groups) got_partition.insert(g);
    const auto expected = oracle::cluster(points, k);
    const std::set<std::set<std::string>> expected_partition(expected.begin(), expected.end());
    ++trials;
    if (got_partition != expected_partition) ++mismatches;
  }
  return {mismatches == 0, std::to_string(trials) + " point sets (n <= 8), " + std::to_string(mismatches) +
                               " mismatches"};
}

// 6-9: synthetic experiments ---------------------------------------------------

struct SeedResult {
  std::uint64_t seed = 0;
  double code_word_text_sc = 0.0, code_word_text_only = 0.0;
  double test_text_sc = 0.0, test_text_only = 0.0, test_logistic = 0.0;
  double purity_text_sc = 0.0, purity_text_only = 0.0;
  double standard_purity_text_sc = 0.0, standard_purity_text_only = 0.0;  // informational
  std::size_t purity_n_text_sc = 0, purity_n_text_only = 0;
  double social_code_word = 0.0, social_overt = 0.0;
  AgreementResult agreement;
  std::string top_words_overlap;
  double seconds = 0.0;
};

std::vector<Label> labels_of(const std::vector<TweetRecord>& records) {
  std::vector<Label> out;
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

SeedResult run_seed(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const cli::RunConfig defaults;
  SeedResult out;
  out.seed = seed;
  SynthSpec spec = defaults.synth;
  spec.seed = seed;
  const SynthCorpus corpus = synth_corpus(spec);
  const auto authors = corpus_authors(corpus.records);
  const GraphArtifacts g = build_graph_artifacts(corpus.edges, corpus.seed_accounts, authors,
                                                 static_cast<std::size_t>(spec.n_accounts / 2), defaults.pagerank);
  const SynthProvider provider(defaults.model.cultural_dim, derive_seed(seed, "cultural"), corpus.author_communities,
                               defaults.cultural_signal, defaults.cultural_noise);
  const DatasetSplits splits = split(corpus.records, defaults.splits, derive_seed(seed, "split"));

  std::vector<TweetRecord> code_words;
  for (const auto& r : splits.test) {
    const TweetRole role = corpus.roles.at(r.id);
    if (role == TweetRole::code_word_hate || role == TweetRole::decoy) code_words.push_back(r);
  }

  LinearConfig lc = defaults.baseline;
  lc.seed = seed;
  const LinearBaseline logistic = LinearBaseline::fit(LinearKind::logistic, FeatureMode::text_social_cultural,
                                                      splits.train, splits.val, g.follows, provider, lc);
  out.test_logistic = compute_metrics(labels_of(splits.test), logistic.predict(splits.test, g.follows, provider)).f1_hate;

  for (const bool text_only : {false, true}) {
    ModelConfig mc = defaults.model;
    mc.text_only = text_only;
    TrainConfig tc = defaults.train;
    tc.seed = seed;
    tc.text_only = text_only;
    const TrainedModel trained = train(splits, mc, tc, g.follows, provider);
    const HateSpeechModel& model = trained.model;

    const double test_f1 = evaluate(model, splits.test, g.follows, provider).f1_hate;
    const double code_word_f1 = evaluate(model, code_words, g.follows, provider).f1_hate;

    const std::vector<HateEmbedding> embeddings = extract_hate_embeddings(model, corpus.records, g.follows, provider);
    const ClusterAssignment clusters = agglomerative_cluster(embeddings, defaults.k_clusters);
    GroundTruth scored;
    ClusterAssignment scored_clusters;
    for (const auto& [id, c] : clusters) {
      if (const auto it = corpus.truth.find(id); it != corpus.truth.end()) {
        scored[id] = it->second;
        scored_clusters[id] = c;
      }
    }
    const double p = scored.empty() ? 0.0 : purity(scored, scored_clusters);
    const double standard = scored.empty() ? 0.0 : purity(scored, scored_clusters, PurityMode::by_cluster);

    if (text_only) {
      out.test_text_only = test_f1;
      out.code_word_text_only = code_word_f1;
      out.purity_text_only = p;
      out.standard_purity_text_only = standard;
      out.purity_n_text_only = scored.size();
      continue;
    }
    out.test_text_sc = test_f1;
    out.code_word_text_sc = code_word_f1;
    out.purity_text_sc = p;
    out.standard_purity_text_sc = standard;
    out.purity_n_text_sc = scored.size();

    double social_cw = 0.0, social_overt = 0.0;
    int n_cw = 0, n_overt = 0;
    std::vector<AttentionReport> reports;
    std::vector<PerturbationImportance> importances;
    for (const auto& r : splits.test) {
      const AttentionReport rep = explain(model, r, g.follows, provider);
      const TweetRole role = corpus.roles.at(r.id);
      if (role == TweetRole::code_word_hate) {
        social_cw += rep.beta(2);
        ++n_cw;
      } else if (role == TweetRole::overt_hate) {
        social_overt += rep.beta(2);
        ++n_overt;
      }
      reports.push_back(rep);
      importances.push_back(perturb_importance(model, r, g.follows, provider));
    }
    out.social_code_word = n_cw ? social_cw / n_cw : 0.0;
    out.social_overt = n_overt ? social_overt / n_overt : 0.0;
    out.agreement = agreement(reports, importances);

    // Informational: overlap of each cluster's top five words with its
    // majority category's planted lexicon.
    std::map<std::string, AttentionReport> by_id;
    for (const auto& r : corpus.records) {
      if (clusters.contains(r.id)) by_id.emplace(r.id, explain(model, r, g.follows, provider));
    }
    const auto ranked = top_words(clusters, by_id, 5);
    for (const auto& [cluster, words] : ranked) {
      std::map<int, int> votes;
      for (const auto& [id, c] : scored_clusters) {
        if (c == cluster) ++votes[scored.at(id)];
      }
      int overlap = 0;
      if (!votes.empty()) {
        const int category =
            std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
        const auto& lex = corpus.lexicon.categories[static_cast<std::size_t>(category)];
        const auto& code = corpus.lexicon.code_words[static_cast<std::size_t>(category)];
        for (const auto& [w, mass] : words) {
          if (std::find(lex.begin(), lex.end(), w) != lex.end() ||
              std::find(code.begin(), code.end(), w) != code.end()) {
            ++overlap;
          }
        }
      }
      out.top_words_overlap += (out.top_words_overlap.empty() ? "" : " ") + std::to_string(overlap);
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

// 10 -------------------------------------------------------------------------

std::map<std::string, std::string> pipeline_outputs(const fs::path& dir, std::string& failure) {
  std::map<std::string, std::string> files;
  std::ostringstream out, err;
  for (const std::vector<std::string>& args :
       std::vector<std::vector<std::string>>{{"--seed", "1", "synth"}, {"graph"}, {"train"}, {"eval"},
                                             {"cluster"}, {"report"}}) {
    std::vector<std::string> full{"--out", dir.string()};
    full.insert(full.end(), args.begin(), args.end());
    if (cli::run(full, out, err) != 0) {
      failure = args.back() + ": " + err.str();
      return files;
    }
  }
  for (const char* name : {"metrics-text_sc.jsonl", "clusters-text_sc.txt", "purity-text_sc.json",
                           "top_words-text_sc.txt", "classification.jsonl", "clustering.jsonl",
                           "modality_attention.jsonl", "model-text_sc.ckpt"}) {
    files[name] = read_file(dir / name);
  }
  return files;
}

Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path base = fs::temp_directory_path() / "hsd_acceptance_determinism";
  fs::remove_all(base);
  std::string failure;
  const auto a = pipeline_outputs(base / "a", failure);
  if (!failure.empty()) return {false, "run 1 failed: " + failure};
  const auto b = pipeline_outputs(base / "b", failure);
  if (!failure.empty()) return {false, "run 2 failed: " + failure};
  fs::remove_all(base);
  std::string differing;
  for (const auto& [name, contents] : a) {
    if (b.at(name) != contents) differing += " " + name;
  }
  return {differing.empty(), std::to_string(a.size()) + " files compared" +
                                 (differing.empty() ? "" : ", differ:" + differing) + ", " +
                                 fmt(seconds_since(t0), 1) + "s for two runs"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int number, const std::string& name, const Outcome& o) {
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", number, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  report(1, "gradient check", gradient_check());
  report(2, "normalization invariants", normalization());
  report(3, "pagerank oracle", pagerank_oracle());
  report(4, "purity oracle", purity_oracle());
  report(5, "clustering oracle", clustering_oracle());

  std::vector<SeedResult> seeds;
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    seeds.push_back(run_seed(seed));
    const SeedResult& s = seeds.back();
    std::printf(
        "  seed %llu: code-word f1_hate text_sc %.3f text_only %.3f | test f1_hate text_sc %.3f text_only %.3f "
        "logistic %.3f | purity text_sc %.3f (N %zu) text_only %.3f (N %zu), by cluster %.3f vs %.3f | beta_social code-word %.3f "
        "overt %.3f | agreement %.3f (%zu used) | top-word lexicon overlap %s | %.0fs\n",
        static_cast<unsigned long long>(s.seed), s.code_word_text_sc, s.code_word_text_only, s.test_text_sc,
        s.test_text_only, s.test_logistic, s.purity_text_sc, s.purity_n_text_sc, s.purity_text_only,
        s.purity_n_text_only, s.standard_purity_text_sc, s.standard_purity_text_only, s.social_code_word, s.social_overt, s.agreement.mean, s.agreement.used,
        s.top_words_overlap.c_str(), s.seconds);
    std::fflush(stdout);
  }

  Outcome ablation{true, ""}, clustering{true, ""}, modality{true, ""}, agree{true, ""};
  double slowest = 0.0;
  for (const auto& s : seeds) {
    const std::string tag = "seed " + std::to_string(s.seed) + " ";
    const bool gap = s.code_word_text_sc >= s.code_word_text_only + 0.05;
    const bool beats = s.test_text_sc > s.test_logistic && s.test_text_only > s.test_logistic;
    ablation.pass = ablation.pass && gap && beats;
    ablation.detail += tag + "gap " + fmt(s.code_word_text_sc - s.code_word_text_only, 3) +
                       (beats ? " neural>logistic; " : " neural<=logistic; ");
    clustering.pass = clustering.pass && s.purity_text_sc >= s.purity_text_only;
    clustering.detail += tag + fmt(s.purity_text_sc, 3) + " vs " + fmt(s.purity_text_only, 3) + "; ";
    modality.pass = modality.pass && s.social_code_word > s.social_overt;
    modality.detail += tag + fmt(s.social_code_word, 3) + " vs " + fmt(s.social_overt, 3) + "; ";
    agree.pass = agree.pass && s.agreement.used > 0 && s.agreement.mean > 0.0;
    agree.detail += tag + fmt(s.agreement.mean, 3) + "; ";
    slowest = std::max(slowest, s.seconds);
  }
  ablation.pass = ablation.pass && slowest <= 600.0;
  ablation.detail += "slowest seed " + fmt(slowest, 0) + "s";
  report(6, "text+sc vs text-only on code words, neural vs logistic", ablation);
  report(7, "purity text+sc >= text-only", clustering);
  report(8, "beta_social code-word > overt", modality);
  report(9, "attention/occlusion agreement > 0", agree);
  report(10, "pipeline determinism", determinism());

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
