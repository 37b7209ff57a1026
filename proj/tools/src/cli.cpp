#include "hsd_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include "hsd/analysis.hpp"
#include "hsd/baselines.hpp"
#include "hsd/checkpoint.hpp"
#include "hsd/error.hpp"
#include "hsd/fileio.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/random.hpp"
#include "hsd/synth.hpp"
#include "hsd/training.hpp"
#include "hsd_cli/run_config.hpp"

namespace hsd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kRunConfigFile = "run.conf";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
  bool text_only = false;
  std::optional<int> k_clusters;
  std::optional<double> damping;
  std::string tweet_id;
};

/// Per-command state: effective config, run directory, written artifacts.
class Context {
 public:
  Context(std::string command, RunConfig config, fs::path dir, std::ostream& out, std::ostream& log)
      : command_(std::move(command)), config_(std::move(config)), dir_(std::move(dir)), out_(out), log_(log) {}

  const RunConfig& config() const { return config_; }
  RunConfig& config() { return config_; }
  std::ostream& out() { return out_; }
  std::ostream& log() { return log_; }

  fs::path path(const std::string& name) const {
    const fs::path p(name);
    return p.is_absolute() ? p : dir_ / p;
  }

  bool exists(const std::string& name) const { return fs::exists(path(name)); }

  std::string read(const std::string& name) const {
    const fs::path p = path(name);
    if (!fs::exists(p)) throw Error("missing input " + p.string() + " (run the producing command first)");
    return read_file(p);
  }

  void write(const std::string& name, const std::string& contents) {
    write_file_atomic(path(name), contents);
    artifacts_.emplace_back(name, checksum_hex(contents));
  }

  void finish() {
    json manifest;
    manifest["command"] = command_;
    manifest["seed"] = config_.seed;
    manifest["config_hash"] = config_.hash();
    json config = json::object();
    std::istringstream lines(config_.to_text());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    manifest["config"] = config;
    json artifacts = json::object();
    for (const auto& [name, sum] : artifacts_) artifacts[name] = sum;
    manifest["artifacts"] = artifacts;
    write_file_atomic(path("manifest-" + command_ + ".json"), manifest.dump(2) + '\n');
  }

 private:
  std::string command_;
  RunConfig config_;
  fs::path dir_;
  std::ostream& out_;
  std::ostream& log_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

// Shared loaders ---------------------------------------------------------------

std::vector<TweetRecord> load_corpus(const Context& ctx) {
  return parse_corpus(ctx.read(ctx.config().corpus), UnifyOptions{ctx.config().drop_spam});
}

DatasetSplits load_splits(const Context& ctx, const std::vector<TweetRecord>& records) {
  return split(records, ctx.config().splits, derive_seed(ctx.config().seed, "split"));
}

FollowVectorTable load_follows(const Context& ctx) {
  const HateAccountSet accounts(parse_id_list(ctx.read("hate_accounts.txt")));
  return parse_follow_vectors(accounts, ctx.read("follow_vectors.txt"));
}

std::unique_ptr<CulturalProvider> make_provider(const Context& ctx, const std::vector<TweetRecord>& records) {
  const RunConfig& c = ctx.config();
  std::string kind = c.cultural_provider;
  if (kind == "auto") kind = ctx.exists(c.communities) ? "synth" : "stub";
  const std::uint64_t seed = derive_seed(c.seed, "cultural");
  if (kind == "synth") {
    return std::make_unique<SynthProvider>(c.model.cultural_dim, seed, parse_int_map(ctx.read(c.communities)),
                                           c.cultural_signal, c.cultural_noise);
  }
  return std::make_unique<StubProvider>(c.model.cultural_dim, seed, corpus_authors(records));
}

std::string checkpoint_name(const std::string& variant) { return "model-" + variant + ".ckpt"; }

TrainedModel load_model(const Context& ctx, const std::string& variant) {
  return deserialize_checkpoint(ctx.read(checkpoint_name(variant)));
}

std::vector<TweetRecord> code_word_subset(const std::vector<TweetRecord>& records,
                                          const std::map<std::string, TweetRole>& roles) {
  std::vector<TweetRecord> out;
  for (const auto& r : records) {
    const auto it = roles.find(r.id);
    if (it != roles.end() && (it->second == TweetRole::code_word_hate || it->second == TweetRole::decoy)) {
      out.push_back(r);
    }
  }
  return out;
}

json metrics_row(const std::string& model, const std::string& subset, const Metrics& m) {
  json row;
  row["model"] = model;
  row["subset"] = subset;
  row["n"] = m.total;
  row["f1_hate"] = m.f1_hate;
  row["f1_overall"] = m.f1_overall;
  return row;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string metrics_table(const std::vector<json>& rows) {
  std::ostringstream s;
  s << "model                                subset      n      f1_hate  f1_overall\n";
  for (const auto& r : rows) {
    std::string model = r["model"].get<std::string>();
    std::string subset = r["subset"].get<std::string>();
    model.resize(std::max<std::size_t>(model.size(), 36), ' ');
    subset.resize(std::max<std::size_t>(subset.size(), 10), ' ');
    std::string n = std::to_string(r["n"].get<std::size_t>());
    n.resize(std::max<std::size_t>(n.size(), 6), ' ');
    s << model << ' ' << subset << ' ' << n << ' ' << fixed(r["f1_hate"].get<double>()) << "    "
      << fixed(r["f1_overall"].get<double>()) << '\n';
  }
  return s.str();
}

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + '\n';
  return out;
}

// Commands ---------------------------------------------------------------------

void cmd_synth(Context& ctx) {
  RunConfig& c = ctx.config();
  SynthSpec spec = c.synth;
  spec.seed = c.seed;
  const SynthCorpus corpus = synth_corpus(spec);
  // The default account budget is larger than any synthetic graph.
  if (c.graph_k == RunConfig{}.graph_k) c.graph_k = static_cast<std::size_t>(std::max(1, spec.n_accounts / 2));
  std::vector<std::string> seeds(corpus.seed_accounts.begin(), corpus.seed_accounts.end());
  ctx.write(c.corpus, serialize_corpus(corpus.records));
  ctx.write(c.edges, serialize_edges(corpus.edges));
  ctx.write(c.seeds, serialize_id_list(seeds));
  ctx.write(c.truth, serialize_ground_truth(corpus.truth));
  ctx.write(c.roles, serialize_roles(corpus.roles));
  ctx.write(c.communities, serialize_int_map(corpus.author_communities));
  ctx.write("accounts.txt", serialize_int_map(corpus.account_categories));
  ctx.write("lexicon.txt", serialize_lexicon(corpus.lexicon));
  ctx.write(kRunConfigFile, c.to_text());
  ctx.out() << "synth: " << corpus.records.size() << " tweets, " << corpus.edges.size() << " edges, "
            << seeds.size() << " seed accounts\n";
}

void cmd_graph(Context& ctx) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const std::vector<std::string> seed_list = parse_id_list(ctx.read(c.seeds));
  const std::set<std::string> seeds(seed_list.begin(), seed_list.end());
  const GraphArtifacts g = build_graph_artifacts(parse_edges(ctx.read(c.edges)), seeds, corpus_authors(records),
                                                 c.graph_k, c.pagerank);
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t v = 0; v < g.graph.num_vertices(); ++v) {
    ranked.emplace_back(g.graph.id(static_cast<int>(v)), g.ranks.scores[v]);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string scores;
  for (const auto& [id, s] : ranked) scores += id + ' ' + format_double(s) + '\n';
  ctx.write("pagerank.txt", scores);
  ctx.write("hate_accounts.txt", serialize_id_list(g.accounts.accounts()));
  ctx.write("follow_vectors.txt", serialize_follow_vectors(g.follows));
  ctx.out() << "graph: " << g.graph.num_vertices() << " vertices, pagerank converged in " << g.ranks.iterations
            << " iterations, " << g.accounts.size() << " hate accounts\n";
}

void cmd_train(Context& ctx) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const DatasetSplits splits = load_splits(ctx, records);
  const FollowVectorTable follows = load_follows(ctx);
  const auto provider = make_provider(ctx, records);
  TrainConfig tc = c.train;
  tc.seed = c.seed;
  tc.text_only = c.model.text_only;
  const TrainedModel trained = train(splits, c.model, tc, follows, *provider, [&](const EpochRecord& e) {
    ctx.log() << "epoch " << e.epoch << "  loss " << fixed(e.train_loss, 4) << "  val f1_hate "
              << fixed(e.val_f1_hate) << '\n';
  });
  ctx.write(checkpoint_name(c.variant()), serialize_checkpoint(trained));
  ctx.write("history-" + c.variant() + ".csv", history_csv(trained.history));
  ctx.out() << "train: " << c.variant() << " best epoch " << trained.best_epoch << '\n';
}

void cmd_eval(Context& ctx) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const DatasetSplits splits = load_splits(ctx, records);
  const FollowVectorTable follows = load_follows(ctx);
  const auto provider = make_provider(ctx, records);
  const TrainedModel trained = load_model(ctx, c.variant());
  std::vector<json> rows;
  const Metrics test = evaluate(trained.model, splits.test, follows, *provider);
  rows.push_back(metrics_row(c.variant(), "test", test));
  if (ctx.exists(c.roles)) {
    const auto subset = code_word_subset(splits.test, parse_roles(ctx.read(c.roles)));
    if (!subset.empty()) rows.push_back(metrics_row(c.variant(), "code_word", evaluate(trained.model, subset, follows, *provider)));
  }
  ctx.write("metrics-" + c.variant() + ".jsonl", jsonl(rows));
  ctx.write("metrics-" + c.variant() + ".txt", metrics_table(rows) + '\n' + format_metrics(test));
  ctx.out() << metrics_table(rows);
}

void cmd_cluster(Context& ctx) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const FollowVectorTable follows = load_follows(ctx);
  const auto provider = make_provider(ctx, records);
  const TrainedModel trained = load_model(ctx, c.variant());
  const std::vector<HateEmbedding> embeddings = extract_hate_embeddings(trained.model, records, follows, *provider);
  const ClusterAssignment clusters =
      agglomerative_cluster(embeddings, c.k_clusters, parse_linkage(c.linkage), parse_metric(c.metric));
  ctx.write("clusters-" + c.variant() + ".txt", serialize_clusters(clusters));

  std::map<std::string, AttentionReport> reports;
  for (const auto& r : records) {
    if (clusters.contains(r.id)) reports.emplace(r.id, explain(trained.model, r, follows, *provider));
  }
  std::string words;
  for (const auto& [cluster, ranked] : top_words(clusters, reports, static_cast<std::size_t>(c.top_words))) {
    words += "cluster " + std::to_string(cluster) + ':';
    for (const auto& [w, mass] : ranked) words += ' ' + w + '=' + fixed(mass);
    words += '\n';
  }
  ctx.write("top_words-" + c.variant() + ".txt", words);
  ctx.out() << embeddings.size() << " hate embeddings in " << c.k_clusters << " clusters\n" << words;

  if (ctx.exists(c.truth)) {
    const GroundTruth truth = parse_ground_truth(ctx.read(c.truth));
    GroundTruth scored;
    ClusterAssignment scored_clusters;
    for (const auto& [id, cluster] : clusters) {
      if (const auto it = truth.find(id); it != truth.end()) {
        scored[id] = it->second;
        scored_clusters[id] = cluster;
      }
    }
    if (scored.empty()) throw Error("no clustered tweet has a ground-truth category");
    const PurityMode mode = c.purity_mode == "by_cluster" ? PurityMode::by_cluster : PurityMode::by_category;
    const double p = purity(scored, scored_clusters, mode);
    ctx.write("purity-" + c.variant() + ".json", purity_record(p, scored.size(), c.k_clusters, mode));
    ctx.out() << "purity " << fixed(p) << " over " << scored.size() << " tweets\n";
  }
}

void cmd_explain(Context& ctx, const std::string& tweet_id) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const auto it = std::find_if(records.begin(), records.end(), [&](const TweetRecord& r) { return r.id == tweet_id; });
  if (it == records.end()) throw Error("tweet '" + tweet_id + "' is not in the corpus");
  const FollowVectorTable follows = load_follows(ctx);
  const auto provider = make_provider(ctx, records);
  const TrainedModel trained = load_model(ctx, c.variant());
  const AttentionReport report = explain(trained.model, *it, follows, *provider);
  const PerturbationImportance imp = perturb_importance(trained.model, *it, follows, *provider);

  json record = json::parse(serialize_report(report));
  record["occlusion"] = {{"tokens", imp.tokens}, {"cultural", imp.cultural}, {"social", imp.social}};
  ctx.write("explain-" + c.variant() + "-" + tweet_id + ".json", record.dump() + '\n');

  std::size_t width = std::string("cultural").size();
  for (const auto& t : report.tokens) width = std::max(width, t.size());
  auto line = [&](std::string label, double value) {
    label.resize(width, ' ');
    ctx.out() << "  " << label << "  " << (value < 0.0 ? "" : " ") << fixed(value) << '\n';
  };
  ctx.out() << render_report(report) << "\n  occlusion drop (predicted class)\n";
  for (std::size_t i = 0; i < imp.tokens.size(); ++i) line(report.tokens[i], imp.tokens[i]);
  line("cultural", imp.cultural);
  line("social", imp.social);
}

void cmd_report(Context& ctx) {
  const RunConfig& c = ctx.config();
  const std::vector<TweetRecord> records = load_corpus(ctx);
  const DatasetSplits splits = load_splits(ctx, records);
  const FollowVectorTable follows = load_follows(ctx);
  const auto provider = make_provider(ctx, records);
  std::optional<std::map<std::string, TweetRole>> roles;
  if (ctx.exists(c.roles)) roles = parse_roles(ctx.read(c.roles));
  const std::vector<TweetRecord> code_words = roles ? code_word_subset(splits.test, *roles) : std::vector<TweetRecord>{};

  auto truth_of = [](const std::vector<TweetRecord>& rs) {
    std::vector<Label> t;
    for (const auto& r : rs) t.push_back(r.label);
    return t;
  };

  std::vector<json> classification;
  LinearConfig lc = c.baseline;
  lc.seed = c.seed;
  for (const LinearKind kind : {LinearKind::logistic, LinearKind::hinge}) {
    const LinearBaseline model = LinearBaseline::fit(kind, FeatureMode::text_social_cultural, splits.train,
                                                     splits.val, follows, *provider, lc);
    const std::string name =
        kind == LinearKind::logistic ? "logistic_regression_text_sc" : "hinge_linear_svm_substitute_text_sc";
    classification.push_back(metrics_row(name, "test",
                                 compute_metrics(truth_of(splits.test), model.predict(splits.test, follows, *provider))));
    if (!code_words.empty()) {
      classification.push_back(metrics_row(name, "code_word",
                                   compute_metrics(truth_of(code_words), model.predict(code_words, follows, *provider))));
    }
  }

  std::vector<json> clustering_rows;
  std::vector<json> attention;
  for (const std::string variant : {"text_only", "text_sc"}) {
    if (!ctx.exists(checkpoint_name(variant))) continue;
    const TrainedModel trained = load_model(ctx, variant);
    classification.push_back(metrics_row(variant, "test", evaluate(trained.model, splits.test, follows, *provider)));
    if (!code_words.empty()) {
      classification.push_back(metrics_row(variant, "code_word", evaluate(trained.model, code_words, follows, *provider)));
    }
    if (ctx.exists("purity-" + variant + ".json")) {
      json row = json::parse(ctx.read("purity-" + variant + ".json"));
      row["model"] = variant;
      clustering_rows.push_back(row);
    }
    if (roles) {
      std::map<TweetRole, std::pair<ad::Vector, int>> sums;
      for (const auto& r : splits.test) {
        const TweetRole role = roles->at(r.id);
        if (role != TweetRole::code_word_hate && role != TweetRole::overt_hate) continue;
        auto& [sum, n] = sums.try_emplace(role, ad::Vector::Zero(3), 0).first->second;
        sum += explain(trained.model, r, follows, *provider).beta;
        ++n;
      }
      for (const auto& [role, acc] : sums) {
        const ad::Vector mean = acc.first / static_cast<double>(acc.second);
        attention.push_back({{"model", variant},
                             {"role", std::string(to_string(role))},
                             {"n", acc.second},
                             {"beta_text", mean(0)},
                             {"beta_cultural", mean(1)},
                             {"beta_social", mean(2)}});
      }
    }
  }

  std::string clustering_text;
  for (const auto& r : clustering_rows) {
    clustering_text += r["model"].get<std::string>() + "  purity " + fixed(r["purity"].get<double>()) + "  N " +
          std::to_string(r["N"].get<std::size_t>()) + "  k " + std::to_string(r["k"].get<int>()) + '\n';
  }
  std::string fig;
  for (const auto& r : attention) {
    fig += r["model"].get<std::string>() + "  " + r["role"].get<std::string>() + "  text " +
           fixed(r["beta_text"].get<double>()) + "  cultural " + fixed(r["beta_cultural"].get<double>()) +
           "  social " + fixed(r["beta_social"].get<double>()) + '\n';
  }
  ctx.write("classification.jsonl", jsonl(classification));
  ctx.write("classification.txt", metrics_table(classification));
  ctx.write("clustering.jsonl", jsonl(clustering_rows));
  ctx.write("clustering.txt", clustering_text);
  ctx.write("modality_attention.jsonl", jsonl(attention));
  ctx.out() << "classification\n"
            << metrics_table(classification) << "\nclustering\n"
            << clustering_text << "\nmodality attention\n"
            << fig;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-modal hate speech detection: corpus, graph features, training and analysis.", "hsd"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "key = value config file (flags win)");
  app.add_option("--seed", opt.seed, "global seed");
  app.add_option("--out", opt.out, "run directory")->capture_default_str();
  app.add_flag("--text-only", opt.text_only, "ablate the social and cultural modalities");
  app.add_option("--k-clusters", opt.k_clusters, "number of clusters")->check(CLI::PositiveNumber);
  app.add_option("--damping", opt.damping, "PageRank damping factor");

  app.add_subcommand("synth", "generate a synthetic corpus, follow graph and ground truth");
  app.add_subcommand("graph", "rank the follow graph, select hate accounts, build follow vectors");
  app.add_subcommand("train", "train the classifier");
  app.add_subcommand("eval", "score the trained classifier on the test split");
  app.add_subcommand("cluster", "cluster hate embeddings, rank top words, score purity");
  auto* explain_cmd = app.add_subcommand("explain", "token and modality attention for one tweet");
  explain_cmd->add_option("tweet_id", opt.tweet_id, "tweet id")->required();
  app.add_subcommand("report", "baseline comparison, clustering and attention summaries");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "hsd: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  const fs::path dir(opt.out);
  try {
    if (fs::exists(dir / kRunConfigFile)) config.apply(read_file(dir / kRunConfigFile), (dir / kRunConfigFile).string());
    if (!opt.config_path.empty()) config.apply(read_file(opt.config_path), opt.config_path);
    if (opt.seed) config.seed = *opt.seed;
    if (opt.text_only) config.set("text_only", "true");
    if (opt.k_clusters) config.k_clusters = *opt.k_clusters;
    if (opt.damping) config.pagerank.damping = *opt.damping;
    config.validate();
  } catch (const std::exception& e) {
    err << "hsd " << command << ": config error: " << e.what() << '\n';
    return 2;
  }

  try {
    fs::create_directories(dir);
    Context ctx(command, config, dir, out, err);
    if (command == "synth") cmd_synth(ctx);
    else if (command == "graph") cmd_graph(ctx);
    else if (command == "train") cmd_train(ctx);
    else if (command == "eval") cmd_eval(ctx);
    else if (command == "cluster") cmd_cluster(ctx);
    else if (command == "explain") cmd_explain(ctx, opt.tweet_id);
    else if (command == "report") cmd_report(ctx);
    ctx.finish();
  } catch (const std::exception& e) {
    err << "hsd " << command << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace hsd::cli
