#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hsd/analysis.hpp"
#include "hsd/baselines.hpp"
#include "hsd/corpus.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/model.hpp"
#include "hsd/synth.hpp"
#include "hsd/training.hpp"

namespace hsd::cli {

/// Every knob of a run. Serialized as "key = value" lines; relative paths
/// resolve against the run directory.
struct RunConfig {
  std::uint64_t seed = 1;

  std::string corpus = "corpus.jsonl";
  std::string edges = "edges.txt";
  std::string seeds = "seeds.txt";
  std::string truth = "truth.txt";
  std::string roles = "roles.txt";
  std::string communities = "communities.txt";
  bool drop_spam = false;

  SynthSpec synth;
  SplitRatios splits;

  PageRankOptions pagerank;
  std::size_t graph_k = 10000;

  ModelConfig model;
  TrainConfig train;

  std::string cultural_provider = "auto";  // auto, synth, stub
  double cultural_signal = 0.8;
  double cultural_noise = 0.5;

  LinearConfig baseline;

  int k_clusters = 5;
  std::string linkage = "average";
  std::string metric = "cosine";
  std::string purity_mode = "by_category";
  int top_words = 5;

  /// Throws hsd::Error for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  /// Applies "key = value" lines; '#' starts a comment.
  void apply(std::string_view text, const std::string& origin);
  void validate() const;

  std::string to_text() const;
  std::string hash() const;
  std::string variant() const { return model.text_only ? "text_only" : "text_sc"; }
};

std::vector<std::string> config_keys();

}  // namespace hsd::cli
