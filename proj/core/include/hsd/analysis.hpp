#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/encoders.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/model.hpp"

namespace hsd {

/// Fused pre-classifier representation of a tweet predicted as hate.
struct HateEmbedding {
  std::string id;
  ad::Vector vector;
};

/// tweet id → cluster id in [0, k).
using ClusterAssignment = std::map<std::string, int>;

/// One forward pass worth of interpretability data.
struct AttentionReport {
  std::string id;
  std::vector<std::string> tokens;
  ad::Vector alpha;  // token weights
  ad::Vector beta;   // text, cultural, social
  ad::Vector probs;
  Label predicted = Label::none;
};

std::vector<HateEmbedding> extract_hate_embeddings(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                                                   const FollowVectorTable& follows, const CulturalProvider& provider);

enum class Linkage { average, single, complete };
enum class DistanceMetric { cosine, euclidean };

Linkage parse_linkage(std::string_view text);
DistanceMetric parse_metric(std::string_view text);

/// Cosine distance 1 - cos; a zero vector is at distance 1 from everything.
double cosine_distance(const ad::Vector& a, const ad::Vector& b);

/// Bottom-up merging until k clusters remain. Among equally distant pairs the
/// one whose (smaller, larger) least-member ids is lexicographically smallest
/// merges first. Final cluster ids are ordered by least member id.
ClusterAssignment agglomerative_cluster(const std::vector<HateEmbedding>& embeddings, int k,
                                        Linkage linkage = Linkage::average,
                                        DistanceMetric metric = DistanceMetric::cosine);

enum class PurityMode {
  by_category,  // (1/N) Σ_categories max_clusters |g ∩ c|
  by_cluster,   // (1/N) Σ_clusters max_categories |g ∩ c|
};

/// Both maps must cover the same ids.
double purity(const std::map<std::string, int>& truth, const ClusterAssignment& clusters,
              PurityMode mode = PurityMode::by_category);

using RankedWords = std::vector<std::pair<std::string, double>>;

/// Per cluster: summed alpha per word, descending, ties by word, first m.
std::map<int, RankedWords> top_words(const ClusterAssignment& assignment,
                                     const std::map<std::string, AttentionReport>& reports, std::size_t m);

AttentionReport explain(const HateSpeechModel& model, const TweetRecord& record, const FollowVectorTable& follows,
                        const CulturalProvider& provider);

/// Occlusion drops in the predicted-class probability.
struct PerturbationImportance {
  std::string id;
  Label predicted = Label::none;
  double base_probability = 0.0;
  std::vector<double> tokens;
  double cultural = 0.0;
  double social = 0.0;
};

PerturbationImportance perturb_importance(const HateSpeechModel& model, const TweetRecord& record,
                                          const FollowVectorTable& follows, const CulturalProvider& provider);

/// Spearman coefficient from the rank-difference formula with average ranks.
/// nullopt when either side has all-equal values.
std::optional<double> rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

struct AgreementResult {
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t skipped_short = 0;       // fewer than 3 tokens
  std::size_t skipped_degenerate = 0;  // all-equal ranks
};

/// Matches reports and importances by tweet id.
AgreementResult agreement(const std::vector<AttentionReport>& reports,
                          const std::vector<PerturbationImportance>& importances);

std::string serialize_clusters(const ClusterAssignment& assignment);
ClusterAssignment parse_clusters(std::string_view text);
std::string purity_record(double value, std::size_t n, int k, PurityMode mode);

std::string serialize_report(const AttentionReport& report);
std::string render_report(const AttentionReport& report);

}  // namespace hsd
