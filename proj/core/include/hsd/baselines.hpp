#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/encoders.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/metrics.hpp"
#include "hsd/text.hpp"

namespace hsd {

/// `hinge` is a multiclass (Crammer-Singer) hinge-loss linear model standing
/// in for an SVM; it is trained by gradient descent, not a QP solver.
enum class LinearKind { logistic, hinge };
enum class FeatureMode { text, text_social_cultural };

std::string_view to_string(LinearKind kind);
std::string_view to_string(FeatureMode mode);

struct LinearConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.01;
  double l2 = 1e-4;
  int min_word_count = 1;
  std::uint64_t seed = 1;
};

/// Bag-of-words term-frequency features, optionally followed by the binary
/// follow vector and the cultural vector, under a linear 3-class scorer.
class LinearBaseline {
 public:
  /// Fits on `train`; the epoch with the best `val` f1_hate is kept.
  static LinearBaseline fit(LinearKind kind, FeatureMode mode, const std::vector<TweetRecord>& train,
                            const std::vector<TweetRecord>& val, const FollowVectorTable& follows,
                            const CulturalProvider& provider, const LinearConfig& config = {});

  LinearKind kind() const { return kind_; }
  FeatureMode mode() const { return mode_; }

  Label predict(const TweetRecord& record, const FollowVectorTable& follows, const CulturalProvider& provider) const;
  std::vector<Label> predict(const std::vector<TweetRecord>& records, const FollowVectorTable& follows,
                             const CulturalProvider& provider) const;

 private:
  using SparseFeatures = std::vector<std::pair<int, double>>;

  SparseFeatures features(const TweetRecord& record, const FollowVectorTable& follows,
                          const CulturalProvider& provider) const;
  Eigen::Vector3d scores(const SparseFeatures& x) const;

  LinearKind kind_ = LinearKind::logistic;
  FeatureMode mode_ = FeatureMode::text;
  Vocabulary words_;
  int follow_dim_ = 0;
  int cultural_dim_ = 0;
  Eigen::MatrixXd weights_;  // 3 × features
  Eigen::Vector3d bias_ = Eigen::Vector3d::Zero();
};

/// Fit on splits.train (model selection on splits.val), score splits.test.
Metrics train_linear_baseline(LinearKind kind, const DatasetSplits& splits, FeatureMode mode,
                              const FollowVectorTable& follows, const CulturalProvider& provider,
                              const LinearConfig& config = {});

}  // namespace hsd
