#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/encoders.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/metrics.hpp"
#include "hsd/model.hpp"

namespace hsd {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int early_stop_patience = 3;
  std::optional<std::array<double, kNumClasses>> class_weights;
  bool text_only = false;
  double grad_clip = 5.0;  // global L2 norm, 0 disables

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_f1_hate = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainedModel {
  HateSpeechModel model;
  TrainConfig train_config;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

/// Moment-based per-parameter step sizes.
class AdamOptimizer {
 public:
  AdamOptimizer(const ad::ParameterSet& params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void step(ad::ParameterSet& params, const ad::Gradients& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<ad::Matrix> m_, v_;
};

/// Per-epoch callback, e.g. for progress logging.
using EpochObserver = std::function<void(const EpochRecord&)>;

/// Mini-batch training with cross-entropy, early stopping on validation
/// f1_hate. Returns the parameters of the best validation epoch. Vocabularies
/// are built from the training split.
TrainedModel train(const DatasetSplits& splits, const ModelConfig& model_config, const TrainConfig& train_config,
                   const FollowVectorTable& follows, const CulturalProvider& provider,
                   const EpochObserver& observer = {});

std::vector<Label> predict_labels(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                                  const FollowVectorTable& follows, const CulturalProvider& provider);

Metrics evaluate(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                 const FollowVectorTable& follows, const CulturalProvider& provider);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace hsd
