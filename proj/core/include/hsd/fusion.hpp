#pragma once

#include "hsd/autodiff.hpp"
#include "hsd/corpus.hpp"

namespace hsd {

class Rng;

/// Modality order used by every beta vector.
enum class Modality : int { text = 0, cultural = 1, social = 2 };
inline constexpr int kNumModalities = 3;

struct FusionConfig {
  int text_dim = 64;
  int cultural_dim = 16;
  int social_dim = 16;
  int fused_dim = 64;
  int attention_dim = 32;
  bool text_only = false;
};

struct FusionOutput {
  ad::Var fused;      // fused_dim × 1, the hate embedding R^h
  ad::Var beta;       // 3 × 1 modality weights (text, cultural, social)
  ad::Var projected;  // fused_dim × 3, projected modality vectors as columns
};

/// Late fusion: each modality is projected (affine + tanh) to a common
/// width, scored by additive attention with one learned query shared across
/// modalities, and combined as the beta-weighted sum.
///
/// With `text_only` set the cultural and social inputs are ignored and the
/// fused vector is the projected text vector with beta = (1, 0, 0).
class FusionLayer {
 public:
  FusionLayer(const FusionConfig& config, ad::ParameterSet& params, Rng& rng);
  FusionLayer(const FusionConfig& config, const ad::ParameterSet& params);

  const FusionConfig& config() const { return config_; }

  FusionOutput fuse(ad::Tape& tape, ad::Var text, ad::Var cultural, ad::Var social) const;

  /// Affine layer to class logits.
  ad::Var logits(ad::Tape& tape, ad::Var fused) const;

  /// softmax(logits(fused)).
  ad::Var classify(ad::Tape& tape, ad::Var fused) const;

 private:
  FusionConfig config_;
  int text_w_ = -1, text_b_ = -1, cult_w_ = -1, cult_b_ = -1, soc_w_ = -1, soc_b_ = -1;
  int att_w_ = -1, att_b_ = -1, att_v_ = -1;
  int out_w_ = -1, out_b_ = -1;
};

inline constexpr double kProbabilityFloor = 1e-12;

/// -log(max(probs[label], 1e-12)).
double xent_loss(const ad::Vector& probs, Label label);
ad::Var xent_loss(ad::Var probs, Label label);

}  // namespace hsd
