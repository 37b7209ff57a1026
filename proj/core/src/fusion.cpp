#include "hsd/fusion.hpp"

#include <array>
#include <cmath>

#include "hsd/encoders.hpp"
#include "hsd/error.hpp"
#include "hsd/random.hpp"

namespace hsd {

using ad::Matrix;
using ad::Tape;
using ad::Var;

FusionLayer::FusionLayer(const FusionConfig& c, ad::ParameterSet& params, Rng& rng) : config_(c) {
  params.add("fusion.text.w", xavier(c.fused_dim, c.text_dim, rng));
  params.add("fusion.text.b", Matrix::Zero(c.fused_dim, 1));
  params.add("fusion.cultural.w", xavier(c.fused_dim, c.cultural_dim, rng));
  params.add("fusion.cultural.b", Matrix::Zero(c.fused_dim, 1));
  params.add("fusion.social.w", xavier(c.fused_dim, c.social_dim, rng));
  params.add("fusion.social.b", Matrix::Zero(c.fused_dim, 1));
  params.add("fusion.att.w", xavier(c.attention_dim, c.fused_dim, rng));
  params.add("fusion.att.b", Matrix::Zero(c.attention_dim, 1));
  params.add("fusion.att.v", xavier(1, c.attention_dim, rng));
  params.add("classifier.w", xavier(kNumClasses, c.fused_dim, rng));
  params.add("classifier.b", Matrix::Zero(kNumClasses, 1));
  *this = FusionLayer(c, static_cast<const ad::ParameterSet&>(params));
}

FusionLayer::FusionLayer(const FusionConfig& c, const ad::ParameterSet& params) : config_(c) {
  auto get = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    const int i = params.index_of(name);
    const Matrix& m = params.value(i);
    if (m.rows() != rows || m.cols() != cols) throw DimensionError("parameter " + name + " has the wrong shape");
    return i;
  };
  text_w_ = get("fusion.text.w", c.fused_dim, c.text_dim);
  text_b_ = get("fusion.text.b", c.fused_dim, 1);
  cult_w_ = get("fusion.cultural.w", c.fused_dim, c.cultural_dim);
  cult_b_ = get("fusion.cultural.b", c.fused_dim, 1);
  soc_w_ = get("fusion.social.w", c.fused_dim, c.social_dim);
  soc_b_ = get("fusion.social.b", c.fused_dim, 1);
  att_w_ = get("fusion.att.w", c.attention_dim, c.fused_dim);
  att_b_ = get("fusion.att.b", c.attention_dim, 1);
  att_v_ = get("fusion.att.v", 1, c.attention_dim);
  out_w_ = get("classifier.w", kNumClasses, c.fused_dim);
  out_b_ = get("classifier.b", kNumClasses, 1);
}

FusionOutput FusionLayer::fuse(Tape& tape, Var text, Var cultural, Var social) const {
  auto check = [](Var v, int dim, const char* what) {
    if (v.rows() != dim || v.cols() != 1) {
      throw DimensionError(std::string("fuse: ") + what + " vector has " + std::to_string(v.rows()) +
                           " values, expected " + std::to_string(dim));
    }
  };
  check(text, config_.text_dim, "text");
  const Var v_text = ad::tanh(ad::add(ad::matmul(tape.param(text_w_), text), tape.param(text_b_)));

  FusionOutput out;
  if (config_.text_only) {
    out.fused = v_text;
    out.beta = tape.constant((Matrix(3, 1) << 1.0, 0.0, 0.0).finished());
    const std::array<Var, 3> cols{v_text, tape.constant(Matrix::Zero(config_.fused_dim, 1)),
                                  tape.constant(Matrix::Zero(config_.fused_dim, 1))};
    out.projected = ad::hstack(cols);
    return out;
  }
  check(cultural, config_.cultural_dim, "cultural");
  check(social, config_.social_dim, "social");
  const Var v_cult = ad::tanh(ad::add(ad::matmul(tape.param(cult_w_), cultural), tape.param(cult_b_)));
  const Var v_soc = ad::tanh(ad::add(ad::matmul(tape.param(soc_w_), social), tape.param(soc_b_)));
  const std::array<Var, 3> cols{v_text, v_cult, v_soc};
  out.projected = ad::hstack(cols);
  const Var keys = ad::tanh(ad::add(ad::matmul(tape.param(att_w_), out.projected), tape.param(att_b_)));
  out.beta = ad::softmax(ad::transpose(ad::matmul(tape.param(att_v_), keys)));
  out.fused = ad::matmul(out.projected, out.beta);
  return out;
}

Var FusionLayer::logits(Tape& tape, Var fused) const {
  if (fused.rows() != config_.fused_dim || fused.cols() != 1) throw DimensionError("classify: dimension mismatch");
  return ad::add(ad::matmul(tape.param(out_w_), fused), tape.param(out_b_));
}

Var FusionLayer::classify(Tape& tape, Var fused) const { return ad::softmax(logits(tape, fused)); }

double xent_loss(const ad::Vector& probs, Label label) {
  const auto i = static_cast<Eigen::Index>(label);
  if (probs.size() != kNumClasses) throw DimensionError("xent_loss: expected 3 probabilities");
  return -std::log(std::max(probs(i), kProbabilityFloor));
}

Var xent_loss(Var probs, Label label) {
  return ad::neg_log_prob(probs, static_cast<Eigen::Index>(label), kProbabilityFloor);
}

}  // namespace hsd
