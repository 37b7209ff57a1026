#include "hsd/training.hpp"

#include <cmath>
#include <numeric>

#include "hsd/error.hpp"
#include "hsd/fileio.hpp"
#include "hsd/random.hpp"

namespace hsd {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be positive");
  if (batch_size < 1) throw Error("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (early_stop_patience < 0) throw Error("early_stop_patience must be non-negative");
  if (grad_clip < 0.0) throw Error("grad_clip must be non-negative");
  if (class_weights) {
    for (const double w : *class_weights) {
      if (!(w > 0.0)) throw Error("class weights must be positive");
    }
  }
}

AdamOptimizer::AdamOptimizer(const ad::ParameterSet& params, double learning_rate, double beta1, double beta2,
                             double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.value(static_cast<int>(i));
    m_.push_back(ad::Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(ad::Matrix::Zero(p.rows(), p.cols()));
  }
}

void AdamOptimizer::step(ad::ParameterSet& params, const ad::Gradients& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const ad::Matrix& g = grads[static_cast<int>(i)];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    params.value(static_cast<int>(i)).array() -=
        lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

namespace {

std::vector<ExampleInput> prepare_all(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                                      const FollowVectorTable& follows, const CulturalProvider& provider) {
  std::vector<ExampleInput> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(model.prepare(r, follows, provider));
  return out;
}

double f1_hate_of(const HateSpeechModel& model, const std::vector<ExampleInput>& inputs) {
  std::vector<Label> truth, pred;
  for (const auto& in : inputs) {
    truth.push_back(in.label);
    pred.push_back(model.predict(in).predicted);
  }
  return compute_metrics(truth, pred).f1_hate;
}

}  // namespace

TrainedModel train(const DatasetSplits& splits, const ModelConfig& model_config, const TrainConfig& train_config,
                   const FollowVectorTable& follows, const CulturalProvider& provider, const EpochObserver& observer) {
  train_config.validate();
  if (splits.train.empty()) throw Error("train: training split is empty");
  if (splits.val.empty()) throw Error("train: validation split is empty");
  if (follows.dimension() == 0) throw Error("train: follow vectors have zero length");

  ModelConfig config = model_config;
  config.text_only = model_config.text_only || train_config.text_only;

  std::vector<TokenizedText> tokenized;
  tokenized.reserve(splits.train.size());
  for (const auto& r : splits.train) tokenized.push_back(tokenize(r.text));
  auto [words, chars] = build_vocabularies(tokenized, config.min_word_count);

  TrainedModel result{HateSpeechModel(config, std::move(words), std::move(chars),
                                      static_cast<int>(follows.dimension()), train_config.seed),
                      train_config, {}, 0};
  HateSpeechModel& model = result.model;
  const std::vector<ExampleInput> train_inputs = prepare_all(model, splits.train, follows, provider);
  const std::vector<ExampleInput> val_inputs = prepare_all(model, splits.val, follows, provider);

  AdamOptimizer optimizer(model.params(), train_config.learning_rate);
  ad::Gradients grads(model.params());
  Rng shuffle_rng(derive_seed(train_config.seed, "shuffle"));
  std::vector<std::size_t> order(train_inputs.size());
  std::iota(order.begin(), order.end(), 0);

  ad::ParameterSet best = model.params();
  double best_f1 = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(train_config.batch_size)) {
      ++batch_index;
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(train_config.batch_size));
      const double inv = 1.0 / static_cast<double>(end - start);
      grads.zero();
      double batch_loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const ExampleInput& in = train_inputs[order[b]];
        ad::Tape tape(model.params(), &grads);
        const ForwardPass pass = model.forward(tape, in);
        const ad::Var loss = xent_loss(pass.probs, in.label);
        const double weight =
            train_config.class_weights ? (*train_config.class_weights)[static_cast<std::size_t>(in.label)] : 1.0;
        batch_loss += loss.scalar();
        tape.backward(loss, weight * inv);
      }
      if (!std::isfinite(batch_loss) || !grads.all_finite()) {
        throw DivergenceError(epoch, batch_index, "non-finite loss or gradient");
      }
      if (train_config.grad_clip > 0.0) {
        double sq = 0.0;
        for (std::size_t i = 0; i < grads.size(); ++i) sq += grads[static_cast<int>(i)].squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > train_config.grad_clip) grads.scale(train_config.grad_clip / norm);
      }
      optimizer.step(model.params(), grads);
      epoch_loss += batch_loss;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    rec.val_f1_hate = f1_hate_of(model, val_inputs);
    result.history.push_back(rec);
    if (observer) observer(rec);

    if (rec.val_f1_hate > best_f1) {
      best_f1 = rec.val_f1_hate;
      best = model.params();
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale > train_config.early_stop_patience) {
      break;
    }
  }
  model.params() = std::move(best);
  return result;
}

std::vector<Label> predict_labels(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                                  const FollowVectorTable& follows, const CulturalProvider& provider) {
  std::vector<Label> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(model.predict(model.prepare(r, follows, provider)).predicted);
  return out;
}

Metrics evaluate(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                 const FollowVectorTable& follows, const CulturalProvider& provider) {
  if (records.empty()) throw Error("evaluate: no records");
  std::vector<Label> truth;
  truth.reserve(records.size());
  for (const auto& r : records) truth.push_back(r.label);
  const std::vector<Label> pred = predict_labels(model, records, follows, provider);
  return compute_metrics(truth, pred);
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_f1_hate\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + ',' + format_double(h.train_loss) + ',' + format_double(h.val_f1_hate) + '\n';
  }
  return out;
}

}  // namespace hsd
