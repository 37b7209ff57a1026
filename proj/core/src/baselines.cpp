#include "hsd/baselines.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "hsd/error.hpp"
#include "hsd/random.hpp"

namespace hsd {

std::string_view to_string(LinearKind kind) { return kind == LinearKind::logistic ? "logistic" : "hinge"; }

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::text ? "text" : "text+social+cultural";
}

LinearBaseline::SparseFeatures LinearBaseline::features(const TweetRecord& record, const FollowVectorTable& follows,
                                                        const CulturalProvider& provider) const {
  SparseFeatures x;
  const TokenizedText tokens = tokenize(record.text);
  std::map<int, double> tf;
  const double inv = 1.0 / static_cast<double>(tokens.words.size());
  for (const auto& w : tokens.words) tf[words_.lookup(w)] += inv;
  for (const auto& [i, v] : tf) {
    if (i != Vocabulary::kOov) x.emplace_back(i, v);
  }
  if (mode_ == FeatureMode::text_social_cultural) {
    const int base = words_.size();
    const BinaryFollowVector& f = follows.lookup(record.author_id);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.bits[i]) x.emplace_back(base + static_cast<int>(i), 1.0);
    }
    const ad::Vector q = encode_cultural(record.author_id, provider);
    for (int i = 0; i < cultural_dim_; ++i) x.emplace_back(base + follow_dim_ + i, q(i));
  }
  return x;
}

Eigen::Vector3d LinearBaseline::scores(const SparseFeatures& x) const {
  Eigen::Vector3d s = bias_;
  for (const auto& [i, v] : x) s += weights_.col(i) * v;
  return s;
}

LinearBaseline LinearBaseline::fit(LinearKind kind, FeatureMode mode, const std::vector<TweetRecord>& train,
                                   const std::vector<TweetRecord>& val, const FollowVectorTable& follows,
                                   const CulturalProvider& provider, const LinearConfig& config) {
  if (train.empty()) throw Error("linear baseline: training split is empty");
  LinearBaseline model;
  model.kind_ = kind;
  model.mode_ = mode;
  std::vector<TokenizedText> tokenized;
  for (const auto& r : train) tokenized.push_back(tokenize(r.text));
  model.words_ = build_vocabularies(tokenized, config.min_word_count).first;
  if (mode == FeatureMode::text_social_cultural) {
    model.follow_dim_ = static_cast<int>(follows.dimension());
    model.cultural_dim_ = provider.dimension();
  }
  const int dim = model.words_.size() + model.follow_dim_ + model.cultural_dim_;
  model.weights_ = Eigen::MatrixXd::Zero(3, dim);

  std::vector<SparseFeatures> xs;
  xs.reserve(train.size());
  for (const auto& r : train) xs.push_back(model.features(r, follows, provider));

  // Adam on dense parameters; gradients are touched sparsely per example.
  Eigen::MatrixXd m_w = Eigen::MatrixXd::Zero(3, dim), v_w = m_w, g_w = m_w;
  Eigen::Vector3d m_b = Eigen::Vector3d::Zero(), v_b = m_b, g_b = m_b;
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;

  Rng rng(derive_seed(config.seed, "linear-shuffle"));
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);

  LinearBaseline best = model;
  double best_f1 = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const double inv = 1.0 / static_cast<double>(end - start);
      g_w = config.l2 * model.weights_;
      g_b.setZero();
      for (std::size_t b = start; b < end; ++b) {
        const SparseFeatures& x = xs[order[b]];
        const int y = static_cast<int>(train[order[b]].label);
        const Eigen::Vector3d s = model.scores(x);
        Eigen::Vector3d ds = Eigen::Vector3d::Zero();
        if (kind == LinearKind::logistic) {
          const Eigen::Vector3d p = ad::softmax_values(s);
          ds = p;
          ds(y) -= 1.0;
        } else {
          int rival = -1;
          for (int c = 0; c < 3; ++c) {
            if (c != y && (rival < 0 || s(c) > s(rival))) rival = c;
          }
          if (1.0 + s(rival) - s(y) > 0.0) {
            ds(rival) = 1.0;
            ds(y) = -1.0;
          }
        }
        ds *= inv;
        g_b += ds;
        for (const auto& [i, v] : x) g_w.col(i) += ds * v;
      }
      ++t;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
      m_w = beta1 * m_w + (1 - beta1) * g_w;
      v_w = beta2 * v_w + (1 - beta2) * g_w.cwiseProduct(g_w);
      model.weights_.array() -= config.learning_rate * (m_w.array() / c1) / ((v_w.array() / c2).sqrt() + eps);
      m_b = beta1 * m_b + (1 - beta1) * g_b;
      v_b = beta2 * v_b + (1 - beta2) * g_b.cwiseProduct(g_b);
      model.bias_.array() -= config.learning_rate * (m_b.array() / c1) / ((v_b.array() / c2).sqrt() + eps);
    }
    if (val.empty()) {
      best = model;
      continue;
    }
    std::vector<Label> truth;
    for (const auto& r : val) truth.push_back(r.label);
    const double f1 = compute_metrics(truth, model.predict(val, follows, provider)).f1_hate;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = model;
    }
  }
  return best;
}

Label LinearBaseline::predict(const TweetRecord& record, const FollowVectorTable& follows,
                              const CulturalProvider& provider) const {
  const Eigen::Vector3d s = scores(features(record, follows, provider));
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (s(c) > s(best)) best = c;
  }
  return static_cast<Label>(best);
}

std::vector<Label> LinearBaseline::predict(const std::vector<TweetRecord>& records, const FollowVectorTable& follows,
                                           const CulturalProvider& provider) const {
  std::vector<Label> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(predict(r, follows, provider));
  return out;
}

Metrics train_linear_baseline(LinearKind kind, const DatasetSplits& splits, FeatureMode mode,
                              const FollowVectorTable& follows, const CulturalProvider& provider,
                              const LinearConfig& config) {
  if (splits.test.empty()) throw Error("linear baseline: test split is empty");
  const LinearBaseline model = LinearBaseline::fit(kind, mode, splits.train, splits.val, follows, provider, config);
  std::vector<Label> truth;
  for (const auto& r : splits.test) truth.push_back(r.label);
  return compute_metrics(truth, model.predict(splits.test, follows, provider));
}

}  // namespace hsd
