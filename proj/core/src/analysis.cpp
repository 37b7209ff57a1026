#include "hsd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hsd/error.hpp"
#include "hsd/fileio.hpp"

namespace hsd {

std::vector<HateEmbedding> extract_hate_embeddings(const HateSpeechModel& model, const std::vector<TweetRecord>& records,
                                                   const FollowVectorTable& follows, const CulturalProvider& provider) {
  std::vector<HateEmbedding> out;
  for (const auto& r : records) {
    const Prediction p = model.predict(model.prepare(r, follows, provider));
    if (p.predicted == Label::hate) out.push_back({r.id, p.fused});
  }
  return out;
}

Linkage parse_linkage(std::string_view text) {
  if (text == "average") return Linkage::average;
  if (text == "single") return Linkage::single;
  if (text == "complete") return Linkage::complete;
  throw Error("unknown linkage '" + std::string(text) + "' (expected average, single or complete)");
}

DistanceMetric parse_metric(std::string_view text) {
  if (text == "cosine") return DistanceMetric::cosine;
  if (text == "euclidean") return DistanceMetric::euclidean;
  throw Error("unknown distance metric '" + std::string(text) + "' (expected cosine or euclidean)");
}

double cosine_distance(const ad::Vector& a, const ad::Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - a.dot(b) / (na * nb);
}

ClusterAssignment agglomerative_cluster(const std::vector<HateEmbedding>& embeddings, int k, Linkage linkage,
                                        DistanceMetric metric) {
  const std::size_t n = embeddings.size();
  if (k < 1) throw Error("number of clusters must be at least 1");
  if (n < static_cast<std::size_t>(k)) {
    throw Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) + " embeddings");
  }
  // Sorting by id makes slot order coincide with least-member-id order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return embeddings[a].id < embeddings[b].id; });
  for (std::size_t i = 1; i < n; ++i) {
    if (embeddings[order[i]].id == embeddings[order[i - 1]].id) {
      throw Error("duplicate embedding id '" + embeddings[order[i]].id + "'");
    }
  }

  Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto& a = embeddings[order[i]].vector;
      const auto& b = embeddings[order[j]].vector;
      const double d = metric == DistanceMetric::cosine ? cosine_distance(a, b) : (a - b).norm();
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }

  // Each active slot holds a cluster whose least member is the slot index.
  std::vector<std::size_t> owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<double> count(n, 1.0);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  while (active.size() > static_cast<std::size_t>(k)) {
    std::size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double d = dist(static_cast<Eigen::Index>(active[x]), static_cast<Eigen::Index>(active[y]));
        if (d < best) {
          best = d;
          best_i = x;
          best_j = y;
        }
      }
    }
    const auto a = static_cast<Eigen::Index>(active[best_i]);
    const auto b = static_cast<Eigen::Index>(active[best_j]);
    const double na = count[active[best_i]];
    const double nb = count[active[best_j]];
    for (const std::size_t c : active) {
      const auto ci = static_cast<Eigen::Index>(c);
      if (ci == a || ci == b) continue;
      double d = 0.0;
      switch (linkage) {
        case Linkage::average:
          d = (na * dist(a, ci) + nb * dist(b, ci)) / (na + nb);
          break;
        case Linkage::single:
          d = std::min(dist(a, ci), dist(b, ci));
          break;
        case Linkage::complete:
          d = std::max(dist(a, ci), dist(b, ci));
          break;
      }
      dist(a, ci) = d;
      dist(ci, a) = d;
    }
    count[active[best_i]] = na + nb;
    for (auto& o : owner) {
      if (o == active[best_j]) o = active[best_i];
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_j));
  }

  ClusterAssignment out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pos = std::lower_bound(active.begin(), active.end(), owner[i]) - active.begin();
    out[embeddings[order[i]].id] = static_cast<int>(pos);
  }
  return out;
}

double purity(const std::map<std::string, int>& truth, const ClusterAssignment& clusters, PurityMode mode) {
  if (truth.empty() && clusters.empty()) throw Error("purity is undefined for an empty id set");
  if (truth.size() != clusters.size()) throw Error("ground truth and clustering cover different ids");
  std::map<std::pair<int, int>, std::size_t> overlap;  // (category, cluster)
  for (const auto& [id, category] : truth) {
    const auto it = clusters.find(id);
    if (it == clusters.end()) throw Error("id '" + id + "' has a category but no cluster");
    ++overlap[{category, it->second}];
  }
  std::map<int, std::size_t> best;
  for (const auto& [key, size] : overlap) {
    const int group = mode == PurityMode::by_category ? key.first : key.second;
    best[group] = std::max(best[group], size);
  }
  std::size_t total = 0;
  for (const auto& [group, size] : best) total += size;
  return static_cast<double>(total) / static_cast<double>(truth.size());
}

std::map<int, RankedWords> top_words(const ClusterAssignment& assignment,
                                     const std::map<std::string, AttentionReport>& reports, std::size_t m) {
  std::map<int, std::map<std::string, double>> mass;
  for (const auto& [id, cluster] : assignment) {
    const auto it = reports.find(id);
    if (it == reports.end()) throw Error("no attention report for clustered tweet '" + id + "'");
    const AttentionReport& r = it->second;
    auto& words = mass[cluster];
    for (std::size_t i = 0; i < r.tokens.size(); ++i) words[r.tokens[i]] += r.alpha(static_cast<Eigen::Index>(i));
  }
  std::map<int, RankedWords> out;
  for (const auto& [cluster, words] : mass) {
    RankedWords ranked(words.begin(), words.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > m) ranked.resize(m);
    out[cluster] = std::move(ranked);
  }
  return out;
}

AttentionReport explain(const HateSpeechModel& model, const TweetRecord& record, const FollowVectorTable& follows,
                        const CulturalProvider& provider) {
  const ExampleInput input = model.prepare(record, follows, provider);
  const Prediction p = model.predict(input);
  AttentionReport r;
  r.id = record.id;
  r.tokens = input.tokens;
  r.alpha = p.alpha;
  r.beta = p.beta;
  r.probs = p.probs;
  r.predicted = p.predicted;
  return r;
}

PerturbationImportance perturb_importance(const HateSpeechModel& model, const TweetRecord& record,
                                          const FollowVectorTable& follows, const CulturalProvider& provider) {
  const ExampleInput input = model.prepare(record, follows, provider);
  const Prediction base = model.predict(input);
  const auto cls = static_cast<Eigen::Index>(base.predicted);
  PerturbationImportance out;
  out.id = record.id;
  out.predicted = base.predicted;
  out.base_probability = base.probs(cls);
  for (std::size_t i = 0; i < input.text.word_ids.size(); ++i) {
    ExampleInput occluded = input;
    occluded.text.word_ids[i] = Vocabulary::kOov;
    const auto [first, last] = input.text.spans[i];
    for (int c = first; c <= last; ++c) occluded.text.char_ids[static_cast<std::size_t>(c)] = Vocabulary::kOov;
    out.tokens.push_back(out.base_probability - model.predict(occluded).probs(cls));
  }
  out.cultural = out.base_probability - model.predict(input, {.zero_cultural = true}).probs(cls);
  out.social = out.base_probability - model.predict(input, {.zero_social = true}).probs(cls);
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool all_equal(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

std::optional<double> rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("rank correlation needs equal-length inputs");
  if (a.size() < 2 || all_equal(a) || all_equal(b)) return std::nullopt;
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) sum_d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const double n = static_cast<double>(a.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

AgreementResult agreement(const std::vector<AttentionReport>& reports,
                          const std::vector<PerturbationImportance>& importances) {
  std::map<std::string, const PerturbationImportance*> by_id;
  for (const auto& imp : importances) by_id[imp.id] = &imp;
  AgreementResult out;
  double sum = 0.0;
  for (const auto& r : reports) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw Error("no perturbation importances for tweet '" + r.id + "'");
    const auto& tokens = it->second->tokens;
    if (static_cast<Eigen::Index>(tokens.size()) != r.alpha.size()) {
      throw DimensionError("token count mismatch for tweet '" + r.id + "'");
    }
    if (tokens.size() < 3) {
      ++out.skipped_short;
      continue;
    }
    const std::vector<double> alpha(r.alpha.data(), r.alpha.data() + r.alpha.size());
    const auto rho = rank_correlation(alpha, tokens);
    if (!rho) {
      ++out.skipped_degenerate;
      continue;
    }
    sum += *rho;
    ++out.used;
  }
  if (out.used > 0) out.mean = sum / static_cast<double>(out.used);
  return out;
}

std::string serialize_clusters(const ClusterAssignment& assignment) {
  std::string out;
  for (const auto& [id, cluster] : assignment) out += id + ' ' + std::to_string(cluster) + '\n';
  return out;
}

ClusterAssignment parse_clusters(std::string_view text) {
  ClusterAssignment out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id;
    int cluster = -1;
    std::string extra;
    if (!(fields >> id >> cluster) || (fields >> extra) || cluster < 0) {
      throw ParseError(line_no, "expected 'tweet_id cluster_id'");
    }
    if (!out.emplace(id, cluster).second) throw ParseError(line_no, "duplicate tweet id '" + id + "'");
  }
  return out;
}

std::string purity_record(double value, std::size_t n, int k, PurityMode mode) {
  nlohmann::ordered_json j;
  j["purity"] = value;
  j["N"] = n;
  j["k"] = k;
  j["mode"] = mode == PurityMode::by_category ? "by_category" : "by_cluster";
  return j.dump() + '\n';
}

namespace {

std::vector<double> to_list(const ad::Vector& v) { return {v.data(), v.data() + v.size()}; }

std::string bar(double weight, int width) {
  const int filled = static_cast<int>(std::lround(std::clamp(weight, 0.0, 1.0) * width));
  return std::string(static_cast<std::size_t>(filled), '#') + std::string(static_cast<std::size_t>(width - filled), '.');
}

}  // namespace

std::string serialize_report(const AttentionReport& report) {
  nlohmann::ordered_json j;
  j["id"] = report.id;
  j["tokens"] = report.tokens;
  j["alpha"] = to_list(report.alpha);
  j["beta"] = to_list(report.beta);
  j["probs"] = to_list(report.probs);
  j["predicted"] = std::string(to_string(report.predicted));
  return j.dump() + '\n';
}

std::string render_report(const AttentionReport& report) {
  std::size_t width = 5;
  for (const auto& t : report.tokens) width = std::max(width, t.size());
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", report.probs(static_cast<Eigen::Index>(report.predicted)));
  out << "tweet " << report.id << ": predicted " << to_string(report.predicted) << " (p=" << buf << ")\n\n";
  out << "  " << std::string("token") << std::string(width - 5 + 2, ' ') << "alpha\n";
  for (std::size_t i = 0; i < report.tokens.size(); ++i) {
    const double a = report.alpha(static_cast<Eigen::Index>(i));
    std::snprintf(buf, sizeof buf, "%.3f", a);
    out << "  " << report.tokens[i] << std::string(width - report.tokens[i].size() + 2, ' ') << buf << ' '
        << bar(a, 30) << '\n';
  }
  out << "\n  modality\n";
  static constexpr const char* kNames[] = {"text    ", "cultural", "social  "};
  for (int m = 0; m < 3; ++m) {
    const double b = report.beta(m);
    std::snprintf(buf, sizeof buf, "%.3f", b);
    out << "  " << kNames[m] << "  " << buf << ' ' << bar(b, 30) << '\n';
  }
  return out.str();
}

}  // namespace hsd
