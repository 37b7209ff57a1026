#include "hsd/metrics.hpp"

#include <cstdio>

#include "hsd/error.hpp"

namespace hsd {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

Metrics metrics_from_confusion(const Confusion& confusion) {
  Metrics m;
  m.confusion = confusion;
  for (int c = 0; c < kNumClasses; ++c) {
    long tp = confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    long support = 0;
    long predicted = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      support += confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      predicted += confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
    }
    ClassScores& s = m.per_class[static_cast<std::size_t>(c)];
    s.support = support;
    s.precision = ratio(static_cast<double>(tp), static_cast<double>(predicted));
    s.recall = ratio(static_cast<double>(tp), static_cast<double>(support));
    s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    m.total += support;
  }
  m.f1_hate = m.scores(Label::hate).f1;
  for (const auto& s : m.per_class) m.f1_overall += ratio(static_cast<double>(s.support), static_cast<double>(m.total)) * s.f1;
  return m;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.empty()) throw Error("metrics: no records");
  if (truth.size() != predicted.size()) throw Error("metrics: truth and predictions differ in length");
  Confusion confusion{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return metrics_from_confusion(confusion);
}

std::string format_metrics(const Metrics& m) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %8s\n", "class", "precision", "recall", "f1", "support");
  out += line;
  for (const Label l : kAllLabels) {
    const auto& s = m.scores(l);
    std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.4f %8ld\n", std::string(to_string(l)).c_str(),
                  s.precision, s.recall, s.f1, s.support);
    out += line;
  }
  std::snprintf(line, sizeof line, "f1_hate %.4f  f1_overall %.4f  n %ld\n", m.f1_hate, m.f1_overall, m.total);
  out += line;
  return out;
}

}  // namespace hsd
