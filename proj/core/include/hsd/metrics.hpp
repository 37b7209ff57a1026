#pragma once

#include <array>
#include <span>
#include <string>

#include "hsd/corpus.hpp"

namespace hsd {

/// confusion[true][predicted]
using Confusion = std::array<std::array<long, kNumClasses>, kNumClasses>;

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

/// Classification scores. Any ratio with a zero denominator is 0.
/// f1_overall is the support-weighted mean of per-class F1.
struct Metrics {
  Confusion confusion{};
  std::array<ClassScores, kNumClasses> per_class{};
  double f1_hate = 0.0;
  double f1_overall = 0.0;
  long total = 0;

  const ClassScores& scores(Label label) const { return per_class[static_cast<std::size_t>(label)]; }
};

Metrics metrics_from_confusion(const Confusion& confusion);

/// Throws when the inputs are empty or differ in length.
Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// Aligned text table of per-class and aggregate scores.
std::string format_metrics(const Metrics& m);

}  // namespace hsd
