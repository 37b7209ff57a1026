#include <benchmark/benchmark.h>

#include "hsd/analysis.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/model.hpp"
#include "hsd/random.hpp"
#include "hsd/text.hpp"

using namespace hsd;

namespace {

std::vector<Edge> random_edges(int n, int out_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) {
    for (int e = 0; e < out_degree; ++e) {
      edges.emplace_back("v" + std::to_string(v), "v" + std::to_string(rng.between(0, n - 1)));
    }
  }
  return edges;
}

}  // namespace

static void BM_PageRank(benchmark::State& state) {
  const FollowGraph g = FollowGraph::build(random_edges(static_cast<int>(state.range(0)), 8, 1));
  for (auto _ : state) benchmark::DoNotOptimize(pagerank(g).scores.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PageRank)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_ModelPredict(benchmark::State& state) {
  const int n_words = static_cast<int>(state.range(0));
  std::string text;
  for (int i = 0; i < n_words; ++i) text += "word" + std::to_string(i % 50) + ' ';
  const auto [words, chars] = build_vocabularies({tokenize(text)}, 1);
  const HateSpeechModel model(ModelConfig{}, words, chars, 100, 1);

  ExampleInput in;
  in.text = encode_tokens(tokenize(text), model.words(), model.chars(), model.config().max_words);
  in.follow = ad::Vector::Zero(100);
  in.cultural = ad::Vector::Zero(model.config().cultural_dim);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(in).probs.data());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ModelPredict)->Arg(8)->Arg(16)->Arg(32);

static void BM_Cluster(benchmark::State& state) {
  Rng rng(3);
  std::vector<HateEmbedding> points;
  for (int i = 0; i < state.range(0); ++i) {
    ad::Vector v(16);
    for (int d = 0; d < 16; ++d) v(d) = rng.uniform(-1.0, 1.0);
    points.push_back({"p" + std::to_string(10000 + i), v});
  }
  for (auto _ : state) benchmark::DoNotOptimize(agglomerative_cluster(points, 5).size());
}
BENCHMARK(BM_Cluster)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
