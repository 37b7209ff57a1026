#include "hsd/pipeline.hpp"

namespace hsd {

std::set<std::string> corpus_authors(const std::vector<TweetRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.author_id);
  return out;
}

GraphArtifacts build_graph_artifacts(const std::vector<Edge>& edges, const std::set<std::string>& seeds,
                                     const std::set<std::string>& authors, std::size_t k,
                                     const PageRankOptions& options) {
  GraphArtifacts out;
  out.graph = FollowGraph::build(edges);
  out.ranks = pagerank(out.graph, options);
  out.accounts = select_hate_accounts(out.graph, out.ranks, seeds, k);
  std::vector<Edge> author_edges;
  for (const auto& e : edges) {
    if (authors.contains(e.first)) author_edges.push_back(e);
  }
  out.follows = FollowVectorTable::build(FollowGraph::build(author_edges), out.accounts);
  return out;
}

}  // namespace hsd
