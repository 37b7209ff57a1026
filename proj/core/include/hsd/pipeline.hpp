#pragma once

#include <set>
#include <string>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/hategraph.hpp"

namespace hsd {

/// Everything the social encoder needs from the follow graph.
struct GraphArtifacts {
  FollowGraph graph;
  PageRankResult ranks;
  HateAccountSet accounts;
  FollowVectorTable follows;
};

std::set<std::string> corpus_authors(const std::vector<TweetRecord>& records);

/// Ranks the full graph, expands the seeds to the top-k accounts, and builds
/// follow vectors from the edges leaving corpus authors.
GraphArtifacts build_graph_artifacts(const std::vector<Edge>& edges, const std::set<std::string>& seeds,
                                     const std::set<std::string>& authors, std::size_t k,
                                     const PageRankOptions& options = {});

}  // namespace hsd
