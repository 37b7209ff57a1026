#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hsd {

using Edge = std::pair<std::string, std::string>;  // follower, followee

/// Directed follower → followee graph. Vertices are kept in ascending id
/// order, which is the order every traversal uses. Immutable after build.
class FollowGraph {
 public:
  FollowGraph() = default;

  /// Vertices are the union of endpoints; duplicate edges collapse.
  static FollowGraph build(const std::vector<Edge>& edges);

  std::size_t num_vertices() const { return ids_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& vertices() const { return ids_; }
  const std::string& id(int v) const { return ids_[static_cast<std::size_t>(v)]; }

  /// Vertex index or -1.
  int index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id) >= 0; }

  /// Sorted followee indices of `v`.
  const std::vector<int>& out_edges(int v) const { return out_[static_cast<std::size_t>(v)]; }

  /// Edges in (follower index, followee index) order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> out_;
  std::size_t num_edges_ = 0;
};

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-10;
  int max_iter = 200;
};

struct PageRankResult {
  std::vector<double> scores;  // by vertex index
  int iterations = 0;
  double last_delta = 0.0;     // L1 change of the final iteration

  std::map<std::string, double> by_account(const FollowGraph& graph) const;
};

/// Power iteration with uniform teleport; dangling mass is spread uniformly.
/// Stops once the L1 change falls below `tol` or after `max_iter` iterations.
PageRankResult pagerank(const FollowGraph& graph, PageRankOptions options = {});

/// Ordered account list: descending PageRank, ties by ascending id. The
/// position of an account is its index in every follow vector.
class HateAccountSet {
 public:
  HateAccountSet() = default;
  explicit HateAccountSet(std::vector<std::string> ordered);

  std::size_t size() const { return accounts_.size(); }
  bool empty() const { return accounts_.empty(); }
  const std::vector<std::string>& accounts() const { return accounts_; }
  int index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id) >= 0; }

  friend bool operator==(const HateAccountSet& a, const HateAccountSet& b) { return a.accounts_ == b.accounts_; }

 private:
  std::vector<std::string> accounts_;
  std::unordered_map<std::string, int> index_;
};

/// Seeds plus the highest-ranked non-seed vertices until `k` accounts are
/// held (or the graph is exhausted). Throws if k < |seeds| or a seed is not a
/// vertex.
HateAccountSet select_hate_accounts(const FollowGraph& graph, const std::set<std::string>& seeds, std::size_t k,
                                    PageRankOptions options = {});

/// Same selection from precomputed scores.
HateAccountSet select_hate_accounts(const FollowGraph& graph, const PageRankResult& ranks,
                                    const std::set<std::string>& seeds, std::size_t k);

/// Subgraph keeping only edges whose followee is a hate account.
FollowGraph project_hate_graph(const FollowGraph& author_edges, const HateAccountSet& hate_accounts);

struct BinaryFollowVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t popcount() const;
  std::string to_string() const;
  static BinaryFollowVector from_string(std::string_view s);

  friend bool operator==(const BinaryFollowVector&, const BinaryFollowVector&) = default;
};

/// Bit i set iff the author follows hate account i. Unknown authors get the
/// zero vector.
BinaryFollowVector follow_vector(std::string_view author_id, const FollowGraph& author_edges,
                                 const HateAccountSet& hate_accounts);

/// Author → follow vector lookup with a zero-vector fallback.
class FollowVectorTable {
 public:
  FollowVectorTable() = default;
  FollowVectorTable(HateAccountSet accounts, std::map<std::string, BinaryFollowVector> vectors);

  /// Vectors for every follower vertex of `author_edges`.
  static FollowVectorTable build(const FollowGraph& author_edges, const HateAccountSet& hate_accounts);

  const HateAccountSet& accounts() const { return accounts_; }
  const std::map<std::string, BinaryFollowVector>& vectors() const { return vectors_; }
  std::size_t dimension() const { return accounts_.size(); }
  const BinaryFollowVector& lookup(const std::string& author_id) const;

 private:
  HateAccountSet accounts_;
  std::map<std::string, BinaryFollowVector> vectors_;
  BinaryFollowVector zero_;
};

// File formats ---------------------------------------------------------------

/// "follower followee" per line, whitespace separated; '#' starts a comment.
std::vector<Edge> parse_edges(std::istream& in);
std::vector<Edge> parse_edges(std::string_view text);
std::string serialize_edges(const std::vector<Edge>& edges);

/// One id per line.
std::vector<std::string> parse_id_list(std::string_view text);
std::string serialize_id_list(const std::vector<std::string>& ids);

/// "author_id bitstring" per line.
std::string serialize_follow_vectors(const FollowVectorTable& table);
FollowVectorTable parse_follow_vectors(const HateAccountSet& accounts, std::string_view text);

}  // namespace hsd
