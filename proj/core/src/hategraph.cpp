#include "hsd/hategraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hsd/error.hpp"

namespace hsd {

FollowGraph FollowGraph::build(const std::vector<Edge>& edges) {
  FollowGraph g;
  std::set<std::string> ids;
  for (const auto& [a, b] : edges) {
    ids.insert(a);
    ids.insert(b);
  }
  g.ids_.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < g.ids_.size(); ++i) g.index_.emplace(g.ids_[i], static_cast<int>(i));
  g.out_.resize(g.ids_.size());
  for (const auto& [a, b] : edges) g.out_[static_cast<std::size_t>(g.index_.at(a))].push_back(g.index_.at(b));
  for (auto& adj : g.out_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    g.num_edges_ += adj.size();
  }
  return g;
}

int FollowGraph::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? -1 : it->second;
}

std::vector<Edge> FollowGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (std::size_t u = 0; u < out_.size(); ++u) {
    for (const int v : out_[u]) out.emplace_back(ids_[u], ids_[static_cast<std::size_t>(v)]);
  }
  return out;
}

std::map<std::string, double> PageRankResult::by_account(const FollowGraph& graph) const {
  std::map<std::string, double> out;
  for (std::size_t v = 0; v < scores.size(); ++v) out.emplace(graph.id(static_cast<int>(v)), scores[v]);
  return out;
}

PageRankResult pagerank(const FollowGraph& graph, PageRankOptions options) {
  if (graph.empty()) throw Error("pagerank: graph has no vertices");
  if (!(options.damping > 0.0 && options.damping < 1.0)) throw Error("pagerank: damping must lie in (0, 1)");
  if (!(options.tol > 0.0)) throw Error("pagerank: tolerance must be positive");
  if (options.max_iter < 1) throw Error("pagerank: max_iter must be at least 1");

  const std::size_t n = graph.num_vertices();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double d = options.damping;
  PageRankResult result;
  std::vector<double> x(n, inv_n);
  std::vector<double> next(n);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      const auto& adj = graph.out_edges(static_cast<int>(u));
      if (adj.empty()) {
        dangling += x[u];
        continue;
      }
      const double share = x[u] / static_cast<double>(adj.size());
      for (const int v : adj) next[static_cast<std::size_t>(v)] += share;
    }
    const double base = (1.0 - d) * inv_n + d * dangling * inv_n;
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = base + d * next[v];
      delta += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    result.iterations = iter;
    result.last_delta = delta;
    if (delta < options.tol) break;
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& s : x) s /= total;
  result.scores = std::move(x);
  return result;
}

HateAccountSet::HateAccountSet(std::vector<std::string> ordered) : accounts_(std::move(ordered)) {
  for (std::size_t i = 0; i < accounts_.size(); ++i) {
    if (!index_.emplace(accounts_[i], static_cast<int>(i)).second) {
      throw Error("duplicate account '" + accounts_[i] + "' in hate account set");
    }
  }
}

int HateAccountSet::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? -1 : it->second;
}

HateAccountSet select_hate_accounts(const FollowGraph& graph, const std::set<std::string>& seeds, std::size_t k,
                                    PageRankOptions options) {
  if (k < seeds.size()) throw Error("select_hate_accounts: k is smaller than the seed set");
  return select_hate_accounts(graph, pagerank(graph, options), seeds, k);
}

HateAccountSet select_hate_accounts(const FollowGraph& graph, const PageRankResult& ranks,
                                    const std::set<std::string>& seeds, std::size_t k) {
  if (k < seeds.size()) {
    throw Error("select_hate_accounts: k=" + std::to_string(k) + " is smaller than the " +
                std::to_string(seeds.size()) + " seeds");
  }
  std::vector<int> chosen;
  for (const auto& s : seeds) {
    const int v = graph.index_of(s);
    if (v < 0) throw Error("select_hate_accounts: seed '" + s + "' is not a graph vertex");
    chosen.push_back(v);
  }
  auto by_rank = [&](int a, int b) {
    const double sa = ranks.scores[static_cast<std::size_t>(a)];
    const double sb = ranks.scores[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return graph.id(a) < graph.id(b);
  };
  std::vector<int> rest;
  for (int v = 0; v < static_cast<int>(graph.num_vertices()); ++v) {
    if (!seeds.contains(graph.id(v))) rest.push_back(v);
  }
  std::sort(rest.begin(), rest.end(), by_rank);
  for (std::size_t i = 0; i < rest.size() && chosen.size() < k; ++i) chosen.push_back(rest[i]);
  std::sort(chosen.begin(), chosen.end(), by_rank);

  std::vector<std::string> ordered;
  ordered.reserve(chosen.size());
  for (const int v : chosen) ordered.push_back(graph.id(v));
  return HateAccountSet(std::move(ordered));
}

FollowGraph project_hate_graph(const FollowGraph& author_edges, const HateAccountSet& hate_accounts) {
  std::vector<Edge> kept;
  for (auto& e : author_edges.edges()) {
    if (hate_accounts.contains(e.second)) kept.push_back(std::move(e));
  }
  return FollowGraph::build(kept);
}

std::size_t BinaryFollowVector::popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string BinaryFollowVector::to_string() const {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

BinaryFollowVector BinaryFollowVector::from_string(std::string_view s) {
  BinaryFollowVector v;
  v.bits.reserve(s.size());
  for (const char c : s) {
    if (c != '0' && c != '1') throw Error("follow vector must contain only 0 and 1");
    v.bits.push_back(c == '1' ? 1 : 0);
  }
  return v;
}

BinaryFollowVector follow_vector(std::string_view author_id, const FollowGraph& author_edges,
                                 const HateAccountSet& hate_accounts) {
  if (hate_accounts.empty()) throw Error("follow_vector: hate account set is empty");
  BinaryFollowVector v;
  v.bits.assign(hate_accounts.size(), 0);
  const int a = author_edges.index_of(author_id);
  if (a < 0) return v;
  for (const int followee : author_edges.out_edges(a)) {
    const int i = hate_accounts.index_of(author_edges.id(followee));
    if (i >= 0) v.bits[static_cast<std::size_t>(i)] = 1;
  }
  return v;
}

FollowVectorTable::FollowVectorTable(HateAccountSet accounts, std::map<std::string, BinaryFollowVector> vectors)
    : accounts_(std::move(accounts)), vectors_(std::move(vectors)) {
  zero_.bits.assign(accounts_.size(), 0);
  for (const auto& [author, v] : vectors_) {
    if (v.size() != accounts_.size()) {
      throw DimensionError("follow vector for '" + author + "' has length " + std::to_string(v.size()) +
                           ", expected " + std::to_string(accounts_.size()));
    }
  }
}

FollowVectorTable FollowVectorTable::build(const FollowGraph& author_edges, const HateAccountSet& hate_accounts) {
  std::map<std::string, BinaryFollowVector> vectors;
  for (int v = 0; v < static_cast<int>(author_edges.num_vertices()); ++v) {
    if (author_edges.out_edges(v).empty()) continue;
    vectors.emplace(author_edges.id(v), follow_vector(author_edges.id(v), author_edges, hate_accounts));
  }
  return FollowVectorTable(hate_accounts, std::move(vectors));
}

const BinaryFollowVector& FollowVectorTable::lookup(const std::string& author_id) const {
  const auto it = vectors_.find(author_id);
  return it == vectors_.end() ? zero_ : it->second;
}

std::vector<Edge> parse_edges(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra)) throw ParseError(line_no, "expected 'follower followee'");
    edges.emplace_back(std::move(a), std::move(b));
  }
  return edges;
}

std::vector<Edge> parse_edges(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edges(in);
}

std::string serialize_edges(const std::vector<Edge>& edges) {
  std::string out;
  for (const auto& [a, b] : edges) out += a + ' ' + b + '\n';
  return out;
}

std::vector<std::string> parse_id_list(std::string_view text) {
  std::vector<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string id;
    if (fields >> id) ids.push_back(id);
  }
  return ids;
}

std::string serialize_id_list(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += id + '\n';
  return out;
}

std::string serialize_follow_vectors(const FollowVectorTable& table) {
  std::string out;
  for (const auto& [author, v] : table.vectors()) out += author + ' ' + v.to_string() + '\n';
  return out;
}

FollowVectorTable parse_follow_vectors(const HateAccountSet& accounts, std::string_view text) {
  std::map<std::string, BinaryFollowVector> vectors;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string author, bits;
    if (!(fields >> author)) continue;
    if (!(fields >> bits)) throw ParseError(line_no, "expected 'author_id bitstring'");
    try {
      vectors.emplace(author, BinaryFollowVector::from_string(bits));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return FollowVectorTable(accounts, std::move(vectors));
}

}  // namespace hsd
