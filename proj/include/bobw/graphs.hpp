#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bobw {

enum class Observability { Strong, Weak, Unobservable };

std::string to_string(Observability o);

// Directed feedback graph: edge (i, j) means playing i reveals the loss of j.
class FeedbackGraph {
 public:
  static constexpr std::size_t kMaxNodes = 24;

  FeedbackGraph() = default;
  explicit FeedbackGraph(std::size_t nodes);
  static FeedbackGraph from_edges(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);
  static FeedbackGraph bandit(std::size_t nodes);
  static FeedbackGraph full_information(std::size_t nodes);

  void add_edge(std::size_t from, std::size_t to);
  bool has_edge(std::size_t from, std::size_t to) const { return (out_[from] >> to) & 1U; }
  bool has_self_loop(std::size_t node) const { return has_edge(node, node); }
  std::size_t size() const { return out_.size(); }

  std::uint32_t out_mask(std::size_t node) const { return out_[node]; }
  std::uint32_t in_mask(std::size_t node) const { return in_[node]; }
  std::vector<std::size_t> out_neighbors(std::size_t node) const;
  std::vector<std::size_t> in_neighbors(std::size_t node) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  // Induced subgraph on all nodes except `removed`; `kept` receives the original ids.
  FeedbackGraph without_node(std::size_t removed, std::vector<std::size_t>* kept = nullptr) const;

 private:
  std::vector<std::uint32_t> out_;
  std::vector<std::uint32_t> in_;
};

Observability classify(const FeedbackGraph& graph);

// Exact by branch-and-bound over bitmasks; self-loops ignored.
std::size_t independence_number(const FeedbackGraph& graph);
// Independence number after dropping one-sided edges.
std::size_t weak_independence_number(const FeedbackGraph& graph);

// Greedy set D with every node having an in-neighbor in D; throws if a node is unobservable.
std::vector<std::size_t> dominating_set(const FeedbackGraph& graph);
bool dominates(const FeedbackGraph& graph, std::span<const std::size_t> set);

FeedbackGraph read_edge_list(std::istream& in);
FeedbackGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const FeedbackGraph& graph);

// Recentered loss vector for a strongly observable graph with candidate `candidate`;
// `base_p` is the base learner's distribution over nodes (candidate entry ignored).
std::vector<double> surrogate_loss(const FeedbackGraph& graph, std::size_t candidate, std::span<const double> loss,
                                   std::span<const double> base_p);

// Surrogate loss of the played node using only losses observable from it.
double surrogate_played_loss(const FeedbackGraph& graph, std::size_t candidate, std::size_t played,
                             const std::function<double(std::size_t)>& observed_loss,
                             std::span<const double> base_p);

}  // namespace bobw
