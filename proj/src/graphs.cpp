#include "bobw/graphs.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bobw {

std::string to_string(Observability o) {
  switch (o) {
    case Observability::Strong: return "strong";
    case Observability::Weak: return "weak";
    case Observability::Unobservable: return "unobservable";
  }
  return "unknown";
}

FeedbackGraph::FeedbackGraph(std::size_t nodes) : out_(nodes, 0U), in_(nodes, 0U) {
  if (nodes == 0 || nodes > kMaxNodes)
    throw std::invalid_argument("feedback graph size must lie in [1, " + std::to_string(kMaxNodes) + "]");
}

FeedbackGraph FeedbackGraph::from_edges(std::size_t nodes,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  FeedbackGraph g(nodes);
  for (auto [from, to] : edges) g.add_edge(from, to);
  return g;
}

FeedbackGraph FeedbackGraph::bandit(std::size_t nodes) {
  FeedbackGraph g(nodes);
  for (std::size_t i = 0; i < nodes; ++i) g.add_edge(i, i);
  return g;
}

FeedbackGraph FeedbackGraph::full_information(std::size_t nodes) {
  FeedbackGraph g(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = 0; j < nodes; ++j) g.add_edge(i, j);
  return g;
}

void FeedbackGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) throw std::out_of_range("edge endpoint out of range");
  out_[from] |= 1U << to;
  in_[to] |= 1U << from;
}

namespace {
std::vector<std::size_t> bits(std::uint32_t mask) {
  std::vector<std::size_t> out;
  while (mask) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}
}  // namespace

std::vector<std::size_t> FeedbackGraph::out_neighbors(std::size_t node) const { return bits(out_[node]); }
std::vector<std::size_t> FeedbackGraph::in_neighbors(std::size_t node) const { return bits(in_[node]); }

std::vector<std::pair<std::size_t, std::size_t>> FeedbackGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (auto j : out_neighbors(i)) out.emplace_back(i, j);
  return out;
}

FeedbackGraph FeedbackGraph::without_node(std::size_t removed, std::vector<std::size_t>* kept) const {
  if (removed >= size()) throw std::out_of_range("removed node out of range");
  if (size() == 1) throw std::invalid_argument("cannot remove the only node");
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < size(); ++i)
    if (i != removed) ids.push_back(i);
  FeedbackGraph g(ids.size());
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = 0; b < ids.size(); ++b)
      if (has_edge(ids[a], ids[b])) g.add_edge(a, b);
  if (kept) *kept = ids;
  return g;
}

Observability classify(const FeedbackGraph& graph) {
  const std::size_t n = graph.size();
  const std::uint32_t all = n == 32 ? ~0U : ((1U << n) - 1U);
  bool strong = true;
  bool weak = true;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t others = all & ~(1U << i);
    const bool observed_by_all_others = (graph.in_mask(i) & others) == others;
    if (!graph.has_self_loop(i) && !observed_by_all_others) strong = false;
    if (graph.in_mask(i) == 0U) weak = false;
  }
  if (!weak) return Observability::Unobservable;
  return strong ? Observability::Strong : Observability::Weak;
}

namespace {

std::size_t max_independent(std::uint32_t candidates, const std::vector<std::uint32_t>& adjacency,
                            std::size_t current, std::size_t best) {
  if (candidates == 0U) return std::max(current, best);
  if (current + static_cast<std::size_t>(std::popcount(candidates)) <= best) return best;
  const auto v = static_cast<std::size_t>(std::countr_zero(candidates));
  const std::uint32_t without = candidates & ~(1U << v);
  best = max_independent(without & ~adjacency[v], adjacency, current + 1, best);
  // If v has no neighbors among the candidates, taking it is never worse.
  if ((adjacency[v] & without) == 0U) return best;
  return max_independent(without, adjacency, current, best);
}

std::size_t independence_from(const std::vector<std::uint32_t>& adjacency) {
  const std::size_t n = adjacency.size();
  const std::uint32_t all = (n == 32) ? ~0U : ((1U << n) - 1U);
  return max_independent(all, adjacency, 0, 0);
}

}  // namespace

std::size_t independence_number(const FeedbackGraph& graph) {
  std::vector<std::uint32_t> adjacency(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i)
    adjacency[i] = (graph.out_mask(i) | graph.in_mask(i)) & ~(1U << i);
  return independence_from(adjacency);
}

std::size_t weak_independence_number(const FeedbackGraph& graph) {
  std::vector<std::uint32_t> adjacency(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i)
    adjacency[i] = (graph.out_mask(i) & graph.in_mask(i)) & ~(1U << i);
  return independence_from(adjacency);
}

bool dominates(const FeedbackGraph& graph, std::span<const std::size_t> set) {
  std::uint32_t covered = 0U;
  for (auto d : set) covered |= graph.out_mask(d);
  const std::size_t n = graph.size();
  const std::uint32_t all = (n == 32) ? ~0U : ((1U << n) - 1U);
  return (covered & all) == all;
}

std::vector<std::size_t> dominating_set(const FeedbackGraph& graph) {
  const std::size_t n = graph.size();
  for (std::size_t i = 0; i < n; ++i)
    if (graph.in_mask(i) == 0U) throw std::invalid_argument("node " + std::to_string(i) + " is unobservable");
  const std::uint32_t all = (n == 32) ? ~0U : ((1U << n) - 1U);
  std::uint32_t uncovered = all;
  std::vector<std::size_t> chosen;
  while (uncovered != 0U) {
    std::size_t best = 0;
    int best_gain = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const int gain = std::popcount(graph.out_mask(i) & uncovered);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    chosen.push_back(best);
    uncovered &= ~graph.out_mask(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

FeedbackGraph read_edge_list(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t declared = 0;
  std::size_t max_node = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "nodes") {
      if (!(fields >> declared)) throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": bad node count");
      continue;
    }
    std::size_t from = 0;
    std::size_t to = 0;
    try {
      from = std::stoul(first);
    } catch (const std::exception&) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    }
    if (!(fields >> to)) throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    edges.emplace_back(from, to);
    max_node = std::max({max_node, from, to});
  }
  const std::size_t nodes = declared ? declared : max_node + 1;
  if (edges.empty() && declared == 0) throw std::invalid_argument("edge list is empty");
  return FeedbackGraph::from_edges(nodes, edges);
}

FeedbackGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const FeedbackGraph& graph) {
  out << "nodes " << graph.size() << '\n';
  for (auto [from, to] : graph.edges()) out << from << ' ' << to << '\n';
}

std::vector<double> surrogate_loss(const FeedbackGraph& graph, std::size_t candidate, std::span<const double> loss,
                                   std::span<const double> base_p) {
  const std::size_t n = graph.size();
  if (loss.size() != n || base_p.size() != n) throw std::invalid_argument("surrogate_loss dimension mismatch");
  if (classify(graph) != Observability::Strong)
    throw std::invalid_argument("surrogate loss requires a strongly observable graph");
  std::vector<double> out(n);
  double loopless_mix = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != candidate && !graph.has_self_loop(j)) loopless_mix += base_p[j] * loss[j];
  const double candidate_loopless = graph.has_self_loop(candidate) ? 0.0 : loss[candidate];
  for (std::size_t j = 0; j < n; ++j) {
    if (j == candidate)
      out[j] = (graph.has_self_loop(j) ? loss[j] : 0.0) - loopless_mix;
    else
      out[j] = (graph.has_self_loop(j) ? loss[j] : 0.0) - candidate_loopless;
  }
  return out;
}

double surrogate_played_loss(const FeedbackGraph& graph, std::size_t candidate, std::size_t played,
                             const std::function<double(std::size_t)>& observed_loss,
                             std::span<const double> base_p) {
  if (played == candidate) {
    double value = graph.has_self_loop(candidate) ? observed_loss(candidate) : 0.0;
    for (std::size_t j = 0; j < graph.size(); ++j)
      if (j != candidate && !graph.has_self_loop(j) && base_p[j] > 0.0) value -= base_p[j] * observed_loss(j);
    return value;
  }
  double value = graph.has_self_loop(played) ? observed_loss(played) : 0.0;
  if (!graph.has_self_loop(candidate)) value -= observed_loss(candidate);
  return value;
}

}  // namespace bobw
