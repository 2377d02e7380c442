#include <sstream>
#include <vector>

#include "doctest.h"

#include "bobw/graphs.hpp"
#include "bobw/random.hpp"

using namespace bobw;

namespace {

FeedbackGraph complete_bidirected(std::size_t n, bool loops) {
  FeedbackGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j || loops) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("classification") {
  CHECK(classify(complete_bidirected(4, false)) == Observability::Strong);
  CHECK(classify(FeedbackGraph::bandit(3)) == Observability::Strong);
  CHECK(classify(FeedbackGraph::from_edges(3, {{0, 0}, {0, 1}, {0, 2}})) == Observability::Weak);
  CHECK(classify(FeedbackGraph::from_edges(2, {{0, 0}})) == Observability::Unobservable);
  CHECK(classify(FeedbackGraph(1)) == Observability::Unobservable);
}

TEST_CASE("independence numbers") {
  CHECK(independence_number(FeedbackGraph(4)) == 4);
  CHECK(independence_number(complete_bidirected(4, true)) == 1);
  const auto cycle = FeedbackGraph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(independence_number(cycle) == 1);
  CHECK(weak_independence_number(cycle) == 3);
}

TEST_CASE("dominating sets") {
  const auto star = FeedbackGraph::from_edges(4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  CHECK(dominating_set(star) == std::vector<std::size_t>{0});
  const auto loops = FeedbackGraph::bandit(5);
  CHECK(dominating_set(loops).size() == 5);
  CHECK_THROWS(dominating_set(FeedbackGraph::from_edges(2, {{0, 0}})));

  Rng rng(8);
  int checked = 0;
  while (checked < 20) {
    FeedbackGraph g(8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        if (bernoulli(rng, 0.2)) g.add_edge(i, j);
    if (classify(g) != Observability::Weak) continue;
    const auto d = dominating_set(g);
    CHECK(dominates(g, d));
    ++checked;
  }
}

TEST_CASE("surrogate loss") {
  const auto loops = FeedbackGraph::bandit(3);
  const std::vector<double> loss{0.2, 0.9, 0.4};
  const std::vector<double> p{0.0, 0.3, 0.7};
  CHECK(surrogate_loss(loops, 0, loss, p) == loss);

  const auto g = FeedbackGraph::from_edges(2, {{1, 1}, {1, 0}});
  const auto s = surrogate_loss(g, 0, std::vector<double>{0.4, 0.7}, std::vector<double>{0.0, 1.0});
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(0.3));
}

TEST_CASE("played surrogate loss uses only revealed losses") {
  const auto g = FeedbackGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 1}, {1, 0}, {2, 2}, {2, 0}});
  const std::vector<double> loss{0.4, 0.7, 0.1};
  const std::vector<double> p{0.0, 0.5, 0.5};
  const auto full = surrogate_loss(g, 1, loss, p);
  for (std::size_t played = 0; played < 3; ++played) {
    const auto revealed = g.out_mask(played);
    const auto value = surrogate_played_loss(
        g, 1, played,
        [&](std::size_t j) {
          if (!((revealed >> j) & 1U)) throw std::logic_error("unrevealed loss read");
          return loss[j];
        },
        p);
    CHECK(value == doctest::Approx(full[played]));
  }
}

TEST_CASE("edge list round trip") {
  std::istringstream in("# demo\nnodes 4\n0 1\n1 1\n2 3\n");
  const auto g = read_edge_list(in);
  CHECK(g.size() == 4);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_self_loop(1));
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  CHECK(read_edge_list(back).edges() == g.edges());
  std::istringstream bad("0 x\n");
  CHECK_THROWS(read_edge_list(bad));
}

TEST_CASE("removing a node keeps original ids") {
  const auto g = FeedbackGraph::from_edges(3, {{0, 2}, {2, 1}});
  std::vector<std::size_t> kept;
  const auto h = g.without_node(0, &kept);
  CHECK(kept == std::vector<std::size_t>{1, 2});
  CHECK(h.has_edge(1, 0));
}
