#include "bobw/base_learners.hpp"

#include <stdexcept>

namespace bobw {

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Half: return "iw-1/2";
    case StabilityClass::TwoThirds: return "iw-2/3";
    case StabilityClass::DataDependentHalf: return "dd-iw-1/2";
    case StabilityClass::StrongHalf: return "strong-iw-1/2";
  }
  return "unknown";
}

std::vector<double> IwLearner::target_losses(const RoundLoss& round) const {
  std::vector<double> out;
  out.reserve(arms().size());
  for (auto a : arms()) out.push_back(round.values.at(a));
  return out;
}

void IwLearner::set_update_probability(const IwRound&) {
  throw std::logic_error(name() + " needs q_t before computing its play distribution");
}

std::vector<std::size_t> all_except(std::size_t n, std::optional<std::size_t> excluded) {
  if (excluded && *excluded >= n) throw std::invalid_argument("excluded action out of range");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!excluded || *excluded != i) out.push_back(i);
  if (out.empty()) throw std::invalid_argument("learner has no actions left after exclusion");
  return out;
}

}  // namespace bobw
