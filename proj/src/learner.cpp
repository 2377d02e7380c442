#include "bobw/learner.hpp"

#include <stdexcept>

namespace bobw {

BaseOnly::BaseOnly(std::unique_ptr<IwLearner> base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("base learner missing");
}

std::size_t BaseOnly::act(std::size_t, int context, Rng& rng) {
  base_->prepare(IwRound{1.0, std::nullopt, context});
  return base_->sample(rng);
}

void BaseOnly::observe(const Observation& obs) { base_->update(obs, true); }

SelfBoundingMeta BaseOnly::meta() const {
  const auto m = base_->meta();
  const double alpha = m.stability == StabilityClass::TwoThirds ? 2.0 / 3.0 : 0.5;
  return {m.c1, m.c1, m.c2, alpha};
}

}  // namespace bobw
