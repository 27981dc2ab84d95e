#pragma once

#include <span>

#include "driftbandit/environments.hpp"

namespace driftbandit {

/// Common surface of every bandit learner driven by the harness.
class BanditLearner {
 public:
  virtual ~BanditLearner() = default;

  /// Index of the arm to pull. Throws EmptyArmSet on an empty list.
  virtual int select(const ArmList& arms) = 0;

  /// Absorb the reward of the arm returned by the last select().
  virtual void observe(const Vec& x, double reward) = 0;
};

/// Smallest index attaining the maximum.
int argmax_lowest(std::span<const double> values);

}  // namespace driftbandit
