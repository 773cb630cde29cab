#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace actevo {

/// Step learning-rate schedule with an optional constant warmup phase.
/// lr_at(e) is warmup.lr for e < warmup.epochs, otherwise base_lr decayed
/// once per milestone at or before e (milestones are absolute epoch indices,
/// 0-based).
struct LrSchedule {
  struct Warmup {
    double lr = 0.01;
    int epochs = 1;
  };

  std::optional<Warmup> warmup;
  double base_lr = 0.1;
  std::vector<int> milestones;
  double decay = 0.2;
  int total_epochs = 200;

  void validate() const {
    if (total_epochs < 1) throw std::invalid_argument("total_epochs must be positive");
    if (decay <= 0.0 || decay >= 1.0) throw std::invalid_argument("decay must be in (0, 1)");
    int prev = -1;
    for (int m : milestones) {
      if (m <= prev) throw std::invalid_argument("milestones must be strictly increasing");
      if (m >= total_epochs) throw std::invalid_argument("milestones must be < total_epochs");
      prev = m;
    }
    if (warmup && warmup->epochs < 0) throw std::invalid_argument("warmup epochs < 0");
  }
};

inline double lr_at(const LrSchedule& s, int epoch) {
  if (epoch < 0 || epoch >= s.total_epochs) {
    throw std::out_of_range("epoch outside the schedule");
  }
  if (s.warmup && epoch < s.warmup->epochs) return s.warmup->lr;
  double lr = s.base_lr;
  for (int m : s.milestones) {
    if (m <= epoch) lr *= s.decay;
  }
  return lr;
}

namespace detail {

// Round-half-to-even division; plain integer division would map the
// published 200-epoch milestones 91 and 137 to 45/68 instead of 46/68.
inline int divide_round_even(int value, int factor) {
  const int q = value / factor;
  const int r = value % factor;
  if (2 * r > factor) return q + 1;
  if (2 * r == factor) return q + (q % 2);
  return q;
}

}  // namespace detail

/// Compresses the schedule: total epochs and every milestone are divided by
/// `factor` (round half to even); the warmup length in epochs is preserved.
inline LrSchedule compress(LrSchedule s, int factor = 2) {
  if (factor < 1) throw std::invalid_argument("factor must be >= 1");
  s.total_epochs = detail::divide_round_even(s.total_epochs, factor);
  for (int& m : s.milestones) m = detail::divide_round_even(m, factor);
  s.validate();
  return s;
}

}  // namespace actevo
