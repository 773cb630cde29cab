#pragma once

#include <string_view>
#include <vector>

namespace actevo {

enum class FitnessStatus { ok, unstable };

inline constexpr std::string_view status_name(FitnessStatus s) {
  return s == FitnessStatus::ok ? "ok" : "unstable";
}

/// Per-epoch training telemetry.
struct TrainingCurves {
  std::vector<double> lr;
  std::vector<double> train_loss;
  std::vector<double> train_acc;
  std::vector<double> val_acc;
  /// [epoch][layer][param index] mean of the activation parameter values.
  std::vector<std::vector<std::vector<double>>> param_means;

  std::size_t epochs() const { return val_acc.size(); }

  /// Network-wide mean of one parameter index at one epoch.
  double network_mean(std::size_t epoch, std::size_t index) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& layer : param_means[epoch]) {
      if (index < layer.size()) {
        sum += layer[index];
        ++n;
      }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
};

/// Result of one fitness evaluation.  unstable implies fitness == 0.
struct FitnessRecord {
  double fitness = 0.0;
  FitnessStatus status = FitnessStatus::ok;
  double runtime_seconds = 0.0;
  TrainingCurves curves;
};

}  // namespace actevo
