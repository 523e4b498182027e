#pragma once

#include <string>
#include <vector>

#include "psdflow/simulate/config.hpp"
#include "psdflow/simulate/dynamics.hpp"

namespace psdflow::simulate {

struct AggregateRow {
  double t = 0.0;
  double q_mean = 0.0, q_std = 0.0, q_stderr = 0.0;
  double p_mean = 0.0, p_std = 0.0;
  double mse_mean = 0.0, mse_std = 0.0, mse_stderr = 0.0;
};

struct TrialsReport {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> aggregate;
};

/// Runs cfg.trials independent trials in parallel and aggregates them in trial order.
TrialsReport run_trials(const SimConfig& cfg);

/// Per-time mean, sample standard deviation and standard error across trials.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials);

/// CSV trial,t,q,p,mse,objective.
std::string trials_csv(const std::vector<TrialRecord>& trials);
/// CSV t,q_mean,q_std,q_stderr,p_mean,p_std,mse_mean,mse_std.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
/// CSV value,weight. Weights default to 1/size.
std::string eigen_csv(const Eigen::VectorXd& values, const Eigen::VectorXd& weights = {});

}  // namespace psdflow::simulate
