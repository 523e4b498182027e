#include "psdflow/simulate/trials.hpp"

#include "psdflow/errors.hpp"
#include "psdflow/io.hpp"
#include "psdflow/parallel.hpp"
#include "psdflow/simulate/stats.hpp"

namespace psdflow::simulate {

TrialsReport run_trials(const SimConfig& cfg) {
  cfg.validate();
  TrialsReport out;
  out.trials.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(out.trials.size(), [&](std::size_t i) {
    const int trial = static_cast<int>(i);
    out.trials[i] = run_trial(cfg, sample_instance(cfg, trial), trial);
  });
  out.aggregate = aggregate(out.trials);
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) throw ValidationError("no trials to aggregate");
  const std::size_t rows = trials.front().rows.size();
  for (const auto& t : trials) {
    if (t.rows.size() != rows) throw ValidationError("trials recorded different time grids");
  }
  std::vector<AggregateRow> out(rows);
  std::vector<double> q(trials.size()), p(trials.size()), mse(trials.size());
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t i = 0; i < trials.size(); ++i) {
      q[i] = trials[i].rows[k].q;
      p[i] = trials[i].rows[k].p;
      mse[i] = trials[i].rows[k].mse;
    }
    const auto qs = mean_std(q), ps = mean_std(p), es = mean_std(mse);
    out[k] = {trials.front().rows[k].t, qs.mean, qs.std, qs.sem, ps.mean, ps.std,
              es.mean, es.std, es.sem};
  }
  return out;
}

std::string trials_csv(const std::vector<TrialRecord>& trials) {
  using io::format_double;
  io::CsvWriter csv({"trial", "t", "q", "p", "mse", "objective"});
  for (const auto& rec : trials) {
    for (const auto& r : rec.rows) {
      csv.add_row({std::to_string(rec.trial), format_double(r.t), format_double(r.q), format_double(r.p),
                   format_double(r.mse), format_double(r.objective)});
    }
  }
  return csv.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  using io::format_double;
  io::CsvWriter csv({"t", "q_mean", "q_std", "q_stderr", "p_mean", "p_std", "mse_mean", "mse_std"});
  for (const auto& r : rows) {
    csv.add_row({format_double(r.t), format_double(r.q_mean), format_double(r.q_std),
                 format_double(r.q_stderr), format_double(r.p_mean), format_double(r.p_std),
                 format_double(r.mse_mean), format_double(r.mse_std)});
  }
  return csv.str();
}

std::string eigen_csv(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
  if (weights.size() != 0 && weights.size() != values.size()) {
    throw ValidationError("eigenvalue and weight counts differ");
  }
  io::CsvWriter csv({"value", "weight"});
  const double uniform = values.size() ? 1.0 / static_cast<double>(values.size()) : 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    csv.add_row({io::format_double(values(i)), io::format_double(weights.size() ? weights(i) : uniform)});
  }
  return csv.str();
}

}  // namespace psdflow::simulate
