#include "psdflow/simulate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "psdflow/errors.hpp"

namespace psdflow::simulate {

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf,
                   std::span<const double> weights) {
  if (samples.empty()) throw ValidationError("ks_distance needs samples");
  if (!weights.empty() && weights.size() != samples.size()) {
    throw ValidationError("sample and weight counts differ");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) total += weights.empty() ? 1.0 : weights[i];
  if (!(total > 0.0)) throw ValidationError("weights must have positive sum");

  double below = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double x = samples[order[k]];
    double above = below;
    while (k < order.size() && samples[order[k]] == x) {
      above += (weights.empty() ? 1.0 : weights[order[k]]) / total;
      ++k;
    }
    const double f = cdf(x);
    worst = std::max({worst, std::abs(f - below), std::abs(f - above)});
    below = above;
  }
  return worst;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean_std needs values");
  MeanStd out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
    out.sem = out.std / std::sqrt(n);
  }
  return out;
}

}  // namespace psdflow::simulate
