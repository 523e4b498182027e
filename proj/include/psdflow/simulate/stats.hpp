#pragma once

#include <functional>
#include <span>

namespace psdflow::simulate {

/// Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| between the (optionally weighted)
/// empirical distribution of `samples` and a continuous CDF. Weights are normalized.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf,
                   std::span<const double> weights = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (0 for one value)
  double sem = 0.0;  ///< standard error of the mean
};

MeanStd mean_std(std::span<const double> values);

}  // namespace psdflow::simulate
