#pragma once

#include <functional>

namespace psdflow {

/// The quadruple (phi, psi, lambda, mu) of the high-dimensional denoising problem:
/// phi = d/n, psi = m/n, lambda the signal-to-noise ratio, mu the ridge coefficient.
class ModelParams {
 public:
  /// Throws ValidationError naming the violated invariant.
  ModelParams(double phi, double psi, double lambda, double mu);

  double phi() const { return phi_; }
  double psi() const { return psi_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Second moment of the signal spectrum, r = 1 + phi.
  double r() const { return 1.0 + phi_; }

  ModelParams with_lambda(double lambda) const { return {phi_, psi_, lambda, mu_}; }
  ModelParams with_mu(double mu) const { return {phi_, psi_, lambda_, mu}; }

  bool operator==(const ModelParams&) const = default;

 private:
  double phi_;
  double psi_;
  double lambda_;
  double mu_;
};

/// Rule mapping lambda to mu, e.g. the matched-prior choice mu = 1/lambda.
using MuRule = std::function<double(double)>;

inline MuRule inverse_lambda_rule() {
  return [](double lambda) { return 1.0 / lambda; };
}

inline MuRule constant_mu_rule(double mu) {
  return [mu](double) { return mu; };
}

}  // namespace psdflow
