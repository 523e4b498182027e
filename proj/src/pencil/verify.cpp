#include "psdflow/pencil/verify.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "psdflow/errors.hpp"
#include "psdflow/parallel.hpp"
#include "psdflow/simulate/instance.hpp"
#include "psdflow/simulate/linalg.hpp"

namespace psdflow::pencil {

namespace {

constexpr int kMaxResample = 8;
constexpr int kLiteralLimit = 400;

using Traces = Eigen::Matrix4cd;

struct Sample {
  Eigen::MatrixXd x_star;
  Eigen::MatrixXd xi;
  Eigen::MatrixXd h;
};

Sample draw(const ModelParams& params, int n, std::uint64_t seed, int attempt) {
  simulate::SimConfig cfg;
  cfg.n = n;
  cfg.d = std::max(1, static_cast<int>(std::lround(params.phi() * n)));
  cfg.m = 1;
  cfg.lambda = params.lambda();
  cfg.mu = params.mu();
  cfg.seed = seed;
  auto inst = simulate::sample_instance(cfg, attempt);
  return {std::move(inst.x_star), std::move(inst.xi), std::move(inst.h)};
}

Eigen::MatrixXcd resolvent(const Eigen::MatrixXd& h, cplx z) {
  Eigen::MatrixXcd a = h.cast<cplx>();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  if (!(lu.rcond() > 1e-12)) throw SingularSample("H - z is numerically singular");
  return lu.inverse();
}

// Sum of the leading diagonal of a rectangular block.
cplx diag_sum(const Eigen::Ref<const Eigen::MatrixXcd>& b) { return b.diagonal().sum(); }

std::array<Eigen::Index, 5> offsets(Eigen::Index n, Eigen::Index d) { return {0, n, n + d, 2 * n + d, 2 * n + 2 * d}; }

Traces literal_traces(const Sample& s, const ModelParams& params, cplx z, double* closed_dev) {
  const Eigen::Index n = s.x_star.rows(), d = s.x_star.cols();
  const Eigen::MatrixXcd m = assemble_mz(s.x_star, s.xi, params.lambda(), params.mu(), z);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-12)) throw SingularSample("M_z is numerically singular");
  const Eigen::MatrixXcd inv = lu.inverse();
  const auto off = offsets(n, d);
  const double dims[4] = {double(n), double(d), double(n), double(d)};
  Traces t;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      t(i, j) = diag_sum(inv.block(off[i], off[j], off[i + 1] - off[i], off[j + 1] - off[j])) / dims[i];
    }
  }
  if (closed_dev) {
    *closed_dev = closed_form_inverse_deviation(s.x_star, s.xi, params.lambda(), params.mu(), z);
  }
  return t;
}

Traces structured_traces(const Sample& s, cplx z) {
  const Eigen::Index n = s.x_star.rows(), d = s.x_star.cols(), r = std::min(n, d);
  const auto eig = simulate::symmetric_eigen(s.h);
  Eigen::VectorXcd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx gap = eig.values(i) - z;
    if (!(std::abs(gap) > 1e-12 * std::max(1.0, std::abs(z)))) throw SingularSample("z is an eigenvalue of H");
    inv(i) = 1.0 / gap;
  }
  const Eigen::MatrixXd& v = eig.vectors;
  const Eigen::MatrixXd rot = v.transpose() * s.x_star;                  // V^T X*
  const Eigen::MatrixXd cross = s.x_star.topRows(r) * rot.transpose();  // rows of X* X*^T V
  const Eigen::VectorXd overlap = rot.rowwise().squaredNorm();

  cplx tr_k = inv.sum();
  const cplx tr_zk = (inv.array() * overlap.array().cast<cplx>()).sum();
  cplx kx_diag = 0.0, zkx_diag = 0.0;
  for (Eigen::Index j = 0; j < r; ++j) {
    cplx a = 0.0, b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      a += v(j, i) * inv(i) * rot(i, j);
      b += cross(j, i) * inv(i) * rot(i, j);
    }
    kx_diag += a;
    zkx_diag += b;
  }
  const double dn = double(n), dd = double(d);
  Traces t = Traces::Zero();
  t(0, 0) = 1.0;
  t(0, 1) = -s.x_star.diagonal().sum() / dn;
  t(0, 2) = -tr_zk / dn;
  t(0, 3) = zkx_diag / dn;
  t(1, 1) = 1.0;
  t(1, 2) = kx_diag / dd;
  t(1, 3) = -tr_zk / dd;
  t(2, 2) = -tr_k / dn;
  t(2, 3) = kx_diag / dn;
  t(3, 2) = kx_diag / dd;
  t(3, 3) = 1.0 - tr_zk / dd;
  return t;
}

}  // namespace

Eigen::MatrixXcd assemble_mz(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& xi, double lambda,
                             double mu, cplx z) {
  const Eigen::Index n = x_star.rows(), d = x_star.cols();
  const auto off = offsets(n, d);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(off[4], off[4]);
  const Eigen::MatrixXcd xs = x_star.cast<cplx>();
  m.block(off[0], off[0], n, n).setIdentity();
  m.block(off[0], off[1], n, d) = xs;
  m.block(off[1], off[1], d, d).setIdentity();
  m.block(off[1], off[2], d, n) = xs.transpose();
  Eigen::MatrixXcd a = -xi.cast<cplx>() / std::sqrt(lambda);
  a.diagonal().array() += z + mu;
  m.block(off[2], off[2], n, n) = a;
  m.block(off[2], off[3], n, d) = xs;
  m.block(off[3], off[2], d, n) = xs.transpose();
  m.block(off[3], off[3], d, d).setIdentity();
  return m;
}

double closed_form_inverse_deviation(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& xi,
                                     double lambda, double mu, cplx z) {
  const Eigen::Index n = x_star.rows(), d = x_star.cols();
  const auto off = offsets(n, d);
  const Eigen::MatrixXcd m = assemble_mz(x_star, xi, lambda, mu, z);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-12)) throw SingularSample("M_z is numerically singular");
  const Eigen::MatrixXcd inv = lu.inverse();

  Eigen::MatrixXd h = x_star * x_star.transpose() + xi / std::sqrt(lambda);
  h.diagonal().array() -= mu;
  const Eigen::MatrixXcd k = resolvent(h, z);
  const Eigen::MatrixXcd xs = x_star.cast<cplx>();
  const Eigen::MatrixXcd zs = xs * xs.transpose();
  const Eigen::MatrixXcd kx = k * xs;
  const Eigen::MatrixXcd xkx = xs.transpose() * kx;

  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(off[4], off[4]);
  expect.block(off[0], off[0], n, n).setIdentity();
  expect.block(off[0], off[1], n, d) = -xs;
  expect.block(off[0], off[2], n, n) = -zs * k;
  expect.block(off[0], off[3], n, d) = zs * kx;
  expect.block(off[1], off[1], d, d).setIdentity();
  expect.block(off[1], off[2], d, n) = xs.transpose() * k;
  expect.block(off[1], off[3], d, d) = -xkx;
  expect.block(off[2], off[2], n, n) = -k;
  expect.block(off[2], off[3], n, d) = kx;
  expect.block(off[3], off[2], d, n) = xs.transpose() * k;
  expect.block(off[3], off[3], d, d) = Eigen::MatrixXcd::Identity(d, d) - xkx;
  return (inv - expect).cwiseAbs().maxCoeff();
}

FiniteNReport verify_finite_n(const ModelParams& params, cplx z, int n, int trials, std::uint64_t seed,
                              FiniteNRoute route) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (route == FiniteNRoute::automatic) {
    route = n <= kLiteralLimit ? FiniteNRoute::literal : FiniteNRoute::structured;
  }
  const auto theory = solve_pencil(mz_spec(params, z));

  std::vector<Traces> traces(static_cast<std::size_t>(trials));
  std::vector<double> closed(static_cast<std::size_t>(trials), 0.0);
  std::vector<int> redraws(static_cast<std::size_t>(trials), 0);
  parallel_for(traces.size(), [&](std::size_t i) {
    for (int attempt = 0;; ++attempt) {
      try {
        const auto s = draw(params, n, seed + i, attempt);
        traces[i] = route == FiniteNRoute::literal ? literal_traces(s, params, z, &closed[i])
                                                   : structured_traces(s, z);
        redraws[i] = attempt;
        return;
      } catch (const SingularSample&) {
        if (attempt + 1 >= kMaxResample) throw;
      }
    }
  });

  FiniteNReport out;
  out.n = n;
  out.d = std::max(1, static_cast<int>(std::lround(params.phi() * n)));
  out.trials = trials;
  out.z = z;
  out.route = route;
  out.closed_form_deviation =
      route == FiniteNRoute::literal ? *std::max_element(closed.begin(), closed.end())
                                     : std::numeric_limits<double>::quiet_NaN();
  for (int r : redraws) out.resampled += r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      BlockStat& b = out.blocks[i][j];
      for (const auto& t : traces) b.mean += t(i, j);
      b.mean /= double(trials);
      if (trials > 1) {
        double ss = 0.0;
        for (const auto& t : traces) ss += std::norm(t(i, j) - b.mean);
        b.std = std::sqrt(ss / (trials - 1));
      }
      b.theory = theory.g(i, j);
      b.abs_dev = std::abs(b.mean - b.theory);
      out.max_abs_dev = std::max(out.max_abs_dev, b.abs_dev);
    }
  }
  return out;
}

std::string report_json(const FiniteNReport& report) {
  auto pair = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  nlohmann::json j;
  j["n"] = report.n;
  j["d"] = report.d;
  j["trials"] = report.trials;
  j["z"] = pair(report.z);
  j["route"] = report.route == FiniteNRoute::literal ? "literal" : "structured";
  j["max_abs_dev"] = report.max_abs_dev;
  if (std::isfinite(report.closed_form_deviation)) {
    j["closed_form_deviation"] = report.closed_form_deviation;
  } else {
    j["closed_form_deviation"] = nullptr;
  }
  j["resampled"] = report.resampled;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto& s = report.blocks[a][b];
      j["per_block"]["f" + std::to_string(a + 1) + std::to_string(b + 1)] = {
          {"mean", pair(s.mean)}, {"std", s.std}, {"theory", pair(s.theory)}, {"abs_dev", s.abs_dev}};
    }
  }
  return j.dump(2);
}

}  // namespace psdflow::pencil
