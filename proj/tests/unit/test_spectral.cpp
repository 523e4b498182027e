#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/marchenko_pastur.hpp"
#include "oracles/sampling.hpp"
#include "psdflow/errors.hpp"
#include "psdflow/simulate/linalg.hpp"
#include "psdflow/spectral/density.hpp"
#include "psdflow/spectral/edges.hpp"
#include "psdflow/spectral/lowrank.hpp"
#include "psdflow/spectral/measure.hpp"
#include "psdflow/spectral/stieltjes.hpp"

using namespace psdflow;
using namespace psdflow::spectral;

namespace {

ModelParams matched(double lambda) { return {1.0, 1.0, lambda, 1.0 / lambda}; }

ModelParams random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lambda = std::exp(std::log(0.2) + u(gen) * std::log(200.0));
  return {0.1 + 1.9 * u(gen), 0.1 + 1.9 * u(gen), lambda, u(gen) < 0.5 ? 1.0 / lambda : 2.0 * u(gen)};
}

}  // namespace

TEST_CASE("cubic roots solve the cubic") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Cubic c{cplx(1.0 + u(gen) * u(gen), u(gen)), cplx(u(gen), u(gen)), cplx(u(gen), u(gen)),
                  cplx(u(gen), u(gen))};
    for (const auto& r : cubic_roots(c)) CHECK(c.relative_residual(r) < 1e-12);
  }
  // triple root (x - 1)^3
  const Cubic triple{1.0, -3.0, 3.0, -1.0};
  for (const auto& r : cubic_roots(triple)) CHECK(std::abs(r - 1.0) < 1e-4);
  CHECK(discriminant(1.0, 0.0, -1.0, 0.0) > 0.0);  // x^3 - x
  CHECK(discriminant(1.0, 0.0, 1.0, 0.0) < 0.0);   // x^3 + x
}

TEST_CASE("P normalization far from the spectrum") {
  for (const auto& p : {matched(2.0), ModelParams(0.3, 2.0, 7.0, 0.5), ModelParams(5.0, 0.1, 0.2, 0.0)}) {
    const cplx z(0.0, 1e6);
    CHECK(std::abs(-z * solve_cubic_branch(TransformKind::P, p, z) - 1.0) < 1e-4);
    CHECK(std::abs(-z * solve_cubic_branch(TransformKind::Q, p, z) - 1.0) < 1e-4);
  }
}

TEST_CASE("noiseless P matches the Marchenko-Pastur transform") {
  const ModelParams p(1.0, 1.0, 1e8, 0.0);
  const cplx z(0.5, 1e-3);
  CHECK(std::abs(solve_cubic_branch(TransformKind::P, p, z) - oracle::gram_stieltjes(1.0, z)) < 1e-3);
  const ModelParams q(0.4, 1.0, 1e8, 0.0);
  for (const cplx w : {cplx(0.8, 0.1), cplx(-0.5, 0.01), cplx(3.0, 2.0)}) {
    CHECK(std::abs(solve_cubic_branch(TransformKind::P, q, w) - oracle::gram_stieltjes(0.4, w)) < 1e-3);
  }
}

TEST_CASE("Marchenko-Pastur oracle matches a sampled Wishart spectrum") {
  const int n = 4000;
  const Eigen::MatrixXd x = oracle::gaussian(n, n, 1.0 / n, 5);
  const Eigen::VectorXd eig = simulate::symmetric_eigenvalues(x * x.transpose());
  for (const cplx z : {cplx(0.5, 0.05), cplx(2.0, 0.1), cplx(-0.2, 0.05)}) {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) s += 1.0 / (eig(i) - z);
    s /= double(n);
    CHECK(std::abs(s - oracle::gram_stieltjes(1.0, z)) < 2e-2);
  }
}

TEST_CASE("Q stays Herglotz on a line just above the axis") {
  const ModelParams p(1.0, 1.0, 2.0, 0.5);
  for (int i = 0; i <= 400; ++i) {
    const cplx z(-3.0 + 8.0 * i / 400.0, 1e-6);
    CHECK(solve_cubic_branch(TransformKind::Q, p, z).imag() >= 0.0);
  }
}

TEST_CASE("Q equals P / (1 + P)") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(gen);
    const cplx z(-4.0 + 10.0 * u(gen), std::pow(10.0, -6.0 + 7.0 * u(gen)));
    const cplx P = solve_cubic_branch(TransformKind::P, p, z);
    const cplx Q = solve_cubic_branch(TransformKind::Q, p, z);
    CHECK(std::abs(Q - P / (1.0 + P)) < 1e-8 * (1.0 + std::abs(Q)));
  }
}

TEST_CASE("branch consistency and Herglotz property") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(gen);
    const cplx z(-5.0 + 10.0 * u(gen), std::pow(10.0, -6.0 + 7.0 * u(gen)));
    for (auto kind : {TransformKind::P, TransformKind::Q}) {
      const cplx v = solve_cubic_branch(kind, p, z);
      CHECK(transform_cubic(kind, p, z).relative_residual(v) < 1e-10);
    }
  }
  const ModelParams p(0.5, 0.7, 3.0, 1.0 / 3.0);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const cplx z(-4.0 + 8.0 * i / 49.0, std::pow(10.0, -6.0 + 7.0 * j / 49.0));
      CHECK(solve_cubic_branch(TransformKind::P, p, z).imag() > 0.0);
      CHECK(solve_cubic_branch(TransformKind::Q, p, z).imag() > 0.0);
    }
  }
  CHECK(std::conj(solve_cubic_branch(TransformKind::P, p, cplx(0.3, 0.2))) ==
        solve_cubic_branch(TransformKind::P, p, cplx(0.3, -0.2)));
}

TEST_CASE("densities are normalized") {
  std::mt19937_64 gen(29);
  for (int i = 0; i < 10; ++i) {
    const auto p = random_params(gen);
    CAPTURE(p.phi());
    CAPTURE(p.psi());
    CAPTURE(p.lambda());
    CAPTURE(p.mu());
    for (auto kind : {TransformKind::P, TransformKind::Q}) {
      const auto d = density(kind, p, GridSpec::around_support(p, 801));
      CHECK(std::abs(d.mass - 1.0) < 1e-4);
      for (double v : d.values) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("support below zero under the critical lambda") {
  const auto p = matched(0.1);
  const auto d = density(TransformKind::P, p, GridSpec::around_support(p));
  CHECK(d.support.back().hi < 0.0);
  CHECK(std::abs(cdf(d, 0.0) - 1.0) < 1e-3);
  CHECK(cdf(d, d.support.front().lo - 0.1) == 0.0);
  CHECK(std::abs(moment(d, 0) - 1.0) < 1e-4);
}

TEST_CASE("two bulks at small phi") {
  const ModelParams p(0.05, 0.05, 5.0, 0.2);
  const auto d = density(TransformKind::P, p, GridSpec::around_support(p, 4001));
  REQUIRE(d.support.size() == 2);
  CHECK(support_intervals(p).size() == 2);
  CHECK(d.support[0].hi < d.support[1].lo);
  // the bulks merge as phi grows
  CHECK(support_intervals(ModelParams(0.2, 0.2, 5.0, 0.2)).size() == 1);
  // and move closer as lambda approaches 1
  auto gap = [](double lambda) {
    const auto s = support_intervals(ModelParams(0.01, 0.01, lambda, 1.0 / lambda));
    REQUIRE(s.size() == 2);
    return s[1].lo - s[0].hi;
  };
  CHECK(gap(3.0) < gap(5.0));
}

TEST_CASE("discriminant sign agrees with the thresholded density") {
  for (const auto& p : {matched(1.0), ModelParams(0.2, 0.2, 5.0, 0.2), ModelParams(2.0, 0.5, 0.7, 0.1)}) {
    const GridSpec spec = GridSpec::around_support(p, 1001);
    const auto d = density(TransformKind::P, p, spec);
    const double step = (spec.hi - spec.lo) / (spec.points - 1);
    const auto report = edge_report(p);
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
      bool near_edge = false;
      for (double e : report.edges) near_edge = near_edge || std::abs(d.grid[i] - e) <= 2.0 * step;
      if (near_edge) continue;
      CHECK((discriminant_P(p, d.grid[i]) < 0.0) == (d.values[i] > kDensityThreshold));
    }
    for (const auto& s : d.support) {
      CHECK(discriminant_P(p, 0.5 * (s.lo + s.hi)) < 0.0);
      CHECK(SpectralMeasure(TransformKind::P, p).density(s.lo - step) == 0.0);
      CHECK(SpectralMeasure(TransformKind::P, p).density(s.hi + step) == 0.0);
    }
    CHECK(discriminant_P(p, report.upper_edge + 1.0) > 0.0);
  }
}

TEST_CASE("critical lambda and upper edge") {
  CHECK(std::abs(discriminant_P(matched(4.0 / 27.0), 0.0)) < 1e-10);
  CHECK(std::abs(critical_lambda(1.0, 1.0, inverse_lambda_rule()) - 4.0 / 27.0) < 1e-6);
  CHECK(upper_edge(matched(1.0)) > 0.0);
  CHECK(upper_edge(matched(0.1)) < 0.0);
  CHECK_THROWS_AS(critical_lambda(1.0, 1.0, inverse_lambda_rule(), 1.0, 10.0), NoBracket);
}

TEST_CASE("signal spectrum second moment") {
  for (double phi : {0.25, 0.75, 1.0, 2.5}) {
    const auto d = signal_spectrum(phi);
    CHECK(std::abs(moment(d, 0) - 1.0) < 1e-5);
    CHECK(std::abs(moment(d, 2) - (1.0 + phi)) < 1e-4);
  }
}

TEST_CASE("low-rank limit") {
  CHECK(lowrank_Q1(2.0).physical == doctest::Approx(0.5));
  CHECK(lowrank_Q1(1.0).physical == 0.0);
  const auto half = lowrank_Q1(0.5);
  CHECK(half.physical == 0.0);
  CHECK(half.roots[0] == doctest::Approx(-1.0));
  CHECK(half.roots[1] == 0.0);

  const cplx big(0.0, 1e6);
  CHECK(std::abs(-big * lowrank_Qhat(2.0, big).q_hat - 1.0) < 1e-4);
  CHECK(std::abs(lowrank_Qhat(2.0, cplx(1.0, 1e-7)).calQ - 0.5) < 1e-5);
  CHECK(lowrank_Qhat(5.0, cplx(2.0, 1e-6)).q_hat.imag() >= 0.0);
  CHECK_THROWS_AS(lowrank_Qhat(2.0, cplx(1.0, 0.0)), PoleAtOne);
}
