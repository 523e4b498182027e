#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles/marchenko_pastur.hpp"
#include "oracles/riccati.hpp"
#include "oracles/sampling.hpp"
#include "psdflow/errors.hpp"
#include "psdflow/flow/asymptotics.hpp"
#include "psdflow/flow/evolution.hpp"
#include "psdflow/flow/result_one.hpp"
#include "psdflow/flow/transform.hpp"
#include "psdflow/kernels.hpp"

using namespace psdflow;
using namespace psdflow::flow;

namespace {

ModelParams matched(double lambda) { return {1.0, 1.0, lambda, 1.0 / lambda}; }
const ModelParams kFig1(0.75, 0.25, 1e4, 0.0);

struct Instance {
  Eigen::MatrixXd zstar, h, x0;
};

Instance sample(const ModelParams& p, int n, std::uint64_t seed) {
  const int d = static_cast<int>(std::lround(p.phi() * n));
  const int m = static_cast<int>(std::lround(p.psi() * n));
  Instance out;
  const Eigen::MatrixXd xs = oracle::gaussian(n, d, 1.0 / n, seed);
  out.zstar = xs * xs.transpose();
  out.h = out.zstar + oracle::symmetric_noise(n, 1.0 / n, seed + 1) / std::sqrt(p.lambda()) -
          p.mu() * Eigen::MatrixXd::Identity(n, n);
  out.x0 = oracle::gaussian(n, m, 1.0 / n, seed + 2);
  return out;
}

}  // namespace

TEST_CASE("q at t = 0") {
  const double times[] = {0.0};
  for (const auto& p : {kFig1, matched(1.0), ModelParams(2.0, 0.5, 3.0, 0.1)}) {
    const auto curve = evolve_q(p, times);
    CHECK(std::abs(curve.q[0] - p.psi()) < 1e-10);
    CHECK(std::abs(curve.q_tilde[0] - 1.0 / p.psi()) < 1e-8);
  }
}

TEST_CASE("q and p follow a sampled Riccati flow") {
  const int n = 600;
  const auto inst = sample(kFig1, n, 41);
  const double d = kFig1.phi() * n;
  const double times[] = {0.5, 1.0, 2.0};
  const auto curve = evolve_q(kFig1, times);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.h);
  std::vector<double> eigs(n), overlaps(n);
  const Eigen::MatrixXd proj = es.eigenvectors().transpose() * inst.zstar * es.eigenvectors();
  for (int i = 0; i < n; ++i) {
    eigs[i] = es.eigenvalues()(i);
    overlaps[i] = proj(i, i) / d;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXd z = oracle::riccati_z(inst.h, inst.x0, times[k]);
    const double q = (inst.zstar * z).trace() / d;
    const double p = (z * z).trace() / d;
    CAPTURE(times[k]);
    CHECK(std::abs(curve.q[k] - q) < 2e-2);
    CHECK(std::abs(semi_analytic_q(eigs, overlaps, kFig1.psi(), times[k]) - q) < 2e-2);
    CHECK(std::abs(eval_p(kFig1, times[k]) - p) < 3e-2);
  }
}

TEST_CASE("semi-analytic prediction at t = 0") {
  const std::vector<double> eigs = {-0.5, 0.1, 0.7, 2.0};
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  CHECK(semi_analytic_q(eigs, w, 0.3, 0.0) == doctest::Approx(0.3 * 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(semi_analytic_q(eigs, std::vector<double>{0.1}, 0.3, 1.0), ValidationError);
}

TEST_CASE("long-time limit") {
  const auto p = matched(1.0);
  const auto inf = asymptotics(p);
  CHECK(inf.regime == Regime::alpha_zero);
  CHECK(inf.alpha == 0.0);
  CHECK(std::abs(inf.mse_inf - (p.r() - 2.0 * inf.q_inf + inf.p_inf)) < 1e-10);
  const double times[] = {50.0};
  const auto curve = evolve_q(p, times);
  CHECK(std::abs(curve.q[0] - inf.q_inf) < 1e-3);
  CHECK(std::abs(eval_p(p, 50.0) - inf.p_inf) < 2e-3);
}

TEST_CASE("support below zero keeps the error at r") {
  const auto p = matched(0.1);
  const auto inf = asymptotics(p);
  CHECK(std::abs(inf.mse_inf - 2.0) < 1e-6);
  CHECK(std::abs(inf.q_inf) < 1e-10);
  const double times[] = {0.0, 1.0, 10.0};
  const auto curve = mse_curve(p, times);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(curve.mse[i] == doctest::Approx(p.r() - 2.0 * curve.q[i] + (*curve.p)[i]));
  }
  CHECK(curve.q[2] < curve.q[1]);
}

TEST_CASE("mse at t = 0") {
  for (const auto& p : {kFig1, matched(2.0)}) {
    const double times[] = {0.0};
    const auto curve = mse_curve(p, times);
    const double expected = 1.0 + p.phi() - 2.0 * p.psi() + p.psi() * (1.0 + p.psi()) / p.phi();
    CHECK(std::abs(curve.mse[0] - expected) < 1e-6);
  }
}

TEST_CASE("h at t = 0 is the Marchenko-Pastur transform") {
  for (const auto& p : {matched(1.0), kFig1}) {
    for (const cplx z : {cplx(0.5, 0.1), cplx(-1.0, 0.01), cplx(3.0, 1.0), cplx(1.0, 1e-3)}) {
      const auto e = eval_h(p, 0.0, z);
      CHECK(std::abs(e.h - oracle::gram_stieltjes(p.psi(), z)) < 1e-8);
      CHECK(e.contour_deviation <= 1e-6);
    }
  }
}

TEST_CASE("h normalization and atom") {
  for (double t : {0.0, 1.0, 5.0}) {
    const cplx big(0.0, 1e6);
    CHECK(std::abs(-big * eval_h(kFig1, t, big).h - 1.0) < 1e-4);
  }
  // rank m = n/4 leaves an atom of mass 3/4 at zero
  for (double t : {0.5, 2.0}) {
    const auto e = eval_h(kFig1, t, cplx(-0.3, 0.0));
    CHECK(e.h.imag() == doctest::Approx(0.0));
    const double eps = 1e-7;
    const HSolver solver(kFig1, t, {}, ContourCheck::skip);
    CHECK(eps * solver(cplx(0.0, eps)).h.imag() >= 0.75 - 1e-4);
  }
}

TEST_CASE("h is Herglotz") {
  const HSolver solver(matched(1.0), 2.0, {}, ContourCheck::skip);
  for (int i = 0; i < 40; ++i) {
    const cplx z(-2.0 + 8.0 * i / 39.0, 0.05);
    CHECK(solver(z).h.imag() > 0.0);
  }
}

TEST_CASE("contour and real-line routes agree") {
  for (const auto& p : {matched(1.0), ModelParams(1.0, 0.5, 2.0, 0.5)}) {
    for (double t : {0.5, 2.0, 5.0, 20.0}) {
      for (const cplx z : {cplx(-1.0, 0.01), cplx(3.0, 1.0), cplx(-0.5, 0.0)}) {
        CAPTURE(t);
        CAPTURE(z);
        const auto e = eval_h(p, t, z);
        CHECK(e.contour_deviation <= 1e-6);
        CHECK(e.contour_half_height > 0.0);
      }
    }
  }
  // late times push the denominator zeros towards the support; the rectangle is thinned
  const auto thin = eval_h(matched(1.0), 20.0, cplx(0.5, 0.1));
  const auto wide = Contour::around_support(matched(1.0));
  CHECK(thin.contour_half_height < wide.half_height);
  CHECK(thin.contour_deviation <= 1e-6);
}

TEST_CASE("a contour holding denominator zeros is rejected") {
  const auto p = matched(1.0);
  const auto support = spectral::support_intervals(p);
  const double c = 0.5 * (support.front().lo + support.back().hi);
  const double r = 0.7 * (support.back().hi - support.front().lo);
  const auto circle = Contour::circle(cplx(c, 0.0), r, 2048);
  CHECK(eval_h(p, 0.0, cplx(0.5, 0.1), {}, circle).contour_deviation <= 1e-6);
  CHECK_THROWS_AS(eval_h(p, 5.0, cplx(0.5, 0.1), {}, circle), ContourRealLineMismatch);
  const auto narrow = Contour::rectangle(support.front().lo + 0.5, support.back().hi);
  CHECK_THROWS_AS(HSolver(p, 1.0, {}, ContourCheck::enforce, narrow), ValidationError);
}

TEST_CASE("p at t = 0 and mass") {
  for (const auto& p : {kFig1, matched(1.0), ModelParams(1.5, 0.6, 2.0, 0.2)}) {
    CHECK(std::abs(eval_p(p, 0.0) - p.psi() * (1.0 + p.psi()) / p.phi()) < 1e-6);
    for (double t : {0.5, 3.0}) {
      const auto m = eval_moments(p, t);
      CHECK(std::abs(m.m0 - 1.0) < 1e-4);
    }
  }
  const auto m = eval_moments(kFig1, 0.0);
  CHECK(std::abs(m.m1 - kFig1.psi()) < 1e-8);
}

TEST_CASE("finite-difference p agrees with the circle moments") {
  for (double t : {0.5, 1.0}) {
    const double p = eval_p(matched(1.0), t);
    CHECK(std::abs(eval_p_finite_difference(matched(1.0), t) - p) < 1e-3);
  }
}

TEST_CASE("a circle inside the spectrum loses mass") {
  CHECK(std::abs(eval_moments(matched(1.0), 1.0, {}, 64, 1.0).m0 - 1.0) > 1e-4);
}

TEST_CASE("Z_t density carries the moments") {
  const auto p = kFig1;
  const double t = 1.0;
  const spectral::GridSpec grid{-1.0, 0.5 * moment_radius(p) + 0.5, 1201, kZDensityEpsilon};
  const auto d = z_density(p, t, grid);
  CHECK(d.atom_at_zero == doctest::Approx(0.75));
  CHECK(std::abs(d.mass - 1.0) < 1e-3);
  CHECK(std::abs(spectral::moment(d, 2) / p.phi() - eval_p(p, t)) < 1e-3);
  for (double v : d.values) CHECK(v >= 0.0);
  const spectral::GridSpec fine{-1.0, 4.0, 11, 1e-6};
  CHECK_THROWS_AS(z_density(p, t, fine), ValidationError);
}

TEST_CASE("warm and cold starts agree") {
  const std::vector<double> times = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  FixedPointConfig cfg;
  for (const auto& p : {kFig1, matched(0.5)}) {
    const auto warm = evolve_q(p, times, cfg, EvolveMode::sequential_warm);
    const auto cold = evolve_q(p, times, cfg, EvolveMode::parallel_cold);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(warm.q[i] - cold.q[i]) <= 1e-8);
      CHECK(std::abs(warm.q_tilde[i] - cold.q_tilde[i]) <= 1e-6 * warm.q_tilde[i]);
    }
  }
}

TEST_CASE("late times do not overflow") {
  const double times[] = {100.0};
  const auto curve = evolve_q(kFig1, times);
  CHECK(std::isfinite(curve.q[0]));
  CHECK(std::isfinite(curve.q_tilde[0]));
  const auto inf = asymptotics(kFig1);
  CHECK(std::abs(curve.q[0] - inf.q_inf) < 1e-3);
  const HSolver solver(kFig1, 100.0, {}, ContourCheck::skip);
  CHECK(std::isfinite(std::abs(solver(cplx(0.5, 0.5)).h)));
  CHECK(std::abs(eval_p(kFig1, 100.0) - inf.p_inf) < 2e-3);
}

TEST_CASE("refining the quadrature leaves q unchanged") {
  const spectral::SpectralMeasure rho_p(spectral::TransformKind::P, kFig1);
  const spectral::SpectralMeasure rho_q(spectral::TransformKind::Q, kFig1);
  const auto nodes = result_one_nodes(rho_p, rho_q, 2.0);
  const auto base = solve_result_one(nodes, kFig1.psi(), kFig1.psi(), {});
  ResultOneNodes fine;
  fine.t = 2.0;
  const double breaks[] = {0.0};
  const auto rp = rho_p.rule(0.01, breaks);
  const auto rq = rho_q.rule(0.01, breaks);
  const auto from_p = result_one_nodes(rp.x, rp.w, 2.0);
  const auto from_q = result_one_nodes(rq.x, rq.w, 2.0);
  fine.ap = from_p.ap;
  fine.wp = rp.w;
  fine.aq = from_q.aq;
  fine.kq = from_q.kq;
  fine.wq = rq.w;
  const auto refined = solve_result_one(fine, kFig1.psi(), kFig1.psi(), {});
  CHECK(refined.q == doctest::Approx(base.q).epsilon(1e-8));
  CHECK(refined.u == doctest::Approx(base.u).epsilon(1e-8));
}

TEST_CASE("scalar and vector kernels give the same flow") {
  if (!kernels::isa_supported(kernels::Isa::avx2)) return;
  const auto previous = kernels::active_isa();
  const double times[] = {0.5, 3.0};
  kernels::set_active_isa(kernels::Isa::scalar);
  const auto q_scalar = evolve_q(kFig1, times);
  const auto h_scalar = eval_h(matched(1.0), 2.0, cplx(0.3, 0.2));
  kernels::set_active_isa(kernels::Isa::avx2);
  const auto q_vector = evolve_q(kFig1, times);
  const auto h_vector = eval_h(matched(1.0), 2.0, cplx(0.3, 0.2));
  kernels::set_active_isa(previous);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(q_scalar.q[i] - q_vector.q[i]) < 1e-12);
  CHECK(std::abs(h_scalar.h - h_vector.h) < 1e-12);
}

TEST_CASE("curve csv round trip") {
  const double times[] = {0.0, 0.5, 1.0};
  auto curve = mse_curve(kFig1, times);
  const auto back = parse_curve_csv(curve_csv(curve));
  REQUIRE(back.times.size() == 3);
  CHECK(back.source == CurveSource::theory);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.times[i] == curve.times[i]);
    CHECK(back.q[i] == curve.q[i]);
    CHECK(back.q_tilde[i] == curve.q_tilde[i]);
    CHECK((*back.p)[i] == (*curve.p)[i]);
    CHECK(back.mse[i] == curve.mse[i]);
  }
  const auto bare = parse_curve_csv(curve_csv(evolve_q(kFig1, times)));
  CHECK(!bare.p.has_value());
  CHECK(std::isnan(bare.mse[0]));
}

TEST_CASE("time validation") {
  const std::vector<std::vector<double>> bad = {{}, {-1.0}, {0.0, 0.0}, {1.0, 0.5}, {NAN}};
  for (const auto& times : bad) CHECK_THROWS_AS(evolve_q(kFig1, times), ValidationError);
  FixedPointConfig cfg;
  cfg.damping = 0.0;
  const double ok[] = {1.0};
  CHECK_THROWS_AS(evolve_q(kFig1, ok, cfg), ValidationError);
}

TEST_CASE("solver failures are reported") {
  FixedPointConfig cfg;
  cfg.max_iter = 1;
  cfg.restart = RestartPolicy::none;
  const double times[] = {3.0};
  CHECK_THROWS_AS(evolve_q(matched(1.0), times, cfg), NonConvergence);
  CHECK_THROWS_AS(eval_h(matched(1.0), 3.0, cplx(0.5, 0.1), cfg), NonConvergence);
}

TEST_CASE("underparametrized regime") {
  const ModelParams p(1.0, 0.3, 2.0, 0.5);
  const auto inf = asymptotics(p);
  REQUIRE(inf.regime == Regime::underparam_positive_alpha);
  CHECK(inf.alpha > 0.0);
  const spectral::SpectralMeasure rho_p(spectral::TransformKind::P, p);
  CHECK(std::abs(rho_p.cdf(inf.alpha) - (1.0 - p.psi())) < 1e-8);
  const double times[] = {40.0};
  CHECK(std::abs(evolve_q(p, times).q[0] - inf.q_inf) < 1e-3);
  const auto s = asymptote_json(inf);
  CHECK(s.find("\"alpha\"") != std::string::npos);
  CHECK(s.find("underparam_positive_alpha") != std::string::npos);
}
