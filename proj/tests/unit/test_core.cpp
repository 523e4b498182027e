#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "psdflow/errors.hpp"
#include "psdflow/fixed_point.hpp"
#include "psdflow/io.hpp"
#include "psdflow/parallel.hpp"
#include "psdflow/params.hpp"
#include "psdflow/quadrature.hpp"

using namespace psdflow;

TEST_CASE("ModelParams validates its invariants") {
  const ModelParams p(0.75, 0.25, 1e4, 0.0);
  CHECK(p.r() == doctest::Approx(1.75));
  CHECK(p.with_lambda(2.0).lambda() == 2.0);
  CHECK_THROWS_AS(ModelParams(-1.0, 1.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(ModelParams(1.0, 0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(ModelParams(1.0, 1.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(ModelParams(1.0, 1.0, 1.0, -0.1), ValidationError);
  CHECK_THROWS_AS(ModelParams(std::nan(""), 1.0, 1.0, 0.0), ValidationError);
  CHECK(inverse_lambda_rule()(4.0) == 0.25);
}

TEST_CASE("FixedPointConfig validation") {
  FixedPointConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.damping = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("doubles round-trip through CSV text") {
  const std::vector<double> values = {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0,
                                      std::numeric_limits<double>::denorm_min()};
  io::CsvWriter w({"v"});
  for (double v : values) w.add_row({io::format_double(v)});
  const auto table = io::parse_csv(w.str());
  const auto back = table.numeric_column("v");
  REQUIRE(back.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(back[i] == values[i]);
  CHECK_THROWS_AS(table.column("missing"), ValidationError);
  CHECK_THROWS_AS(io::parse_double("abc"), ValidationError);
}

TEST_CASE("csv files written and read back") {
  const auto dir = std::filesystem::temp_directory_path() / "psdflow_core_test";
  std::filesystem::remove_all(dir);
  io::CsvWriter w({"a", "b"});
  w.add_row({"1", "2.5"});
  io::write_text(dir / "nested" / "t.csv", w.str());
  const auto t = io::read_csv(dir / "nested" / "t.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.numeric_column("b")[0] == 2.5);
  CHECK_THROWS_AS(w.add_row({"1"}), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& gl = gauss_legendre(n);
    double s = 0.0;
    for (double w : gl.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  }
  // exact for polynomials of degree 2n - 1
  const auto& gl = gauss_legendre(4);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 6);
  CHECK(s == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(integrate_gl([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 4) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_legendre(0), ValidationError);
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }, 3),
                  std::runtime_error);
  CHECK(default_thread_count() >= 1);
}
