#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "milat/errors.hpp"
#include "milat/trig_series.hpp"

using milat::TrigSeries;
using Complex = std::complex<double>;

namespace {

TrigSeries random_series(std::mt19937& rng, int k_max, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  TrigSeries s(k_max);
  s.set_coeff(0, {u(rng), 0.0});
  for (int k = 1; k <= k_max; ++k) s.set_coeff(k, {u(rng), u(rng)});
  return s;
}

// Independent evaluation: c0 + sum 2(Re c_k cos kz - Im c_k sin kz).
double eval_oracle(const TrigSeries& s, double z) {
  double out = s.coeff(0).real();
  for (int k = 1; k <= s.k_max(); ++k)
    out += 2.0 * (s.coeff(k).real() * std::cos(k * z) - s.coeff(k).imag() * std::sin(k * z));
  return out;
}

}  // namespace

TEST_CASE("constructors produce the expected coefficients") {
  TrigSeries z(3);
  CHECK(z.k_max() == 3);
  for (int k = -3; k <= 3; ++k) CHECK(z.coeff(k) == Complex{0.0, 0.0});
  CHECK(z.coeff(17) == Complex{0.0, 0.0});  // outside range

  TrigSeries c = TrigSeries::constant(2.5);
  CHECK(c.coeff(0) == Complex{2.5, 0.0});
  CHECK(c.evaluate(0.37) == doctest::Approx(2.5));

  TrigSeries cosine = TrigSeries::cosine(2, 3.0);  // 3 cos 2z = 1.5 e^{2iz} + c.c.
  CHECK(cosine.coeff(2) == Complex{1.5, 0.0});
  CHECK(cosine.coeff(-2) == Complex{1.5, 0.0});
  CHECK(cosine.evaluate(0.4) == doctest::Approx(3.0 * std::cos(0.8)));

  TrigSeries sine = TrigSeries::sine(1, 2.0);  // 2 sin z = -i e^{iz} + c.c.
  CHECK(sine.coeff(1) == Complex{0.0, -1.0});
  CHECK(sine.evaluate(0.4) == doctest::Approx(2.0 * std::sin(0.4)));
}

TEST_CASE("conjugate symmetry is enforced") {
  CHECK_THROWS_AS(TrigSeries(1, {{1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}}), milat::InvalidArgument);
  // c_{-1} = conj(c_1) is fine.
  TrigSeries ok(1, {{1.0, -0.5}, {0.25, 0.0}, {1.0, 0.5}});
  CHECK(ok.coeff(-1) == std::conj(ok.coeff(1)));
  CHECK(ok.max_conjugate_defect() == doctest::Approx(0.0));

  ok.set_coeff(1, {2.0, 3.0});
  CHECK(ok.coeff(-1) == Complex{2.0, -3.0});
  ok.set_coeff(0, {1.0, 1e-30});  // imaginary part of c_0 is dropped
  CHECK(ok.coeff(0).imag() == 0.0);

  CHECK_THROWS_AS(TrigSeries(1, {{1.0, 0.0}}), milat::InvalidArgument);  // wrong length
}

TEST_CASE("coefficient norms") {
  // U = 1 + 2 cos z + 4 sin 2z: c_0 = 1, c_1 = 1, c_2 = -2i.
  TrigSeries s(2);
  s.set_coeff(0, {1.0, 0.0});
  s.set_coeff(1, {1.0, 0.0});
  s.set_coeff(2, {0.0, -2.0});
  CHECK(s.norm(0) == doctest::Approx(1.0 + 2.0 * 1.0 + 2.0 * 2.0));
  CHECK(s.norm(1) == doctest::Approx(1.0 + 2.0 * 1.0 + 2.0 * 2.0 * 2.0));
  CHECK(s.norm(2) == doctest::Approx(1.0 + 2.0 * 1.0 + 2.0 * 4.0 * 2.0));
}

TEST_CASE("evaluate matches the cos/sin oracle") {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    TrigSeries s = random_series(rng, 6);
    for (double z : {0.0, 0.1, 1.7, -2.9, 6.4})
      CHECK(s.evaluate(z) == doctest::Approx(eval_oracle(s, z)).epsilon(1e-12));
  }
}

TEST_CASE("derivative matches central differences") {
  std::mt19937 rng(99);
  TrigSeries s = random_series(rng, 5);
  TrigSeries d1 = s.derivative(1);
  TrigSeries d2 = s.derivative(2);
  const double h = 1e-5;
  for (double z : {0.3, 1.1, 4.0}) {
    double fd1 = (s.evaluate(z + h) - s.evaluate(z - h)) / (2.0 * h);
    double fd2 = (s.evaluate(z + h) - 2.0 * s.evaluate(z) + s.evaluate(z - h)) / (h * h);
    CHECK(d1.evaluate(z) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(d2.evaluate(z) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("shift translates the argument and preserves norms") {
  std::mt19937 rng(7);
  TrigSeries s = random_series(rng, 4);
  const double p = 0.813;
  TrigSeries sh = s.shift(p);
  for (double z : {0.0, 0.5, 2.2})
    CHECK(sh.evaluate(z) == doctest::Approx(s.evaluate(z + p)).epsilon(1e-12));
  for (int order : {0, 1, 2})
    CHECK(sh.norm(order) == doctest::Approx(s.norm(order)).epsilon(1e-13));
}

TEST_CASE("product is the pointwise product") {
  std::mt19937 rng(2024);
  TrigSeries a = random_series(rng, 3);
  TrigSeries b = random_series(rng, 5);
  TrigSeries ab = product(a, b);
  CHECK(ab.k_max() == 8);
  for (double z : {0.0, 0.77, 1.9, -3.0})
    CHECK(ab.evaluate(z) == doctest::Approx(a.evaluate(z) * b.evaluate(z)).epsilon(1e-12));
}

TEST_CASE("Banach algebra bound: ||uv|| <= ||u|| ||v||") {
  std::mt19937 rng(31415);
  for (int trial = 0; trial < 50; ++trial) {
    TrigSeries a = random_series(rng, 2 + trial % 7);
    TrigSeries b = random_series(rng, 1 + trial % 5);
    TrigSeries ab = product(a, b);
    // The summable-coefficient norm makes the space a Banach algebra.
    CHECK(ab.norm(0) <= a.norm(0) * b.norm(0) * (1.0 + 1e-12));
  }
}

TEST_CASE("truncation guards the discarded tail mass") {
  TrigSeries s(4);
  s.set_coeff(0, {1.0, 0.0});
  s.set_coeff(1, {0.5, 0.0});
  s.set_coeff(4, {1e-14, 0.0});
  CHECK(s.tail_mass(1) == doctest::Approx(2e-14));
  TrigSeries t = s.truncated(1);
  CHECK(t.k_max() == 1);
  CHECK(t.coeff(1) == Complex{0.5, 0.0});

  s.set_coeff(4, {0.3, 0.0});  // now the tail is substantial
  CHECK_THROWS_AS(s.truncated(1), milat::TailOverflow);
  TrigSeries proj = s.projected(1);  // unconditional cut
  CHECK(proj.k_max() == 1);
  CHECK(proj.coeff(4) == Complex{0.0, 0.0});
}

TEST_CASE("dominant mode") {
  TrigSeries s(3);
  s.set_coeff(0, {0.2, 0.0});
  s.set_coeff(2, {0.0, -0.9});
  s.set_coeff(3, {0.1, 0.1});
  CHECK(s.dominant_mode() == 2);
  CHECK(TrigSeries::constant(1.0).dominant_mode() == 0);
}

TEST_CASE("arithmetic operators") {
  std::mt19937 rng(55);
  TrigSeries a = random_series(rng, 3);
  TrigSeries b = random_series(rng, 2);
  TrigSeries sum = a + b;
  TrigSeries diff = a - b;
  TrigSeries scaled = a * 2.5;
  for (double z : {0.1, 2.0}) {
    CHECK(sum.evaluate(z) == doctest::Approx(a.evaluate(z) + b.evaluate(z)));
    CHECK(diff.evaluate(z) == doctest::Approx(a.evaluate(z) - b.evaluate(z)));
    CHECK(scaled.evaluate(z) == doctest::Approx(2.5 * a.evaluate(z)));
    CHECK((2.5 * a).evaluate(z) == doctest::Approx(scaled.evaluate(z)));
  }
  CHECK(a == a);
  CHECK(!(a == b));
}

TEST_CASE("JSON round trip") {
  std::mt19937 rng(8080);
  TrigSeries s = random_series(rng, 4);
  nlohmann::json j = s.to_json();
  CHECK(j.at("K_max") == 4);
  CHECK(j.at("coeffs").size() == 9);
  TrigSeries back = TrigSeries::from_json(j);
  CHECK(back == s);

  CHECK_THROWS_AS(TrigSeries::from_json(nlohmann::json{{"K_max", 1}}),
                  milat::InvalidArgument);
  nlohmann::json bad = {{"K_max", 1}, {"coeffs", {{0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}}};
  CHECK_THROWS_AS(TrigSeries::from_json(bad), milat::InvalidArgument);
}
