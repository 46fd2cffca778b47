#include <complex>
#include <random>

#include "doctest.h"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/exactfield.hpp"
#include "random_poly.hpp"

using namespace pseudotoric;
using pseudotoric::testing::random_nonzero;
using pseudotoric::testing::random_polynomial;
using pseudotoric::testing::random_rational;

namespace {

RegistryPtr flag3() { return make_registry({"z2", "z3", "zh2", "zh1"}); }

Polynomial var(const RegistryPtr& r, const char* name) { return Polynomial::variable(r, name); }

Polynomial one(const RegistryPtr& r) { return Polynomial(r, Rational(1)); }

}  // namespace

TEST_CASE("ring operations") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto z3 = var(r, "z3");
  auto zh2 = var(r, "zh2");

  CHECK((z2 + one(r)) + (-z2) == one(r));
  CHECK((z2 * zh2).to_string() == "1*z2^1*zh2^1");
  CHECK((z2 + z3) * (z2 - z3) == z2 * z2 - z3 * z3);
  CHECK((z2 - z2).is_zero());
  CHECK((z2 * z2 * z3).total_degree() == 3);
}

TEST_CASE("registry mismatch is a configuration error") {
  auto a = var(make_registry({"x", "y"}), "x");
  auto b = var(make_registry({"y", "x"}), "x");
  CHECK_THROWS_AS(a + b, ConfigurationError);
  CHECK_THROWS_AS(a * b, ConfigurationError);
  CHECK_THROWS_AS(var(make_registry({"x"}), "q"), ConfigurationError);
  CHECK_THROWS_AS(make_registry({"x", "x"}), ConfigurationError);
}

TEST_CASE("canonical text") {
  auto r = flag3();
  auto p = var(r, "z2").pow(2) * var(r, "zh2").scaled(2) + var(r, "z3").scaled(Rational(-1, 3)) + one(r);
  CHECK(p.to_string() == "2*z2^2*zh2^1 + -1/3*z3^1 + 1");
  CHECK(Polynomial(r).to_string() == "0");
}

TEST_CASE("rational arithmetic") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto z3 = var(r, "z3");
  auto zh2 = var(r, "zh2");
  RationalFunction a1 = z2 * zh2 - z3;
  RationalFunction a3 = z3;

  CHECK((a1 / a3) * (a3 / a1) == RationalFunction(one(r)));
  CHECK(((a1 / a3) * (a3 / a1)).is_constant());

  RationalFunction inv_z2(one(r), z2);
  auto sum = inv_z2 + inv_z2;
  CHECK(sum.identical(RationalFunction(one(r).scaled(2), z2)));

  auto q = RationalFunction(z2) / RationalFunction(z2 * z2);
  CHECK(q.identical(inv_z2));

  CHECK_THROWS_AS(RationalFunction(z2) / RationalFunction(Polynomial(r)), DomainError);
  CHECK_THROWS_AS(RationalFunction(z2, Polynomial(r)), DomainError);
}

TEST_CASE("canonical denominators are monic") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto z3 = var(r, "z3");
  RationalFunction f(z2, z3.scaled(4) + z2.scaled(2));
  CHECK(f.denominator().leading_term().coefficient == 1);
  CHECK(f == RationalFunction(z2.scaled(Rational(1, 2)), z3.scaled(2) + z2));
  RationalFunction g(z2.scaled(3) + z3.scaled(6), z2 + z3.scaled(2));
  CHECK(g.is_constant());
  CHECK(g.numerator().constant_value() == 3);
}

TEST_CASE("partial derivatives") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto zh2 = var(r, "zh2");
  CHECK(RationalFunction(z2 * zh2).partial("z2") == RationalFunction(zh2));
  CHECK(RationalFunction(one(r), z2).partial("z2") == RationalFunction(-one(r), z2 * z2));
  CHECK(RationalFunction(one(r).scaled(7)).partial("z3").is_zero());
  CHECK_THROWS_AS(RationalFunction(z2).partial("w"), ConfigurationError);
}

TEST_CASE("substitution") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto z3 = var(r, "z3");
  auto zh2 = var(r, "zh2");
  auto zh1 = var(r, "zh1");
  const std::size_t i_zh1 = r->index_of("zh1");

  Bindings relation{{i_zh1, RationalFunction(z2 * zh2 - z3)}};
  CHECK(substitute(RationalFunction(zh1), relation) == RationalFunction(z2 * zh2 - z3));

  RationalFunction f(z2 * zh1 + z3, zh1 * zh1 + one(r));
  Bindings identity{{i_zh1, RationalFunction(zh1)}, {r->index_of("z2"), RationalFunction(z2)}};
  CHECK(substitute(f, identity) == f);

  Bindings kill{{r->index_of("z2"), RationalFunction(Polynomial(r))}};
  CHECK_THROWS_AS(substitute(RationalFunction(one(r), z2), kill), DomainError);

  Bindings rational{{i_zh1, RationalFunction(z3, z2)}};
  CHECK(substitute(RationalFunction(zh1 * zh1 * z2), rational) == RationalFunction(z3 * z3, z2));
}

TEST_CASE("complex evaluation") {
  auto r = flag3();
  auto z2 = var(r, "z2");
  auto z3 = var(r, "z3");
  auto zh2 = var(r, "zh2");
  std::vector<Complex> pt{2.0, 0.5, 3.0, 0.0};
  CHECK(RationalFunction(z2 * zh2).evaluate(pt) == Complex(6.0));

  // A1 = A3 when z2*zh2 - z3 = z3.
  std::vector<Complex> sym{Complex(1.0, 1.0), Complex(0.5, -0.25), 2.0 * Complex(0.5, -0.25) / Complex(1.0, 1.0), 0.0};
  auto ratio = RationalFunction(z2 * zh2 - z3, z3);
  CHECK(std::abs(ratio.evaluate(sym) - 1.0) < 1e-14);

  std::vector<Complex> pole{1e-30, 1.0, 1.0, 1.0};
  try {
    (void)RationalFunction(one(r), z2).evaluate(pole);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(e.denominator_magnitude() < 1e-29);
  }
}

TEST_CASE("property: normalization is idempotent") {
  auto r = make_registry({"a", "b", "c"});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    Polynomial p = random_polynomial(r, rng, 6, 2);
    auto once = normalize_terms(p.terms());
    auto twice = normalize_terms(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t k = 0; k < once.size(); ++k) {
      REQUIRE(once[k].monomial == twice[k].monomial);
      REQUIRE(once[k].coefficient == twice[k].coefficient);
      REQUIRE(once[k].coefficient != 0);
    }
    for (std::size_t k = 1; k < once.size(); ++k) REQUIRE(grlex_less(once[k].monomial, once[k - 1].monomial));
  }
}

TEST_CASE("property: ring axioms") {
  auto r = make_registry({"a", "b", "c"});
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    auto p = random_polynomial(r, rng);
    auto q = random_polynomial(r, rng);
    auto s = random_polynomial(r, rng);
    REQUIRE((p * q) * s == p * (q * s));
    REQUIRE(p * (q + s) == p * q + p * s);
    REQUIRE(p * q == q * p);
    REQUIRE(p + q == q + p);
    REQUIRE((p + q) + s == p + (q + s));
  }
  for (int i = 0; i < 200; ++i) {
    auto f = random_rational(r, rng);
    auto g = random_rational(r, rng);
    auto h = random_rational(r, rng);
    REQUIRE((f * g) * h == f * (g * h));
    REQUIRE(f * (g + h) == f * g + f * h);
    REQUIRE(f + g == g + f);
    if (!f.is_zero()) REQUIRE((f * f.inverse()) == RationalFunction(Polynomial(r, Rational(1))));
  }
}

TEST_CASE("property: derivation rule") {
  auto r = make_registry({"a", "b", "c"});
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    auto f = random_rational(r, rng);
    auto g = random_rational(r, rng);
    for (std::size_t v = 0; v < r->size(); ++v) {
      REQUIRE((f * g).partial(v) == f * g.partial(v) + g * f.partial(v));
    }
  }
}

TEST_CASE("property: evaluation is multiplicative") {
  auto r = make_registry({"a", "b", "c"});
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd;
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    auto f = random_rational(r, rng);
    auto g = random_rational(r, rng);
    std::vector<Complex> pt{{nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
    try {
      Complex fg = (f * g).evaluate(pt, 1e-3);
      Complex prod = f.evaluate(pt, 1e-3) * g.evaluate(pt, 1e-3);
      double scale = std::max(1.0, std::abs(prod));
      REQUIRE(std::abs(fg - prod) <= 1e-12 * scale);
      ++checked;
    } catch (const EvaluationError&) {
    }
  }
  CHECK(checked > 400);
}

TEST_CASE("exact quotient") {
  auto r = make_registry({"a", "b"});
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    auto p = random_nonzero(r, rng);
    auto q = random_polynomial(r, rng);
    auto prod = p * q;
    auto quot = prod.exact_quotient(p);
    REQUIRE(quot.has_value());
    REQUIRE(*quot == q);
  }
  auto a = Polynomial::variable(r, "a");
  auto b = Polynomial::variable(r, "b");
  CHECK_FALSE((a * a + b).exact_quotient(a).has_value());
}
