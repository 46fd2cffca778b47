#include <random>

#include "doctest.h"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/forms.hpp"
#include "random_poly.hpp"

using namespace pseudotoric;
using pseudotoric::testing::random_nonzero;
using pseudotoric::testing::random_rational;

namespace {

RegistryPtr chart() { return make_registry({"z2", "zh2", "z3"}); }

RationalFunction v(const RegistryPtr& r, const char* name) { return Polynomial::variable(r, name); }

RationalFunction c(const RegistryPtr& r, long k) { return RationalFunction::constant(r, k); }

DifferentialForm dz(const RegistryPtr& r, const char* name) {
  return DifferentialForm::differential(r, r->index_of(name));
}

DifferentialForm fn(const RationalFunction& f) { return DifferentialForm::function(f); }

DifferentialForm d(const RationalFunction& f) { return exterior_derivative(fn(f)); }

DifferentialForm random_form(const RegistryPtr& r, std::mt19937_64& rng, int degree) {
  DifferentialForm f(r, degree);
  std::uniform_int_distribution<std::size_t> pick(0, r->size() - 1);
  for (int t = 0; t < 3; ++t) {
    std::vector<std::size_t> idx;
    for (int k = 0; k < degree; ++k) idx.push_back(pick(rng));
    f += DifferentialForm::basis(r, idx, random_rational(r, rng));
  }
  return f;
}

VectorFieldContraction random_field(const RegistryPtr& r, std::mt19937_64& rng) {
  VectorFieldContraction vf(r);
  std::uniform_int_distribution<int> w(-2, 2);
  for (std::size_t i = 0; i < r->size(); ++i) vf.add(i, c(r, w(rng)));
  return vf;
}

}  // namespace

TEST_CASE("wedge") {
  auto r = chart();
  CHECK(wedge(dz(r, "z2"), dz(r, "z2")).is_zero());
  CHECK(form_equals(wedge(dz(r, "z2"), dz(r, "zh2")), -wedge(dz(r, "zh2"), dz(r, "z2"))));
  auto lhs = wedge(dz(r, "z2").scaled(v(r, "z3")), dz(r, "z3"));
  CHECK(form_equals(lhs, wedge(dz(r, "z2"), dz(r, "z3")).scaled(v(r, "z3"))));
  CHECK(lhs.degree() == 2);
}

TEST_CASE("exterior derivative") {
  auto r = chart();
  auto a = v(r, "z2") * v(r, "zh2");
  CHECK(form_equals(d(a), dz(r, "z2").scaled(v(r, "zh2")) + dz(r, "zh2").scaled(v(r, "z2"))));
  CHECK(exterior_derivative(d(a / v(r, "z3"))).is_zero());
  CHECK(d(c(r, 7)).is_zero());
  CHECK(d(c(r, 7)).degree() == 1);
}

TEST_CASE("contraction") {
  auto r = chart();
  VectorFieldContraction dz2(r);
  dz2.add(r->index_of("z2"), c(r, 1) / v(r, "z2"));
  CHECK(form_equals(contract(dz2, dz(r, "z2")), fn(c(r, 1))));
  CHECK(form_equals(contract(dz2, wedge(dz(r, "z3"), dz(r, "z2"))), -dz(r, "z3")));
  CHECK_THROWS_AS(contract(dz2, fn(v(r, "z2"))), DomainError);
  VectorFieldContraction twice(r);
  twice.add(0, c(r, 1));
  CHECK_THROWS_AS(twice.add(0, c(r, 2)), ConfigurationError);
}

TEST_CASE("flag n=3 contraction of the volume form") {
  auto r = chart();
  auto z2 = v(r, "z2");
  auto zh2 = v(r, "zh2");
  auto z3 = v(r, "z3");
  auto omega = wedge(wedge(dz(r, "z2"), dz(r, "zh2")), dz(r, "z3"));
  VectorFieldContraction v1(r);
  v1.add(r->index_of("z2"), c(r, 1)).add(r->index_of("zh2"), c(r, -1));
  VectorFieldContraction v2(r);
  v2.add(r->index_of("z3"), c(r, 1)).add(r->index_of("zh2"), c(r, 1));
  auto a1 = z2 * zh2 - z3;
  auto a3 = z3;
  auto expected = wedge(fn(-a1), d(a3)) + wedge(fn(a3), d(a1));
  CHECK(form_equals(contract(v1, contract(v2, omega)), expected));
  CHECK(v1.to_string() == "z2*i(z2) - zh2*i(zh2)");
}

TEST_CASE("dlog") {
  auto r = chart();
  auto z2 = v(r, "z2");
  auto zh2 = v(r, "zh2");
  auto z3 = v(r, "z3");
  CHECK(dlog(c(r, 5)).is_zero());
  CHECK(form_equals(dlog(z2 * zh2), dz(r, "z2").scaled(c(r, 1) / z2) + dz(r, "zh2").scaled(c(r, 1) / zh2)));
  auto a1 = z2 * zh2 - z3;
  auto a3 = z3;
  auto expected = d(a1).scaled(c(r, 1) / a1) - d(a3).scaled(c(r, 1) / a3);
  CHECK(form_equals(dlog(a1 / a3), expected));
  CHECK_THROWS_AS(dlog(c(r, 0)), DomainError);
}

TEST_CASE("form equality") {
  auto r = chart();
  auto a = wedge(dz(r, "z2"), dz(r, "z3")).scaled(v(r, "zh2"));
  CHECK(form_equals(a, a));
  CHECK(form_equals(wedge(dz(r, "z2"), dz(r, "z3")), -wedge(dz(r, "z3"), dz(r, "z2"))));
  CHECK_FALSE(form_equals(dz(r, "z2"), dz(r, "z2").scaled(c(r, 2))));
  CHECK_FALSE(form_equals(dz(r, "z2"), fn(c(r, 1))));
}

TEST_CASE("canonical text") {
  auto r = chart();
  auto f = wedge(dz(r, "z2"), dz(r, "z3")).scaled(v(r, "zh2")) + wedge(dz(r, "zh2"), dz(r, "z2")).scaled(c(r, 0));
  CHECK(f.to_string() == "dz2^dz3: 1*zh2^1");
  CHECK(DifferentialForm(r, 2).to_string() == "0");
}

TEST_CASE("numeric evaluation agrees with the determinant") {
  auto r = chart();
  auto omega = wedge(dz(r, "z2"), dz(r, "z3")).scaled(v(r, "zh2"));
  std::vector<Complex> pt{1.0, 2.0, 3.0};
  std::vector<std::vector<Complex>> vecs{{1.0, 0.0, 2.0}, {0.5, 7.0, 1.0}};
  // zh2 * (1*1 - 2*0.5) = 0
  CHECK(std::abs(evaluate_form(omega, pt, vecs)) < 1e-15);
  vecs[1] = {0.0, 0.0, 1.0};
  CHECK(std::abs(evaluate_form(omega, pt, vecs) - 2.0) < 1e-15);
}

TEST_CASE("property: antiderivation and graded commutativity") {
  auto r = make_registry({"a", "b", "c", "e"});
  std::mt19937_64 rng(21);
  for (int i = 0; i < 60; ++i) {
    int p = 1 + i % 2;
    int q = 1 + (i / 2) % 2;
    auto a = random_form(r, rng, p);
    auto b = random_form(r, rng, q);
    auto vf = random_field(r, rng);
    auto lhs = contract(vf, wedge(a, b));
    auto rhs = wedge(contract(vf, a), b) + (p % 2 == 0 ? wedge(a, contract(vf, b)) : -wedge(a, contract(vf, b)));
    REQUIRE(form_equals(lhs, rhs));
    auto ab = wedge(a, b);
    auto ba = wedge(b, a);
    REQUIRE(form_equals(ab, (p * q) % 2 == 0 ? ba : -ba));
  }
}

TEST_CASE("property: contractions anticommute") {
  auto r = make_registry({"a", "b", "c", "e"});
  std::mt19937_64 rng(22);
  for (int i = 0; i < 60; ++i) {
    auto f = random_form(r, rng, 2 + i % 2);
    auto vf = random_field(r, rng);
    auto wf = random_field(r, rng);
    REQUIRE(contract(vf, contract(vf, f)).is_zero());
    REQUIRE(form_equals(contract(vf, contract(wf, f)), -contract(wf, contract(vf, f))));
  }
}

TEST_CASE("property: d squared vanishes and dlog is closed") {
  auto r = make_registry({"a", "b", "c", "e", "g"});
  std::mt19937_64 rng(23);
  for (int i = 0; i < 40; ++i) {
    int deg = i % 4;
    auto f = random_form(r, rng, deg);
    REQUIRE(exterior_derivative(exterior_derivative(f)).is_zero());
  }
  for (int i = 0; i < 40; ++i) {
    auto f = random_rational(r, rng);
    if (f.is_zero()) continue;
    auto g = RationalFunction(random_nonzero(r, rng));
    REQUIRE(exterior_derivative(dlog(f)).is_zero());
    REQUIRE(form_equals(dlog(f * g), dlog(f) + dlog(g)));
  }
}
