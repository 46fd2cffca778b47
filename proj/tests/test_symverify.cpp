#include "doctest.h"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/symverify.hpp"

using namespace pseudotoric;

namespace {

DifferentialForm d_of(const RationalFunction& f) { return exterior_derivative(DifferentialForm::function(f)); }

}  // namespace

TEST_CASE("flag n=3 contraction lemma") {
  auto c = build_flag_chart(3);
  auto v = verify_contraction_lemma(c, {true});
  CHECK(v.equal);
  CHECK(v.pass());
  CHECK(v.id == "lemma:flag:n=3");
  auto expected = wedge(DifferentialForm::function(-c.a(1)), d_of(c.a(3))) +
                  wedge(DifferentialForm::function(c.a(3)), d_of(c.a(1)));
  CHECK(form_equals(iterated_contraction(c, c.omega()), expected));
  CHECK(v.lhs_text == iterated_contraction(c, c.omega()).to_string());
}

TEST_CASE("contraction lemma at larger sizes") {
  CHECK(verify_contraction_lemma(build_flag_chart(5)).pass());
  CHECK(verify_contraction_lemma(build_even_quadric_chart(2)).pass());
  CHECK(verify_contraction_lemma(build_even_quadric_chart(3)).pass());
  CHECK_THROWS_AS(verify_contraction_lemma(build_odd_quadric_chart(2)), ConfigurationError);
}

TEST_CASE("odd quadric m=2 worked example") {
  auto c = build_odd_quadric_chart(2);
  auto d = schubert_divisor(Family::quadric_odd, 2);
  auto v = verify_dlog_identity(c, d);
  CHECK(v.equal);
  CHECK(v.sign == -1);
  CHECK_FALSE(v.expected_sign.has_value());
  // In-chart x_4 = 1, so x_0^2/(x_3 x_4) = z_0^2/z_3.
  auto z0 = RationalFunction(Polynomial::variable(c.registry, "z0"));
  auto lhs = iterated_contraction(c, volume_form(c, d));
  CHECK(form_equals(lhs, -dlog(z0 * z0 / c.dependent_binding)));
  CHECK(form_equals(lhs, dlog(c.dependent_binding / (z0 * z0))));
}

TEST_CASE("dlog identities with predicted signs") {
  auto f3 = build_flag_chart(3);
  auto v = verify_dlog_identity(f3, schubert_divisor(Family::flag, 3));
  CHECK(v.pass());
  CHECK(v.sign == 1);
  auto f4 = build_flag_chart(4);
  auto r = verify_dlog_identity(f4, make_divisor(Family::flag, 4, 3));
  CHECK(r.pass());
  CHECK(r.sign == -1);
  CHECK(r.label == "Rie");
}

TEST_CASE("Schubert formula agrees with the general formula at j = n") {
  for (int n = 3; n <= 5; ++n) {
    auto c = build_flag_chart(n);
    auto d = schubert_divisor(Family::flag, n);
    auto a = verify_dlog_identity(c, d, Reading::standard);
    auto b = verify_dlog_identity(c, d, Reading::general);
    CHECK(a.pass());
    CHECK(b.pass());
    auto wa = dlog_wedge(reading_functions(c, d, Reading::standard), c.registry);
    auto wb = dlog_wedge(reading_functions(c, d, Reading::general), c.registry);
    CHECK(form_equals(wa.scaled(RationalFunction::constant(c.registry, *a.expected_sign)),
                      wb.scaled(RationalFunction::constant(c.registry, *b.expected_sign))));
  }
}

TEST_CASE("printed odd-quadric reading") {
  for (int m = 3; m <= 4; ++m) {
    auto c = build_odd_quadric_chart(m);
    auto d = make_divisor(Family::quadric_odd, m, 2);
    auto a = verify_dlog_identity(c, d, Reading::standard);
    auto p = verify_dlog_identity(c, d, Reading::printed);
    CHECK(a.equal);
    CHECK(p.equal);
    CHECK(a.sign == p.sign);
  }
}

TEST_CASE("verdicts do not depend on the registry order") {
  ChartOptions opt;
  opt.registry_permutation = {3, 0, 4, 2, 1};
  auto c = build_flag_chart(4, opt);
  auto base = build_flag_chart(4);
  for (int j = 3; j <= 4; ++j) {
    auto a = verify_dlog_identity(c, make_divisor(Family::flag, 4, j));
    auto b = verify_dlog_identity(base, make_divisor(Family::flag, 4, j));
    CHECK(a.equal == b.equal);
    CHECK(a.sign == b.sign);
  }
  ChartOptions eopt;
  eopt.registry_permutation = {5, 4, 3, 2, 1, 0};
  auto e = build_even_quadric_chart(3, eopt);
  CHECK(verify_contraction_lemma(e).pass());
  CHECK(verify_dlog_identity(e, make_divisor(Family::quadric_even, 3, 1)).pass());
  ChartOptions oopt;
  oopt.registry_permutation = {2, 0, 1, 4, 3};
  auto o = build_odd_quadric_chart(3, oopt);
  CHECK(verify_dlog_identity(o, make_divisor(Family::quadric_odd, 3, 3)).sign ==
        verify_dlog_identity(build_odd_quadric_chart(3), make_divisor(Family::quadric_odd, 3, 3)).sign);
}

TEST_CASE("torus directions annihilate the contracted forms") {
  for (auto family : {Family::flag, Family::quadric_even, Family::quadric_odd}) {
    const int s = minimum_size(family) + 1;
    auto c = build_chart(family, s);
    for (int j = divisor_min(family, s); j <= divisor_max(family, s); ++j) {
      auto lhs = iterated_contraction(c, volume_form(c, make_divisor(family, s, j)));
      CHECK(torus_directions_annihilate(c, lhs));
    }
  }
}

TEST_CASE("identity suite") {
  SuiteRequest req;
  req.families = {Family::flag};
  req.size_min = 3;
  req.size_max = 5;
  req.alternate_readings = true;
  auto verdicts = run_identity_suite(req);
  CHECK(verdicts.size() == 3 + (1 + 2 + 3) + 3);
  for (const auto& v : verdicts) CHECK(v.pass());

  req.families = {Family::quadric_even};
  req.size_min = 2;
  req.size_max = 3;
  req.threads = 2;
  auto even = run_identity_suite(req);
  CHECK(even.size() == 2 + 1 + 2);
  for (const auto& v : even) CHECK(v.pass());

  req.size_min = 4;
  req.size_max = 3;
  CHECK(run_identity_suite(req).empty());

  req.families = {Family::flag};
  req.size_min = 3;
  req.size_max = kMaxFlagSize + 1;
  CHECK_THROWS_AS(run_identity_suite(req), ConfigurationError);
  req.families = {Family::quadric_odd};
  req.size_min = 1;
  req.size_max = 2;
  CHECK_THROWS_AS(run_identity_suite(req), ConfigurationError);
}

TEST_CASE("verdict JSON") {
  auto v = verify_dlog_identity(build_odd_quadric_chart(2), schubert_divisor(Family::quadric_odd, 2));
  auto j = to_json(v);
  CHECK(j["schema_version"] == 1);
  CHECK(j["id"] == "dlog:quadric-odd:m=2:j=2");
  CHECK(j["sign"] == -1);
  CHECK(j["equal"] == true);
  CHECK(j["expected_sign"].is_null());
  for (const char* key : {"family", "size", "j", "lhs_terms", "rhs_terms", "millis"}) CHECK(j.contains(key));
}
