#include <random>
#include <sstream>

#include "doctest.h"
#include "pseudotoric/combinat.hpp"
#include "pseudotoric/errors.hpp"

using namespace pseudotoric;

TEST_CASE("term count tables") {
  auto flag = term_count_table(Family::flag, 3, 10);
  REQUIRE(flag.size() == 8);
  for (const auto& r : flag) {
    const int n = r.size;
    CHECK(r.givental.total == 2 * n);
    CHECK(r.schubert.total == 2 * n - 2);
    CHECK(r.rietsch.total == n + 1);
    CHECK(r.givental.parts == std::array<int, 3>{4, 2 * (n - 3), 2});
    CHECK(r.schubert.parts == std::array<int, 3>{2, 2 * (n - 3), 2});
    CHECK(r.rietsch.parts == std::array<int, 3>{2, n - 3, 2});
    CHECK(r.givental.total - r.schubert.total == 2);
    CHECK(r.schubert.total - r.rietsch.total == n - 3);
  }
  CHECK(flag[2].givental.total == 10);
  CHECK(flag[2].schubert.total == 8);
  CHECK(flag[2].rietsch.total == 6);
  CHECK(flag[0].schubert.formula == "2n - 2 = 2 + 2(n-3) + 2");

  auto even = term_count_table(Family::quadric_even, 2, 8);
  REQUIRE(even.size() == 7);
  for (const auto& r : even) {
    const int m = r.size;
    CHECK(r.dimension == 2 * m);
    CHECK(r.givental.total == 2 * m + 2);
    CHECK(r.schubert.total == 2 * m);
    CHECK(r.rietsch.total == m + 2);
    CHECK(r.rietsch.parts == std::array<int, 3>{2, m - 2, 2});
    CHECK(r.schubert.total - r.rietsch.total == m - 2);
  }
  CHECK(even[1].givental.total == 8);
  CHECK(even[1].schubert.total == 6);
  CHECK(even[1].rietsch.total == 5);
  CHECK(even[0].rietsch.formula == "m + 2 = 2 + (m-2) + 2");

  auto odd = term_count_table(Family::quadric_odd, 2, 8);
  for (const auto& r : odd) {
    const int m = r.size;
    CHECK(r.dimension == 2 * m - 1);
    CHECK(r.givental.total == 2 * m + 1);
    CHECK(r.schubert.total == 2 * m - 1);
    CHECK(r.rietsch.total == m + 1);
    CHECK(r.givental.parts == std::array<int, 3>{4, 2 * (m - 2), 1});
  }
  CHECK(odd[0].givental.total == 5);
  CHECK(odd[0].schubert.total == 3);
  CHECK(odd[0].rietsch.total == 3);
  CHECK(odd[0].rietsch.formula == "m + 1 = 2 + (m-2) + 1");

  CHECK_THROWS_AS(term_count_table(Family::flag, 2, 5), ConfigurationError);
  CHECK_THROWS_AS(term_count_table(Family::quadric_odd, 1, 3), ConfigurationError);
  CHECK(term_count_table(Family::flag, 6, 5).empty());

  std::ostringstream csv;
  write_csv(csv, term_count_table(Family::flag, 5, 5));
  CHECK(csv.str() ==
        "family,size,dimension,givental,schubert,rietsch,givental_parts,schubert_parts,rietsch_parts,"
        "givental_formula,schubert_formula,rietsch_formula\n"
        "flag,5,7,10,8,6,4 + 4 + 2,2 + 4 + 2,2 + 2 + 2,2n = 4 + 2(n-3) + 2,2n - 2 = 2 + 2(n-3) + 2,"
        "n + 1 = 2 + (n-3) + 2\n");
  auto j = to_json(flag[0]);
  CHECK(j["schema_version"] == 1);
  CHECK(j["rietsch"]["total"] == 4);
}

TEST_CASE("non-free components") {
  auto flag3 = nonfree_components(build_flag_chart(3));
  REQUIRE(flag3.size() == 3);
  CHECK(flag3[1].zero_coordinates == std::vector<std::string>{"x2", "xh2"});
  CHECK(flag3[1].label() == "{x2 = xh2 = 0}");
  CHECK(find_component(flag3, 2).index == 2);
  CHECK_THROWS_AS(find_component(flag3, 7), ConfigurationError);

  auto odd2 = nonfree_components(build_odd_quadric_chart(2));
  REQUIRE(odd2.size() == 3);
  CHECK(odd2[0].zero_coordinates == std::vector<std::string>{"x0"});
  CHECK(odd2[1].zero_coordinates == std::vector<std::string>{"x1", "x2"});
  CHECK(odd2[2].zero_coordinates == std::vector<std::string>{"x3", "x4"});

  CHECK(nonfree_components(build_even_quadric_chart(3)).size() == 4);
}

TEST_CASE("codimension of the non-free components") {
  for (auto [f, s] : {std::pair{Family::flag, 3}, {Family::flag, 5}, {Family::quadric_even, 2},
                      {Family::quadric_even, 4}, {Family::quadric_odd, 2}, {Family::quadric_odd, 4}}) {
    auto c = build_chart(f, s);
    for (const auto& comp : nonfree_components(c)) {
      INFO(c.name() << " " << comp.label());
      if (comp.zero_coordinates.size() == 2) CHECK(component_codimension(c, comp, 17) == 2);
      else CHECK(component_codimension(c, comp, 17) == 1);
    }
  }
}

TEST_CASE("wall clouds") {
  auto c = build_flag_chart(3);
  auto d = schubert_divisor(Family::flag, 3);
  auto comps = nonfree_components(c);
  WallRequest req;
  req.samples = 200;
  req.seed = 4;
  auto cloud = wall_point_cloud(c, d, find_component(comps, 2), req);
  CHECK_FALSE(cloud.empty_warning);
  REQUIRE(cloud.rows.size() == 200);
  CHECK(cloud.columns == std::vector<std::string>{"mu1", "mu2", "absf1"});
  for (const auto& r : cloud.rows) CHECK(r.size() == 3);

  req.threads = 3;
  auto again = wall_point_cloud(c, d, find_component(comps, 2), req);
  CHECK(again.rows == cloud.rows);

  // x1 = 1 and xh3 = 1 in this chart.
  CHECK(wall_point_cloud(c, d, find_component(comps, 1), req).empty_warning);
  CHECK(wall_point_cloud(c, d, find_component(comps, 3), req).empty_warning);

  // A_3 divides the Schubert denominator of the n = 4 flag.
  auto c4 = build_flag_chart(4);
  auto in_d = wall_point_cloud(c4, schubert_divisor(Family::flag, 4), find_component(nonfree_components(c4), 3), req);
  CHECK(in_d.empty_warning);
  CHECK(in_d.rows.empty());
  CHECK(in_d.warning == "component lies in D");

  std::ostringstream csv;
  write_csv(csv, cloud);
  CHECK(csv.str().rfind("mu1,mu2,absf1\n", 0) == 0);
}

TEST_CASE("forced zeros on walls") {
  auto c = build_flag_chart(4);
  auto d = make_divisor(Family::flag, 4, 3);
  auto comps = nonfree_components(c);
  const auto& comp = find_component(comps, 3);
  auto forced = forced_zero_functions(c, d, comp);
  WallRequest req;
  req.samples = 50;
  auto cloud = wall_point_cloud(c, d, comp, req);
  REQUIRE_FALSE(cloud.empty_warning);
  const std::size_t k = static_cast<std::size_t>(c.torus_rank());
  bool any_forced = false;
  for (std::size_t j = 0; j < forced.size(); ++j) {
    for (const auto& r : cloud.rows) {
      if (forced[j]) CHECK(r[k + j] == 0.0);
      else CHECK(r[k + j] > 0.0);
    }
    any_forced = any_forced || forced[j];
  }
  CHECK_FALSE(any_forced);

  // On {x2 = xh2 = 0} of the n = 3 flag nothing is forced either; A_1/A_3 = -1 there.
  auto c3 = build_flag_chart(3);
  auto d3 = schubert_divisor(Family::flag, 3);
  auto f3 = forced_zero_functions(c3, d3, find_component(nonfree_components(c3), 2));
  CHECK(f3 == std::vector<bool>{false});
  WallRequest r3;
  r3.samples = 20;
  for (const auto& r : wall_point_cloud(c3, d3, find_component(nonfree_components(c3), 2), r3).rows) {
    CHECK(std::abs(r[2] - 1.0) < 1e-12);
  }

  // The odd quadric's x0 locus forces |x0^2/B_m| = 0.
  auto o = build_odd_quadric_chart(3);
  auto od = schubert_divisor(Family::quadric_odd, 3);
  auto oc = find_component(nonfree_components(o), 0);
  CHECK(wall_point_cloud(o, od, oc, r3).warning == "component lies in D");
  auto orie = make_divisor(Family::quadric_odd, 3, 2);
  CHECK(forced_zero_functions(o, orie, oc)[0]);
}

TEST_CASE("wall clouds sit inside the closure of the generic image") {
  auto c = build_flag_chart(3);
  auto d = schubert_divisor(Family::flag, 3);
  WallRequest req;
  req.samples = 300;
  auto cloud = wall_point_cloud(c, d, find_component(nonfree_components(c), 2), req);
  NumericConfig wide;
  wide.modulus_min = 1e-3;
  wide.modulus_max = 30.0;
  NumericModel m(c, d, wide);
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  for (std::uint64_t s = 1; s <= 3000; ++s) {
    auto r = m.rho(m.sample_point(s));
    lo = lo.cwiseMin(r);
    hi = hi.cwiseMax(r);
  }
  const Eigen::Vector3d slack = 0.02 * (hi - lo);
  for (const auto& row : cloud.rows) {
    for (int i = 0; i < 3; ++i) {
      CHECK(row[static_cast<std::size_t>(i)] >= lo(i) - slack(i));
      CHECK(row[static_cast<std::size_t>(i)] <= hi(i) + slack(i));
    }
  }
}

TEST_CASE("Rietsch superpotentials") {
  auto w3 = rietsch_superpotential(3);
  REQUIRE(w3.terms.size() == 4);
  CHECK(w3.terms[0].to_string() == "x2/x1");
  CHECK(w3.terms[1].to_string() == "x13/x12");
  CHECK(w3.terms[2].to_string() == "q1*x13/x23");
  CHECK(w3.terms[3].to_string() == "q2*x2/x3");
  CHECK(w3.divisor == std::vector<std::string>{"x1", "x23", "x3", "x12"});

  auto w4 = rietsch_superpotential(4);
  REQUIRE(w4.terms.size() == 5);
  CHECK(w4.to_string() == "x3/x1 + x134/x123 + q1*x134/x234 + q2*x3/x4 + x2*x124/(x3*x124 - x4*x123)");
  CHECK(w4.terms.size() == static_cast<std::size_t>(term_count_table(Family::flag, 4, 4)[0].rietsch.total));
  CHECK(w3.terms.size() == static_cast<std::size_t>(term_count_table(Family::flag, 3, 3)[0].rietsch.total));
  CHECK_THROWS_AS(rietsch_superpotential(5), ConfigurationError);

  // Line (1,2,3) inside the plane spanned by (1,2,3) and (0,1,1).
  Eigen::MatrixXcd frame(3, 2);
  frame << 1, 0, 2, 1, 3, 1;
  auto x = flag_plucker(frame);
  CHECK(x.at("x12") == Complex(1.0));
  CHECK(x.at("x13") == Complex(1.0));
  CHECK(x.at("x23") == Complex(-1.0));
  // Incidence x1 x23 - x2 x13 + x3 x12 = 0.
  CHECK(std::abs(x.at("x1") * x.at("x23") - x.at("x2") * x.at("x13") + x.at("x3") * x.at("x12")) < 1e-12);
  const Complex v = w3.evaluate(x, 2.0, 0.5);
  CHECK(std::abs(v - Complex(2.0 / 1.0 + 1.0 / 1.0 + 2.0 * 1.0 / -1.0 + 0.5 * 2.0 / 3.0)) < 1e-12);
  CHECK_THROWS_AS(w3.evaluate(x, -1.0, 1.0), ConfigurationError);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd f4(4, 3);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) f4(i, k) = Complex(g(rng), g(rng));
  }
  auto x4 = flag_plucker(f4);
  Complex expected = x4["x3"] / x4["x1"] + x4["x134"] / x4["x123"] + 1.5 * x4["x134"] / x4["x234"] +
                     0.25 * x4["x3"] / x4["x4"] + x4["x2"] * x4["x124"] / (x4["x3"] * x4["x124"] - x4["x4"] * x4["x123"]);
  CHECK(std::abs(w4.evaluate(x4, 1.5, 0.25) - expected) < 1e-10 * std::abs(expected));
  x4["x123"] = x4["x3"] * x4["x124"] / x4["x4"];
  CHECK_THROWS_AS(w4.evaluate(x4, 1.0, 1.0), EvaluationError);

  auto j = to_json(w4);
  CHECK(j["term_count"] == 5);
  CHECK(j["terms"][4] == "x2*x124/(x3*x124 - x4*x123)");
}
