#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/numsym.hpp"

using namespace pseudotoric;

namespace {

NumericModel model_of(Family f, int size) { return NumericModel(build_chart(f, size), schubert_divisor(f, size)); }

std::vector<double> random_angles(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> a(static_cast<std::size_t>(k));
  for (auto& x : a) x = u(rng);
  return a;
}

}  // namespace

TEST_CASE("sampling") {
  auto m = model_of(Family::flag, 3);
  auto p = m.sample_point(1);
  CHECK(p.relation_residual < 1e-12);
  CHECK(p.free.size() == 3);
  for (const auto& z : p.free) {
    CHECK(std::abs(z) >= 0.3 - 1e-12);
    CHECK(std::abs(z) <= 3.0 + 1e-12);
  }
  auto q = m.sample_point(1);
  CHECK(p.free == q.free);
  CHECK(m.sample_point(2).free != p.free);
  CHECK(m.guard_margin(p.free) > m.config().guard);

  NumericConfig absurd;
  absurd.guard = 10.0;
  absurd.rejection_budget = 200;
  NumericModel strict(build_flag_chart(3), schubert_divisor(Family::flag, 3), absurd);
  CHECK_THROWS_AS(strict.sample_point(1), SamplingError);

  for (auto f : {Family::quadric_even, Family::quadric_odd}) {
    auto mq = model_of(f, 3);
    CHECK(mq.sample_point(5).relation_residual < 1e-12);
  }
}

TEST_CASE("Fubini-Study form") {
  for (auto [f, s] : {std::pair{Family::flag, 3}, {Family::flag, 4}, {Family::quadric_even, 2}, {Family::quadric_odd, 3}}) {
    auto m = model_of(f, s);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto p = m.sample_point(seed);
      auto w = m.fubini_study(p);
      CHECK((w + w.transpose()).norm() < 1e-12);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
      CHECK(svd.singularValues()(w.rows() - 1) > 1e-8);
      if (seed <= 5) {
        auto ws = m.fubini_study_scaled(p, Complex(2.5, -1.5));
        CHECK((ws - w).norm() < 1e-10 * w.norm());
      }
    }
  }
}

TEST_CASE("Fubini-Study form is closed") {
  auto m = model_of(Family::flag, 3);
  auto p = m.sample_point(3);
  const double h = 1e-5;
  const int n = 2 * m.dimension();
  std::vector<Eigen::MatrixXd> dw;
  for (int r = 0; r < n; ++r) {
    auto plus = p.free;
    auto minus = p.free;
    const Complex step = (r % 2 == 0) ? Complex(h, 0) : Complex(0, h);
    plus[static_cast<std::size_t>(r / 2)] += step;
    minus[static_cast<std::size_t>(r / 2)] -= step;
    dw.push_back((m.fubini_study(m.make_point(plus)) - m.fubini_study(m.make_point(minus))) / (2 * h));
  }
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        worst = std::max(worst, std::abs(dw[a](b, c) + dw[b](c, a) + dw[c](a, b)));
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("moment map") {
  auto m = model_of(Family::flag, 3);
  // |x_a| = 1 and |xh_a| = 1: z2 = zh2 = 1, z3 = e^{i pi/3} gives zh1 = 1 - z3 of modulus 1.
  std::vector<Complex> z{1.0, std::polar(1.0, std::numbers::pi / 3), 1.0};
  auto p = m.make_point(z);
  CHECK(std::abs(std::abs(p.full[m.chart().dependent_variable]) - 1.0) < 1e-12);
  CHECK(m.moment_map(p).norm() < 1e-12);

  std::mt19937_64 rng(11);
  for (auto [f, s] : {std::pair{Family::flag, 4}, {Family::quadric_even, 3}, {Family::quadric_odd, 3}}) {
    auto mm = model_of(f, s);
    auto q = mm.sample_point(9);
    auto mu = mm.moment_map(q);
    CHECK(mu.size() == mm.torus_rank());
    double drift = 0.0;
    for (int t = 0; t < 50; ++t) {
      auto a = random_angles(rng, mm.torus_rank());
      drift = std::max(drift, (mm.moment_map(mm.act(q, a)) - mu).norm());
    }
    CHECK(drift < 1e-10);
    // d mu_i = iota_{V_i} omega
    auto w = mm.fubini_study(q);
    auto comps = mm.rho_components();
    for (int i = 0; i < mm.torus_rank(); ++i) {
      Eigen::VectorXd dmu = mm.gradient(comps[static_cast<std::size_t>(i)], q);
      Eigen::VectorXd iv = w.transpose() * mm.torus_generator_field(q, i);
      CHECK((dmu - iv).norm() < 1e-6 * iv.norm());
    }
  }
}

TEST_CASE("Hamiltonian fields") {
  auto m = model_of(Family::flag, 3);
  auto p = m.sample_point(4);
  FreeFunction constant = [](std::span<const Complex>) { return 2.0; };
  CHECK(m.hamiltonian_field(p, constant).norm() < 1e-12);
  auto comps = m.rho_components();
  CHECK(m.hamiltonian_moment_residual(p).max_residual < 1e-6);
  FreeFunction sum = [&](std::span<const Complex> z) { return comps[0](z) + comps[2](z); };
  Eigen::VectorXd lhs = m.hamiltonian_field(p, sum);
  Eigen::VectorXd rhs = m.hamiltonian_field(p, comps[0]) + m.hamiltonian_field(p, comps[2]);
  CHECK((lhs - rhs).norm() < 1e-8 * rhs.norm());
  for (auto f : {Family::quadric_even, Family::quadric_odd}) {
    auto mq = model_of(f, 2);
    CHECK(mq.hamiltonian_moment_residual(mq.sample_point(8)).pass());
  }
}

TEST_CASE("Poisson brackets of moment maps and fibration moduli") {
  auto m = model_of(Family::flag, 4);
  auto comps = m.rho_components();
  const int k = m.torus_rank();
  double mumu = 0.0;
  double muf = 0.0;
  double anti = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto p = m.sample_point(seed);
    std::vector<Eigen::VectorXd> g;
    for (const auto& c : comps) g.push_back(m.gradient(c, p));
    for (std::size_t a = 0; a < comps.size(); ++a) {
      for (std::size_t b = a + 1; b < comps.size(); ++b) {
        if (static_cast<int>(a) >= k) continue;
        const double v = std::abs(m.poisson_bracket(p, comps[a], comps[b])) / (g[a].norm() * g[b].norm());
        if (static_cast<int>(b) < k) mumu = std::max(mumu, v);
        else muf = std::max(muf, v);
      }
    }
    if (seed <= 10) {
      anti = std::max(anti, std::abs(m.poisson_bracket(p, comps[0], comps[k]) + m.poisson_bracket(p, comps[k], comps[0])));
    }
  }
  CHECK(mumu < 1e-6);
  CHECK(muf < 1e-6);
  CHECK(anti < 1e-10);
}

TEST_CASE("rho and fiber frames") {
  auto m = model_of(Family::flag, 3);
  auto p = m.sample_point(1);
  CHECK(m.rho(p).size() == 3);
  CHECK(m.rho_names() == std::vector<std::string>{"mu1", "mu2", "absf1"});
  std::mt19937_64 rng(3);
  auto q = m.act(p, random_angles(rng, 2));
  CHECK((m.rho(q) - m.rho(p)).norm() < 1e-10);
  CHECK((q.free[0] - p.free[0]) != Complex{});

  auto frame = m.fiber_frame(p);
  CHECK(frame.fiber.cols() == 3);
  CHECK(frame.fiber.rows() == 6);
  Eigen::MatrixXd jac = m.rho_jacobian(p);
  for (Eigen::Index c = 0; c < frame.fiber.cols(); ++c) CHECK((jac * frame.fiber.col(c)).norm() < 1e-6);
  CHECK(m.frame_torus_residual(p, frame).pass());
  CHECK(frame.vertical.cols() == 4);
  CHECK(frame.horizontal.cols() == 2);
  auto w = m.fubini_study(p);
  CHECK((frame.vertical.transpose() * w * frame.horizontal).norm() < 1e-10);
  Eigen::MatrixXd both(6, 6);
  both << frame.vertical, frame.horizontal;
  CHECK(std::abs(both.determinant()) > 1e-6);
}

TEST_CASE("approaching the non-free locus") {
  auto m = model_of(Family::flag, 3);
  // Free order z2, z3, zh2; x_2 = z2 and x_hat2 = zh2 shrink together.
  auto at = [&](double t) {
    std::vector<Complex> z{std::polar(t, 0.4), std::polar(1.3, 2.0), std::polar(t, -1.1)};
    return m.make_point(z);
  };
  CHECK_NOTHROW(m.fiber_frame(at(1e-1)));
  double ratio = 1.0;
  try {
    m.fiber_frame(at(1e-6));
  } catch (const NearSingularFiber& e) {
    ratio = e.gap_ratio();
  }
  CHECK(ratio < 1e-4);
  CHECK_THROWS_AS(m.fiber_frame(at(1e-6)), NearSingularFiber);
}

TEST_CASE("Lagrangian, special and proportionality residuals on one-dimensional bases") {
  for (auto [f, s] : {std::pair{Family::flag, 3}, {Family::quadric_even, 2}, {Family::quadric_odd, 2}}) {
    auto m = model_of(f, s);
    ResidualReport lag;
    ResidualReport phase;
    ResidualReport prop;
    double cmin = 1e300;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto p = m.sample_point(seed);
      auto frame = m.fiber_frame(p);
      lag = merge(lag, m.lagrangian_residual(p, frame));
      phase = merge(phase, m.special_residual(p, frame, phase_vanishing_part(m.chart())));
      auto pr = m.horizontal_proportionality(p, frame);
      prop = merge(prop, pr.report);
      cmin = std::min(cmin, pr.scalar);
    }
    INFO(m.chart().name());
    CHECK(lag.points == 100);
    CHECK(lag.pass());
    CHECK(phase.pass());
    CHECK(prop.pass());
    CHECK(cmin > 0.0);
  }
}

TEST_CASE("stated parity rule") {
  auto flag3 = model_of(Family::flag, 3);
  CHECK(stated_vanishing_part(flag3.chart()) == VanishingPart::real);
  CHECK(stated_vanishing_part(build_flag_chart(4)) == VanishingPart::imaginary);
  CHECK(stated_vanishing_part(build_odd_quadric_chart(2)) == VanishingPart::real);
  ResidualReport r;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) r = merge(r, flag3.special_residual(flag3.sample_point(seed)));
  CHECK(r.check == "special");
  CHECK(r.pass());
  auto odd2 = model_of(Family::quadric_odd, 2);
  CHECK(odd2.special_residual(odd2.sample_point(1)).pass());
}

TEST_CASE("Omega phase on fibers follows the complex dimension") {
  for (auto [f, s] : {std::pair{Family::flag, 4}, {Family::quadric_even, 2}, {Family::quadric_odd, 3}}) {
    auto m = model_of(f, s);
    CHECK(phase_vanishing_part(m.chart()) != stated_vanishing_part(m.chart()));
    auto p = m.sample_point(2);
    CHECK(m.special_residual(p, phase_vanishing_part(m.chart())).pass());
    CHECK(m.special_residual(p, stated_vanishing_part(m.chart())).max_residual > 0.5);
  }
}

TEST_CASE("residuals are torus invariant") {
  auto m = model_of(Family::quadric_odd, 2);
  std::mt19937_64 rng(5);
  auto p = m.sample_point(12);
  auto q = m.act(p, random_angles(rng, m.torus_rank()));
  CHECK(std::abs(m.lagrangian_residual(p).max_residual - m.lagrangian_residual(q).max_residual) < 1e-8);
  CHECK(std::abs(m.special_residual(p).max_residual - m.special_residual(q).max_residual) < 1e-8);
  CHECK(std::abs(m.horizontal_proportionality(p).report.max_residual -
                 m.horizontal_proportionality(q).report.max_residual) < 1e-8);
  CHECK(std::abs(m.poisson_residual(p).max_residual - m.poisson_residual(q).max_residual) < 1e-8);
}

TEST_CASE("residual reports") {
  auto a = ResidualReport::single("x", 1e-7, 1e-6);
  auto b = ResidualReport::single("x", 3e-7, 1e-6);
  auto c = ResidualReport::single("x", 2e-6, 1e-6);
  auto l = merge(merge(a, b), c);
  auto r = merge(a, merge(b, c));
  CHECK(l.points == 3);
  CHECK(l.max_residual == r.max_residual);
  CHECK(std::abs(l.mean_residual - r.mean_residual) < 1e-20);
  CHECK_FALSE(l.pass());
  CHECK(merge(a, b).pass());
  CHECK_FALSE(ResidualReport::single("x", std::nan(""), 1.0).pass());
  CHECK_THROWS_AS(merge(a, ResidualReport::single("y", 0, 1)), ConfigurationError);
  auto j = to_json(l);
  CHECK(j["schema_version"] == 1);
  CHECK(j["pass"] == false);
  CHECK(j["points"] == 3);
}

TEST_CASE("numeric suite") {
  NumericSuiteRequest req;
  req.family = Family::flag;
  req.size = 3;
  req.samples = 12;
  req.seed = 7;
  auto one = run_numeric_suite(req);
  req.threads = 3;
  auto three = run_numeric_suite(req);
  CHECK(one.pass());
  CHECK(one.points == 12);
  CHECK(to_json(one).dump() == to_json(three).dump());
  CHECK(one.report("crosscheck").pass());
  CHECK(one.scalar_min > 0.0);
  req.samples = 0;
  CHECK_THROWS_AS(run_numeric_suite(req), ConfigurationError);
}
