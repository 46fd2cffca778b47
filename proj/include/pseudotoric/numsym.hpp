#pragma once

// Floating-point symplectic geometry on the charts: Fubini-Study forms, moment maps,
// Hamiltonian fields, the fibration rho and the residual checks built on them.
//
// Real tangent coordinates are ordered (Re z_a, Im z_a) per free coordinate, in the
// chart's declared free order, so T_xX is R^{2d} with d = dim_C X.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pseudotoric/models.hpp"

namespace pseudotoric {

struct NumericConfig {
  /// Central-difference step on real and imaginary parts.
  double fd_step = 1e-5;
  /// Smallest admissible magnitude of a guard quantity at a sampled point.
  double guard = 1e-3;
  double modulus_min = 0.3;
  double modulus_max = 3.0;
  std::size_t rejection_budget = 10000;
  /// Singular values below kernel_threshold * largest count as zero.
  double kernel_threshold = 1e-4;
  /// Required ratio across the gap between kept and dropped singular values.
  double gap_ratio = 1e3;
  double tol_first_order = 1e-6;
  double tol_solve = 1e-8;
  double tol_exact = 1e-10;
  double condition_limit = 1e10;
};

struct NumericPoint {
  /// Free coordinates in declared order.
  std::vector<Complex> free;
  /// Registry-ordered values, dependent coordinate included.
  std::vector<Complex> full;
  /// Homogeneous tuples, one per ambient factor.
  std::vector<std::vector<Complex>> ambient;
  double relation_residual = 0.0;
};

struct TangentFrame {
  /// Columns span T_xX (the identity in real chart coordinates).
  Eigen::MatrixXd basis;
  /// Orthonormal kernel of d rho.
  Eigen::MatrixXd fiber;
  /// Orthonormal kernel of dF.
  Eigen::MatrixXd vertical;
  /// Orthonormal omega-complement of the vertical space.
  Eigen::MatrixXd horizontal;
  /// Singular values of d rho, descending.
  Eigen::VectorXd rho_singular_values;
};

struct ResidualReport {
  std::string check;
  std::size_t points = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 1e-6;

  bool pass() const noexcept { return max_residual < tolerance; }
  static ResidualReport single(std::string check, double residual, double tolerance);
};

/// Associative and commutative for reports of the same check.
ResidualReport merge(const ResidualReport& a, const ResidualReport& b);
nlohmann::json to_json(const ResidualReport& report);

/// A real function of the free coordinates.
using FreeFunction = std::function<double(std::span<const Complex>)>;

/// Which part of Omega restricted to a fiber is expected to vanish.
enum class VanishingPart { real, imaginary };

std::string part_name(VanishingPart part);
/// The stated rule: Im when dim - k is even, Re when it is odd.
VanishingPart stated_vanishing_part(const VarietyChart& chart);
/// Phase of Omega on a fiber is i^(dim - 2k): Im vanishes for even dim, Re for odd.
VanishingPart phase_vanishing_part(const VarietyChart& chart);

struct ProportionalityResult {
  ResidualReport report;
  double scalar = 0.0;
};

/// Chart, divisor and compiled evaluators. Immutable after construction; safe to share across threads.
class NumericModel {
 public:
  NumericModel(VarietyChart chart, DivisorChoice divisor, NumericConfig config = {});

  const VarietyChart& chart() const noexcept { return chart_; }
  const DivisorChoice& divisor() const noexcept { return divisor_; }
  const NumericConfig& config() const noexcept { return config_; }
  int dimension() const noexcept { return chart_.dimension(); }
  int torus_rank() const noexcept { return chart_.torus_rank(); }

  /// Deterministic rejection sampling; throws SamplingError when the budget runs out.
  NumericPoint sample_point(std::uint64_t seed) const;
  /// Builds a point without guard checks beyond pole avoidance of the lifts.
  NumericPoint make_point(std::span<const Complex> free) const;
  /// Smallest guard magnitude at the point (divisor factors, fibration numerators and denominators, base map).
  double guard_margin(std::span<const Complex> free) const;
  /// Smallest magnitude among the divisor factors and fibration denominators only.
  double pole_margin(std::span<const Complex> free) const;

  /// omega_X on T_xX as a skew 2d x 2d matrix.
  Eigen::MatrixXd fubini_study(const NumericPoint& p) const;
  /// F^* omega_Y on T_xX.
  Eigen::MatrixXd base_form(const NumericPoint& p) const;
  /// Same forms with every homogeneous tuple multiplied by `scale` (for projective invariance checks).
  Eigen::MatrixXd fubini_study_scaled(const NumericPoint& p, Complex scale) const;

  Eigen::VectorXd moment_map(std::span<const Complex> free) const;
  Eigen::VectorXd moment_map(const NumericPoint& p) const { return moment_map(p.free); }
  /// |f_j| for the standard fibration functions.
  Eigen::VectorXd fibration_moduli(std::span<const Complex> free) const;
  Eigen::VectorXd rho(std::span<const Complex> free) const;
  Eigen::VectorXd rho(const NumericPoint& p) const { return rho(p.free); }
  /// Components of rho as functions of the free coordinates: mu_1..mu_k, |f_1|..|f_{d-k}|.
  std::vector<FreeFunction> rho_components() const;
  /// Column names matching rho: mu1.., absf1..
  std::vector<std::string> rho_names() const;

  Eigen::VectorXd gradient(const FreeFunction& f, const NumericPoint& p) const;
  /// Solves omega(V, .) = df; throws NumericalError on an ill-conditioned form or a poor solve.
  Eigen::VectorXd hamiltonian_field(const NumericPoint& p, const Eigen::VectorXd& gradient) const;
  Eigen::VectorXd hamiltonian_field(const NumericPoint& p, const FreeFunction& f) const;
  double poisson_bracket(const NumericPoint& p, const FreeFunction& f, const FreeFunction& g) const;
  /// Rotation generated by V_i in real coordinates (the flow z_y -> exp(-i c_y t) z_y).
  Eigen::VectorXd torus_generator_field(const NumericPoint& p, int i) const;
  /// t . p with t = exp(i angles), acting on free coordinates through the contraction weights.
  NumericPoint act(const NumericPoint& p, std::span<const double> angles) const;

  Eigen::MatrixXd rho_jacobian(const NumericPoint& p) const;
  /// Throws NearSingularFiber when d rho loses rank.
  TangentFrame fiber_frame(const NumericPoint& p) const;

  /// Omega_X^(j) on complex tangent vectors given as dz-components in declared free order.
  Complex volume_form_value(const NumericPoint& p, const Eigen::MatrixXcd& vectors) const;

  ResidualReport poisson_residual(const NumericPoint& p) const;
  ResidualReport lagrangian_residual(const NumericPoint& p) const;
  ResidualReport lagrangian_residual(const NumericPoint& p, const TangentFrame& frame) const;
  ResidualReport special_residual(const NumericPoint& p, VanishingPart part) const;
  ResidualReport special_residual(const NumericPoint& p, const TangentFrame& frame, VanishingPart part) const;
  ResidualReport special_residual(const NumericPoint& p) const {
    return special_residual(p, stated_vanishing_part(chart_));
  }
  ProportionalityResult horizontal_proportionality(const NumericPoint& p) const;
  ProportionalityResult horizontal_proportionality(const NumericPoint& p, const TangentFrame& frame) const;
  /// Largest relative gap between V_{mu_i} and the analytic generator field.
  ResidualReport hamiltonian_moment_residual(const NumericPoint& p) const;
  /// Distance of the analytic torus directions from the fiber sub-basis.
  ResidualReport frame_torus_residual(const NumericPoint& p, const TangentFrame& frame) const;

 private:
  struct Compiled;

  VarietyChart chart_;
  DivisorChoice divisor_;
  NumericConfig config_;
  std::shared_ptr<const Compiled> compiled_;
};

/// Relative difference of two forms of equal degree evaluated at the point on `vectors`
/// (dz-components per registry slot).
double form_agreement(const DifferentialForm& a, const DifferentialForm& b, const NumericPoint& p,
                      const std::vector<std::vector<Complex>>& vectors);

struct NumericSuiteRequest {
  Family family = Family::flag;
  int size = 3;
  /// Divisor index; 0 picks the Schubert divisor.
  int j = 0;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Symbolic-numeric agreement of the dlog identity at every point.
  bool crosscheck = true;
  NumericConfig config;
};

struct NumericSuiteResult {
  std::string case_id;
  Family family = Family::flag;
  int size = 0;
  int j = 0;
  std::vector<ResidualReport> reports;
  std::size_t points = 0;
  /// Points skipped for being near-singular.
  std::size_t skipped = 0;
  double scalar_min = 0.0;
  double scalar_max = 0.0;
  double millis = 0.0;

  bool pass() const noexcept;
  const ResidualReport& report(const std::string& check) const;
};

/// Seed used for point `index` at retry `attempt`.
std::uint64_t point_seed(std::uint64_t base, std::uint64_t index, std::uint64_t attempt);

/// Runs every numeric check at `samples` points. Results do not depend on the thread count.
NumericSuiteResult run_numeric_suite(const NumericSuiteRequest& request);

nlohmann::json to_json(const NumericSuiteResult& result, bool timings = false);

}  // namespace pseudotoric
