#include "pseudotoric/numsym.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "pseudotoric/errors.hpp"
#include "pseudotoric/symverify.hpp"

namespace pseudotoric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p) {
    const std::size_t nvars = p.registry() ? p.registry()->size() : 0;
    for (const auto& t : p.terms()) {
      Term term;
      term.coefficient = t.coefficient.get_d();
      for (std::size_t v = 0; v < nvars; ++v) {
        if (t.monomial[v] != 0) term.powers.emplace_back(v, t.monomial[v]);
      }
      terms_.push_back(std::move(term));
    }
  }

  Complex operator()(std::span<const Complex> x) const {
    Complex total{};
    for (const auto& t : terms_) {
      Complex m = t.coefficient;
      for (const auto& [v, e] : t.powers) {
        for (unsigned k = 0; k < e; ++k) m *= x[v];
      }
      total += m;
    }
    return total;
  }

 private:
  struct Term {
    double coefficient = 0.0;
    std::vector<std::pair<std::size_t, unsigned>> powers;
  };
  std::vector<Term> terms_;
};

struct CompiledRational {
  CompiledPolynomial num;
  CompiledPolynomial den;

  CompiledRational() = default;
  explicit CompiledRational(const RationalFunction& f) : num(f.numerator()), den(f.denominator()) {}

  Complex operator()(std::span<const Complex> x) const {
    Complex d = den(x);
    if (d == Complex{}) throw EvaluationError("pole in numeric evaluation", 0.0);
    return num(x) / d;
  }
};

double frobenius_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a.array() * b.array()).sum(); }

struct CompiledFactor {
  std::vector<CompiledRational> lift;
  /// partial[c][a] = d lift_c / d z_a.
  std::vector<std::vector<CompiledRational>> partial;
  /// pairing[i][c] = <weight_c, generator_i>.
  std::vector<std::vector<double>> pairing;
};

}  // namespace

struct NumericModel::Compiled {
  std::size_t registry_size = 0;
  std::vector<std::size_t> free_slots;
  std::size_t dependent_slot = 0;
  CompiledRational dependent;
  std::vector<CompiledFactor> ambient;
  CompiledFactor base;
  std::vector<CompiledRational> functions;
  std::vector<CompiledPolynomial> guards;
  std::vector<CompiledPolynomial> poles;
  CompiledRational denominator;
  /// Declared free positions in orientation order.
  std::vector<std::size_t> orientation;
  /// weights[i][a]: coefficient of V_i on free coordinate a.
  std::vector<std::vector<double>> weights;

  std::vector<Complex> full(std::span<const Complex> free) const {
    std::vector<Complex> x(registry_size);
    for (std::size_t a = 0; a < free_slots.size(); ++a) x[free_slots[a]] = free[a];
    x[dependent_slot] = dependent(x);
    return x;
  }
};

namespace {

CompiledFactor compile_factor(const std::vector<RationalFunction>& lift, const std::vector<std::size_t>& free_slots) {
  CompiledFactor f;
  for (const auto& c : lift) {
    f.lift.emplace_back(c);
    std::vector<CompiledRational> row;
    for (auto slot : free_slots) row.emplace_back(c.partial(slot));
    f.partial.push_back(std::move(row));
  }
  return f;
}

// Hermitian h_{a bbar} of the Fubini-Study form pulled back along one factor.
void add_fs_hermitian(Eigen::MatrixXcd& h, const CompiledFactor& f, std::span<const Complex> x, Complex scale) {
  const std::size_t nc = f.lift.size();
  const Eigen::Index d = h.rows();
  Eigen::VectorXcd vals(static_cast<Eigen::Index>(nc));
  Eigen::MatrixXcd jac(static_cast<Eigen::Index>(nc), d);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    vals(ci) = scale * f.lift[c](x);
    for (Eigen::Index a = 0; a < d; ++a) jac(ci, a) = scale * f.partial[c][static_cast<std::size_t>(a)](x);
  }
  const double g = vals.squaredNorm();
  Eigen::VectorXcd v = jac.transpose() * vals.conjugate();
  h += (jac.transpose() * jac.conjugate()) / g - (v * v.adjoint()) / (g * g);
}

Eigen::MatrixXd real_form(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  Eigen::MatrixXd w(2 * d, 2 * d);
  const Complex eps[2] = {{1.0, 0.0}, {0.0, 1.0}};
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) w(2 * a + s, 2 * b + t) = -(eps[s] * h(a, b) * std::conj(eps[t])).imag();
      }
    }
  }
  return w;
}

}  // namespace

ResidualReport ResidualReport::single(std::string check, double residual, double tolerance) {
  ResidualReport r;
  r.check = std::move(check);
  r.points = 1;
  if (std::isnan(residual)) residual = kInf;
  r.max_residual = residual;
  r.mean_residual = residual;
  r.tolerance = tolerance;
  return r;
}

ResidualReport merge(const ResidualReport& a, const ResidualReport& b) {
  if (a.points == 0) return b;
  if (b.points == 0) return a;
  if (a.check != b.check) throw ConfigurationError("merging reports of different checks: " + a.check + ", " + b.check);
  ResidualReport r;
  r.check = a.check;
  r.points = a.points + b.points;
  r.max_residual = std::max(a.max_residual, b.max_residual);
  r.mean_residual = (a.mean_residual * static_cast<double>(a.points) + b.mean_residual * static_cast<double>(b.points)) /
                    static_cast<double>(r.points);
  r.tolerance = std::min(a.tolerance, b.tolerance);
  return r;
}

nlohmann::json to_json(const ResidualReport& report) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
  return {{"schema_version", 1},
          {"check", report.check},
          {"points", report.points},
          {"max_residual", finite(report.max_residual)},
          {"mean_residual", finite(report.mean_residual)},
          {"tolerance", report.tolerance},
          {"pass", report.pass()}};
}

std::string part_name(VanishingPart part) { return part == VanishingPart::real ? "Re" : "Im"; }

VanishingPart stated_vanishing_part(const VarietyChart& chart) {
  return (chart.function_count() % 2 == 0) ? VanishingPart::imaginary : VanishingPart::real;
}

VanishingPart phase_vanishing_part(const VarietyChart& chart) {
  return (chart.dimension() % 2 == 0) ? VanishingPart::imaginary : VanishingPart::real;
}

NumericModel::NumericModel(VarietyChart chart, DivisorChoice divisor, NumericConfig config)
    : chart_(std::move(chart)), config_(config) {
  divisor_ = make_divisor(chart_.family, chart_.size, divisor.j);
  if (config_.fd_step <= 0 || config_.guard < 0 || config_.modulus_min <= 0 ||
      config_.modulus_max < config_.modulus_min) {
    throw ConfigurationError("invalid numeric configuration");
  }
  auto c = std::make_shared<Compiled>();
  c->registry_size = chart_.registry->size();
  c->free_slots = chart_.free_variables;
  c->dependent_slot = chart_.dependent_variable;
  c->dependent = CompiledRational(chart_.dependent_binding);

  for (const auto& factor : chart_.ambient) {
    auto f = compile_factor(factor.lift, c->free_slots);
    for (const auto& g : chart_.generators) {
      std::vector<double> row;
      for (const auto& w : factor.weights) {
        double s = 0.0;
        for (std::size_t t = 0; t < w.size(); ++t) s += w[t] * g.at(t);
        row.push_back(s);
      }
      f.pairing.push_back(std::move(row));
    }
    c->ambient.push_back(std::move(f));
  }
  c->base = compile_factor(chart_.base_map, c->free_slots);

  for (const auto& f : fibration_functions(chart_, divisor_)) {
    c->functions.emplace_back(f);
    c->guards.emplace_back(f.numerator());
    c->guards.emplace_back(f.denominator());
    c->poles.emplace_back(f.denominator());
  }
  for (const auto& f : divisor_factors(chart_, divisor_)) {
    c->guards.emplace_back(f.numerator());
    c->poles.emplace_back(f.numerator());
  }
  for (const auto& f : chart_.base_map) c->guards.emplace_back(f.numerator());
  c->denominator = CompiledRational(divisor_denominator(chart_, divisor_));

  for (auto slot : chart_.orientation) {
    auto it = std::find(c->free_slots.begin(), c->free_slots.end(), slot);
    c->orientation.push_back(static_cast<std::size_t>(it - c->free_slots.begin()));
  }
  for (const auto& v : chart_.contractions) {
    std::vector<double> row;
    for (auto slot : c->free_slots) row.push_back(static_cast<double>(v.weight(slot)));
    c->weights.push_back(std::move(row));
  }
  compiled_ = std::move(c);
}

double NumericModel::guard_margin(std::span<const Complex> free) const {
  auto x = compiled_->full(free);
  double m = kInf;
  for (const auto& g : compiled_->guards) m = std::min(m, std::abs(g(x)));
  return m;
}

double NumericModel::pole_margin(std::span<const Complex> free) const {
  auto x = compiled_->full(free);
  double m = kInf;
  for (const auto& g : compiled_->poles) m = std::min(m, std::abs(g(x)));
  return m;
}

NumericPoint NumericModel::make_point(std::span<const Complex> free) const {
  if (free.size() != compiled_->free_slots.size()) {
    throw ConfigurationError("point has " + std::to_string(free.size()) + " coordinates, chart " + chart_.name() +
                             " has " + std::to_string(compiled_->free_slots.size()));
  }
  NumericPoint p;
  p.free.assign(free.begin(), free.end());
  p.full = compiled_->full(free);
  for (const auto& f : compiled_->ambient) {
    std::vector<Complex> t;
    for (const auto& c : f.lift) t.push_back(c(p.full));
    p.ambient.push_back(std::move(t));
  }
  p.relation_residual = ambient_relation_residual(chart_, p.ambient);
  return p;
}

NumericPoint NumericModel::sample_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_modulus(std::log(config_.modulus_min), std::log(config_.modulus_max));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> z(compiled_->free_slots.size());
  for (std::size_t draw = 0; draw < config_.rejection_budget; ++draw) {
    for (auto& c : z) c = std::polar(std::exp(log_modulus(rng)), phase(rng));
    if (!(guard_margin(z) > config_.guard)) continue;
    NumericPoint p = make_point(z);
    if (p.relation_residual < config_.tol_exact) return p;
  }
  throw SamplingError("no admissible point on " + chart_.name() + " after " +
                      std::to_string(config_.rejection_budget) + " draws (seed " + std::to_string(seed) + ")");
}

Eigen::MatrixXd NumericModel::fubini_study_scaled(const NumericPoint& p, Complex scale) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& f : compiled_->ambient) add_fs_hermitian(h, f, p.full, scale);
  return real_form(h);
}

Eigen::MatrixXd NumericModel::fubini_study(const NumericPoint& p) const { return fubini_study_scaled(p, 1.0); }

Eigen::MatrixXd NumericModel::base_form(const NumericPoint& p) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  add_fs_hermitian(h, compiled_->base, p.full, 1.0);
  return real_form(h);
}

Eigen::VectorXd NumericModel::moment_map(std::span<const Complex> free) const {
  auto x = compiled_->full(free);
  const auto k = static_cast<Eigen::Index>(torus_rank());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(k);
  for (const auto& f : compiled_->ambient) {
    std::vector<double> sq;
    double g = 0.0;
    for (const auto& c : f.lift) {
      sq.push_back(std::norm(c(x)));
      g += sq.back();
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto& row = f.pairing[static_cast<std::size_t>(i)];
      double s = 0.0;
      for (std::size_t c = 0; c < sq.size(); ++c) s += row[c] * sq[c];
      mu(i) += s / (2.0 * g);
    }
  }
  return mu;
}

Eigen::VectorXd NumericModel::fibration_moduli(std::span<const Complex> free) const {
  auto x = compiled_->full(free);
  Eigen::VectorXd out(static_cast<Eigen::Index>(compiled_->functions.size()));
  for (std::size_t j = 0; j < compiled_->functions.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = std::abs(compiled_->functions[j](x));
  }
  return out;
}

Eigen::VectorXd NumericModel::rho(std::span<const Complex> free) const {
  Eigen::VectorXd mu = moment_map(free);
  Eigen::VectorXd f = fibration_moduli(free);
  Eigen::VectorXd out(mu.size() + f.size());
  out << mu, f;
  return out;
}

std::vector<FreeFunction> NumericModel::rho_components() const {
  std::vector<FreeFunction> out;
  for (int i = 0; i < torus_rank(); ++i) {
    out.emplace_back([this, i](std::span<const Complex> z) { return moment_map(z)(i); });
  }
  for (std::size_t j = 0; j < compiled_->functions.size(); ++j) {
    out.emplace_back([this, j](std::span<const Complex> z) {
      return std::abs(compiled_->functions[j](compiled_->full(z)));
    });
  }
  return out;
}

std::vector<std::string> NumericModel::rho_names() const {
  std::vector<std::string> out;
  for (int i = 1; i <= torus_rank(); ++i) out.push_back("mu" + std::to_string(i));
  for (std::size_t j = 1; j <= compiled_->functions.size(); ++j) out.push_back("absf" + std::to_string(j));
  return out;
}

Eigen::VectorXd NumericModel::gradient(const FreeFunction& f, const NumericPoint& p) const {
  const std::size_t d = p.free.size();
  const double h = config_.fd_step;
  Eigen::VectorXd g(static_cast<Eigen::Index>(2 * d));
  std::vector<Complex> z = p.free;
  const Complex dirs[2] = {{1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t a = 0; a < d; ++a) {
    for (int s = 0; s < 2; ++s) {
      z[a] = p.free[a] + h * dirs[s];
      const double up = f(z);
      z[a] = p.free[a] - h * dirs[s];
      const double down = f(z);
      z[a] = p.free[a];
      g(static_cast<Eigen::Index>(2 * a) + s) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

Eigen::VectorXd NumericModel::hamiltonian_field(const NumericPoint& p, const Eigen::VectorXd& grad) const {
  Eigen::MatrixXd w = fubini_study(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  const auto& s = svd.singularValues();
  const double cond = s(0) / s(s.size() - 1);
  if (!(cond < config_.condition_limit)) {
    throw NumericalError("symplectic form ill-conditioned on " + chart_.name() + " (condition " + std::to_string(cond) +
                         ")");
  }
  Eigen::VectorXd v = -w.colPivHouseholderQr().solve(grad);
  const double gn = grad.norm();
  if (gn > 0.0) {
    const double res = (w * v + grad).norm() / gn;
    if (!(res < config_.tol_solve)) {
      throw NumericalError("Hamiltonian solve residual " + std::to_string(res) + " on " + chart_.name());
    }
  }
  return v;
}

Eigen::VectorXd NumericModel::hamiltonian_field(const NumericPoint& p, const FreeFunction& f) const {
  return hamiltonian_field(p, gradient(f, p));
}

double NumericModel::poisson_bracket(const NumericPoint& p, const FreeFunction& f, const FreeFunction& g) const {
  Eigen::MatrixXd w = fubini_study(p);
  return hamiltonian_field(p, f).dot(w * hamiltonian_field(p, g));
}

Eigen::VectorXd NumericModel::torus_generator_field(const NumericPoint& p, int i) const {
  const auto& row = compiled_->weights.at(static_cast<std::size_t>(i));
  Eigen::VectorXd u(static_cast<Eigen::Index>(2 * p.free.size()));
  for (std::size_t a = 0; a < p.free.size(); ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    u(2 * ai) = row[a] * p.free[a].imag();
    u(2 * ai + 1) = -row[a] * p.free[a].real();
  }
  return u;
}

NumericPoint NumericModel::act(const NumericPoint& p, std::span<const double> angles) const {
  if (angles.size() != compiled_->weights.size()) throw ConfigurationError("torus element has the wrong rank");
  std::vector<Complex> z = p.free;
  for (std::size_t a = 0; a < z.size(); ++a) {
    double phi = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) phi += angles[i] * compiled_->weights[i][a];
    z[a] *= std::polar(1.0, phi);
  }
  return make_point(z);
}

Eigen::MatrixXd NumericModel::rho_jacobian(const NumericPoint& p) const {
  auto comps = rho_components();
  Eigen::MatrixXd j(static_cast<Eigen::Index>(comps.size()), static_cast<Eigen::Index>(2 * p.free.size()));
  for (std::size_t r = 0; r < comps.size(); ++r) j.row(static_cast<Eigen::Index>(r)) = gradient(comps[r], p).transpose();
  return j;
}

TangentFrame NumericModel::fiber_frame(const NumericPoint& p) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  const auto k = static_cast<Eigen::Index>(torus_rank());
  TangentFrame frame;
  frame.basis = Eigen::MatrixXd::Identity(2 * d, 2 * d);

  Eigen::MatrixXd jac = rho_jacobian(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  frame.rho_singular_values = svd.singularValues();
  const auto& s = frame.rho_singular_values;
  const double ratio = s(d - 1) / s(0);
  if (!(ratio >= config_.kernel_threshold)) {
    throw NearSingularFiber("d rho loses rank on " + chart_.name() + " (smallest/largest singular value " +
                                std::to_string(ratio) + ")",
                            ratio);
  }
  frame.fiber = svd.matrixV().rightCols(d);

  // Ver = ker F^* omega_Y, of real dimension 2k.
  Eigen::MatrixXd wy = base_form(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> ysvd(wy, Eigen::ComputeFullV);
  const auto& ys = ysvd.singularValues();
  const Eigen::Index r = 2 * (d - k);
  if (r > 0) {
    const double kept = ys(r - 1);
    const double dropped = ys(r);
    if (!(kept >= config_.kernel_threshold * ys(0)) || !(kept >= config_.gap_ratio * dropped)) {
      throw NumericalError("base form has no clean rank " + std::to_string(r) + " on " + chart_.name());
    }
  }
  frame.vertical = ysvd.matrixV().rightCols(2 * k);

  Eigen::MatrixXd w = fubini_study(p);
  Eigen::MatrixXd m = frame.vertical.transpose() * w;
  Eigen::JacobiSVD<Eigen::MatrixXd> hsvd(m, Eigen::ComputeFullV);
  const auto& hs = hsvd.singularValues();
  if (!(hs(hs.size() - 1) >= config_.kernel_threshold * hs(0))) {
    throw NumericalError("omega degenerates on the vertical space of " + chart_.name());
  }
  frame.horizontal = hsvd.matrixV().rightCols(2 * d - 2 * k);
  return frame;
}

Complex NumericModel::volume_form_value(const NumericPoint& p, const Eigen::MatrixXcd& vectors) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  if (vectors.rows() != d || vectors.cols() != d) throw ConfigurationError("need dim X tangent vectors");
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) m.row(r) = vectors.row(static_cast<Eigen::Index>(compiled_->orientation[static_cast<std::size_t>(r)]));
  return m.determinant() / compiled_->denominator(p.full);
}

ResidualReport NumericModel::poisson_residual(const NumericPoint& p) const {
  auto comps = rho_components();
  Eigen::MatrixXd w = fubini_study(p);
  std::vector<Eigen::VectorXd> grads;
  std::vector<Eigen::VectorXd> fields;
  for (const auto& f : comps) {
    grads.push_back(gradient(f, p));
    fields.push_back(hamiltonian_field(p, grads.back()));
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < comps.size(); ++a) {
    for (std::size_t b = a + 1; b < comps.size(); ++b) {
      const double scale = grads[a].norm() * grads[b].norm();
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(fields[a].dot(w * fields[b])) / scale);
    }
  }
  return ResidualReport::single("poisson", worst, config_.tol_first_order);
}

ResidualReport NumericModel::lagrangian_residual(const NumericPoint& p) const {
  return lagrangian_residual(p, fiber_frame(p));
}

ResidualReport NumericModel::lagrangian_residual(const NumericPoint& p, const TangentFrame& frame) const {
  Eigen::MatrixXd w = fubini_study(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  const double wn = svd.singularValues()(0);
  const auto& k = frame.fiber;
  double worst = 0.0;
  for (Eigen::Index a = 0; a < k.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < k.cols(); ++b) {
      const double v = std::abs(k.col(a).dot(w * k.col(b))) / (k.col(a).norm() * k.col(b).norm() * wn);
      worst = std::max(worst, v);
    }
  }
  return ResidualReport::single("lagrangian", worst, config_.tol_first_order);
}

ResidualReport NumericModel::special_residual(const NumericPoint& p, VanishingPart part) const {
  return special_residual(p, fiber_frame(p), part);
}

ResidualReport NumericModel::special_residual(const NumericPoint& p, const TangentFrame& frame,
                                              VanishingPart part) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd z(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index c = 0; c < d; ++c) z(a, c) = Complex(frame.fiber(2 * a, c), frame.fiber(2 * a + 1, c));
  }
  const Complex omega = volume_form_value(p, z);
  const double mag = std::abs(omega);
  const double part_value = part == VanishingPart::real ? omega.real() : omega.imag();
  const double residual = mag > 0.0 ? std::abs(part_value) / mag : kInf;
  const bool stated = part == stated_vanishing_part(chart_);
  return ResidualReport::single(stated ? "special" : "special-phase", residual, config_.tol_first_order);
}

ProportionalityResult NumericModel::horizontal_proportionality(const NumericPoint& p) const {
  return horizontal_proportionality(p, fiber_frame(p));
}

ProportionalityResult NumericModel::horizontal_proportionality(const NumericPoint& p,
                                                               const TangentFrame& frame) const {
  const auto& hor = frame.horizontal;
  Eigen::MatrixXd a = hor.transpose() * fubini_study(p) * hor;
  Eigen::MatrixXd b = hor.transpose() * base_form(p) * hor;
  const double bb = frobenius_dot(b, b);
  if (!(std::sqrt(bb) >= config_.kernel_threshold * a.norm())) {
    throw NumericalError("pulled-back base form degenerates on the horizontal space of " + chart_.name());
  }
  ProportionalityResult out;
  out.scalar = frobenius_dot(a, b) / bb;
  out.report = ResidualReport::single("proportionality", (a - out.scalar * b).norm() / a.norm(),
                                      config_.tol_first_order);
  return out;
}

ResidualReport NumericModel::hamiltonian_moment_residual(const NumericPoint& p) const {
  auto comps = rho_components();
  double worst = 0.0;
  for (int i = 0; i < torus_rank(); ++i) {
    Eigen::VectorXd u = torus_generator_field(p, i);
    Eigen::VectorXd v = hamiltonian_field(p, comps[static_cast<std::size_t>(i)]);
    worst = std::max(worst, (v - u).norm() / u.norm());
  }
  return ResidualReport::single("hamiltonian-moment", worst, config_.tol_first_order);
}

ResidualReport NumericModel::frame_torus_residual(const NumericPoint& p, const TangentFrame& frame) const {
  double worst = 0.0;
  const auto& k = frame.fiber;
  for (int i = 0; i < torus_rank(); ++i) {
    Eigen::VectorXd u = torus_generator_field(p, i);
    worst = std::max(worst, (u - k * (k.transpose() * u)).norm() / u.norm());
  }
  return ResidualReport::single("frame-torus", worst, config_.tol_first_order);
}

double form_agreement(const DifferentialForm& a, const DifferentialForm& b, const NumericPoint& p,
                      const std::vector<std::vector<Complex>>& vectors) {
  const Complex va = evaluate_form(a, p.full, vectors, 0.0);
  const Complex vb = evaluate_form(b, p.full, vectors, 0.0);
  const double scale = std::max(std::abs(va), std::abs(vb));
  return scale > 0.0 ? std::abs(va - vb) / scale : 0.0;
}

// ---------------------------------------------------------------------------------------------
// Suites

std::uint64_t point_seed(std::uint64_t base, std::uint64_t index, std::uint64_t attempt) {
  std::uint64_t x = base ^ (index * 0x9E3779B97F4A7C15ULL) ^ (attempt * 0xC2B2AE3D27D4EB4FULL);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

namespace {

const std::vector<std::string>& suite_checks() {
  static const std::vector<std::string> checks{"poisson",     "lagrangian",         "special",     "special-phase",
                                               "proportionality", "scalar-positive", "hamiltonian-moment",
                                               "frame-torus", "crosscheck"};
  return checks;
}

constexpr std::size_t kRetriesPerPoint = 20;

struct PointOutcome {
  std::vector<ResidualReport> reports;
  double scalar = 0.0;
  std::size_t skipped = 0;
};

}  // namespace

bool NumericSuiteResult::pass() const noexcept {
  if (points == 0) return false;
  return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass(); });
}

const ResidualReport& NumericSuiteResult::report(const std::string& check) const {
  for (const auto& r : reports) {
    if (r.check == check) return r;
  }
  throw ConfigurationError("no report named " + check);
}

NumericSuiteResult run_numeric_suite(const NumericSuiteRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (request.samples == 0) throw ConfigurationError("sample count must be positive");
  VarietyChart chart = build_chart(request.family, request.size);
  const DivisorChoice d = request.j == 0 ? schubert_divisor(request.family, request.size)
                                         : make_divisor(request.family, request.size, request.j);
  const NumericModel model(chart, d, request.config);
  const NumericConfig& cfg = model.config();

  DifferentialForm lhs(chart.registry, 0);
  DifferentialForm rhs(chart.registry, 0);
  if (request.crosscheck) {
    lhs = iterated_contraction(chart, volume_form(chart, d));
    rhs = dlog_wedge(reading_functions(chart, d, Reading::standard), chart.registry);
    const int sign = verify_dlog_identity(chart, d).sign;
    rhs = rhs.scaled(RationalFunction::constant(chart.registry, sign == 0 ? 1 : sign));
  }

  const VanishingPart stated = stated_vanishing_part(chart);
  const VanishingPart phase = phase_vanishing_part(chart);
  const std::size_t nfree = chart.free_variables.size();
  const int degree = chart.function_count();

  auto evaluate_point = [&](std::size_t index) {
    PointOutcome out;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == kRetriesPerPoint) {
        throw SamplingError("no regular point for index " + std::to_string(index) + " on " + chart.name());
      }
      const std::uint64_t seed = point_seed(request.seed, index, attempt);
      NumericPoint p = model.sample_point(seed);
      TangentFrame frame;
      try {
        frame = model.fiber_frame(p);
      } catch (const NearSingularFiber&) {
        ++out.skipped;
        continue;
      }
      out.reports.push_back(model.poisson_residual(p));
      out.reports.push_back(model.lagrangian_residual(p, frame));
      auto special = model.special_residual(p, frame, stated);
      special.check = "special";
      out.reports.push_back(special);
      auto corrected = model.special_residual(p, frame, phase);
      corrected.check = "special-phase";
      out.reports.push_back(corrected);
      try {
        auto prop = model.horizontal_proportionality(p, frame);
        out.reports.push_back(prop.report);
        out.scalar = prop.scalar;
      } catch (const NumericalError&) {
        out.reports.push_back(ResidualReport::single("proportionality", kInf, cfg.tol_first_order));
        out.scalar = std::numeric_limits<double>::quiet_NaN();
      }
      out.reports.push_back(ResidualReport::single("scalar-positive", out.scalar > 0.0 ? 0.0 : 1.0, 0.5));
      out.reports.push_back(model.hamiltonian_moment_residual(p));
      out.reports.push_back(model.frame_torus_residual(p, frame));
      if (request.crosscheck) {
        std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
        std::normal_distribution<double> normal;
        std::vector<std::vector<Complex>> vectors;
        for (int v = 0; v < degree; ++v) {
          std::vector<Complex> vec(chart.registry->size());
          for (std::size_t a = 0; a < nfree; ++a) vec[chart.free_variables[a]] = Complex(normal(rng), normal(rng));
          vectors.push_back(std::move(vec));
        }
        out.reports.push_back(
            ResidualReport::single("crosscheck", form_agreement(lhs, rhs, p, vectors), cfg.tol_solve));
      }
      return out;
    }
  };

  std::vector<PointOutcome> outcomes(request.samples);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= outcomes.size()) return;
      try {
        outcomes[i] = evaluate_point(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(request.threads, static_cast<unsigned>(request.samples)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  NumericSuiteResult result;
  result.family = request.family;
  result.size = request.size;
  result.j = d.j;
  result.case_id = family_name(request.family) + ":" + (request.family == Family::flag ? "n=" : "m=") +
                   std::to_string(request.size) + ":j=" + std::to_string(d.j);
  for (const auto& name : suite_checks()) {
    if (name == "crosscheck" && !request.crosscheck) continue;
    ResidualReport r;
    r.check = name;
    result.reports.push_back(r);
  }
  result.scalar_min = kInf;
  result.scalar_max = -kInf;
  for (const auto& o : outcomes) {
    for (const auto& r : o.reports) {
      for (auto& acc : result.reports) {
        if (acc.check == r.check) acc = merge(acc, r);
      }
    }
    result.skipped += o.skipped;
    // NaN scalars fail scalar-positive already; keep the range over finite values.
    if (std::isfinite(o.scalar)) {
      result.scalar_min = std::min(result.scalar_min, o.scalar);
      result.scalar_max = std::max(result.scalar_max, o.scalar);
    }
  }
  result.points = outcomes.size();
  result.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return result;
}

nlohmann::json to_json(const NumericSuiteResult& result, bool timings) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["case"] = result.case_id;
  j["family"] = family_name(result.family);
  j["size"] = result.size;
  j["j"] = result.j;
  j["points"] = result.points;
  j["skipped"] = result.skipped;
  j["scalar_min"] = std::isfinite(result.scalar_min) ? nlohmann::json(result.scalar_min) : nlohmann::json(nullptr);
  j["scalar_max"] = std::isfinite(result.scalar_max) ? nlohmann::json(result.scalar_max) : nlohmann::json(nullptr);
  j["pass"] = result.pass();
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  j["reports"] = reports;
  if (timings) j["millis"] = result.millis;
  return j;
}

}  // namespace pseudotoric
