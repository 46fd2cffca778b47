#include "pseudotoric/combinat.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "pseudotoric/errors.hpp"

namespace pseudotoric {

// ---------------------------------------------------------------------------------------------
// Term counts

namespace {

TermCountCell cell(int a, int b, int c, std::string formula) {
  TermCountCell t;
  t.parts = {a, b, c};
  t.total = a + b + c;
  t.formula = std::move(formula);
  return t;
}

std::string parts_text(const TermCountCell& c) {
  return std::to_string(c.parts[0]) + " + " + std::to_string(c.parts[1]) + " + " + std::to_string(c.parts[2]);
}

}  // namespace

std::vector<TermCountRow> term_count_table(Family family, int size_min, int size_max) {
  std::vector<TermCountRow> rows;
  if (size_min > size_max) return rows;
  if (size_min < minimum_size(family) || size_max > kMaxTableSize) {
    throw ConfigurationError(family_name(family) + " table sizes must lie in " + std::to_string(minimum_size(family)) +
                             ".." + std::to_string(kMaxTableSize));
  }
  for (int s = size_min; s <= size_max; ++s) {
    TermCountRow r;
    r.family = family;
    r.size = s;
    switch (family) {
      case Family::flag:
        r.dimension = 2 * s - 3;
        r.givental = cell(4, 2 * (s - 3), 2, "2n = 4 + 2(n-3) + 2");
        r.schubert = cell(2, 2 * (s - 3), 2, "2n - 2 = 2 + 2(n-3) + 2");
        r.rietsch = cell(2, s - 3, 2, "n + 1 = 2 + (n-3) + 2");
        break;
      case Family::quadric_even:
        r.dimension = 2 * s;
        r.givental = cell(4, 2 * (s - 2), 2, "2m + 2 = 4 + 2(m-2) + 2");
        r.schubert = cell(2, 2 * (s - 2), 2, "2m = 2 + 2(m-2) + 2");
        r.rietsch = cell(2, s - 2, 2, "m + 2 = 2 + (m-2) + 2");
        break;
      case Family::quadric_odd:
        r.dimension = 2 * s - 1;
        r.givental = cell(4, 2 * (s - 2), 1, "2m + 1 = 4 + 2(m-2) + 1");
        r.schubert = cell(2, 2 * (s - 2), 1, "2m - 1 = 2 + 2(m-2) + 1");
        r.rietsch = cell(2, s - 2, 1, "m + 1 = 2 + (m-2) + 1");
        break;
    }
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json to_json(const TermCountRow& row) {
  auto c = [](const TermCountCell& t) {
    return nlohmann::json{{"total", t.total}, {"parts", t.parts}, {"formula", t.formula}};
  };
  return {{"schema_version", 1},     {"family", family_name(row.family)}, {"size", row.size},
          {"dimension", row.dimension}, {"givental", c(row.givental)},      {"schubert", c(row.schubert)},
          {"rietsch", c(row.rietsch)}};
}

void write_csv(std::ostream& out, const std::vector<TermCountRow>& rows) {
  out << "family,size,dimension,givental,schubert,rietsch,givental_parts,schubert_parts,rietsch_parts,"
         "givental_formula,schubert_formula,rietsch_formula\n";
  for (const auto& r : rows) {
    out << family_name(r.family) << ',' << r.size << ',' << r.dimension << ',' << r.givental.total << ','
        << r.schubert.total << ',' << r.rietsch.total << ',' << parts_text(r.givental) << ','
        << parts_text(r.schubert) << ',' << parts_text(r.rietsch) << ',' << r.givental.formula << ','
        << r.schubert.formula << ',' << r.rietsch.formula << '\n';
  }
}

// ---------------------------------------------------------------------------------------------
// Non-free loci

std::string NonfreeComponent::label() const {
  std::string s = "{";
  for (const auto& c : zero_coordinates) s += c + " = ";
  return s + "0}";
}

std::vector<NonfreeComponent> nonfree_components(const VarietyChart& chart) {
  std::vector<NonfreeComponent> out;
  const int s = chart.size;
  const auto& names = chart.ambient.at(0).names;
  switch (chart.family) {
    case Family::flag: {
      const auto& hat = chart.ambient.at(1).names;
      for (int j = 1; j <= s; ++j) {
        const auto i = static_cast<std::size_t>(j - 1);
        out.push_back({j, {names[i], hat[i]}});
      }
      break;
    }
    case Family::quadric_even:
      for (int i = 0; i <= s; ++i) {
        out.push_back({i, {names[static_cast<std::size_t>(2 * i)], names[static_cast<std::size_t>(2 * i + 1)]}});
      }
      break;
    case Family::quadric_odd:
      out.push_back({0, {names[0]}});
      for (int j = 1; j <= s; ++j) {
        out.push_back({j, {names[static_cast<std::size_t>(2 * j - 1)], names[static_cast<std::size_t>(2 * j)]}});
      }
      break;
  }
  return out;
}

const NonfreeComponent& find_component(const std::vector<NonfreeComponent>& components, int index) {
  for (const auto& c : components) {
    if (c.index == index) return c;
  }
  throw ConfigurationError("no non-free component with index " + std::to_string(index));
}

namespace {

struct QuadraticTerm {
  std::size_t i;
  std::size_t k;
  double coefficient;
};

// Defining equation of X in the concatenated homogeneous coordinates.
std::vector<QuadraticTerm> homogeneous_relation(const VarietyChart& chart) {
  std::vector<QuadraticTerm> r;
  const int s = chart.size;
  switch (chart.family) {
    case Family::flag:
      for (int a = 0; a < s; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        r.push_back({ua, static_cast<std::size_t>(s) + ua, a % 2 == 0 ? 1.0 : -1.0});
      }
      break;
    case Family::quadric_even:
      for (int j = 0; j <= s; ++j) r.push_back({static_cast<std::size_t>(2 * j), static_cast<std::size_t>(2 * j + 1), 1.0});
      break;
    case Family::quadric_odd:
      r.push_back({0, 0, 1.0});
      for (int j = 1; j <= s; ++j) r.push_back({static_cast<std::size_t>(2 * j - 1), static_cast<std::size_t>(2 * j), 1.0});
      break;
  }
  return r;
}

std::size_t ambient_index(const VarietyChart& chart, const std::string& name) {
  std::size_t offset = 0;
  for (const auto& f : chart.ambient) {
    auto it = std::find(f.names.begin(), f.names.end(), name);
    if (it != f.names.end()) return offset + static_cast<std::size_t>(it - f.names.begin());
    offset += f.names.size();
  }
  throw ConfigurationError("unknown homogeneous coordinate " + name);
}

std::size_t ambient_size(const VarietyChart& chart) {
  std::size_t n = 0;
  for (const auto& f : chart.ambient) n += f.names.size();
  return n;
}

Eigen::Index numeric_rank(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-8 * s(0)) ++r;
  }
  return r;
}

// Free-coordinate zero bindings for the component, or a reason it cannot be placed in the chart.
struct ChartPlacement {
  Bindings zeros;
  std::vector<std::size_t> free_positions;
  std::string problem;
};

ChartPlacement place_in_chart(const VarietyChart& chart, const NonfreeComponent& component) {
  ChartPlacement out;
  for (const auto& name : component.zero_coordinates) {
    const RationalFunction* lift = nullptr;
    for (const auto& f : chart.ambient) {
      auto it = std::find(f.names.begin(), f.names.end(), name);
      if (it != f.names.end()) lift = &f.lift[static_cast<std::size_t>(it - f.names.begin())];
    }
    if (lift == nullptr) throw ConfigurationError("unknown homogeneous coordinate " + name);
    if (lift->is_constant()) {
      if (!lift->is_zero()) out.problem = "component misses the chart (" + name + " is 1 there)";
      continue;
    }
    const auto& num = lift->numerator();
    std::optional<std::size_t> var;
    if (lift->is_polynomial() && num.is_monomial() && num.total_degree() == 1 && num.leading_term().coefficient == 1) {
      for (std::size_t a = 0; a < chart.free_variables.size(); ++a) {
        if (num.depends_on(chart.free_variables[a])) var = a;
      }
    }
    if (!var) {
      out.problem = "component is not a coordinate subspace of the chart (" + name + ")";
      continue;
    }
    out.zeros[chart.free_variables[*var]] = RationalFunction::constant(chart.registry, 0);
    out.free_positions.push_back(*var);
  }
  return out;
}

bool vanishes_on(const RationalFunction& f, const Bindings& zeros) {
  std::map<std::size_t, Polynomial> b;
  for (const auto& [k, v] : zeros) b[k] = v.numerator();
  return substitute(f.numerator(), b).is_zero();
}

}  // namespace

int component_codimension(const VarietyChart& chart, const NonfreeComponent& component, std::uint64_t seed,
                          int trials) {
  const auto rel = homogeneous_relation(chart);
  const std::size_t n = ambient_size(chart);
  std::vector<std::size_t> zero;
  for (const auto& name : component.zero_coordinates) zero.push_back(ambient_index(chart, name));
  auto is_zero = [&](std::size_t i) { return std::find(zero.begin(), zero.end(), i) != zero.end(); };
  const QuadraticTerm* solve = nullptr;
  for (const auto& t : rel) {
    if (t.i != t.k && !is_zero(t.i) && !is_zero(t.k)) {
      solve = &t;
      break;
    }
  }
  if (solve == nullptr) throw ConfigurationError("cannot place a point on " + component.label());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  int best = static_cast<int>(n);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(normal(rng), normal(rng));
    for (auto i : zero) x(static_cast<Eigen::Index>(i)) = 0.0;
    Complex rest{};
    for (const auto& q : rel) {
      if (&q != solve) rest += q.coefficient * x(static_cast<Eigen::Index>(q.i)) * x(static_cast<Eigen::Index>(q.k));
    }
    x(static_cast<Eigen::Index>(solve->k)) = -rest / (solve->coefficient * x(static_cast<Eigen::Index>(solve->i)));

    Eigen::MatrixXcd grad = Eigen::MatrixXcd::Zero(1, static_cast<Eigen::Index>(n));
    for (const auto& q : rel) {
      const auto i = static_cast<Eigen::Index>(q.i);
      const auto k = static_cast<Eigen::Index>(q.k);
      grad(0, i) += q.coefficient * x(k);
      grad(0, k) += q.coefficient * x(i);
    }
    Eigen::MatrixXcd all = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(1 + zero.size()), static_cast<Eigen::Index>(n));
    all.row(0) = grad.row(0);
    for (std::size_t r = 0; r < zero.size(); ++r) all(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(zero[r])) = 1.0;
    best = std::min(best, static_cast<int>(numeric_rank(all) - numeric_rank(grad)));
  }
  return best;
}

std::vector<bool> forced_zero_functions(const VarietyChart& chart, const DivisorChoice& d,
                                        const NonfreeComponent& component) {
  auto placement = place_in_chart(chart, component);
  auto functions = fibration_functions(chart, d);
  std::vector<bool> out(functions.size(), false);
  if (!placement.problem.empty()) return out;
  for (std::size_t j = 0; j < functions.size(); ++j) {
    out[j] = vanishes_on(functions[j], placement.zeros) && !vanishes_on(functions[j].denominator(), placement.zeros);
  }
  return out;
}

WallCloud wall_point_cloud(const VarietyChart& chart, const DivisorChoice& d, const NonfreeComponent& component,
                           const WallRequest& request) {
  const NumericModel model(chart, d, request.config);
  WallCloud cloud;
  cloud.columns = model.rho_names();
  auto warn = [&](std::string why) {
    cloud.empty_warning = true;
    cloud.warning = std::move(why);
    return cloud;
  };

  auto placement = place_in_chart(chart, component);
  if (!placement.problem.empty()) return warn(placement.problem);
  for (const auto& f : divisor_factors(chart, model.divisor())) {
    if (vanishes_on(f, placement.zeros)) return warn("component lies in D");
  }
  for (const auto& f : fibration_functions(chart, model.divisor())) {
    if (vanishes_on(f.denominator(), placement.zeros)) return warn("component lies in the polar set of rho");
  }
  if (request.samples == 0) return cloud;

  const NumericConfig& cfg = model.config();
  const std::size_t nfree = chart.free_variables.size();
  std::vector<std::optional<std::vector<double>>> rows(request.samples);
  auto sample = [&](std::size_t i) -> std::optional<std::vector<double>> {
    std::mt19937_64 rng(point_seed(request.seed, i, 0));
    std::uniform_real_distribution<double> log_modulus(std::log(cfg.modulus_min), std::log(cfg.modulus_max));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<Complex> z(nfree);
    for (std::size_t draw = 0; draw < cfg.rejection_budget; ++draw) {
      for (auto& c : z) c = std::polar(std::exp(log_modulus(rng)), phase(rng));
      for (auto a : placement.free_positions) z[a] = 0.0;
      if (!(model.pole_margin(z) > cfg.guard)) continue;
      Eigen::VectorXd r = model.rho(z);
      return std::vector<double>(r.data(), r.data() + r.size());
    }
    return std::nullopt;
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        rows[i] = sample(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(request.threads, static_cast<unsigned>(rows.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : rows) {
    if (!r) {
      cloud.rows.clear();
      cloud.sampling_exhausted = true;
      return warn("no admissible point on the component after " + std::to_string(cfg.rejection_budget) + " draws");
    }
    cloud.rows.push_back(std::move(*r));
  }
  return cloud;
}

void write_csv(std::ostream& out, const WallCloud& cloud) {
  for (std::size_t c = 0; c < cloud.columns.size(); ++c) out << (c ? "," : "") << cloud.columns[c];
  out << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& row : cloud.rows) {
    line.str("");
    for (std::size_t c = 0; c < row.size(); ++c) line << (c ? "," : "") << row[c];
    out << line.str() << '\n';
  }
}

// ---------------------------------------------------------------------------------------------
// Superpotentials

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

Complex product(const std::vector<std::string>& names, const std::map<std::string, Complex>& values) {
  Complex p{1.0, 0.0};
  for (const auto& n : names) {
    auto it = values.find(n);
    if (it == values.end()) throw ConfigurationError("missing Plücker coordinate " + n);
    p *= it->second;
  }
  return p;
}

SuperpotentialTerm term(int quantum, std::vector<std::string> num, std::vector<std::string> den) {
  return {quantum, std::move(num), {{1, std::move(den)}}};
}

}  // namespace

std::string SuperpotentialTerm::to_string() const {
  std::string s;
  if (quantum != 0) s += "q" + std::to_string(quantum) + "*";
  s += join(numerator, "*") + "/";
  if (denominator.size() == 1 && denominator[0].first == 1) return s + join(denominator[0].second, "*");
  s += "(";
  for (std::size_t i = 0; i < denominator.size(); ++i) {
    const auto& [sign, mono] = denominator[i];
    if (i == 0) s += (sign < 0 ? "-" : "");
    else s += (sign < 0 ? " - " : " + ");
    s += join(mono, "*");
  }
  return s + ")";
}

Complex SuperpotentialTerm::evaluate(const std::map<std::string, Complex>& plucker, double q1, double q2,
                                     double guard) const {
  Complex den{};
  for (const auto& [sign, mono] : denominator) den += static_cast<double>(sign) * product(mono, plucker);
  if (std::abs(den) < guard) throw EvaluationError("superpotential term " + to_string() + " at its pole", std::abs(den));
  Complex v = product(numerator, plucker) / den;
  if (quantum == 1) v *= q1;
  if (quantum == 2) v *= q2;
  return v;
}

std::string SuperpotentialExpr::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? " + " : "") + terms[i].to_string();
  return s;
}

Complex SuperpotentialExpr::evaluate(const std::map<std::string, Complex>& plucker, double q1, double q2,
                                     double guard) const {
  if (!(q1 > 0.0) || !(q2 > 0.0)) throw ConfigurationError("quantum parameters must be positive");
  Complex total{};
  for (const auto& t : terms) total += t.evaluate(plucker, q1, q2, guard);
  return total;
}

SuperpotentialExpr rietsch_superpotential(int n) {
  SuperpotentialExpr w;
  w.n = n;
  if (n == 3) {
    w.terms = {term(0, {"x2"}, {"x1"}), term(0, {"x13"}, {"x12"}), term(1, {"x13"}, {"x23"}), term(2, {"x2"}, {"x3"})};
    w.divisor = {"x1", "x23", "x3", "x12"};
  } else if (n == 4) {
    w.terms = {term(0, {"x3"}, {"x1"}), term(0, {"x134"}, {"x123"}), term(1, {"x134"}, {"x234"}),
               term(2, {"x3"}, {"x4"})};
    w.terms.push_back({0, {"x2", "x124"}, {{1, {"x3", "x124"}}, {-1, {"x4", "x123"}}}});
    w.divisor = {"x1", "x234", "x3*x124 - x4*x123", "x4", "x123"};
  } else {
    throw ConfigurationError("Rietsch superpotential is only available for n = 3, 4 (got " + std::to_string(n) + ")");
  }
  return w;
}

nlohmann::json to_json(const SuperpotentialExpr& w) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : w.terms) terms.push_back(t.to_string());
  return {{"schema_version", 1}, {"family", "flag"},       {"n", w.n},
          {"terms", terms},      {"term_count", w.terms.size()}, {"divisor", w.divisor},
          {"expression", w.to_string()}};
}

std::map<std::string, Complex> flag_plucker(const Eigen::MatrixXcd& frame) {
  const Eigen::Index n = frame.rows();
  if (n < 3 || frame.cols() != n - 1) throw ConfigurationError("flag frame must be n x (n-1) with n >= 3");
  std::map<std::string, Complex> out;
  for (Eigen::Index i = 0; i < n; ++i) out["x" + std::to_string(i + 1)] = frame(i, 0);
  for (Eigen::Index omit = 0; omit < n; ++omit) {
    Eigen::MatrixXcd minor(n - 1, n - 1);
    std::string name = "x";
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == omit) continue;
      minor.row(r++) = frame.row(i);
      name += std::to_string(i + 1);
    }
    out[name] = minor.determinant();
  }
  return out;
}

}  // namespace pseudotoric
