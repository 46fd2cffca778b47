#include "pseudotoric/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pseudotoric/errors.hpp"

namespace pseudotoric {

namespace {

int sign_of_parity(int e) { return (e % 2 == 0) ? 1 : -1; }

class ChartBuilder {
 public:
  ChartBuilder(std::vector<std::string> free_names, std::string dependent, const ChartOptions& options)
      : free_names_(std::move(free_names)), dependent_(std::move(dependent)) {
    std::vector<std::string> order = free_names_;
    const auto& perm = options.registry_permutation;
    if (!perm.empty()) {
      if (perm.size() != free_names_.size()) {
        throw ConfigurationError("registry permutation has " + std::to_string(perm.size()) + " entries, expected " +
                                 std::to_string(free_names_.size()));
      }
      std::vector<std::size_t> sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != i) throw ConfigurationError("registry permutation is not a permutation");
      }
      for (std::size_t i = 0; i < perm.size(); ++i) order[i] = free_names_[perm[i]];
    }
    order.push_back(dependent_);
    registry_ = make_registry(order);
  }

  const RegistryPtr& registry() const { return registry_; }
  std::size_t index(const std::string& name) const { return registry_->index_of(name); }

  RationalFunction raw(const std::string& name) const { return Polynomial::variable(registry_, name); }
  /// Variable, or its binding if it is the dependent one.
  RationalFunction x(const std::string& name) const { return name == dependent_ ? binding_ : raw(name); }
  RationalFunction constant(const Rational& c) const { return RationalFunction::constant(registry_, c); }

  void set_binding(const RationalFunction& b) { binding_ = b; }

  VectorFieldContraction contraction(const std::vector<std::pair<std::string, int>>& entries) const {
    VectorFieldContraction v(registry_);
    for (const auto& [name, c] : entries) v.add(index(name), constant(c));
    return v;
  }

  void fill(VarietyChart& chart, const std::vector<std::string>& orientation) const {
    chart.registry = registry_;
    for (const auto& n : free_names_) chart.free_variables.push_back(index(n));
    chart.dependent_variable = index(dependent_);
    chart.dependent_binding = binding_;
    for (const auto& n : orientation) chart.orientation.push_back(index(n));
  }

 private:
  std::vector<std::string> free_names_;
  std::string dependent_;
  RegistryPtr registry_;
  RationalFunction binding_;
};

std::string zn(int i) { return "z" + std::to_string(i); }
std::string zh(int i) { return "zh" + std::to_string(i); }

void require_size(Family family, int size) {
  if (size < minimum_size(family)) {
    throw ConfigurationError(family_name(family) + " needs size >= " + std::to_string(minimum_size(family)) +
                             ", got " + std::to_string(size));
  }
}

RationalFunction product(const RationalFunction& unit, const std::vector<RationalFunction>& factors) {
  RationalFunction r = unit;
  for (const auto& f : factors) r = r * f;
  return r;
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::flag:
      return "flag";
    case Family::quadric_even:
      return "quadric-even";
    case Family::quadric_odd:
      return "quadric-odd";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "flag") return Family::flag;
  if (name == "quadric-even" || name == "even") return Family::quadric_even;
  if (name == "quadric-odd" || name == "odd") return Family::quadric_odd;
  throw ConfigurationError("unknown family '" + std::string(name) + "' (expected flag, quadric-even, quadric-odd)");
}

int minimum_size(Family family) { return family == Family::flag ? 3 : 2; }

std::string label_name(DivisorLabel label) {
  switch (label) {
    case DivisorLabel::sch:
      return "Sch";
    case DivisorLabel::rie:
      return "Rie";
    case DivisorLabel::intermediate:
      return "intermediate";
  }
  return "intermediate";
}

int divisor_min(Family family, int) {
  switch (family) {
    case Family::flag:
      return 3;
    case Family::quadric_even:
      return 1;
    case Family::quadric_odd:
      return 2;
  }
  return 0;
}

int divisor_max(Family family, int size) {
  switch (family) {
    case Family::flag:
      return size;
    case Family::quadric_even:
      return size - 1;
    case Family::quadric_odd:
      return size;
  }
  return 0;
}

DivisorChoice make_divisor(Family family, int size, int j) {
  require_size(family, size);
  const int lo = divisor_min(family, size);
  const int hi = divisor_max(family, size);
  if (j < lo || j > hi) {
    throw ConfigurationError("divisor index j=" + std::to_string(j) + " outside " + std::to_string(lo) + ".." +
                             std::to_string(hi) + " for " + family_name(family) + " of size " + std::to_string(size));
  }
  DivisorChoice d{j, DivisorLabel::intermediate};
  if (j == hi) d.label = DivisorLabel::sch;
  else if (j == lo) d.label = DivisorLabel::rie;
  // A single legal index is both; the Schubert reading wins.
  return d;
}

DivisorChoice schubert_divisor(Family family, int size) {
  return make_divisor(family, size, divisor_max(family, size));
}

DivisorChoice rietsch_divisor(Family family, int size) {
  return make_divisor(family, size, divisor_min(family, size));
}

std::string VarietyChart::name() const { return family_name(family) + "-" + std::to_string(size); }

const RationalFunction& VarietyChart::a(int j) const {
  auto it = A.find(j);
  if (it == A.end()) throw ConfigurationError("A_" + std::to_string(j) + " is not defined on " + name());
  return it->second;
}

const RationalFunction& VarietyChart::b(int j) const {
  auto it = B.find(j);
  if (it == B.end()) throw ConfigurationError("B_" + std::to_string(j) + " is not defined on " + name());
  return it->second;
}

Bindings VarietyChart::bindings() const { return {{dependent_variable, dependent_binding}}; }

DifferentialForm VarietyChart::omega() const {
  return DifferentialForm::basis(registry, orientation, RationalFunction::constant(registry, 1));
}

std::vector<Complex> VarietyChart::full_point(std::span<const Complex> free_values) const {
  if (free_values.size() != free_variables.size()) {
    throw ConfigurationError("point has " + std::to_string(free_values.size()) + " coordinates, chart " + name() +
                             " has " + std::to_string(free_variables.size()));
  }
  std::vector<Complex> full(registry->size());
  for (std::size_t i = 0; i < free_variables.size(); ++i) full[free_variables[i]] = free_values[i];
  full[dependent_variable] = dependent_binding.evaluate(full);
  return full;
}

VarietyChart build_flag_chart(int n, const ChartOptions& options) {
  require_size(Family::flag, n);
  std::vector<std::string> free;
  for (int i = 2; i <= n; ++i) free.push_back(zn(i));
  for (int i = 2; i <= n - 1; ++i) free.push_back(zh(i));
  ChartBuilder cb(free, zh(1), options);

  // zh1 = z2 zh2 - (-1)^{n-1} z_n - sum_{j=3}^{n-1} (-1)^{j-1} z_j zh_j
  RationalFunction binding = cb.raw(zn(2)) * cb.raw(zh(2)) - cb.raw(zn(n)) * cb.constant(sign_of_parity(n - 1));
  for (int j = 3; j <= n - 1; ++j) binding = binding - cb.raw(zn(j)) * cb.raw(zh(j)) * cb.constant(sign_of_parity(j - 1));
  cb.set_binding(binding);

  VarietyChart c;
  c.family = Family::flag;
  c.size = n;
  std::vector<std::string> orient;
  for (int i = 2; i <= n - 1; ++i) {
    orient.push_back(zn(i));
    orient.push_back(zh(i));
  }
  orient.push_back(zn(n));
  cb.fill(c, orient);

  // sum_{j=1}^{n} (-1)^{j-1} x_j xh_j with x_1 = 1, xh_n = 1
  RationalFunction rel = cb.raw(zh(1)) - cb.raw(zn(2)) * cb.raw(zh(2));
  for (int j = 3; j <= n - 1; ++j) rel = rel + cb.raw(zn(j)) * cb.raw(zh(j)) * cb.constant(sign_of_parity(j - 1));
  rel = rel + cb.raw(zn(n)) * cb.constant(sign_of_parity(n - 1));
  c.relation = rel.numerator();

  for (int i = 2; i <= n - 1; ++i) c.contractions.push_back(cb.contraction({{zn(i), 1}, {zh(i), -1}}));
  std::vector<std::pair<std::string, int>> last{{zn(n), 1}};
  for (int j = 2; j <= n - 1; ++j) last.emplace_back(zh(j), 1);
  c.contractions.push_back(cb.contraction(last));
  for (int i = 1; i <= n - 1; ++i) c.contraction_order.push_back(i);

  c.A[1] = cb.x(zh(1));
  for (int j = 2; j <= n - 1; ++j) c.A[j] = cb.x(zn(j)) * cb.x(zh(j));
  c.A[n] = cb.x(zn(n));
  for (int j = 3; j <= n; ++j) {
    RationalFunction s = cb.constant(0);
    for (int k = j; k <= n; ++k) s = s + c.A[k] * cb.constant(sign_of_parity(k - j));
    c.B[j] = s;
  }

  AmbientFactor x;
  AmbientFactor xh;
  for (int a = 1; a <= n; ++a) {
    x.names.push_back("x" + std::to_string(a));
    xh.names.push_back("xh" + std::to_string(a));
    x.lift.push_back(a == 1 ? cb.constant(1) : cb.x(zn(a)));
    xh.lift.push_back(a == n ? cb.constant(1) : cb.x(zh(a)));
    std::vector<int> w(static_cast<std::size_t>(n), 0);
    w[static_cast<std::size_t>(a - 1)] = 1;
    x.weights.push_back(w);
    std::vector<int> wh(static_cast<std::size_t>(n), 1);
    wh[static_cast<std::size_t>(a - 1)] = 0;
    xh.weights.push_back(wh);
  }
  c.ambient = {x, xh};
  for (int i = 1; i <= n - 1; ++i) {
    std::vector<double> v(static_cast<std::size_t>(n), -1.0 / n);
    v[static_cast<std::size_t>(i)] += 1.0;
    c.generators.push_back(v);
  }
  c.base_map.push_back(c.A[1]);
  for (int j = 3; j <= n; ++j) c.base_map.push_back(c.A[j]);
  return c;
}

VarietyChart build_even_quadric_chart(int m, const ChartOptions& options) {
  require_size(Family::quadric_even, m);
  std::vector<std::string> free;
  for (int i = 2; i <= 2 * m + 1; ++i) free.push_back(zn(i));
  ChartBuilder cb(free, zn(1), options);

  RationalFunction binding = cb.constant(0);
  for (int j = 1; j <= m; ++j) binding = binding - cb.raw(zn(2 * j)) * cb.raw(zn(2 * j + 1));
  cb.set_binding(binding);

  VarietyChart c;
  c.family = Family::quadric_even;
  c.size = m;
  cb.fill(c, free);

  RationalFunction rel = cb.raw(zn(1));
  for (int j = 1; j <= m; ++j) rel = rel + cb.raw(zn(2 * j)) * cb.raw(zn(2 * j + 1));
  c.relation = rel.numerator();

  for (int j = 1; j <= m - 1; ++j) c.contractions.push_back(cb.contraction({{zn(2 * j), 1}, {zn(2 * j + 1), -1}}));
  std::vector<std::pair<std::string, int>> vm{{zn(2 * m), 1}};
  std::vector<std::pair<std::string, int>> vm1{{zn(2 * m + 1), 1}};
  for (int i = 1; i <= m - 1; ++i) {
    vm.emplace_back(zn(2 * i + 1), 1);
    vm1.emplace_back(zn(2 * i + 1), 1);
  }
  c.contractions.push_back(cb.contraction(vm));
  c.contractions.push_back(cb.contraction(vm1));
  c.contraction_order = {m + 1, m};
  for (int i = 1; i <= m - 1; ++i) c.contraction_order.push_back(i);

  for (int j = 1; j <= m; ++j) c.A[j] = cb.x(zn(2 * j)) * cb.x(zn(2 * j + 1));
  RationalFunction s = cb.x(zn(1));
  for (int k = 1; k <= m - 1; ++k) {
    s = s + c.A[k];
    c.B[k] = s;
  }

  AmbientFactor x;
  for (int a = 0; a <= 2 * m + 1; ++a) {
    x.names.push_back("x" + std::to_string(a));
    x.lift.push_back(a == 0 ? cb.constant(1) : cb.x(zn(a)));
    std::vector<int> w(static_cast<std::size_t>(m + 1), 0);
    w[static_cast<std::size_t>(a / 2)] = (a % 2 == 0) ? 1 : -1;
    x.weights.push_back(w);
  }
  c.ambient = {x};
  // Dual to psi_j = theta_j - theta_0 (j <= m) and psi_{m+1} = -theta_m - theta_0.
  for (int i = 1; i <= m - 1; ++i) {
    std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    c.generators.push_back(v);
  }
  std::vector<double> gm(static_cast<std::size_t>(m + 1), -0.5);
  gm[static_cast<std::size_t>(m)] = 0.5;
  c.generators.push_back(gm);
  c.generators.emplace_back(static_cast<std::size_t>(m + 1), -0.5);

  c.base_map.push_back(cb.x(zn(1)));
  for (int j = 1; j <= m; ++j) c.base_map.push_back(c.A[j]);
  return c;
}

VarietyChart build_odd_quadric_chart(int m, const ChartOptions& options) {
  require_size(Family::quadric_odd, m);
  std::vector<std::string> free;
  for (int i = 0; i <= 2 * m - 2; ++i) free.push_back(zn(i));
  const std::string dep = zn(2 * m - 1);
  ChartBuilder cb(free, dep, options);

  RationalFunction binding = -(cb.raw(zn(0)) * cb.raw(zn(0)));
  for (int j = 1; j <= m - 1; ++j) binding = binding - cb.raw(zn(2 * j - 1)) * cb.raw(zn(2 * j));
  cb.set_binding(binding);

  VarietyChart c;
  c.family = Family::quadric_odd;
  c.size = m;
  cb.fill(c, free);

  RationalFunction rel = cb.raw(zn(0)) * cb.raw(zn(0)) + cb.raw(dep);
  for (int j = 1; j <= m - 1; ++j) rel = rel + cb.raw(zn(2 * j - 1)) * cb.raw(zn(2 * j));
  c.relation = rel.numerator();

  for (int j = 1; j <= m - 1; ++j) c.contractions.push_back(cb.contraction({{zn(2 * j - 1), 1}, {zn(2 * j), -1}}));
  std::vector<std::pair<std::string, int>> vm;
  for (int i = 0; i <= 2 * m - 2; ++i) vm.emplace_back(zn(i), 1);
  c.contractions.push_back(cb.contraction(vm));
  c.contraction_order = {m};
  for (int i = 1; i <= m - 1; ++i) c.contraction_order.push_back(i);

  for (int j = 1; j <= m - 1; ++j) c.A[j] = cb.x(zn(2 * j - 1)) * cb.x(zn(2 * j));
  c.A[m] = cb.x(dep);
  for (int j = 1; j <= m; ++j) {
    RationalFunction s = cb.constant(0);
    for (int i = j; i <= m; ++i) s = s + c.A[i];
    c.B[j] = s;
  }

  AmbientFactor x;
  for (int a = 0; a <= 2 * m; ++a) {
    x.names.push_back("x" + std::to_string(a));
    if (a == 2 * m) x.lift.push_back(cb.constant(1));
    else x.lift.push_back(cb.x(zn(a)));
    std::vector<int> w(static_cast<std::size_t>(m), 0);
    if (a > 0) w[static_cast<std::size_t>((a + 1) / 2 - 1)] = (a % 2 == 1) ? 1 : -1;
    x.weights.push_back(w);
  }
  c.ambient = {x};
  for (int i = 1; i <= m; ++i) {
    std::vector<double> v(static_cast<std::size_t>(m), 0.0);
    v[static_cast<std::size_t>(i - 1)] = 1.0;
    c.generators.push_back(v);
  }

  c.base_map.push_back(cb.x(zn(0)) * cb.x(zn(0)));
  for (int j = 1; j <= m; ++j) c.base_map.push_back(c.A[j]);
  return c;
}

VarietyChart build_chart(Family family, int size, const ChartOptions& options) {
  switch (family) {
    case Family::flag:
      return build_flag_chart(size, options);
    case Family::quadric_even:
      return build_even_quadric_chart(size, options);
    case Family::quadric_odd:
      return build_odd_quadric_chart(size, options);
  }
  throw ConfigurationError("unknown family");
}

namespace {

void check_divisor(const VarietyChart& chart, const DivisorChoice& d) {
  (void)make_divisor(chart.family, chart.size, d.j);
}

RationalFunction variable_of(const VarietyChart& chart, int i) {
  return Polynomial::variable(chart.registry, zn(i));
}

}  // namespace

std::vector<RationalFunction> divisor_factors(const VarietyChart& chart, const DivisorChoice& d) {
  check_divisor(chart, d);
  const int j = d.j;
  const int s = chart.size;
  std::vector<RationalFunction> f;
  switch (chart.family) {
    case Family::flag:
      f.push_back(chart.a(1));
      for (int i = 3; i <= j - 1; ++i) f.push_back(chart.a(i));
      for (int k = j; k <= s; ++k) f.push_back(chart.b(k));
      break;
    case Family::quadric_even:
      f.push_back(chart.dependent_binding);
      for (int i = 1; i <= j - 1; ++i) f.push_back(chart.a(i));
      for (int k = j; k <= s - 2; ++k) f.push_back(chart.b(k));
      f.push_back(chart.a(s));
      break;
    case Family::quadric_odd:
      f.push_back(variable_of(chart, 0));
      for (int i = 2; i <= j - 1; ++i) f.push_back(chart.a(i));
      for (int k = j; k <= s - 1; ++k) f.push_back(chart.b(k));
      f.push_back(chart.dependent_binding);
      break;
  }
  return f;
}

RationalFunction divisor_denominator(const VarietyChart& chart, const DivisorChoice& d) {
  return product(RationalFunction::constant(chart.registry, 1), divisor_factors(chart, d));
}

DifferentialForm volume_form(const VarietyChart& chart, const DivisorChoice& d) {
  return chart.omega().scaled(divisor_denominator(chart, d).inverse());
}

std::vector<RationalFunction> fibration_functions(const VarietyChart& chart, const DivisorChoice& d,
                                                  FunctionSet set) {
  check_divisor(chart, d);
  const int j = d.j;
  const int s = chart.size;
  std::vector<RationalFunction> out;
  switch (chart.family) {
    case Family::flag: {
      if (set == FunctionSet::standard && j == s) {
        const auto& a3 = chart.a(3);
        out.push_back(chart.a(1) / a3);
        for (int i = 4; i <= s; ++i) out.push_back(chart.a(i) / a3);
        break;
      }
      const auto& bj = chart.b(j);
      out.push_back(chart.a(1) / bj);
      for (int i = 3; i <= j - 1; ++i) out.push_back(chart.a(i) / bj);
      for (int k = j + 1; k <= s; ++k) out.push_back(chart.b(k) / bj);
      break;
    }
    case Family::quadric_even: {
      const auto& z1 = chart.dependent_binding;
      for (int k = 1; k <= j - 1; ++k) out.push_back(chart.a(k) / z1);
      for (int k = j; k <= s - 2; ++k) out.push_back(chart.b(k) / z1);
      out.push_back(chart.a(s) / z1);
      break;
    }
    case Family::quadric_odd: {
      const auto& bm = chart.b(s);
      auto z0 = variable_of(chart, 0);
      out.push_back(z0 * z0 / bm);
      for (int i = 2; i <= j - 1; ++i) out.push_back(chart.a(i) / bm);
      for (int k = j; k <= s - 1; ++k) out.push_back(chart.b(k) / bm);
      break;
    }
  }
  return out;
}

std::optional<int> expected_dlog_sign(const VarietyChart& chart, const DivisorChoice& d, FunctionSet set) {
  check_divisor(chart, d);
  switch (chart.family) {
    case Family::flag:
      if (set == FunctionSet::standard && d.j == chart.size) return sign_of_parity(chart.size - 1);
      return sign_of_parity(chart.size - d.j);
    case Family::quadric_even:
      return 1;
    case Family::quadric_odd:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<std::vector<Complex>> ambient_embedding(const VarietyChart& chart, std::span<const Complex> free_values,
                                                    double guard) {
  std::vector<Complex> full = chart.full_point(free_values);
  std::vector<std::vector<Complex>> tuples;
  for (const auto& factor : chart.ambient) {
    std::vector<Complex> t;
    t.reserve(factor.lift.size());
    for (const auto& f : factor.lift) t.push_back(f.evaluate(full, guard));
    tuples.push_back(std::move(t));
  }
  return tuples;
}

double ambient_relation_residual(const VarietyChart& chart, const std::vector<std::vector<Complex>>& tuples) {
  auto norm2 = [](const std::vector<Complex>& v) {
    double s = 0;
    for (const auto& c : v) s += std::norm(c);
    return s;
  };
  Complex r{};
  double scale = 1.0;
  switch (chart.family) {
    case Family::flag: {
      const auto& x = tuples.at(0);
      const auto& xh = tuples.at(1);
      for (std::size_t a = 0; a < x.size(); ++a) r += (a % 2 == 0 ? 1.0 : -1.0) * x[a] * xh[a];
      scale = std::sqrt(norm2(x) * norm2(xh));
      break;
    }
    case Family::quadric_even: {
      const auto& x = tuples.at(0);
      for (std::size_t a = 0; a + 1 < x.size(); a += 2) r += x[a] * x[a + 1];
      scale = norm2(x);
      break;
    }
    case Family::quadric_odd: {
      const auto& x = tuples.at(0);
      r = x[0] * x[0];
      for (std::size_t a = 1; a + 1 < x.size(); a += 2) r += x[a] * x[a + 1];
      scale = norm2(x);
      break;
    }
  }
  return std::abs(r) / scale;
}

nlohmann::json chart_descriptor(const VarietyChart& chart) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["family"] = family_name(chart.family);
  j["size"] = chart.size;
  j["variables"] = chart.registry->names();
  std::vector<std::string> free;
  for (auto i : chart.free_variables) free.push_back(chart.registry->name(i));
  j["free_variables"] = free;
  j["dependent"] = {{chart.registry->name(chart.dependent_variable), chart.dependent_binding.to_string()}};
  j["relation"] = chart.relation.to_string();
  std::vector<std::string> orient;
  for (auto i : chart.orientation) orient.push_back(chart.registry->name(i));
  j["orientation"] = orient;
  std::vector<std::string> contr;
  for (const auto& v : chart.contractions) contr.push_back(v.to_string());
  j["contractions"] = contr;
  j["contraction_order"] = chart.contraction_order;
  nlohmann::json a = nlohmann::json::object();
  for (const auto& [k, f] : chart.A) a[std::to_string(k)] = f.to_string();
  j["A"] = a;
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [k, f] : chart.B) b[std::to_string(k)] = f.to_string();
  j["B"] = b;
  nlohmann::json amb = nlohmann::json::array();
  for (const auto& factor : chart.ambient) {
    std::vector<std::string> lift;
    for (const auto& f : factor.lift) lift.push_back(f.to_string());
    amb.push_back({{"names", factor.names}, {"lift", lift}, {"weights", factor.weights}});
  }
  j["ambient"] = amb;
  j["generators"] = chart.generators;
  return j;
}

}  // namespace pseudotoric
