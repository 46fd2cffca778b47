#include "pseudotoric/forms.hpp"

#include <algorithm>

#include "pseudotoric/errors.hpp"

namespace pseudotoric {

namespace {

// Merges two increasing tuples; returns false if they share an index.
bool merge_tuples(const IndexTuple& a, const IndexTuple& b, IndexTuple& out, int& sign) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  int swaps = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      swaps += static_cast<int>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  sign = (swaps % 2 == 0) ? 1 : -1;
  return true;
}

struct Bucket {
  Polynomial denominator;
  std::vector<std::pair<const IndexTuple*, const Polynomial*>> entries;
};

std::vector<Bucket> bucket_by_denominator(const DifferentialForm& f) {
  std::vector<Bucket> buckets;
  for (const auto& [tuple, coef] : f.terms()) {
    auto it = std::find_if(buckets.begin(), buckets.end(),
                           [&](const Bucket& b) { return b.denominator == coef.denominator(); });
    if (it == buckets.end()) {
      buckets.push_back({coef.denominator(), {}});
      it = std::prev(buckets.end());
    }
    it->entries.emplace_back(&tuple, &coef.numerator());
  }
  return buckets;
}

void check_registry(const RegistryPtr& a, const RegistryPtr& b) {
  if (!same_registry(a, b)) throw ConfigurationError("forms over different variable registries");
}

}  // namespace

DifferentialForm::DifferentialForm(RegistryPtr registry, int degree) : registry_(std::move(registry)), degree_(degree) {
  if (degree < 0) throw ConfigurationError("negative form degree");
}

DifferentialForm DifferentialForm::function(const RationalFunction& f) {
  DifferentialForm r(f.registry(), 0);
  r.accumulate({}, f);
  return r;
}

DifferentialForm DifferentialForm::differential(RegistryPtr registry, std::size_t var) {
  if (!registry || var >= registry->size()) throw ConfigurationError("differential of a variable outside the registry");
  DifferentialForm r(registry, 1);
  r.accumulate({static_cast<std::uint8_t>(var)}, RationalFunction::constant(registry, 1));
  return r;
}

DifferentialForm DifferentialForm::basis(RegistryPtr registry, const std::vector<std::size_t>& indices,
                                         const RationalFunction& coefficient) {
  DifferentialForm r(registry, static_cast<int>(indices.size()));
  std::vector<std::size_t> sorted = indices;
  int swaps = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!registry || sorted[i] >= registry->size()) throw ConfigurationError("basis index outside the registry");
    for (std::size_t j = 0; j + 1 < sorted.size() - i; ++j) {
      if (sorted[j] > sorted[j + 1]) {
        std::swap(sorted[j], sorted[j + 1]);
        ++swaps;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) return r;
  }
  IndexTuple t(sorted.begin(), sorted.end());
  r.accumulate(t, swaps % 2 == 0 ? coefficient : -coefficient);
  return r;
}

std::size_t DifferentialForm::coefficient_term_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [t, c] : terms_) n += c.term_count();
  return n;
}

RationalFunction DifferentialForm::coefficient(const IndexTuple& tuple) const {
  auto it = terms_.find(tuple);
  if (it == terms_.end()) return RationalFunction(Polynomial(registry_));
  return it->second;
}

void DifferentialForm::accumulate(const IndexTuple& tuple, const RationalFunction& coefficient) {
  if (static_cast<int>(tuple.size()) != degree_) throw ConfigurationError("basis tuple does not match form degree");
  if (coefficient.is_zero()) return;
  check_registry(registry_ ? registry_ : coefficient.registry(), coefficient.registry());
  auto it = terms_.find(tuple);
  if (it == terms_.end()) {
    terms_.emplace(tuple, coefficient);
    return;
  }
  it->second += coefficient;
  if (it->second.is_zero()) terms_.erase(it);
}

DifferentialForm DifferentialForm::operator-() const {
  DifferentialForm r(*this);
  for (auto& [t, c] : r.terms_) c = -c;
  return r;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& other) {
  if (other.degree_ != degree_) throw ConfigurationError("adding forms of different degrees");
  if (!registry_) registry_ = other.registry_;
  check_registry(registry_, other.registry_);
  for (const auto& [t, c] : other.terms_) accumulate(t, c);
  return *this;
}

DifferentialForm DifferentialForm::scaled(const RationalFunction& f) const {
  DifferentialForm r(registry_, degree_);
  for (const auto& [t, c] : terms_) r.accumulate(t, c * f);
  return r;
}

std::string DifferentialForm::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [t, c] : terms_) {
    if (!out.empty()) out += '\n';
    if (t.empty()) {
      out += "1";
    } else {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) out += '^';
        out += "d" + registry_->name(t[i]);
      }
    }
    out += ": " + c.to_string();
  }
  return out;
}

VectorFieldContraction& VectorFieldContraction::add(std::size_t var, const RationalFunction& coefficient) {
  if (!registry_) registry_ = coefficient.registry();
  if (!registry_ || var >= registry_->size()) throw ConfigurationError("contraction variable outside the registry");
  for (const auto& e : entries_) {
    if (e.var == var) throw ConfigurationError("variable '" + registry_->name(var) + "' appears twice in a contraction");
  }
  if (!coefficient.is_zero()) entries_.push_back({coefficient, var});
  return *this;
}

RationalFunction VectorFieldContraction::component(std::size_t var) const {
  for (const auto& e : entries_) {
    if (e.var == var) return e.coefficient * RationalFunction(Polynomial::variable(registry_, var));
  }
  return RationalFunction(Polynomial(registry_));
}

long VectorFieldContraction::weight(std::size_t var) const {
  for (const auto& e : entries_) {
    if (e.var != var) continue;
    if (!e.coefficient.is_constant()) throw DomainError("contraction weight is not constant");
    Rational c = e.coefficient.numerator().constant_value();
    if (c.get_den() != 1) throw DomainError("contraction weight is not integral");
    return c.get_num().get_si();
  }
  return 0;
}

std::string VectorFieldContraction::to_string() const {
  if (entries_.empty()) return "0";
  std::string out;
  for (const auto& e : entries_) {
    std::string c = e.coefficient.to_string();
    const std::string& v = registry_->name(e.var);
    if (out.empty()) {
      if (c == "1") out += v;
      else if (c == "-1") out += "-" + v;
      else out += "(" + c + ")*" + v;
    } else {
      if (c == "1") out += " + " + v;
      else if (c == "-1") out += " - " + v;
      else out += " + (" + c + ")*" + v;
    }
    out += "*i(" + v + ")";
  }
  return out;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  RegistryPtr reg = a.registry() ? a.registry() : b.registry();
  if (a.registry() && b.registry()) check_registry(a.registry(), b.registry());
  DifferentialForm r(reg, a.degree() + b.degree());
  if (a.is_zero() || b.is_zero()) return r;

  auto ba = bucket_by_denominator(a);
  auto bb = bucket_by_denominator(b);
  IndexTuple merged;
  for (const auto& x : ba) {
    for (const auto& y : bb) {
      std::map<IndexTuple, Polynomial> numerators;
      for (const auto& [ta, na] : x.entries) {
        for (const auto& [tb, nb] : y.entries) {
          int sign = 1;
          if (!merge_tuples(*ta, *tb, merged, sign)) continue;
          Polynomial p = (*na) * (*nb);
          if (sign < 0) p = -p;
          auto it = numerators.find(merged);
          if (it == numerators.end()) numerators.emplace(merged, std::move(p));
          else it->second += p;
        }
      }
      if (numerators.empty()) continue;
      Polynomial den = x.denominator * y.denominator;
      for (auto& [t, num] : numerators) {
        if (num.is_zero()) continue;
        r.accumulate(t, RationalFunction(std::move(num), den));
      }
    }
  }
  return r;
}

DifferentialForm exterior_derivative(const DifferentialForm& a) {
  DifferentialForm r(a.registry(), a.degree() + 1);
  if (a.is_zero()) return r;
  const std::size_t n = a.registry()->size();
  IndexTuple merged;
  for (const auto& [t, c] : a.terms()) {
    const bool polynomial = c.is_polynomial();
    Polynomial dd_cache;
    for (std::size_t v = 0; v < n; ++v) {
      if (std::find(t.begin(), t.end(), v) != t.end()) continue;
      Polynomial dn = c.numerator().partial(v);
      Polynomial dd = polynomial ? Polynomial(a.registry()) : c.denominator().partial(v);
      if (dn.is_zero() && dd.is_zero()) continue;
      int sign = 1;
      merge_tuples({static_cast<std::uint8_t>(v)}, t, merged, sign);
      RationalFunction coef = dd.is_zero()
                                  ? RationalFunction(std::move(dn), c.denominator())
                                  : RationalFunction(dn * c.denominator() - c.numerator() * dd,
                                                     c.denominator() * c.denominator());
      r.accumulate(merged, sign > 0 ? coef : -coef);
    }
  }
  return r;
}

DifferentialForm contract(const VectorFieldContraction& v, const DifferentialForm& a) {
  if (a.degree() == 0) throw DomainError("contraction of a 0-form");
  if (v.registry() && a.registry()) check_registry(v.registry(), a.registry());
  DifferentialForm r(a.registry(), a.degree() - 1);
  std::map<std::size_t, RationalFunction> comps;
  for (const auto& e : v.entries()) comps.emplace(e.var, v.component(e.var));
  for (const auto& [t, c] : a.terms()) {
    for (std::size_t s = 0; s < t.size(); ++s) {
      auto it = comps.find(t[s]);
      if (it == comps.end()) continue;
      IndexTuple rest;
      rest.reserve(t.size() - 1);
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (k != s) rest.push_back(t[k]);
      }
      RationalFunction coef = it->second * c;
      r.accumulate(rest, s % 2 == 0 ? coef : -coef);
    }
  }
  return r;
}

DifferentialForm dlog(const RationalFunction& f) {
  if (f.is_zero()) throw DomainError("dlog of the zero function");
  RegistryPtr reg = f.registry();
  DifferentialForm r(reg, 1);
  if (f.is_constant()) return r;
  const Polynomial& p = f.numerator();
  const Polynomial& q = f.denominator();
  Polynomial den = p * q;
  for (std::size_t v = 0; v < reg->size(); ++v) {
    Polynomial dp = p.partial(v);
    Polynomial dq = q.partial(v);
    if (dp.is_zero() && dq.is_zero()) continue;
    Polynomial num = q * dp - p * dq;
    if (num.is_zero()) continue;
    r.accumulate({static_cast<std::uint8_t>(v)}, RationalFunction(std::move(num), den));
  }
  return r;
}

bool form_equals(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree() != b.degree()) return false;
  for (const auto& [t, c] : a.terms()) {
    if (!(c == b.coefficient(t))) return false;
  }
  for (const auto& [t, c] : b.terms()) {
    if (a.terms().find(t) == a.terms().end()) return false;
  }
  return true;
}

Complex evaluate_form(const DifferentialForm& form, std::span<const Complex> point,
                      const std::vector<std::vector<Complex>>& vectors, double guard) {
  const std::size_t p = static_cast<std::size_t>(form.degree());
  if (vectors.size() != p) throw ConfigurationError("number of tangent vectors does not match the form degree");
  Complex total{0.0, 0.0};
  std::vector<Complex> m(p * p);
  for (const auto& [t, c] : form.terms()) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t s = 0; s < p; ++s) m[r * p + s] = vectors[s].at(t[r]);
    }
    // Determinant by Gaussian elimination with partial pivoting.
    Complex det{1.0, 0.0};
    for (std::size_t k = 0; k < p; ++k) {
      std::size_t piv = k;
      for (std::size_t r = k + 1; r < p; ++r) {
        if (std::abs(m[r * p + k]) > std::abs(m[piv * p + k])) piv = r;
      }
      if (m[piv * p + k] == Complex{}) {
        det = {};
        break;
      }
      if (piv != k) {
        for (std::size_t s = 0; s < p; ++s) std::swap(m[k * p + s], m[piv * p + s]);
        det = -det;
      }
      det *= m[k * p + k];
      for (std::size_t r = k + 1; r < p; ++r) {
        Complex f = m[r * p + k] / m[k * p + k];
        for (std::size_t s = k; s < p; ++s) m[r * p + s] -= f * m[k * p + s];
      }
    }
    if (det == Complex{}) continue;
    total += c.evaluate(point, guard) * det;
  }
  return total;
}

}  // namespace pseudotoric
