#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "pseudotoric/errors.hpp"
#include "pseudotoric/exactfield.hpp"

namespace pseudotoric {

namespace {

bool term_greater(const Polynomial::Term& a, const Polynomial::Term& b) {
  return grlex_less(b.monomial, a.monomial);
}

bool divides(const Monomial& d, const Monomial& m) {
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    if (d.exponents[i] > m.exponents[i]) return false;
  }
  return true;
}

Monomial quotient(const Monomial& m, const Monomial& d) {
  Monomial q;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    q.exponents[i] = static_cast<std::uint8_t>(m.exponents[i] - d.exponents[i]);
  }
  q.degree = static_cast<std::uint16_t>(m.degree - d.degree);
  return q;
}

// Merge two descending term lists; `sign` = -1 subtracts b.
std::vector<Polynomial::Term> merge_terms(const std::vector<Polynomial::Term>& a,
                                          const std::vector<Polynomial::Term>& b, int sign) {
  std::vector<Polynomial::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && grlex_less(b[j].monomial, a[i].monomial))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || grlex_less(a[i].monomial, b[j].monomial)) {
      out.push_back({b[j].monomial, sign > 0 ? b[j].coefficient : Rational(-b[j].coefficient)});
      ++j;
    } else {
      Rational c = sign > 0 ? Rational(a[i].coefficient + b[j].coefficient)
                            : Rational(a[i].coefficient - b[j].coefficient);
      if (sgn(c) != 0) out.push_back({a[i].monomial, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

RegistryPtr common_registry(const RegistryPtr& a, const RegistryPtr& b) {
  if (!a) return b;
  if (!b) return a;
  if (!same_registry(a, b)) throw ConfigurationError("operands use different variable registries");
  return a;
}

std::vector<Polynomial::Term> normalize_terms(std::vector<Polynomial::Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  std::vector<Polynomial::Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().monomial == t.monomial) {
      out.back().coefficient += t.coefficient;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const Polynomial::Term& t) { return sgn(t.coefficient) == 0; });
  for (auto& t : out) t.coefficient.canonicalize();
  return out;
}

Polynomial::Polynomial(RegistryPtr registry) : registry_(std::move(registry)) {}

Polynomial::Polynomial(RegistryPtr registry, const Rational& constant) : registry_(std::move(registry)) {
  if (sgn(constant) != 0) terms_.push_back({Monomial{}, constant});
}

Polynomial Polynomial::variable(RegistryPtr registry, std::size_t index) {
  if (!registry || index >= registry->size()) throw ConfigurationError("variable index out of range");
  Monomial m;
  m.raise(index, 1);
  return monomial(std::move(registry), m, Rational(1));
}

Polynomial Polynomial::variable(RegistryPtr registry, std::string_view name) {
  if (!registry) throw ConfigurationError("variable lookup without a registry");
  std::size_t index = registry->index_of(name);
  return variable(std::move(registry), index);
}

Polynomial Polynomial::monomial(RegistryPtr registry, const Monomial& m, const Rational& c) {
  Polynomial p(std::move(registry));
  if (sgn(c) != 0) p.terms_.push_back({m, c});
  return p;
}

Polynomial Polynomial::from_terms(RegistryPtr registry, std::vector<Term> terms) {
  Polynomial p(std::move(registry));
  std::size_t n = p.registry_ ? p.registry_->size() : 0;
  for (const auto& t : terms) {
    for (std::size_t i = n; i < kMaxVariables; ++i) {
      if (t.monomial.exponents[i] != 0) throw ConfigurationError("exponent outside the registry");
    }
  }
  p.terms_ = normalize_terms(std::move(terms));
  return p;
}

bool Polynomial::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().monomial.degree == 0);
}

Rational Polynomial::constant_value() const {
  if (!is_constant()) throw DomainError("polynomial is not constant: " + to_string());
  return terms_.empty() ? Rational(0) : terms_.front().coefficient;
}

const Polynomial::Term& Polynomial::leading_term() const {
  if (terms_.empty()) throw DomainError("zero polynomial has no leading term");
  return terms_.front();
}

int Polynomial::total_degree() const noexcept { return terms_.empty() ? -1 : terms_.front().monomial.degree; }

bool Polynomial::depends_on(std::size_t var) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [var](const Term& t) { return t.monomial[var] != 0; });
}

unsigned Polynomial::degree_in(std::size_t var) const noexcept {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.monomial[var]);
  return d;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return Monomial{};
  Monomial g = terms_.front().monomial;
  for (const auto& t : terms_) {
    unsigned deg = 0;
    for (std::size_t i = 0; i < kMaxVariables; ++i) {
      g.exponents[i] = std::min(g.exponents[i], t.monomial.exponents[i]);
      deg += g.exponents[i];
    }
    g.degree = static_cast<std::uint16_t>(deg);
  }
  return g;
}

Polynomial Polynomial::divided_by(const Monomial& m) const {
  Polynomial out(registry_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!divides(m, t.monomial)) throw DomainError("monomial does not divide polynomial");
    out.terms_.push_back({quotient(t.monomial, m), t.coefficient});
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& t : out.terms_) t.coefficient = -t.coefficient;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  registry_ = common_registry(registry_, other.registry_);
  terms_ = merge_terms(terms_, other.terms_, +1);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  registry_ = common_registry(registry_, other.registry_);
  terms_ = merge_terms(terms_, other.terms_, -1);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) { return *this = *this * other; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(common_registry(a.registry_, b.registry_));
  if (a.is_zero() || b.is_zero()) return out;
  // Multiplying by a monomial preserves the monomial order.
  if (a.is_monomial() || b.is_monomial()) {
    const auto& mono = a.is_monomial() ? a.terms_.front() : b.terms_.front();
    const auto& poly = a.is_monomial() ? b : a;
    out.terms_.reserve(poly.terms_.size());
    for (const auto& t : poly.terms_) {
      out.terms_.push_back({t.monomial * mono.monomial, t.coefficient * mono.coefficient});
    }
    return out;
  }
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  Rational prod;
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      mpq_mul(prod.get_mpq_t(), s.coefficient.get_mpq_t(), t.coefficient.get_mpq_t());
      auto [it, inserted] = acc.try_emplace(s.monomial * t.monomial, prod);
      if (!inserted) mpq_add(it->second.get_mpq_t(), it->second.get_mpq_t(), prod.get_mpq_t());
    }
  }
  out.terms_.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (sgn(c) != 0) out.terms_.push_back({m, std::move(c)});
  }
  std::sort(out.terms_.begin(), out.terms_.end(), term_greater);
  return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (sgn(c) == 0) return Polynomial(registry_);
  Polynomial out(*this);
  for (auto& t : out.terms_) t.coefficient *= c;
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result(registry_, Rational(1));
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::partial(std::size_t var) const {
  if (registry_ && var >= registry_->size()) throw ConfigurationError("variable index out of range");
  if (!registry_ && !is_constant()) throw ConfigurationError("partial derivative without a registry");
  // Lowering one slot of every surviving term preserves grlex order.
  Polynomial out(registry_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    unsigned e = t.monomial[var];
    if (e == 0) continue;
    Monomial m = t.monomial;
    m.exponents[var] = static_cast<std::uint8_t>(e - 1);
    m.degree = static_cast<std::uint16_t>(m.degree - 1);
    out.terms_.push_back({m, t.coefficient * e});
  }
  return out;
}

Polynomial Polynomial::partial(std::string_view name) const {
  if (!registry_) throw ConfigurationError("unknown variable '" + std::string(name) + "'");
  return partial(registry_->index_of(name));
}

std::optional<Polynomial> Polynomial::exact_quotient(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw DomainError("division by the zero polynomial");
  RegistryPtr reg = common_registry(registry_, divisor.registry_);
  Polynomial remainder = *this;
  std::vector<Term> q;
  const Term& lead = divisor.terms_.front();
  while (!remainder.is_zero()) {
    const Term& r = remainder.terms_.front();
    if (!divides(lead.monomial, r.monomial)) return std::nullopt;
    Term step{quotient(r.monomial, lead.monomial), r.coefficient / lead.coefficient};
    remainder -= Polynomial::monomial(reg, step.monomial, step.coefficient) * divisor;
    q.push_back(std::move(step));
  }
  return from_terms(reg, std::move(q));
}

Complex Polynomial::evaluate(std::span<const Complex> point) const {
  std::size_t n = registry_ ? registry_->size() : 0;
  if (point.size() != n) {
    throw ConfigurationError("evaluation point has " + std::to_string(point.size()) + " entries, registry has " +
                             std::to_string(n));
  }
  Complex sum{0.0, 0.0};
  for (const auto& t : terms_) {
    Complex v{t.coefficient.get_d(), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (unsigned e = 0; e < t.monomial[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coefficient.get_str();
    for (std::size_t i = 0; registry_ && i < registry_->size(); ++i) {
      if (t.monomial[i] != 0) os << '*' << registry_->name(i) << '^' << unsigned(t.monomial[i]);
    }
  }
  return os.str();
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (!a.is_constant() || !b.is_constant()) common_registry(a.registry_, b.registry_);
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].monomial == b.terms_[i].monomial) || a.terms_[i].coefficient != b.terms_[i].coefficient) {
      return false;
    }
  }
  return true;
}

Polynomial substitute(const Polynomial& p, const std::map<std::size_t, Polynomial>& bindings) {
  Bindings rf;
  for (const auto& [var, value] : bindings) rf.emplace(var, RationalFunction(value));
  RationalFunction r = substitute(RationalFunction(p), rf);
  if (!r.is_polynomial()) throw DomainError("polynomial substitution produced a rational function");
  return r.numerator().scaled(1 / r.denominator().constant_value());
}

}  // namespace pseudotoric
