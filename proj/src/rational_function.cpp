#include <cmath>

#include "pseudotoric/errors.hpp"
#include "pseudotoric/exactfield.hpp"

namespace pseudotoric {

namespace {

// n == c * d for some rational c, detected term by term.
bool proportional(const Polynomial& n, const Polynomial& d, Rational& factor) {
  if (n.term_count() != d.term_count() || n.is_zero()) return false;
  const auto& nt = n.terms();
  const auto& dt = d.terms();
  factor = nt.front().coefficient / dt.front().coefficient;
  for (std::size_t i = 0; i < nt.size(); ++i) {
    if (!(nt[i].monomial == dt[i].monomial)) return false;
    if (nt[i].coefficient != factor * dt[i].coefficient) return false;
  }
  return true;
}

// big == small * m for a monomial m, detected term by term (both monic).
bool monomial_multiple(const Polynomial& big, const Polynomial& small, Monomial& m) {
  if (big.term_count() != small.term_count() || big.is_zero()) return false;
  const auto& bt = big.terms();
  const auto& st = small.terms();
  const Monomial& b0 = bt.front().monomial;
  const Monomial& s0 = st.front().monomial;
  if (b0.degree <= s0.degree) return false;
  m = Monomial{};
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    if (b0.exponents[i] < s0.exponents[i]) return false;
    m.exponents[i] = static_cast<std::uint8_t>(b0.exponents[i] - s0.exponents[i]);
  }
  m.degree = static_cast<std::uint16_t>(b0.degree - s0.degree);
  for (std::size_t i = 0; i < bt.size(); ++i) {
    if (bt[i].coefficient != st[i].coefficient) return false;
    if (!(bt[i].monomial == st[i].monomial * m)) return false;
  }
  return true;
}

// Lazily grown power table for one substituted variable.
class PowerCache {
 public:
  explicit PowerCache(const Polynomial& base) : powers_{Polynomial(base.registry(), Rational(1)), base} {}

  const Polynomial& get(unsigned e) {
    while (powers_.size() <= e) powers_.push_back(powers_.back() * powers_[1]);
    return powers_[e];
  }

 private:
  std::vector<Polynomial> powers_;
};

struct SubstitutedPolynomial {
  Polynomial numerator;
  Polynomial denominator;
};

SubstitutedPolynomial substitute_polynomial(const Polynomial& p, const Bindings& bindings, const RegistryPtr& reg) {
  std::map<std::size_t, unsigned> max_exp;
  for (const auto& [var, value] : bindings) {
    unsigned e = p.degree_in(var);
    if (e > 0) max_exp[var] = e;
  }
  if (max_exp.empty()) return {p, Polynomial(reg, Rational(1))};

  std::map<std::size_t, PowerCache> num_pow;
  std::map<std::size_t, PowerCache> den_pow;
  Polynomial common_den(reg, Rational(1));
  for (const auto& [var, e] : max_exp) {
    const RationalFunction& b = bindings.at(var);
    num_pow.emplace(var, PowerCache(b.numerator()));
    den_pow.emplace(var, PowerCache(b.denominator()));
    common_den *= den_pow.at(var).get(e);
  }

  Polynomial result(reg);
  for (const auto& t : p.terms()) {
    Monomial kept = t.monomial;
    Polynomial term(reg, Rational(1));
    for (const auto& [var, e_max] : max_exp) {
      unsigned e = t.monomial[var];
      kept.degree = static_cast<std::uint16_t>(kept.degree - e);
      kept.exponents[var] = 0;
      term *= num_pow.at(var).get(e);
      if (e_max > e) term *= den_pow.at(var).get(e_max - e);
    }
    result += Polynomial::monomial(reg, kept, t.coefficient) * term;
  }
  return {std::move(result), std::move(common_den)};
}

}  // namespace

RationalFunction::RationalFunction(Polynomial numerator)
    : numerator_(std::move(numerator)), denominator_(numerator_.registry(), Rational(1)) {}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  normalize();
}

RegistryPtr RationalFunction::registry() const {
  return common_registry(numerator_.registry(), denominator_.registry());
}

void RationalFunction::normalize() {
  if (denominator_.is_zero()) throw DomainError("rational function with zero denominator");
  RegistryPtr reg = registry();
  if (numerator_.is_zero()) {
    numerator_ = Polynomial(reg);
    denominator_ = Polynomial(reg, Rational(1));
    return;
  }
  Monomial n_content = numerator_.monomial_content();
  Monomial d_content = denominator_.monomial_content();
  Monomial g;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    g.exponents[i] = std::min(n_content.exponents[i], d_content.exponents[i]);
    g.degree = static_cast<std::uint16_t>(g.degree + g.exponents[i]);
  }
  if (g.degree > 0) {
    numerator_ = numerator_.divided_by(g);
    denominator_ = denominator_.divided_by(g);
  }
  Rational factor;
  if (proportional(numerator_, denominator_, factor)) {
    numerator_ = Polynomial(reg, factor);
    denominator_ = Polynomial(reg, Rational(1));
    return;
  }
  Rational lead = denominator_.leading_term().coefficient;
  if (lead != 1) {
    Rational inv = 1 / lead;
    numerator_ = numerator_.scaled(inv);
    denominator_ = denominator_.scaled(inv);
  }
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r(*this);
  r.numerator_ = -r.numerator_;
  return r;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.denominator_ == b.denominator_) return {a.numerator_ + b.numerator_, a.denominator_};
  if (a.is_polynomial()) return {a.numerator_ * b.denominator_ + b.numerator_, b.denominator_};
  if (b.is_polynomial()) return {a.numerator_ + b.numerator_ * a.denominator_, a.denominator_};
  Monomial m;
  RegistryPtr reg = a.registry();
  if (monomial_multiple(a.denominator_, b.denominator_, m)) {
    return {a.numerator_ + b.numerator_ * Polynomial::monomial(reg, m, Rational(1)), a.denominator_};
  }
  if (monomial_multiple(b.denominator_, a.denominator_, m)) {
    return {a.numerator_ * Polynomial::monomial(reg, m, Rational(1)) + b.numerator_, b.denominator_};
  }
  return {a.numerator_ * b.denominator_ + b.numerator_ * a.denominator_, a.denominator_ * b.denominator_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) return RationalFunction(Polynomial(common_registry(a.registry(), b.registry())));
  if (a.is_polynomial() && b.is_polynomial()) return RationalFunction(a.numerator_ * b.numerator_);
  if (a.numerator_ == b.denominator_) return {b.numerator_, a.denominator_};
  if (b.numerator_ == a.denominator_) return {a.numerator_, b.denominator_};
  return {a.numerator_ * b.numerator_, a.denominator_ * b.denominator_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw DomainError("division by the zero rational function");
  return a * b.inverse();
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw DomainError("inverse of the zero rational function");
  return {denominator_, numerator_};
}

RationalFunction RationalFunction::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  RationalFunction r(numerator_.pow(static_cast<unsigned>(e)));
  return {r.numerator_, denominator_.pow(static_cast<unsigned>(e))};
}

RationalFunction RationalFunction::partial(std::size_t var) const {
  if (is_polynomial()) return {numerator_.partial(var), denominator_};
  Polynomial dn = numerator_.partial(var);
  Polynomial dd = denominator_.partial(var);
  if (dd.is_zero()) return {dn, denominator_};
  return {dn * denominator_ - numerator_ * dd, denominator_ * denominator_};
}

RationalFunction RationalFunction::partial(std::string_view name) const {
  RegistryPtr reg = registry();
  if (!reg) throw ConfigurationError("unknown variable '" + std::string(name) + "'");
  return partial(reg->index_of(name));
}

Complex RationalFunction::evaluate(std::span<const Complex> point, double guard) const {
  Complex d = denominator_.evaluate(point);
  double mag = std::abs(d);
  if (!(mag >= guard)) {
    throw EvaluationError("evaluation within the pole guard (|den| = " + std::to_string(mag) + ")", mag);
  }
  return numerator_.evaluate(point) / d;
}

std::string RationalFunction::to_string() const {
  if (is_polynomial()) return numerator_.to_string();
  return "(" + numerator_.to_string() + ")/(" + denominator_.to_string() + ")";
}

bool RationalFunction::identical(const RationalFunction& other) const {
  return numerator_ == other.numerator_ && denominator_ == other.denominator_;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  if (a.identical(b)) return true;
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return a.numerator_ * b.denominator_ == b.numerator_ * a.denominator_;
}

RationalFunction substitute(const RationalFunction& f, const Bindings& bindings) {
  RegistryPtr reg = f.registry();
  for (const auto& [var, value] : bindings) {
    if (!reg || var >= reg->size()) throw ConfigurationError("binding for a variable outside the registry");
    reg = common_registry(reg, value.registry());
  }
  if (bindings.empty()) return f;
  auto num = substitute_polynomial(f.numerator(), bindings, reg);
  auto den = substitute_polynomial(f.denominator(), bindings, reg);
  if (den.numerator.is_zero()) throw DomainError("substitution makes the denominator identically zero");
  return {num.numerator * den.denominator, num.denominator * den.numerator};
}

}  // namespace pseudotoric
