#pragma once

// Exact multivariate polynomials and rational functions over Q.

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudotoric/registry.hpp"

namespace pseudotoric {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Default pole guard for numeric evaluation.
inline constexpr double kDefaultDenominatorGuard = 1e-8;

class Polynomial {
 public:
  struct Term {
    Monomial monomial;
    Rational coefficient;
  };

  /// The zero polynomial with no registry; adopts the registry of the first operand it meets.
  Polynomial() = default;
  explicit Polynomial(RegistryPtr registry);
  Polynomial(RegistryPtr registry, const Rational& constant);

  static Polynomial constant(RegistryPtr registry, const Rational& c) { return {std::move(registry), c}; }
  static Polynomial variable(RegistryPtr registry, std::size_t index);
  static Polynomial variable(RegistryPtr registry, std::string_view name);
  static Polynomial monomial(RegistryPtr registry, const Monomial& m, const Rational& c);
  /// Builds from arbitrary (unsorted, duplicated, zero) terms; result is normalized.
  static Polynomial from_terms(RegistryPtr registry, std::vector<Term> terms);

  const RegistryPtr& registry() const noexcept { return registry_; }
  /// Terms in strictly descending graded-lex order, all coefficients nonzero.
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  bool is_monomial() const noexcept { return terms_.size() == 1; }
  Rational constant_value() const;  // throws unless is_constant()
  const Term& leading_term() const;
  int total_degree() const noexcept;
  bool depends_on(std::size_t var) const noexcept;
  /// Largest exponent of `var` over all terms.
  unsigned degree_in(std::size_t var) const noexcept;

  /// Greatest common monomial divisor of all terms (identity monomial for zero).
  Monomial monomial_content() const;
  /// Exact division by a monomial that divides every term.
  Polynomial divided_by(const Monomial& m) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(unsigned e) const;

  /// Partial derivative with respect to registry slot `var`.
  Polynomial partial(std::size_t var) const;
  Polynomial partial(std::string_view name) const;

  /// q with *this == divisor * q, if the division is exact.
  std::optional<Polynomial> exact_quotient(const Polynomial& divisor) const;

  Complex evaluate(std::span<const Complex> point) const;

  /// Canonical text: descending grlex terms, explicit exponents, e.g. "2*z2^2*zh2^1 + -1/3*z3^1 + 1".
  std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);

 private:
  RegistryPtr registry_;
  std::vector<Term> terms_;
};

/// Sorts, merges equal monomials and drops zero coefficients. Idempotent.
std::vector<Polynomial::Term> normalize_terms(std::vector<Polynomial::Term> terms);

/// Shared registry of two operands; throws ConfigurationError on mismatch.
RegistryPtr common_registry(const RegistryPtr& a, const RegistryPtr& b);

class RationalFunction {
 public:
  RationalFunction() : denominator_(RegistryPtr{}, Rational(1)) {}
  RationalFunction(Polynomial numerator);  // NOLINT(google-explicit-constructor)
  RationalFunction(Polynomial numerator, Polynomial denominator);

  static RationalFunction constant(RegistryPtr registry, const Rational& c) {
    return RationalFunction(Polynomial(std::move(registry), c));
  }

  const Polynomial& numerator() const noexcept { return numerator_; }
  const Polynomial& denominator() const noexcept { return denominator_; }
  RegistryPtr registry() const;

  bool is_zero() const noexcept { return numerator_.is_zero(); }
  bool is_polynomial() const noexcept { return denominator_.is_constant(); }
  bool is_constant() const noexcept { return numerator_.is_constant() && denominator_.is_constant(); }
  std::size_t term_count() const noexcept { return numerator_.term_count() + denominator_.term_count(); }

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  RationalFunction& operator+=(const RationalFunction& b) { return *this = *this + b; }
  RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }
  RationalFunction inverse() const;
  RationalFunction pow(int e) const;

  RationalFunction partial(std::size_t var) const;
  RationalFunction partial(std::string_view name) const;

  /// Throws EvaluationError if |denominator| < guard at `point`.
  Complex evaluate(std::span<const Complex> point, double guard = kDefaultDenominatorGuard) const;

  /// "num" for polynomials, "(num)/(den)" otherwise.
  std::string to_string() const;

  /// Same canonical representation (stronger than mathematical equality).
  bool identical(const RationalFunction& other) const;

  /// Mathematical equality by cross-multiplication.
  friend bool operator==(const RationalFunction& a, const RationalFunction& b);

 private:
  void normalize();

  Polynomial numerator_;
  Polynomial denominator_;
};

/// Variable slot → replacement. Replacements must live in the same registry.
using Bindings = std::map<std::size_t, RationalFunction>;

Polynomial substitute(const Polynomial& p, const std::map<std::size_t, Polynomial>& bindings);
RationalFunction substitute(const RationalFunction& f, const Bindings& bindings);

}  // namespace pseudotoric
