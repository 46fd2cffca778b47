#pragma once

// Exterior algebra over RationalFunction coefficients.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pseudotoric/exactfield.hpp"

namespace pseudotoric {

/// Strictly increasing registry indices naming a basis element dz_{i1} ^ ... ^ dz_{ip}.
using IndexTuple = std::vector<std::uint8_t>;

class DifferentialForm {
 public:
  DifferentialForm(RegistryPtr registry, int degree);

  /// The 0-form f.
  static DifferentialForm function(const RationalFunction& f);
  /// dz_var.
  static DifferentialForm differential(RegistryPtr registry, std::size_t var);
  /// coefficient * dz_{i1} ^ ... ^ dz_{ip} for indices in any order; zero if an index repeats.
  static DifferentialForm basis(RegistryPtr registry, const std::vector<std::size_t>& indices,
                                const RationalFunction& coefficient);

  const RegistryPtr& registry() const noexcept { return registry_; }
  int degree() const noexcept { return degree_; }
  const std::map<IndexTuple, RationalFunction>& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  /// Total number of polynomial terms across all coefficients.
  std::size_t coefficient_term_count() const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient of the given increasing tuple (zero if absent).
  RationalFunction coefficient(const IndexTuple& tuple) const;

  DifferentialForm operator-() const;
  DifferentialForm& operator+=(const DifferentialForm& other);
  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
  friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a += -b; }
  /// Multiplication by a 0-form coefficient.
  DifferentialForm scaled(const RationalFunction& f) const;

  /// One "dz2^dzh2: coefficient" line per term in tuple order; "0" for the zero form.
  std::string to_string() const;

  /// Adds coefficient * dz_tuple for an already increasing tuple.
  void accumulate(const IndexTuple& tuple, const RationalFunction& coefficient);

 private:
  RegistryPtr registry_;
  int degree_;
  std::map<IndexTuple, RationalFunction> terms_;
};

/// iota_V = sum_y c_y * y * iota_{d/dy}: the holomorphic Euler-type field of a torus weight.
class VectorFieldContraction {
 public:
  struct Entry {
    RationalFunction coefficient;
    std::size_t var;
  };

  VectorFieldContraction() = default;
  explicit VectorFieldContraction(RegistryPtr registry) : registry_(std::move(registry)) {}

  /// Adds c * var * iota_var; variables must be distinct.
  VectorFieldContraction& add(std::size_t var, const RationalFunction& coefficient);

  const RegistryPtr& registry() const noexcept { return registry_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  /// Component of the field along d/d var, i.e. c_var * var (zero if absent).
  RationalFunction component(std::size_t var) const;
  /// Integer weight of var (the coefficient c_var), 0 if absent. Throws if non-integral.
  long weight(std::size_t var) const;

  /// Text form "z2*i(z2) - zh2*i(zh2)".
  std::string to_string() const;

 private:
  RegistryPtr registry_;
  std::vector<Entry> entries_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_derivative(const DifferentialForm& a);
/// Left contraction: V enters the first slot. Throws DomainError on 0-forms.
DifferentialForm contract(const VectorFieldContraction& v, const DifferentialForm& a);
/// df / f as a 1-form. Throws DomainError for f = 0.
DifferentialForm dlog(const RationalFunction& f);
/// Exact equality via cross-multiplied coefficients; false for differing degrees.
bool form_equals(const DifferentialForm& a, const DifferentialForm& b);

/// Value of the form at `point` on tangent vectors given by their dz-components
/// (one entry per registry slot each). Number of vectors must equal the degree.
Complex evaluate_form(const DifferentialForm& form, std::span<const Complex> point,
                      const std::vector<std::vector<Complex>>& vectors, double guard = kDefaultDenominatorGuard);

}  // namespace pseudotoric
