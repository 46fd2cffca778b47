#pragma once

// Chart data for the two-step flag variety Fl(1,n-1;n) and the smooth quadrics.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pseudotoric/forms.hpp"

namespace pseudotoric {

enum class Family { flag, quadric_even, quadric_odd };

/// "flag", "quadric-even", "quadric-odd".
std::string family_name(Family family);
/// Accepts the names above plus "even" and "odd"; throws ConfigurationError otherwise.
Family parse_family(std::string_view name);
/// Smallest supported size parameter (n for the flag, m for quadrics).
int minimum_size(Family family);

enum class DivisorLabel { sch, rie, intermediate };

std::string label_name(DivisorLabel label);

struct DivisorChoice {
  int j = 0;
  DivisorLabel label = DivisorLabel::intermediate;
};

/// Legal divisor indices: flag 3..n, even quadric 1..m-1, odd quadric 2..m.
int divisor_min(Family family, int size);
int divisor_max(Family family, int size);
/// Validates j and attaches its label; throws ConfigurationError when out of range.
DivisorChoice make_divisor(Family family, int size, int j);
DivisorChoice schubert_divisor(Family family, int size);
DivisorChoice rietsch_divisor(Family family, int size);

/// One projective factor of the ambient space.
struct AmbientFactor {
  std::vector<std::string> names;
  /// Affine lift of the homogeneous coordinates in free chart coordinates.
  std::vector<RationalFunction> lift;
  /// Torus weight of each homogeneous coordinate in the theta basis.
  std::vector<std::vector<int>> weights;
};

struct VarietyChart {
  Family family = Family::flag;
  int size = 0;
  RegistryPtr registry;
  /// Registry indices of the free coordinates in declared order.
  std::vector<std::size_t> free_variables;
  std::size_t dependent_variable = 0;
  /// Dependent coordinate as a polynomial in the free coordinates.
  RationalFunction dependent_binding;
  /// Defining polynomial of the chart (involves the dependent coordinate).
  Polynomial relation;
  /// V_1..V_k.
  std::vector<VectorFieldContraction> contractions;
  /// Operator string for the iterated contraction, 1-based, leftmost first; the rightmost acts first.
  std::vector<int> contraction_order;
  /// Top-form orientation as registry indices.
  std::vector<std::size_t> orientation;
  std::map<int, RationalFunction> A;
  std::map<int, RationalFunction> B;
  std::vector<AmbientFactor> ambient;
  /// Lie-algebra generators dual to the contraction basis, one row per V_i, in the theta basis.
  std::vector<std::vector<double>> generators;
  /// Homogeneous coordinates of the base map F : X --> Y.
  std::vector<RationalFunction> base_map;

  int dimension() const noexcept { return static_cast<int>(free_variables.size()); }
  int torus_rank() const noexcept { return static_cast<int>(contractions.size()); }
  /// Number of fibration functions, dim X - k.
  int function_count() const noexcept { return dimension() - torus_rank(); }
  std::string name() const;

  const RationalFunction& a(int j) const;
  const RationalFunction& b(int j) const;
  Bindings bindings() const;
  /// The volume form Omega in the family's written order.
  DifferentialForm omega() const;
  /// Registry-ordered point with the dependent coordinate filled in.
  std::vector<Complex> full_point(std::span<const Complex> free_values) const;
};

struct ChartOptions {
  /// Optional permutation of the free coordinates inside the registry (registry slot i holds
  /// declared free coordinate permutation[i]). Orientation and declared order are unaffected.
  std::vector<std::size_t> registry_permutation;
};

VarietyChart build_flag_chart(int n, const ChartOptions& options = {});
VarietyChart build_even_quadric_chart(int m, const ChartOptions& options = {});
VarietyChart build_odd_quadric_chart(int m, const ChartOptions& options = {});
VarietyChart build_chart(Family family, int size, const ChartOptions& options = {});

/// Omega divided by the divisor's defining product, in free coordinates.
DifferentialForm volume_form(const VarietyChart& chart, const DivisorChoice& d);
/// Factors of the divisor's defining product inside the chart, in the written order.
std::vector<RationalFunction> divisor_factors(const VarietyChart& chart, const DivisorChoice& d);
/// Product whose zero set is the divisor inside the chart.
RationalFunction divisor_denominator(const VarietyChart& chart, const DivisorChoice& d);

enum class FunctionSet {
  /// Flag at j = n uses A_1/A_3, A_4/A_3, ..., A_n/A_3; otherwise the general formula.
  standard,
  /// Always the general j-formula.
  general,
};

std::vector<RationalFunction> fibration_functions(const VarietyChart& chart, const DivisorChoice& d,
                                                  FunctionSet set = FunctionSet::standard);
/// Sign predicted for the dlog identity; empty for the odd quadric, whose sign is not fixed.
std::optional<int> expected_dlog_sign(const VarietyChart& chart, const DivisorChoice& d,
                                      FunctionSet set = FunctionSet::standard);

/// Homogeneous tuples, one per ambient factor, for a point given in declared free order.
std::vector<std::vector<Complex>> ambient_embedding(const VarietyChart& chart, std::span<const Complex> free_values,
                                                    double guard = kDefaultDenominatorGuard);
/// |defining equation| at homogeneous tuples, scaled by the squared tuple norms.
double ambient_relation_residual(const VarietyChart& chart, const std::vector<std::vector<Complex>>& tuples);

/// Versioned descriptor: family, size, variable order, bindings and tables as canonical text.
nlohmann::json chart_descriptor(const VarietyChart& chart);

}  // namespace pseudotoric
