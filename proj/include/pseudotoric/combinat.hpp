#pragma once

// Term-count tables, non-free loci, wall point clouds and the Rietsch superpotentials for n = 3, 4.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pseudotoric/numsym.hpp"

namespace pseudotoric {

struct TermCountCell {
  int total = 0;
  /// total = parts[0] + parts[1] + parts[2].
  std::array<int, 3> parts{};
  /// Closed form as printed, e.g. "2n - 2 = 2 + 2(n-3) + 2".
  std::string formula;
};

struct TermCountRow {
  Family family = Family::flag;
  /// n for the flag, m for quadrics.
  int size = 0;
  int dimension = 0;
  TermCountCell givental;
  TermCountCell schubert;
  TermCountCell rietsch;
};

inline constexpr int kMaxTableSize = 1000;

/// One row per size in [size_min, size_max]; empty when size_min > size_max.
std::vector<TermCountRow> term_count_table(Family family, int size_min, int size_max);
nlohmann::json to_json(const TermCountRow& row);
/// Header plus one line per row.
void write_csv(std::ostream& out, const std::vector<TermCountRow>& rows);

struct NonfreeComponent {
  /// Flag: j for {x_j = xh_j = 0}, 1..n. Even quadric: i for {x_2i = x_2i+1 = 0}, 0..m.
  /// Odd quadric: j for {x_2j-1 = x_2j = 0}, 1..m, and 0 for {x_0 = 0}.
  int index = 0;
  /// Homogeneous coordinates set to zero.
  std::vector<std::string> zero_coordinates;
  std::string label() const;
};

std::vector<NonfreeComponent> nonfree_components(const VarietyChart& chart);
/// Finds a component by index; throws ConfigurationError if absent.
const NonfreeComponent& find_component(const std::vector<NonfreeComponent>& components, int index);

/// Complex codimension in X of the component's zero set, from Jacobian ranks at `trials` random
/// points of the zero set in the ambient space. Returns the smallest codimension seen.
int component_codimension(const VarietyChart& chart, const NonfreeComponent& component, std::uint64_t seed,
                          int trials = 5);

/// Standard fibration functions that vanish identically on the component.
std::vector<bool> forced_zero_functions(const VarietyChart& chart, const DivisorChoice& d,
                                        const NonfreeComponent& component);

struct WallCloud {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Set when the component misses the chart or lies in D, or sampling found nothing.
  bool empty_warning = false;
  /// Some point used up the rejection budget.
  bool sampling_exhausted = false;
  std::string warning;
};

struct WallRequest {
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  NumericConfig config;
};

/// Samples component minus D in the chart and maps each point through rho.
WallCloud wall_point_cloud(const VarietyChart& chart, const DivisorChoice& d, const NonfreeComponent& component,
                           const WallRequest& request = {});
void write_csv(std::ostream& out, const WallCloud& cloud);

struct SuperpotentialTerm {
  /// 0 for no quantum parameter, 1 for q_1, 2 for q_2.
  int quantum = 0;
  std::vector<std::string> numerator;
  /// Signed monomials; a single entry for monomial denominators.
  std::vector<std::pair<int, std::vector<std::string>>> denominator;

  /// "q1*x13/x23", "x2*x124/(x3*x124 - x4*x123)".
  std::string to_string() const;
  Complex evaluate(const std::map<std::string, Complex>& plucker, double q1, double q2,
                   double guard = kDefaultDenominatorGuard) const;
};

struct SuperpotentialExpr {
  int n = 0;
  std::vector<SuperpotentialTerm> terms;
  /// Factors of D^Rie.
  std::vector<std::string> divisor;

  std::string to_string() const;
  Complex evaluate(const std::map<std::string, Complex>& plucker, double q1, double q2,
                   double guard = kDefaultDenominatorGuard) const;
};

/// Rietsch's mirror for Fl(1, n-1; n), n in {3, 4}; ConfigurationError otherwise.
SuperpotentialExpr rietsch_superpotential(int n);
nlohmann::json to_json(const SuperpotentialExpr& w);

/// Plücker coordinates x_i and x_{i1..i(n-1)} of the flag spanned by the columns of an n x (n-1)
/// matrix whose first column spans the line.
std::map<std::string, Complex> flag_plucker(const Eigen::MatrixXcd& frame);

}  // namespace pseudotoric
