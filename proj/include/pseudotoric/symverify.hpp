#pragma once

// Exact verification of the contraction identities.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pseudotoric/models.hpp"

namespace pseudotoric {

enum class IdentityKind { contraction_lemma, dlog };

/// Which list of fibration functions a dlog verdict used.
enum class Reading {
  standard,
  /// General j-formula, also at j = n for the flag.
  general,
  /// Odd quadric j = 2 with B_2/A_m in place of B_2/B_m.
  printed,
};

std::string reading_name(Reading r);

struct IdentityVerdict {
  std::string id;
  IdentityKind kind = IdentityKind::dlog;
  Family family = Family::flag;
  int size = 0;
  /// Divisor index; 0 for the contraction lemma.
  int j = 0;
  std::string label;
  Reading reading = Reading::standard;
  bool equal = false;
  /// Realized global sign: +1 or -1 when equal, 0 otherwise.
  int sign = 0;
  std::optional<int> expected_sign;
  std::string lhs_text;
  std::string rhs_text;
  std::size_t lhs_terms = 0;
  std::size_t rhs_terms = 0;
  double millis = 0.0;

  /// Equal, and with the predicted sign when one is predicted.
  bool pass() const noexcept { return equal && (!expected_sign || *expected_sign == sign); }
};

struct VerifyOptions {
  /// Keep canonical text of both sides (can be large).
  bool keep_text = false;
};

/// Applies the chart's contraction operator string to `form`.
DifferentialForm iterated_contraction(const VarietyChart& chart, const DifferentialForm& form);
/// Right-hand side of the contraction lemma in terms of dA_j.
DifferentialForm contraction_lemma_rhs(const VarietyChart& chart);
/// Unsigned wedge of dlog over the given functions.
DifferentialForm dlog_wedge(const std::vector<RationalFunction>& functions, const RegistryPtr& registry);
/// Fibration functions for a reading; `printed` only differs for the odd quadric at j = 2.
std::vector<RationalFunction> reading_functions(const VarietyChart& chart, const DivisorChoice& d, Reading reading);

IdentityVerdict verify_contraction_lemma(const VarietyChart& chart, const VerifyOptions& options = {});
IdentityVerdict verify_dlog_identity(const VarietyChart& chart, const DivisorChoice& d,
                                     Reading reading = Reading::standard, const VerifyOptions& options = {});

/// True if contracting `lhs` with every V_i gives zero.
bool torus_directions_annihilate(const VarietyChart& chart, const DifferentialForm& lhs);

struct SuiteRequest {
  std::vector<Family> families;
  int size_min = 0;
  int size_max = -1;
  /// Restrict to one divisor index; all legal indices otherwise.
  std::optional<int> j;
  bool lemmas = true;
  bool dlogs = true;
  /// Adds the general-formula verdict at j = n (flag) and the printed reading at j = 2 (odd quadric).
  bool alternate_readings = false;
  unsigned threads = 1;
  VerifyOptions options;
};

inline constexpr int kMaxFlagSize = 8;
inline constexpr int kMaxQuadricSize = 6;

/// One verdict per (family, size, divisor) in deterministic order. Throws ConfigurationError on sizes
/// outside the supported bounds. An empty size range yields no verdicts.
std::vector<IdentityVerdict> run_identity_suite(const SuiteRequest& request);

nlohmann::json to_json(const IdentityVerdict& verdict);

}  // namespace pseudotoric
