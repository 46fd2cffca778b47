#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pseudotoric {

/// Upper bound on chart variables. Flag n = 8 needs 14, quadric m = 6 needs 13.
inline constexpr std::size_t kMaxVariables = 16;

/// Ordered list of variable names shared by every polynomial of one chart.
class VariableRegistry {
 public:
  explicit VariableRegistry(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Index of `name`; throws ConfigurationError if absent.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  bool operator==(const VariableRegistry& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

using RegistryPtr = std::shared_ptr<const VariableRegistry>;

RegistryPtr make_registry(std::vector<std::string> names);

/// True if both pointers denote the same ordered variable list.
bool same_registry(const RegistryPtr& a, const RegistryPtr& b);

/// Exponent vector with inline storage; slots past the registry size stay zero.
struct Monomial {
  std::array<std::uint8_t, kMaxVariables> exponents{};
  std::uint16_t degree = 0;

  std::uint8_t operator[](std::size_t i) const { return exponents[i]; }

  /// Increments slot `i` by `by`; throws DomainError on exponent overflow.
  void raise(std::size_t i, unsigned by);

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.degree == b.degree && a.exponents == b.exponents;
  }

  /// Product of monomials (sum of exponents).
  friend Monomial operator*(const Monomial& a, const Monomial& b);
};

/// Graded lexicographic order: total degree first, then the first differing exponent.
inline bool grlex_less(const Monomial& a, const Monomial& b) {
  if (a.degree != b.degree) return a.degree < b.degree;
  return std::memcmp(a.exponents.data(), b.exponents.data(), kMaxVariables) < 0;
}

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::memcpy(&lo, m.exponents.data(), 8);
    std::memcpy(&hi, m.exponents.data() + 8, 8);
    std::uint64_t h = lo * 0x9E3779B97F4A7C15ULL;
    h ^= hi + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace pseudotoric
