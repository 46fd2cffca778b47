#include "pseudotoric/registry.hpp"

#include <algorithm>
#include <set>

#include "pseudotoric/errors.hpp"

namespace pseudotoric {

VariableRegistry::VariableRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > kMaxVariables) {
    throw ConfigurationError("variable registry holds " + std::to_string(names_.size()) +
                             " names; at most " + std::to_string(kMaxVariables) + " are supported");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigurationError("empty variable name");
    if (!seen.insert(n).second) throw ConfigurationError("duplicate variable name '" + n + "'");
  }
}

std::size_t VariableRegistry::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ConfigurationError("unknown variable '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

bool VariableRegistry::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

RegistryPtr make_registry(std::vector<std::string> names) {
  return std::make_shared<const VariableRegistry>(std::move(names));
}

bool same_registry(const RegistryPtr& a, const RegistryPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void Monomial::raise(std::size_t i, unsigned by) {
  unsigned e = exponents[i] + by;
  if (e > 255U) throw DomainError("monomial exponent overflow");
  exponents[i] = static_cast<std::uint8_t>(e);
  degree = static_cast<std::uint16_t>(degree + by);
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    unsigned e = unsigned(a.exponents[i]) + b.exponents[i];
    if (e > 255U) throw DomainError("monomial exponent overflow");
    r.exponents[i] = static_cast<std::uint8_t>(e);
  }
  r.degree = static_cast<std::uint16_t>(a.degree + b.degree);
  return r;
}

}  // namespace pseudotoric
