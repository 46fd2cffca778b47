#include "pseudotoric/symverify.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "pseudotoric/errors.hpp"

namespace pseudotoric {

namespace {

int parity_sign(int e) { return (e % 2 == 0) ? 1 : -1; }

DifferentialForm d_of(const RationalFunction& f) { return exterior_derivative(DifferentialForm::function(f)); }

DifferentialForm wedge_all(const std::vector<DifferentialForm>& forms, const RegistryPtr& registry) {
  DifferentialForm acc = DifferentialForm::function(RationalFunction::constant(registry, 1));
  for (const auto& f : forms) acc = wedge(acc, f);
  return acc;
}

// +1 if a == b, -1 if a == -b, 0 otherwise.
int compare_up_to_sign(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree() != b.degree()) return 0;
  if (a.is_zero() || b.is_zero()) return (a.is_zero() && b.is_zero()) ? 1 : 0;
  const auto& [tuple, ca] = *a.terms().begin();
  RationalFunction cb = b.coefficient(tuple);
  int sign = 0;
  if (ca == cb) sign = 1;
  else if (ca == -cb) sign = -1;
  if (sign == 0) return 0;
  return form_equals(a, sign > 0 ? b : -b) ? sign : 0;
}

std::string size_key(Family family) { return family == Family::flag ? "n" : "m"; }

std::string make_id(IdentityKind kind, Family family, int size, int j, Reading reading) {
  std::string id = kind == IdentityKind::contraction_lemma ? "lemma" : "dlog";
  if (kind == IdentityKind::dlog && reading != Reading::standard) id += "-" + reading_name(reading);
  id += ":" + family_name(family) + ":" + size_key(family) + "=" + std::to_string(size);
  if (kind == IdentityKind::dlog) id += ":j=" + std::to_string(j);
  return id;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_bounds(Family family, int size) {
  const int hi = family == Family::flag ? kMaxFlagSize : kMaxQuadricSize;
  if (size < minimum_size(family) || size > hi) {
    throw ConfigurationError(family_name(family) + " size " + std::to_string(size) + " outside the supported range " +
                             std::to_string(minimum_size(family)) + ".." + std::to_string(hi));
  }
}

}  // namespace

std::string reading_name(Reading r) {
  switch (r) {
    case Reading::standard:
      return "standard";
    case Reading::general:
      return "general";
    case Reading::printed:
      return "printed";
  }
  return "standard";
}

DifferentialForm iterated_contraction(const VarietyChart& chart, const DifferentialForm& form) {
  DifferentialForm acc = form;
  for (auto it = chart.contraction_order.rbegin(); it != chart.contraction_order.rend(); ++it) {
    acc = contract(chart.contractions.at(static_cast<std::size_t>(*it - 1)), acc);
  }
  return acc;
}

DifferentialForm contraction_lemma_rhs(const VarietyChart& chart) {
  const RegistryPtr& reg = chart.registry;
  const int s = chart.size;
  std::vector<int> idx;
  int lead_sign = 1;
  switch (chart.family) {
    case Family::flag:
      idx.push_back(1);
      for (int j = 3; j <= s; ++j) idx.push_back(j);
      lead_sign = parity_sign(s);
      break;
    case Family::quadric_even:
      for (int j = 1; j <= s; ++j) idx.push_back(j);
      break;
    case Family::quadric_odd:
      throw ConfigurationError("the contraction lemma is stated for the flag and the even quadric only");
  }
  std::map<int, DifferentialForm> dA;
  for (int i : idx) dA.emplace(i, d_of(chart.a(i)));

  DifferentialForm rhs(reg, static_cast<int>(idx.size()) - 1);
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    const int j = idx[pos];
    std::vector<DifferentialForm> rest;
    for (int i : idx) {
      if (i != j) rest.push_back(dA.at(i));
    }
    int sign = 0;
    if (chart.family == Family::flag) sign = (j == 1) ? lead_sign : parity_sign(s + j);
    else sign = parity_sign(s + j);
    RationalFunction coef = chart.a(j) * RationalFunction::constant(reg, sign);
    rhs += wedge_all(rest, reg).scaled(coef);
  }
  return rhs;
}

DifferentialForm dlog_wedge(const std::vector<RationalFunction>& functions, const RegistryPtr& registry) {
  std::vector<DifferentialForm> logs;
  logs.reserve(functions.size());
  for (const auto& f : functions) logs.push_back(dlog(f));
  return wedge_all(logs, registry);
}

std::vector<RationalFunction> reading_functions(const VarietyChart& chart, const DivisorChoice& d, Reading reading) {
  switch (reading) {
    case Reading::standard:
      return fibration_functions(chart, d, FunctionSet::standard);
    case Reading::general:
      return fibration_functions(chart, d, FunctionSet::general);
    case Reading::printed: {
      auto f = fibration_functions(chart, d, FunctionSet::general);
      if (chart.family == Family::quadric_odd && d.j == 2 && chart.size > 2) {
        // The B_2 entry sits right after x_0^2/B_m.
        f.at(1) = chart.b(2) / chart.a(chart.size);
      }
      return f;
    }
  }
  return {};
}

IdentityVerdict verify_contraction_lemma(const VarietyChart& chart, const VerifyOptions& options) {
  auto start = Clock::now();
  IdentityVerdict v;
  v.kind = IdentityKind::contraction_lemma;
  v.family = chart.family;
  v.size = chart.size;
  v.id = make_id(v.kind, chart.family, chart.size, 0, Reading::standard);
  DifferentialForm rhs = contraction_lemma_rhs(chart);
  DifferentialForm lhs = iterated_contraction(chart, chart.omega());
  v.sign = compare_up_to_sign(lhs, rhs);
  v.expected_sign = 1;
  v.equal = v.sign != 0;
  v.lhs_terms = lhs.coefficient_term_count();
  v.rhs_terms = rhs.coefficient_term_count();
  if (options.keep_text) {
    v.lhs_text = lhs.to_string();
    v.rhs_text = rhs.to_string();
  }
  v.millis = elapsed_ms(start);
  return v;
}

IdentityVerdict verify_dlog_identity(const VarietyChart& chart, const DivisorChoice& d, Reading reading,
                                     const VerifyOptions& options) {
  auto start = Clock::now();
  DivisorChoice dd = make_divisor(chart.family, chart.size, d.j);
  IdentityVerdict v;
  v.kind = IdentityKind::dlog;
  v.family = chart.family;
  v.size = chart.size;
  v.j = dd.j;
  v.label = label_name(dd.label);
  v.reading = reading;
  v.id = make_id(v.kind, chart.family, chart.size, dd.j, reading);
  DifferentialForm lhs = iterated_contraction(chart, volume_form(chart, dd));
  DifferentialForm rhs = dlog_wedge(reading_functions(chart, dd, reading), chart.registry);
  v.sign = compare_up_to_sign(lhs, rhs);
  v.equal = v.sign != 0;
  v.expected_sign = expected_dlog_sign(chart, dd,
                                       reading == Reading::standard ? FunctionSet::standard : FunctionSet::general);
  v.lhs_terms = lhs.coefficient_term_count();
  v.rhs_terms = rhs.coefficient_term_count();
  if (options.keep_text) {
    v.lhs_text = lhs.to_string();
    v.rhs_text = rhs.to_string();
  }
  v.millis = elapsed_ms(start);
  return v;
}

bool torus_directions_annihilate(const VarietyChart& chart, const DifferentialForm& lhs) {
  if (lhs.degree() == 0) return true;
  for (const auto& v : chart.contractions) {
    if (!contract(v, lhs).is_zero()) return false;
  }
  return true;
}

std::vector<IdentityVerdict> run_identity_suite(const SuiteRequest& request) {
  struct Task {
    std::size_t chart;
    IdentityKind kind;
    int j;
    Reading reading;
  };
  std::vector<VarietyChart> charts;
  std::vector<Task> tasks;
  for (Family family : request.families) {
    for (int s = request.size_min; s <= request.size_max; ++s) check_bounds(family, s);
  }
  for (Family family : request.families) {
    for (int s = request.size_min; s <= request.size_max; ++s) {
      charts.push_back(build_chart(family, s));
      const std::size_t ci = charts.size() - 1;
      if (request.lemmas && family != Family::quadric_odd) tasks.push_back({ci, IdentityKind::contraction_lemma, 0, Reading::standard});
      if (!request.dlogs) continue;
      int lo = divisor_min(family, s);
      int hi = divisor_max(family, s);
      if (request.j) {
        (void)make_divisor(family, s, *request.j);
        lo = hi = *request.j;
      }
      for (int j = lo; j <= hi; ++j) {
        tasks.push_back({ci, IdentityKind::dlog, j, Reading::standard});
        if (!request.alternate_readings) continue;
        if (family == Family::flag && j == s) tasks.push_back({ci, IdentityKind::dlog, j, Reading::general});
        if (family == Family::quadric_odd && j == 2) tasks.push_back({ci, IdentityKind::dlog, j, Reading::printed});
      }
    }
  }

  std::vector<IdentityVerdict> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const Task& t = tasks[i];
        const VarietyChart& c = charts[t.chart];
        out[i] = t.kind == IdentityKind::contraction_lemma
                     ? verify_contraction_lemma(c, request.options)
                     : verify_dlog_identity(c, make_divisor(c.family, c.size, t.j), t.reading, request.options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1U, std::min<unsigned>(request.threads, static_cast<unsigned>(tasks.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

nlohmann::json to_json(const IdentityVerdict& v) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["id"] = v.id;
  j["kind"] = v.kind == IdentityKind::contraction_lemma ? "contraction-lemma" : "dlog";
  j["family"] = family_name(v.family);
  j["size"] = v.size;
  j["j"] = v.j;
  if (!v.label.empty()) j["label"] = v.label;
  j["reading"] = reading_name(v.reading);
  j["equal"] = v.equal;
  j["sign"] = v.sign;
  j["expected_sign"] = v.expected_sign ? nlohmann::json(*v.expected_sign) : nlohmann::json(nullptr);
  j["pass"] = v.pass();
  j["lhs_terms"] = v.lhs_terms;
  j["rhs_terms"] = v.rhs_terms;
  j["millis"] = v.millis;
  if (!v.lhs_text.empty()) j["lhs"] = v.lhs_text;
  if (!v.rhs_text.empty()) j["rhs"] = v.rhs_text;
  return j;
}

}  // namespace pseudotoric
