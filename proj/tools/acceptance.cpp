// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pseudotoric/combinat.hpp"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/numsym.hpp"
#include "pseudotoric/symverify.hpp"

using namespace pseudotoric;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned threads() {
  if (const char* env = std::getenv("PSEUDOTORIC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

Outcome symbolic_suite() {
  std::vector<IdentityVerdict> all;
  const auto t0 = Clock::now();
  auto add = [&](Family f, int lo, int hi, bool lemmas, bool dlogs) {
    SuiteRequest r;
    r.families = {f};
    r.size_min = lo;
    r.size_max = hi;
    r.lemmas = lemmas;
    r.dlogs = dlogs;
    r.threads = threads();
    auto v = run_identity_suite(r);
    all.insert(all.end(), v.begin(), v.end());
  };
  add(Family::flag, 3, 6, true, true);
  add(Family::flag, 7, 7, true, false);
  add(Family::quadric_even, 2, 5, true, true);
  add(Family::quadric_odd, 2, 5, false, true);
  const double total = seconds_since(t0);

  std::size_t lemmas = 0;
  std::size_t dlogs = 0;
  double slowest = 0.0;
  std::string failed;
  for (const auto& v : all) {
    (v.kind == IdentityKind::contraction_lemma ? lemmas : dlogs) += 1;
    slowest = std::max(slowest, v.millis / 1000.0);
    if (!v.pass() && failed.empty()) failed = v.id;
  }
  // flag: 5 lemmas, 1+2+3+4 dlogs; even: 4 lemmas, 1+2+3+4 dlogs; odd: 1+2+3+4 dlogs.
  const bool counts = lemmas == 9 && dlogs == 30;
  std::ostringstream d;
  d << lemmas << " lemmas, " << dlogs << " dlog identities, slowest " << slowest << " s, total " << total << " s";
  if (!failed.empty()) d << ", first failure " << failed;
  return {failed.empty() && counts && slowest < 60.0 && total < 900.0, d.str()};
}

RationalFunction coordinate(const VarietyChart& chart, const std::string& name) {
  for (const auto& f : chart.ambient) {
    for (std::size_t i = 0; i < f.names.size(); ++i) {
      if (f.names[i] == name) return f.lift[i];
    }
  }
  throw ConfigurationError("no coordinate " + name);
}

Outcome odd_m2_sign() {
  const auto chart = build_odd_quadric_chart(2);
  const auto d = schubert_divisor(Family::quadric_odd, 2);
  const auto v = verify_dlog_identity(chart, d);
  const auto lhs = iterated_contraction(chart, volume_form(chart, d));
  const auto f = coordinate(chart, "x0").pow(2) / (coordinate(chart, "x3") * coordinate(chart, "x4"));
  const auto expected = -dlog_wedge({f}, chart.registry);
  const bool exact = (lhs - expected).is_zero();
  std::ostringstream s;
  s << "verdict equal=" << (v.equal ? "true" : "false") << " sign " << v.sign
    << ", LHS == -dlog(x0^2/(x3*x4)): " << (exact ? "yes" : "no");
  return {v.equal && v.sign == -1 && exact, s.str()};
}

struct NumericCase {
  Family family;
  int size;
};

const std::vector<NumericCase> kNumericCases{{Family::flag, 3},         {Family::flag, 4},
                                             {Family::quadric_even, 2}, {Family::quadric_even, 3},
                                             {Family::quadric_odd, 2},  {Family::quadric_odd, 3}};

std::vector<NumericSuiteResult> numeric_results() {
  std::vector<NumericSuiteResult> out;
  for (const auto& c : kNumericCases) {
    NumericSuiteRequest r;
    r.family = c.family;
    r.size = c.size;
    r.samples = 100;
    r.seed = 20240601;
    r.threads = threads();
    out.push_back(run_numeric_suite(r));
  }
  return out;
}

Outcome numeric_criterion(const std::vector<NumericSuiteResult>& results, const std::vector<std::string>& checks,
                          bool with_time) {
  bool ok = true;
  std::ostringstream s;
  for (const auto& r : results) {
    bool case_ok = r.points >= 100;
    if (with_time) case_ok = case_ok && r.millis < 300000.0;
    s << (s.tellp() > 0 ? "; " : "") << r.case_id;
    for (const auto& name : checks) {
      const auto& rep = r.report(name);
      case_ok = case_ok && rep.pass();
      s << ' ' << name << '=' << rep.max_residual;
    }
    if (!case_ok) s << " [fail]";
    ok = ok && case_ok;
  }
  return {ok, s.str()};
}

Outcome tables() {
  bool ok = true;
  std::size_t rows = 0;
  auto expect = [&](const TermCountCell& c, int total, std::array<int, 3> parts, const std::string& formula) {
    ok = ok && c.total == total && c.parts == parts && c.formula == formula &&
         c.parts[0] + c.parts[1] + c.parts[2] == c.total;
  };
  for (const auto& r : term_count_table(Family::flag, 3, 10)) {
    const int n = r.size;
    expect(r.givental, 2 * n, {4, 2 * (n - 3), 2}, "2n = 4 + 2(n-3) + 2");
    expect(r.schubert, 2 * n - 2, {2, 2 * (n - 3), 2}, "2n - 2 = 2 + 2(n-3) + 2");
    expect(r.rietsch, n + 1, {2, n - 3, 2}, "n + 1 = 2 + (n-3) + 2");
    ++rows;
  }
  for (const auto& r : term_count_table(Family::quadric_even, 2, 8)) {
    const int m = r.size;
    expect(r.givental, 2 * m + 2, {4, 2 * (m - 2), 2}, "2m + 2 = 4 + 2(m-2) + 2");
    expect(r.schubert, 2 * m, {2, 2 * (m - 2), 2}, "2m = 2 + 2(m-2) + 2");
    expect(r.rietsch, m + 2, {2, m - 2, 2}, "m + 2 = 2 + (m-2) + 2");
    ++rows;
  }
  for (const auto& r : term_count_table(Family::quadric_odd, 2, 8)) {
    const int m = r.size;
    expect(r.givental, 2 * m + 1, {4, 2 * (m - 2), 1}, "2m + 1 = 4 + 2(m-2) + 1");
    expect(r.schubert, 2 * m - 1, {2, 2 * (m - 2), 1}, "2m - 1 = 2 + 2(m-2) + 1");
    expect(r.rietsch, m + 1, {2, m - 2, 1}, "m + 1 = 2 + (m-2) + 1");
    ++rows;
  }
  ok = ok && rows == 22;
  return {ok, std::to_string(rows) + " rows checked"};
}

Outcome superpotentials() {
  const std::vector<std::string> w3{"x2/x1", "x13/x12", "q1*x13/x23", "q2*x2/x3"};
  const std::vector<std::string> w4{"x3/x1", "x134/x123", "q1*x134/x234", "q2*x3/x4", "x2*x124/(x3*x124 - x4*x123)"};
  auto terms = [](int n) {
    std::vector<std::string> v;
    for (const auto& t : rietsch_superpotential(n).terms) v.push_back(t.to_string());
    return v;
  };
  const auto a = terms(3);
  const auto b = terms(4);
  const bool counts = static_cast<int>(a.size()) == term_count_table(Family::flag, 3, 3)[0].rietsch.total &&
                      static_cast<int>(b.size()) == term_count_table(Family::flag, 4, 4)[0].rietsch.total;
  std::ostringstream s;
  s << "n=3: " << a.size() << " terms, n=4: " << b.size() << " terms";
  return {a == w3 && b == w4 && counts, s.str()};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::vector<NumericSuiteResult> numeric;
  auto numeric_once = [&]() -> const std::vector<NumericSuiteResult>& {
    if (numeric.empty()) numeric = numeric_results();
    return numeric;
  };

  criteria.emplace_back("symbolic identity suite", symbolic_suite);
  criteria.emplace_back("odd quadric m=2 Schubert sign", odd_m2_sign);
  criteria.emplace_back("Poisson brackets", [&] { return numeric_criterion(numeric_once(), {"poisson"}, true); });
  criteria.emplace_back("Lagrangian and special residuals",
                        [&] { return numeric_criterion(numeric_once(), {"lagrangian", "special"}, false); });
  criteria.emplace_back("horizontal proportionality", [&] {
    return numeric_criterion(numeric_once(), {"proportionality", "scalar-positive"}, false);
  });
  criteria.emplace_back("symbolic-numeric dlog cross-check",
                        [&] { return numeric_criterion(numeric_once(), {"crosscheck"}, false); });
  criteria.emplace_back("term-count tables", tables);
  criteria.emplace_back("Rietsch superpotentials", superpotentials);

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto o = guarded(criteria[i].second);
    all = all && o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
