#include "pseudotoric/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pseudotoric/combinat.hpp"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/numsym.hpp"
#include "pseudotoric/symverify.hpp"

namespace pseudotoric::cli {
namespace {

constexpr std::size_t kMaxSamples = 10'000'000;
constexpr unsigned kMaxThreads = 1024;

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigurationError("malformed " + what + " '" + text + "'");
  }
  return v;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw ConfigurationError("unknown format '" + s + "' (expected json, csv, text)");
}

Format default_format(const std::string& command) {
  if (command == "tables") return Format::text;
  if (command == "walls") return Format::csv;
  return Format::json;
}

/// Divisor indices for one size.
std::vector<int> divisor_indices(Family family, int size, const std::string& divisor) {
  if (divisor == "all") {
    std::vector<int> v;
    for (int j = divisor_min(family, size); j <= divisor_max(family, size); ++j) v.push_back(j);
    return v;
  }
  if (divisor == "Sch") return {schubert_divisor(family, size).j};
  if (divisor == "Rie") return {rietsch_divisor(family, size).j};
  return {make_divisor(family, size, parse_int(divisor, "divisor")).j};
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

/// Shortest round-trip text.
std::string number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// -------------------------------------------------------------------------------------------

int cmd_verify(const RunConfig& c, std::ostream& out) {
  std::vector<IdentityVerdict> verdicts;
  auto run_suite = [&](int lo, int hi, std::optional<int> j, bool lemmas) {
    SuiteRequest r;
    r.families = {c.family};
    r.size_min = lo;
    r.size_max = hi;
    r.j = j;
    r.lemmas = lemmas;
    r.alternate_readings = c.readings;
    r.threads = c.threads;
    auto v = run_identity_suite(r);
    verdicts.insert(verdicts.end(), v.begin(), v.end());
  };
  if (c.divisor == "all") {
    run_suite(c.size_min, c.size_max, std::nullopt, true);
  } else {
    for (int s = c.size_min; s <= c.size_max; ++s) {
      for (int j : divisor_indices(c.family, s, c.divisor)) run_suite(s, s, j, false);
    }
  }

  bool ok = true;
  if (c.format == Format::csv) {
    out << "id,kind,family,size,j,label,reading,equal,sign,expected_sign,pass,lhs_terms,rhs_terms"
        << (c.timings ? ",millis" : "") << '\n';
  }
  for (const auto& v : verdicts) {
    ok = ok && v.pass();
    const bool lemma = v.kind == IdentityKind::contraction_lemma;
    switch (c.format) {
      case Format::json: {
        auto j = to_json(v);
        if (!c.timings) j.erase("millis");
        out << j.dump() << '\n';
        break;
      }
      case Format::csv:
        out << v.id << ',' << (lemma ? "contraction-lemma" : "dlog") << ',' << family_name(v.family) << ','
            << v.size << ',' << v.j << ',' << v.label << ',' << reading_name(v.reading) << ','
            << bool_text(v.equal) << ',' << v.sign << ','
            << (v.expected_sign ? std::to_string(*v.expected_sign) : std::string()) << ',' << bool_text(v.pass())
            << ',' << v.lhs_terms << ',' << v.rhs_terms;
        if (c.timings) out << ',' << number(v.millis);
        out << '\n';
        break;
      case Format::text:
        out << (v.pass() ? "PASS " : "FAIL ") << v.id << "  sign " << (v.sign > 0 ? "+1" : v.sign < 0 ? "-1" : "0")
            << "  terms " << v.lhs_terms << '/' << v.rhs_terms;
        if (c.timings) out << "  " << number(v.millis) << " ms";
        out << '\n';
        break;
    }
  }
  return ok ? pass : check_failure;
}

// -------------------------------------------------------------------------------------------

int cmd_numcheck(const RunConfig& c, std::ostream& out) {
  std::vector<NumericSuiteResult> results;
  for (int s = c.size_min; s <= c.size_max; ++s) {
    for (int j : divisor_indices(c.family, s, c.divisor)) {
      NumericSuiteRequest r;
      r.family = c.family;
      r.size = s;
      r.j = j;
      r.samples = c.samples;
      r.seed = c.seed;
      r.threads = c.threads;
      r.crosscheck = c.crosscheck;
      r.config.tol_first_order = c.tol;
      r.config.tol_solve = c.tol_solve;
      r.config.guard = c.guard;
      results.push_back(run_numeric_suite(r));
    }
  }

  bool ok = true;
  if (c.format == Format::csv) out << "case,check,points,max_residual,mean_residual,tolerance,pass\n";
  for (const auto& res : results) {
    ok = ok && res.pass();
    switch (c.format) {
      case Format::json:
        out << to_json(res, c.timings).dump() << '\n';
        break;
      case Format::csv:
        for (const auto& r : res.reports) {
          out << res.case_id << ',' << r.check << ',' << r.points << ',' << number(r.max_residual) << ','
              << number(r.mean_residual) << ',' << number(r.tolerance) << ',' << bool_text(r.pass()) << '\n';
        }
        break;
      case Format::text:
        out << (res.pass() ? "PASS " : "FAIL ") << res.case_id << "  points " << res.points << "  skipped "
            << res.skipped << "  c in [" << number(res.scalar_min) << ", " << number(res.scalar_max) << "]";
        if (c.timings) out << "  " << number(res.millis) << " ms";
        out << '\n';
        for (const auto& r : res.reports) {
          out << "  " << (r.pass() ? "pass " : "FAIL ") << std::left << std::setw(20) << r.check << " max "
              << std::setw(24) << number(r.max_residual) << " tol " << number(r.tolerance) << '\n';
        }
        break;
    }
  }
  return ok ? pass : check_failure;
}

// -------------------------------------------------------------------------------------------

std::string decomposition(const TermCountCell& cell) {
  return std::to_string(cell.total) + " = " + std::to_string(cell.parts[0]) + " + " + std::to_string(cell.parts[1]) +
         " + " + std::to_string(cell.parts[2]);
}

int cmd_tables(const RunConfig& c, std::ostream& out) {
  auto rows = term_count_table(c.family, c.size_min, c.size_max);
  switch (c.format) {
    case Format::json:
      for (const auto& r : rows) out << to_json(r).dump() << '\n';
      break;
    case Format::csv:
      write_csv(out, rows);
      break;
    case Format::text: {
      const char* var = c.family == Family::flag ? "n" : "m";
      if (!rows.empty()) {
        out << "Giv: " << rows[0].givental.formula << "\nSch: " << rows[0].schubert.formula
            << "\nRie: " << rows[0].rietsch.formula << "\n\n";
      }
      out << std::left << std::setw(14) << "family" << std::setw(5) << var << std::setw(5) << "dim" << std::setw(18)
          << "Giv" << std::setw(18) << "Sch"
          << "Rie\n";
      for (const auto& r : rows) {
        out << std::setw(14) << family_name(r.family) << std::setw(5) << r.size << std::setw(5) << r.dimension
            << std::setw(18) << decomposition(r.givental) << std::setw(18) << decomposition(r.schubert)
            << decomposition(r.rietsch) << '\n';
      }
      break;
    }
  }
  return pass;
}

// -------------------------------------------------------------------------------------------

int cmd_walls(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.size_min != c.size_max) throw ConfigurationError("walls takes a single size");
  const auto chart = build_chart(c.family, c.size_min);
  const auto js = divisor_indices(c.family, c.size_min, c.divisor);
  if (js.size() != 1) throw ConfigurationError("walls takes a single divisor");
  const auto d = make_divisor(c.family, c.size_min, js[0]);
  const auto comps = nonfree_components(chart);
  const auto& comp = find_component(comps, c.component);

  WallRequest r;
  r.samples = c.samples;
  r.seed = c.seed;
  r.threads = c.threads;
  r.config.guard = c.guard;
  const auto cloud = wall_point_cloud(chart, d, comp, r);
  if (cloud.empty_warning) err << "warning: " << comp.label() << ": " << cloud.warning << '\n';

  if (c.format == Format::json) {
    nlohmann::json j{{"schema_version", 1},
                     {"chart", chart.name()},
                     {"divisor", js[0]},
                     {"component", comp.label()},
                     {"columns", cloud.columns},
                     {"rows", cloud.rows}};
    j["warning"] = cloud.empty_warning ? nlohmann::json(cloud.warning) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
  } else {
    write_csv(out, cloud);
  }
  return cloud.sampling_exhausted ? sampling_error : pass;
}

// -------------------------------------------------------------------------------------------

int cmd_superpotential(const RunConfig& c, std::ostream& out) {
  for (int n = c.size_min; n <= c.size_max; ++n) {
    const auto w = rietsch_superpotential(n);
    switch (c.format) {
      case Format::json:
        out << to_json(w).dump() << '\n';
        break;
      case Format::csv:
        if (n == c.size_min) out << "n,index,term\n";
        for (std::size_t i = 0; i < w.terms.size(); ++i) out << n << ',' << i + 1 << ',' << w.terms[i].to_string() << '\n';
        break;
      case Format::text: {
        out << "n = " << n << ", " << w.terms.size() << " terms\nW = " << w.to_string() << "\nD = ";
        for (std::size_t i = 0; i < w.divisor.size(); ++i) {
          const bool sum = w.divisor[i].find(' ') != std::string::npos;
          out << (i ? " * " : "") << (sum ? "(" : "") << w.divisor[i] << (sum ? ")" : "");
        }
        out << '\n';
        break;
      }
    }
  }
  return pass;
}

}  // namespace

unsigned resolve_threads(std::optional<long long> flag, const char* env) {
  auto check = [](long long v, const std::string& where) {
    if (v < 1 || v > kMaxThreads) {
      throw ConfigurationError(where + " must be in 1.." + std::to_string(kMaxThreads));
    }
    return static_cast<unsigned>(v);
  };
  if (flag) return check(*flag, "--threads");
  if (env != nullptr && *env != '\0') {
    std::string s(env);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigurationError("malformed PSEUDOTORIC_THREADS '" + s + "'");
    return check(v, "PSEUDOTORIC_THREADS");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::pair<int, int> parse_size_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int v = parse_int(text, "size");
    return {v, v};
  }
  return {parse_int(text.substr(0, dots), "size"), parse_int(text.substr(dots + 2), "size")};
}

std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Pseudotoric fibration verification toolkit", "pseudotoric"};
  app.require_subcommand(1);

  std::string family = "flag";
  std::string n_text;
  std::string m_text;
  std::string divisor;
  std::string format;
  std::optional<long long> threads;
  std::optional<long long> samples;
  long long component = -1;
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "Worker threads (default: PSEUDOTORIC_THREADS, then all cores)");
    sub->add_option("--format", format, "json, csv or text");
    sub->add_option("-o,--output", c.output, "Write the report here instead of stdout");
  };
  auto add_sizes = [&](CLI::App* sub) {
    sub->add_option("--family", family, "flag, quadric-even or quadric-odd")->capture_default_str();
    sub->add_option("--n", n_text, "Flag size n, or a range a..b");
    sub->add_option("--m", m_text, "Quadric size m, or a range a..b");
  };

  auto* verify = app.add_subcommand("verify", "Exact contraction and dlog identities");
  add_sizes(verify);
  verify->add_option("--divisor", divisor, "all, Sch, Rie or an index (default all)");
  verify->add_flag("--readings", c.readings, "Also report the alternate readings");
  verify->add_flag("--timings", c.timings, "Include wall-clock times");
  add_common(verify);

  auto* numcheck = app.add_subcommand("numcheck", "Numeric residual suites at seeded points");
  add_sizes(numcheck);
  numcheck->add_option("--divisor", divisor, "all, Sch, Rie or an index (default Sch)");
  numcheck->add_option("--samples", samples, "Points per case (default 100)");
  numcheck->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
  numcheck->add_option("--tol", c.tol, "First-order tolerance")->capture_default_str();
  numcheck->add_option("--tol-solve", c.tol_solve, "Linear solve and cross-check tolerance")->capture_default_str();
  numcheck->add_option("--guard", c.guard, "Minimum guard magnitude at sampled points")->capture_default_str();
  bool no_crosscheck = false;
  numcheck->add_flag("--no-crosscheck", no_crosscheck, "Skip the symbolic-numeric cross-check");
  numcheck->add_flag("--timings", c.timings, "Include wall-clock times");
  add_common(numcheck);

  auto* tables = app.add_subcommand("tables", "Term-count tables");
  add_sizes(tables);
  add_common(tables);

  auto* walls = app.add_subcommand("walls", "Point clouds of rho on non-free components");
  add_sizes(walls);
  walls->add_option("--divisor", divisor, "Sch, Rie or an index (default Sch)");
  walls->add_option("--component", component, "Component index")->required();
  walls->add_option("--samples", samples, "Points (default 500)");
  walls->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
  walls->add_option("--guard", c.guard, "Minimum pole distance at sampled points")->capture_default_str();
  add_common(walls);

  auto* superpotential = app.add_subcommand("superpotential", "Rietsch superpotentials for n = 3, 4");
  superpotential->add_option("--n", n_text, "3, 4 or 3..4")->required();
  add_common(superpotential);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigurationError(e.what());
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_subcommands().empty() && sub->parsed()) c.command = sub->get_name();
  }

  c.family = parse_family(family);
  if (c.command == "superpotential") c.family = Family::flag;
  if (!n_text.empty() && !m_text.empty()) throw ConfigurationError("give either --n or --m");
  if (c.family == Family::flag && !m_text.empty()) throw ConfigurationError("the flag family takes --n");
  if (c.family != Family::flag && !n_text.empty()) throw ConfigurationError("quadrics take --m");
  const std::string size_text = n_text.empty() ? m_text : n_text;
  if (size_text.empty()) {
    c.size_min = minimum_size(c.family);
    c.size_max = c.command == "tables" ? (c.family == Family::flag ? 10 : 8) : c.size_min;
  } else {
    std::tie(c.size_min, c.size_max) = parse_size_range(size_text);
  }
  if (c.size_min < minimum_size(c.family)) {
    throw ConfigurationError(family_name(c.family) + " needs size >= " + std::to_string(minimum_size(c.family)));
  }
  if (c.size_max < c.size_min) throw ConfigurationError("empty size range " + size_text);

  if (divisor.empty()) divisor = c.command == "verify" ? "all" : "Sch";
  if (divisor != "all" && divisor != "Sch" && divisor != "Rie") (void)parse_int(divisor, "divisor");
  if (c.command == "walls" && divisor == "all") throw ConfigurationError("walls takes a single divisor");
  c.divisor = divisor;

  if (c.command == "numcheck" || c.command == "walls") {
    const long long s = samples.value_or(c.command == "numcheck" ? 100 : 500);
    if (s < 1 || static_cast<std::size_t>(s) > kMaxSamples) {
      throw ConfigurationError("--samples must be in 1.." + std::to_string(kMaxSamples));
    }
    c.samples = static_cast<std::size_t>(s);
  }
  if (c.command == "walls" && component < 0) throw ConfigurationError("--component must be non-negative");
  c.component = static_cast<int>(component);
  if (!(c.tol > 0.0) || !(c.tol_solve > 0.0)) throw ConfigurationError("tolerances must be positive");
  if (!(c.guard >= 0.0)) throw ConfigurationError("--guard must be non-negative");
  c.crosscheck = !no_crosscheck;
  c.threads = resolve_threads(threads, std::getenv("PSEUDOTORIC_THREADS"));
  c.format = format.empty() ? default_format(c.command) : parse_format(format);
  return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty()) {
    file.open(c.output, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigurationError("cannot open " + c.output);
    sink = &file;
  }
  int code = config_error;
  if (c.command == "verify") code = cmd_verify(c, *sink);
  else if (c.command == "numcheck") code = cmd_numcheck(c, *sink);
  else if (c.command == "tables") code = cmd_tables(c, *sink);
  else if (c.command == "walls") code = cmd_walls(c, *sink, err);
  else if (c.command == "superpotential") code = cmd_superpotential(c, *sink);
  else throw ConfigurationError("unknown command '" + c.command + "'");
  sink->flush();
  return code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    auto config = parse_arguments(args, out);
    if (!config) return pass;
    return run(*config, out, err);
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const SamplingError& e) {
    err << "sampling error: " << e.what() << '\n';
    return sampling_error;
  } catch (const std::exception& e) {
    err << "check failed: " << e.what() << '\n';
    return check_failure;
  }
}

}  // namespace pseudotoric::cli
