#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqfam/families.hpp"
#include "seqfam/float_check.hpp"
#include "seqfam/identities.hpp"
#include "seqfam/oeis.hpp"
#include "seqfam/roots_expr.hpp"

namespace seqfam::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kExternal = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Format { text, csv, json };

struct CliConfig {
  std::string subcommand;
  std::vector<std::string> family_selectors;
  std::string n_text, m_text, p_text, q_text;
  std::vector<std::string> identity_selectors;
  Format format = Format::text;
  bool offline = false;
  std::string cache_dir;
  std::string fixtures;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  double tolerance = 1e-9;
  bool all_points = false;
  std::optional<std::int64_t> row, column;
};

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw UsageError("invalid integer '" + std::string(s) + "' in " + std::string(what));
  return v;
}

/// "a..b" with a <= b.
inline IntRange parse_range(std::string_view text, std::string_view what) {
  auto dots = text.find("..");
  if (dots == std::string_view::npos) throw UsageError(std::string(what) + ": expected a range 'a..b', got '" + std::string(text) + "'");
  IntRange r{parse_int(text.substr(0, dots), what), parse_int(text.substr(dots + 2), what)};
  if (r.lo > r.hi) throw UsageError(std::string(what) + ": empty range '" + std::string(text) + "' (need a <= b)");
  return r;
}

/// The ten families of the standard soundness sweep.
inline std::vector<FamilySpec> standard_families() {
  return {FamilySpec::power(0),
          FamilySpec::power(1),
          FamilySpec::power(-1),
          FamilySpec::power(2),
          FamilySpec::power(ExactScalar::fraction(1, 2)),
          FamilySpec::pochhammer(),
          FamilySpec::lucas(-1),
          FamilySpec::lucas(1),
          FamilySpec::lucas(2),
          FamilySpec::lucas(-2)};
}

/// power[:c] | pochhammer | fib | lucas:q | roots:<file>
inline FamilySpec parse_family(std::string_view selector) {
  const auto colon = selector.find(':');
  const std::string_view head = selector.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : selector.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  try {
    if (head == "power") return FamilySpec::power(has_arg ? ExactScalar::parse(arg) : ExactScalar(0));
    if (head == "pochhammer" && !has_arg) return FamilySpec::pochhammer();
    if (head == "fib" && !has_arg) return FamilySpec::fibonacci();
    if (head == "lucas" && has_arg) return FamilySpec::lucas(parse_int(arg, "lucas:q"));
    if (head == "roots" && has_arg && !arg.empty()) {
      auto expr = RootExpression::load(std::string(arg));
      return FamilySpec::explicit_roots(std::string(arg), [expr](std::int64_t n, std::int64_t l) { return expr(n, l); });
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError("family '" + std::string(selector) + "': " + e.what());
  }
  throw UsageError("unknown family selector '" + std::string(selector) +
                   "' (expected power[:c], pochhammer, fib, lucas:q or roots:<file>)");
}

inline std::vector<FamilySpec> parse_families(const std::vector<std::string>& selectors) {
  std::vector<FamilySpec> out;
  for (const auto& s : selectors) {
    if (s == "all") {
      for (auto& f : standard_families()) out.push_back(std::move(f));
    } else {
      out.push_back(parse_family(s));
    }
  }
  if (out.empty()) throw UsageError("at least one --family is required");
  return out;
}

inline std::vector<IdentityId> parse_identities(const std::vector<std::string>& selectors) {
  std::vector<IdentityId> out;
  for (const auto& s : selectors) {
    if (s == "all") {
      out = all_identities();
      break;
    }
    auto id = parse_identity(s);
    if (!id) throw UsageError("unknown identity '" + s + "'");
    if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
  }
  if (out.empty()) throw UsageError("at least one --identity is required");
  return out;
}

// ---------------------------------------------------------------- table

inline void render_table(const SequenceWindow& w, Format format, std::ostream& out) {
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["family"] = w.family.descriptor();
    j["n"] = {w.n_range.lo, w.n_range.hi};
    j["m"] = {w.m_range.lo, w.m_range.hi};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : w.values) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& v : row) r.push_back(v.str());
      rows.push_back(std::move(r));
    }
    j["values"] = std::move(rows);
    out << j.dump(2) << "\n";
    return;
  }
  if (format == Format::csv) {
    out << "n\\m";
    for (auto m = w.m_range.lo; m <= w.m_range.hi; ++m) out << ',' << m;
    out << '\n';
    for (auto n = w.n_range.lo; n <= w.n_range.hi; ++n) {
      out << n;
      for (auto m = w.m_range.lo; m <= w.m_range.hi; ++m) out << ',' << w.at(n, m).str();
      out << '\n';
    }
    return;
  }
  // text: n rows, m columns, right-aligned per column
  std::vector<std::size_t> width;
  for (auto m = w.m_range.lo; m <= w.m_range.hi; ++m) {
    std::size_t wd = std::to_string(m).size();
    for (auto n = w.n_range.lo; n <= w.n_range.hi; ++n) wd = std::max(wd, w.at(n, m).str().size());
    width.push_back(wd);
  }
  std::size_t label = std::string("n\\m").size();
  for (auto n = w.n_range.lo; n <= w.n_range.hi; ++n) label = std::max(label, std::to_string(n).size());

  out << "# " << w.family.descriptor() << "\n";
  out << std::setw(static_cast<int>(label)) << "n\\m" << " |";
  for (std::size_t c = 0; c < width.size(); ++c)
    out << ' ' << std::setw(static_cast<int>(width[c])) << (w.m_range.lo + static_cast<std::int64_t>(c));
  out << '\n' << std::string(label + 1, '-') << '+';
  for (auto wd : width) out << std::string(wd + 1, '-');
  out << '\n';
  for (auto n = w.n_range.lo; n <= w.n_range.hi; ++n) {
    out << std::setw(static_cast<int>(label)) << n << " |";
    std::size_t c = 0;
    for (auto m = w.m_range.lo; m <= w.m_range.hi; ++m, ++c)
      out << ' ' << std::setw(static_cast<int>(width[c])) << w.at(n, m).str();
    out << '\n';
  }
}

inline int cmd_table(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.family_selectors.size() != 1) throw UsageError("table takes exactly one --family");
  const FamilySpec family = parse_family(cfg.family_selectors.front());
  const IntRange n = parse_range(cfg.n_text.empty() ? "1..7" : cfg.n_text, "--n");
  const IntRange m = parse_range(cfg.m_text.empty() ? "0..7" : cfg.m_text, "--m");
  if (n.lo < 0) throw UsageError("--n: n must be non-negative");
  render_table(table(family, n, m), cfg.format, out);
  return kOk;
}

// ---------------------------------------------------------------- verify

inline int cmd_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ids = parse_identities(cfg.identity_selectors.empty() ? std::vector<std::string>{"all"} : cfg.identity_selectors);
  const auto families = parse_families(cfg.family_selectors.empty() ? std::vector<std::string>{"all"} : cfg.family_selectors);

  SweepGrid grid;
  if (!cfg.n_text.empty()) grid.n = parse_range(cfg.n_text, "--n");
  if (grid.n.lo < 1) throw UsageError("--n: identities need n >= 1");
  if (!cfg.m_text.empty()) {
    if (cfg.m_text.rfind("n..", 0) == 0) {
      grid.m_from_n = true;
      grid.m = IntRange{grid.n.lo, parse_int(cfg.m_text.substr(3), "--m")};
    } else {
      grid.m = parse_range(cfg.m_text, "--m");
    }
  }
  if (!cfg.p_text.empty()) grid.p = parse_range(cfg.p_text, "--p");
  if (!cfg.q_text.empty()) grid.q = parse_range(cfg.q_text, "--q");

  const SweepReport report = sweep(ids, families, grid, cfg.workers);
  if (report.total == 0) err << "warning: no admissible parameter points in the requested grid (0 checks)\n";

  switch (cfg.format) {
    case Format::json:
      out << to_json(report).dump(2) << "\n";
      break;
    case Format::csv:
      out << "identity,family,n,m,p,q,lhs,rhs,residual,pass\n";
      for (const auto& f : report.failures) {
        auto opt = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); };
        out << to_string(f.identity) << ',' << f.family << ',' << f.params.n << ',' << opt(f.params.m) << ','
            << opt(f.params.p) << ',' << opt(f.params.q) << ',' << f.lhs.str() << ',' << f.rhs.str() << ','
            << f.residual.str() << ',' << (f.pass ? "true" : "false") << '\n';
      }
      err << report.total << " checks, " << report.failures.size() << " failures\n";
      break;
    case Format::text: {
      out << "families:";
      for (const auto& f : report.families) out << ' ' << f;
      out << "\n";
      for (const auto& [tag, count] : report.checks_by_identity)
        out << "  " << std::left << std::setw(18) << tag << std::right << count << " checks\n";
      for (const auto& f : report.failures) {
        out << "FAIL " << to_string(f.identity) << ' ' << f.family << " n=" << f.params.n;
        if (f.params.m) out << " m=" << *f.params.m;
        if (f.params.p) out << " p=" << *f.params.p;
        if (f.params.q) out << " q=" << *f.params.q;
        out << ": lhs=" << f.lhs.str() << " rhs=" << f.rhs.str() << " residual=" << f.residual.str() << "\n";
      }
      out << "total " << report.total << " checks, " << report.failures.size() << " failures ("
          << std::fixed << std::setprecision(3) << report.wall_time.count() << " s)\n";
      out.unsetf(std::ios::floatfield);
      break;
    }
  }
  return report.ok() ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------- float-check

inline int cmd_float_check(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto families = parse_families(cfg.family_selectors);
  const IntRange n = parse_range(cfg.n_text.empty() ? "1..25" : cfg.n_text, "--n");
  const IntRange m = parse_range(cfg.m_text.empty() ? "-10..10" : cfg.m_text, "--m");
  if (n.lo < 1) throw UsageError("--n: n must be >= 1");
  if (!(cfg.tolerance > 0)) throw UsageError("--tol must be positive");

  bool ok = true;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  if (cfg.format == Format::csv) out << "family,n,m,exact,float_real,float_imag,relative_error,imaginary_residual\n";
  for (const auto& family : families) {
    const FloatReport r = float_sweep(family, n, m, cfg.tolerance);
    ok = ok && r.ok();
    if (cfg.format == Format::json) {
      reports.push_back(to_json(r, cfg.all_points));
    } else if (cfg.format == Format::csv) {
      out << std::setprecision(17);
      for (const auto& p : r.results)
        out << p.family << ',' << p.n << ',' << p.m << ',' << p.exact.str() << ',' << p.float_product.real() << ','
            << p.float_product.imag() << ',' << p.relative_error << ',' << p.imaginary_residual << '\n';
    } else {
      out << r.family << ": " << r.results.size() << " points, max relative error " << std::setprecision(3)
          << std::scientific << r.max_relative_error << ", max imaginary residual " << r.max_imaginary_residual
          << ", tolerance " << r.tolerance << ", " << r.failures << " failures\n";
      out.unsetf(std::ios::floatfield);
      for (const auto& p : r.results)
        if (!(p.relative_error < r.tolerance) || !(p.imaginary_residual < r.tolerance))
          out << "FAIL n=" << p.n << " m=" << p.m << " exact=" << p.exact.str() << " float=" << std::setprecision(17)
              << p.float_product.real() << (p.float_product.imag() < 0 ? "" : "+") << p.float_product.imag() << "i\n";
    }
  }
  if (cfg.format == Format::json) out << reports.dump(2) << "\n";
  return ok ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------- oeis

inline int cmd_oeis(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.family_selectors.size() != 1) throw UsageError("oeis takes exactly one --family");
  const FamilySpec family = parse_family(cfg.family_selectors.front());
  if (cfg.row.has_value() == cfg.column.has_value()) throw UsageError("oeis needs exactly one of --row or --column");

  oeis::Axis axis;
  std::int64_t fixed;
  IntRange range;
  if (cfg.row) {
    axis = oeis::Axis::row;
    fixed = *cfg.row;
    if (fixed < 0) throw UsageError("--row: n must be non-negative");
    range = parse_range(cfg.m_text.empty() ? "0..9" : cfg.m_text, "--m");
  } else {
    axis = oeis::Axis::column;
    fixed = *cfg.column;
    range = parse_range(cfg.n_text.empty() ? "0..11" : cfg.n_text, "--n");
    if (range.lo < 0) throw UsageError("--n: n must be non-negative");
  }

  oeis::ClientConfig cc;
  cc.offline = cfg.offline;
  if (!cfg.cache_dir.empty()) cc.cache_dir = cfg.cache_dir;
  if (!cfg.fixtures.empty()) cc.fixture_file = cfg.fixtures;
  oeis::Client client(cc);
  oeis::CrossCheck result;
  try {
    result = oeis::cross_check(client, family, axis, fixed, range);
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }

  switch (cfg.format) {
    case Format::json: {
      auto j = oeis::to_json(result.match);
      j["family"] = family.descriptor();
      j["axis"] = axis == oeis::Axis::row ? "row" : "column";
      j["fixed"] = fixed;
      j["verdict"] = result.verdict;
      out << j.dump(2) << "\n";
      break;
    }
    case Format::csv:
      out << "id,source\n";
      for (const auto& id : result.match.ids) out << id << ',' << oeis::to_string(result.match.source) << '\n';
      break;
    case Format::text:
      out << "terms: " << oeis::join_terms(result.match.query) << "\n";
      out << "matches (" << oeis::to_string(result.match.source) << "):";
      for (const auto& id : result.match.ids) out << ' ' << id;
      if (result.match.ids.empty()) out << " none";
      out << "\n";
      if (result.match.ambiguous) out << "note: degenerate query, match is ambiguous\n";
      out << "verdict: " << (result.verdict ? "match" : "no match") << "\n";
      break;
  }
  return result.verdict ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------- entry point

/// Runs the command line; returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Product-representable sequence families: tables, identity sweeps, float and OEIS checks", "seqfam"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string format = "text";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  };
  auto add_family = [&](CLI::App* sub, bool multi) {
    auto* opt = sub->add_option("--family,-f", cfg.family_selectors,
                                "power[:c] | pochhammer | fib | lucas:q | roots:<file>" + std::string(multi ? " | all" : ""));
    opt->delimiter(',');
  };

  auto* table_cmd = app.add_subcommand("table", "Render a window of X(n,m)");
  add_family(table_cmd, false);
  table_cmd->add_option("--n", cfg.n_text, "n range a..b (default 1..7)");
  table_cmd->add_option("--m", cfg.m_text, "m range a..b (default 0..7)");
  add_common(table_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Sweep identities in exact arithmetic");
  add_family(verify_cmd, true);
  verify_cmd->add_option("--identity,-i", cfg.identity_selectors, "Identity tag(s) or 'all'")->delimiter(',');
  verify_cmd->add_option("--n", cfg.n_text, "n range (default 1..12)");
  verify_cmd->add_option("--m", cfg.m_text, "m range a..b or n..b (default -8..8)");
  verify_cmd->add_option("--p", cfg.p_text, "p range (default: all admissible)");
  verify_cmd->add_option("--q", cfg.q_text, "q range (default: all admissible)");
  verify_cmd->add_option("--workers,-j", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  add_common(verify_cmd);

  auto* float_cmd = app.add_subcommand("float-check", "Compare cosine-product floats with exact values");
  add_family(float_cmd, true);
  float_cmd->add_option("--n", cfg.n_text, "n range (default 1..25)");
  float_cmd->add_option("--m", cfg.m_text, "m range (default -10..10)");
  float_cmd->add_option("--tol", cfg.tolerance, "Relative tolerance (default 1e-9)");
  float_cmd->add_flag("--all-points", cfg.all_points, "Include every point in JSON output");
  add_common(float_cmd);

  auto* oeis_cmd = app.add_subcommand("oeis", "Cross-check a row or column against the OEIS");
  add_family(oeis_cmd, false);
  oeis_cmd->add_option("--row", cfg.row, "Fixed n; terms run over --m");
  oeis_cmd->add_option("--column", cfg.column, "Fixed m; terms run over --n");
  oeis_cmd->add_option("--n", cfg.n_text, "n range for --column (default 0..11)");
  oeis_cmd->add_option("--m", cfg.m_text, "m range for --row (default 0..9)");
  oeis_cmd->add_flag("--offline", cfg.offline, "Use fixtures only");
  oeis_cmd->add_option("--cache-dir", cfg.cache_dir, "Cache directory (default $SEQFAM_CACHE_DIR)");
  oeis_cmd->add_option("--fixtures", cfg.fixtures, "Fixture catalog (JSON lines)");
  add_common(oeis_cmd);

  // Ranges such as "-8..8" look like options to CLI11; glue them to their flag.
  std::vector<std::string> glued;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool takes_range = a == "--n" || a == "--m" || a == "--p" || a == "--q" || a == "--row" || a == "--column";
    if (takes_range && i + 1 < args.size() && args[i + 1].size() > 1 && args[i + 1][0] == '-' &&
        std::isdigit(static_cast<unsigned char>(args[i + 1][1]))) {
      glued.push_back(a + "=" + args[i + 1]);
      ++i;
    } else {
      glued.push_back(a);
    }
  }
  std::reverse(glued.begin(), glued.end());

  try {
    app.parse(glued);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::json : (format == "csv" ? Format::csv : Format::text);

  try {
    if (cfg.subcommand == "table") return cmd_table(cfg, out, err);
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out, err);
    if (cfg.subcommand == "float-check") return cmd_float_check(cfg, out, err);
    return cmd_oeis(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const oeis::TransportError& e) {
    err << "network error: " << e.what() << "\n";
    return kExternal;
  } catch (const oeis::ParseError& e) {
    err << "bad OEIS response: " << e.what() << "\n";
    return kExternal;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExternal;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace seqfam::cli
