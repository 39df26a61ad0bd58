#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "seqfam/exact.hpp"
#include "seqfam/families.hpp"

namespace seqfam {

enum class IdentityId {
  L1,                ///< script_X from X_{n,1..n}
  L2_SHIFT,          ///< script_X from X_{n,l+m}
  L2_SCALE,          ///< script_X from X_{n,lm}, m != 0
  REC_M,             ///< linear recursion in m of order n
  SCALE_ID,          ///< X_{n,lm} vs X_{n,l}, m != 0
  EXPL_POS,          ///< X_{n,m} from X_{n,0..n-1}, m >= n
  EXPL_NEG,          ///< X_{n,-m} from X_{n,0..-(n-1)}, m >= n
  SUBFAM_ZERO,       ///< n-th difference of l^q X_{n-p,.} vanishes, q < p
  SUBFAM_FACT,       ///< n-th difference of l^p X_{n-p,.} is (-1)^n n!
  FIB_POSNEG,        ///< X_{n,-l} - X_{n,l} weighted sum, parity split
  FIB_POSNEG_COMPL,  ///< X_{n,-l} + (-1)^n X_{n,l} weighted sum
  FIB_POLY,          ///< Fibonacci polynomial closed form
};

struct IdentityInfo {
  IdentityId id;
  std::string_view tag;
  bool uses_m;
  bool uses_p;
  bool uses_q;
  std::string_view domain;
};

inline constexpr std::array<IdentityInfo, 12> kIdentityCatalog{{
    {IdentityId::L1, "L1", false, false, false, "n >= 1"},
    {IdentityId::L2_SHIFT, "L2_SHIFT", true, false, false, "n >= 1"},
    {IdentityId::L2_SCALE, "L2_SCALE", true, false, false, "n >= 1, m != 0"},
    {IdentityId::REC_M, "REC_M", true, false, false, "n >= 1"},
    {IdentityId::SCALE_ID, "SCALE_ID", true, false, false, "n >= 1, m != 0"},
    {IdentityId::EXPL_POS, "EXPL_POS", true, false, false, "m >= n >= 1"},
    {IdentityId::EXPL_NEG, "EXPL_NEG", true, false, false, "m >= n >= 1"},
    {IdentityId::SUBFAM_ZERO, "SUBFAM_ZERO", true, true, true, "p >= 1, n >= p+1, 0 <= q < p"},
    {IdentityId::SUBFAM_FACT, "SUBFAM_FACT", true, true, false, "p >= 1, n >= p+1"},
    {IdentityId::FIB_POSNEG, "FIB_POSNEG", false, false, false, "n >= 1, Lucas family"},
    {IdentityId::FIB_POSNEG_COMPL, "FIB_POSNEG_COMPL", false, false, false, "n >= 1, Lucas family"},
    {IdentityId::FIB_POLY, "FIB_POLY", true, false, false, "n >= 1, Lucas(-1) family"},
}};

inline const IdentityInfo& info(IdentityId id) { return kIdentityCatalog[static_cast<std::size_t>(id)]; }
inline std::string_view to_string(IdentityId id) { return info(id).tag; }

inline std::optional<IdentityId> parse_identity(std::string_view tag) {
  for (const auto& e : kIdentityCatalog)
    if (e.tag == tag) return e.id;
  return std::nullopt;
}

inline std::vector<IdentityId> all_identities() {
  std::vector<IdentityId> ids;
  for (const auto& e : kIdentityCatalog) ids.push_back(e.id);
  return ids;
}

/// Point at which an identity is evaluated. Only the parameters the identity
/// uses are meaningful; the others stay empty.
struct IdentityParams {
  std::int64_t n = 1;
  std::optional<std::int64_t> m, p, q;

  friend auto operator<=>(const IdentityParams&, const IdentityParams&) = default;
};

class DomainError : public ContractError {
 public:
  using ContractError::ContractError;
};

struct IdentityCheck {
  IdentityId identity;
  std::string family;
  IdentityParams params;
  ExactScalar lhs;
  ExactScalar rhs;
  ExactScalar residual;
  bool pass = false;
};

namespace detail {

inline IdentityCheck make_check(IdentityId id, const FamilySpec& family, const IdentityParams& params,
                                ExactScalar lhs, ExactScalar rhs) {
  ExactScalar residual = lhs - rhs;
  const bool pass = residual.is_zero();
  return {id, family.descriptor(), params, std::move(lhs), std::move(rhs), std::move(residual), pass};
}

/// sum_{l=1..n} (-1)^l C(n,l) l X_{n, arg(l)}
template <class Arg>
ExactScalar weighted_alternating_sum(FamilyEvaluator& eval, std::int64_t n, Arg arg) {
  ExactScalar sum;
  for (std::int64_t l = 1; l <= n; ++l) {
    ExactScalar term = binomial(n, l) * ExactScalar(l) * eval.X(n, arg(l));
    if (l % 2) sum -= term;
    else sum += term;
  }
  return sum;
}

/// (-1)^n sum_{l=1..n} (-1)^l C(n,l-1) X_{n,l+m-n} + n!, the value predicted
/// for X_{n,m+1}.
inline ExactScalar rec_m_rhs(FamilyEvaluator& eval, std::int64_t n, std::int64_t m) {
  ExactScalar sum;
  for (std::int64_t l = 1; l <= n; ++l) {
    ExactScalar term = binomial(n, l - 1) * eval.X(n, l + m - n);
    if (l % 2) sum -= term;
    else sum += term;
  }
  return sign_power(n) * sum + factorial(n);
}

/// The same recursion in the rearranged form
/// sum_{l=0..n-1} (-1)^l C(n,l+1) X_{n,m-l} + n!.
inline ExactScalar rearranged_rec_m_rhs(FamilyEvaluator& eval, std::int64_t n, std::int64_t m) {
  ExactScalar sum;
  for (std::int64_t l = 0; l < n; ++l) {
    ExactScalar term = binomial(n, l + 1) * eval.X(n, m - l);
    if (l % 2) sum -= term;
    else sum += term;
  }
  return sum + factorial(n);
}

/// sum_{l=0..n-1} (-1)^{n+l} (n-l)/(l-m) C(m,n) C(n,l) X_{n, sign*l}
inline ExactScalar explicit_sum(FamilyEvaluator& eval, std::int64_t n, std::int64_t m, std::int64_t sign) {
  ExactScalar sum;
  const ExactScalar c_mn = binomial(m, n);
  for (std::int64_t l = 0; l < n; ++l) {
    ExactScalar term = sign_power(n + l) * ExactScalar::fraction(n - l, l - m) * c_mn * binomial(n, l) *
                       eval.X(n, sign * l);
    sum += term;
  }
  return sum;
}

/// sum_{l=0..n} (-1)^l C(n,l) l^e X_{n-p, m-n+l}
inline ExactScalar subfamily_difference(FamilyEvaluator& eval, std::int64_t n, std::int64_t p, std::int64_t m,
                                        std::int64_t e) {
  ExactScalar sum;
  for (std::int64_t l = 0; l <= n; ++l) {
    ExactScalar term = binomial(n, l) * pow(ExactScalar(l), e) * eval.X(n - p, m - n + l);
    if (l % 2) sum -= term;
    else sum += term;
  }
  return sum;
}

}  // namespace detail

/**
 * Names the first violated hypothesis of `id` at (family, params), or
 * nullopt when the point is admissible.
 */
inline std::optional<std::string> domain_violation(IdentityId id, const FamilySpec& family,
                                                   const IdentityParams& params) {
  const auto& e = info(id);
  const std::int64_t n = params.n;
  if (n < 1) return "n >= 1";
  if (e.uses_m && !params.m) return "m required";
  if (e.uses_p && !params.p) return "p required";
  if (e.uses_q && !params.q) return "q required";
  switch (id) {
    case IdentityId::L2_SCALE:
    case IdentityId::SCALE_ID:
      if (*params.m == 0) return "m != 0";
      break;
    case IdentityId::EXPL_POS:
    case IdentityId::EXPL_NEG:
      if (*params.m < n) return "m >= n";
      break;
    case IdentityId::SUBFAM_ZERO:
      if (*params.p < 1) return "p >= 1";
      if (n < *params.p + 1) return "n >= p+1";
      if (*params.q < 0 || *params.q >= *params.p) return "0 <= q < p";
      break;
    case IdentityId::SUBFAM_FACT:
      if (*params.p < 1) return "p >= 1";
      if (n < *params.p + 1) return "n >= p+1";
      break;
    case IdentityId::FIB_POSNEG:
    case IdentityId::FIB_POSNEG_COMPL:
      if (!family.lucas_q()) return "Lucas family";
      break;
    case IdentityId::FIB_POLY:
      if (family.lucas_q() != std::optional<std::int64_t>(-1)) return "Lucas(-1) family";
      break;
    default:
      break;
  }
  return std::nullopt;
}

/// Drops parameters the identity does not use.
inline IdentityParams normalize(IdentityId id, IdentityParams params) {
  const auto& e = info(id);
  if (!e.uses_m) params.m.reset();
  if (!e.uses_p) params.p.reset();
  if (!e.uses_q) params.q.reset();
  return params;
}

/// Evaluates one catalog entry exactly, reusing `eval`'s memoized values.
inline IdentityCheck eval_identity(IdentityId id, FamilyEvaluator& eval, IdentityParams params) {
  const FamilySpec& family = eval.family();
  params = normalize(id, params);
  if (auto v = domain_violation(id, family, params))
    throw DomainError(std::string(to_string(id)) + ": parameter domain violated (" + *v + ")");

  const std::int64_t n = params.n;
  const std::int64_t m = params.m.value_or(0);
  const ExactScalar half_n_n1(ExactScalar::fraction(n * (n + 1), 2));

  switch (id) {
    case IdentityId::L1: {
      ExactScalar s = detail::weighted_alternating_sum(eval, n, [](std::int64_t l) { return l; });
      ExactScalar rhs = sign_power(n) / factorial(n) * s - half_n_n1;
      return detail::make_check(id, family, params, eval.script_X(n), rhs);
    }
    case IdentityId::L2_SHIFT: {
      ExactScalar s = detail::weighted_alternating_sum(eval, n, [m](std::int64_t l) { return l + m; });
      ExactScalar rhs = sign_power(n) / factorial(n) * s - half_n_n1 - ExactScalar(n) * ExactScalar(m);
      return detail::make_check(id, family, params, eval.script_X(n), rhs);
    }
    case IdentityId::L2_SCALE: {
      ExactScalar s = detail::weighted_alternating_sum(eval, n, [m](std::int64_t l) { return l * m; });
      ExactScalar rhs = sign_power(n) / (factorial(n) * pow(ExactScalar(m), n - 1)) * s - half_n_n1 * ExactScalar(m);
      return detail::make_check(id, family, params, eval.script_X(n), rhs);
    }
    case IdentityId::REC_M:
      return detail::make_check(id, family, params, eval.X(n, m + 1), detail::rec_m_rhs(eval, n, m));
    case IdentityId::SCALE_ID: {
      ExactScalar lhs = detail::weighted_alternating_sum(eval, n, [m](std::int64_t l) { return l * m; }) /
                        pow(ExactScalar(m), n - 1);
      ExactScalar rhs = detail::weighted_alternating_sum(eval, n, [](std::int64_t l) { return l; }) +
                        sign_power(n - 1) * ExactScalar::fraction(1, 2) * ExactScalar(1 - m) * ExactScalar(n) *
                            factorial(n + 1);
      return detail::make_check(id, family, params, std::move(lhs), std::move(rhs));
    }
    case IdentityId::EXPL_POS: {
      ExactScalar rhs = detail::explicit_sum(eval, n, m, 1) + falling_factorial(m, n);
      return detail::make_check(id, family, params, eval.X(n, m), rhs);
    }
    case IdentityId::EXPL_NEG: {
      ExactScalar rhs = detail::explicit_sum(eval, n, m, -1) + sign_power(n) * falling_factorial(m, n);
      return detail::make_check(id, family, params, eval.X(n, -m), rhs);
    }
    case IdentityId::SUBFAM_ZERO:
      return detail::make_check(id, family, params, detail::subfamily_difference(eval, n, *params.p, m, *params.q),
                                ExactScalar(0));
    case IdentityId::SUBFAM_FACT:
      return detail::make_check(id, family, params, detail::subfamily_difference(eval, n, *params.p, m, *params.p),
                                sign_power(n) * factorial(n));
    case IdentityId::FIB_POSNEG: {
      ExactScalar lhs;
      for (std::int64_t l = 1; l <= n; ++l)
        lhs += sign_power(l) * binomial(n, l) * ExactScalar(l) * (eval.X(n, -l) - eval.X(n, l));
      ExactScalar rhs = (n % 2 == 0) ? ExactScalar(0) : ExactScalar(n) * factorial(n + 1);
      return detail::make_check(id, family, params, std::move(lhs), std::move(rhs));
    }
    case IdentityId::FIB_POSNEG_COMPL: {
      ExactScalar lhs;
      for (std::int64_t l = 1; l <= n; ++l)
        lhs += sign_power(l) * binomial(n, l) * ExactScalar(l) * (eval.X(n, -l) + sign_power(n) * eval.X(n, l));
      return detail::make_check(id, family, params, std::move(lhs), ExactScalar(n) * factorial(n + 1));
    }
    case IdentityId::FIB_POLY:
      return detail::make_check(id, family, params, fibonacci_polynomial(n, m), eval.X(n, m));
  }
  throw std::logic_error("eval_identity: unknown identity");
}

inline IdentityCheck eval_identity(IdentityId id, const FamilySpec& family, const IdentityParams& params) {
  FamilyEvaluator eval(family);
  return eval_identity(id, eval, params);
}

/**
 * Checks X_{n,m+1} = sum_{l=0..n-1} (-1)^l C(n,l+1) X_{n,m-l} + n!, the
 * power/Pochhammer/Fibonacci m-recursions. The result is reported under
 * REC_M; the rearranged right-hand side is cross-asserted against REC_M's.
 */
inline IdentityCheck eval_m_recursion(const FamilySpec& family, std::int64_t n, std::int64_t m) {
  if (n < 1) throw ContractError("eval_m_recursion: n must be >= 1");
  FamilyEvaluator eval(family);
  ExactScalar rhs = detail::rearranged_rec_m_rhs(eval, n, m);
  if (rhs != detail::rec_m_rhs(eval, n, m))
    throw std::logic_error("eval_m_recursion: rearranged form disagrees with REC_M");
  return detail::make_check(IdentityId::REC_M, family, {n, m, std::nullopt, std::nullopt}, eval.X(n, m + 1), rhs);
}

/// X_{n,target} for target >= n, obtained by running REC_M forward from the
/// base values X_{n,0..n-1}.
inline ExactScalar unroll_m_recursion(const FamilySpec& family, std::int64_t n, std::int64_t target) {
  if (n < 1 || target < n) throw ContractError("unroll_m_recursion: requires target >= n >= 1");
  std::vector<ExactScalar> seq;
  for (std::int64_t m = 0; m < n; ++m) seq.push_back(X(family, n, m));
  while (static_cast<std::int64_t>(seq.size()) <= target) {
    // X_{n,s} = (-1)^n sum_{l=1..n} (-1)^l C(n,l-1) X_{n,l+s-1-n} + n!
    const auto s = static_cast<std::int64_t>(seq.size());
    ExactScalar sum;
    for (std::int64_t l = 1; l <= n; ++l) sum += sign_power(l) * binomial(n, l - 1) * seq[l + s - 1 - n];
    seq.push_back(sign_power(n) * sum + factorial(n));
  }
  return seq[static_cast<std::size_t>(target)];
}

/// Parameter grid for a sweep. Absent p/q ranges mean "every admissible
/// value"; m_from_n raises the m lower bound to the current n.
struct SweepGrid {
  IntRange n{1, 12};
  IntRange m{-8, 8};
  bool m_from_n = false;
  std::optional<IntRange> p;
  std::optional<IntRange> q;
};

struct SweepReport {
  SweepGrid grid;
  std::vector<IdentityId> identities;
  std::vector<std::string> families;
  std::uint64_t total = 0;
  std::map<std::string, std::uint64_t> checks_by_identity;
  std::vector<IdentityCheck> failures;
  std::chrono::duration<double> wall_time{0};

  bool ok() const { return failures.empty(); }
};

/// Every admissible parameter point of `id` for one n.
inline std::vector<IdentityParams> admissible_points(IdentityId id, const FamilySpec& family, const SweepGrid& grid,
                                                     std::int64_t n) {
  const auto& e = info(id);
  std::vector<IdentityParams> out;
  std::vector<std::optional<std::int64_t>> ms{std::nullopt};
  if (e.uses_m) {
    ms.clear();
    for (std::int64_t m = grid.m_from_n ? std::max(grid.m.lo, n) : grid.m.lo; m <= grid.m.hi; ++m) ms.push_back(m);
  }
  std::vector<std::optional<std::int64_t>> ps{std::nullopt};
  if (e.uses_p) {
    ps.clear();
    const IntRange pr = grid.p.value_or(IntRange{1, n - 1});
    for (std::int64_t p = pr.lo; p <= pr.hi; ++p) ps.push_back(p);
  }
  for (const auto& p : ps) {
    std::vector<std::optional<std::int64_t>> qs{std::nullopt};
    if (e.uses_q) {
      qs.clear();
      const IntRange qr = grid.q.value_or(IntRange{0, p.value_or(0) - 1});
      for (std::int64_t q = qr.lo; q <= qr.hi; ++q) qs.push_back(q);
    }
    for (const auto& q : qs)
      for (const auto& m : ms) {
        IdentityParams params{n, m, p, q};
        if (!domain_violation(id, family, params)) out.push_back(params);
      }
  }
  return out;
}

/**
 * Evaluates every admissible point of every (identity, family) pair in the
 * grid. Work is split across `workers` threads by (family, n); each worker
 * owns its evaluators. Failures are sorted by (identity, family, params), so
 * the report content does not depend on the worker count.
 */
inline SweepReport sweep(const std::vector<IdentityId>& ids, const std::vector<FamilySpec>& families,
                         const SweepGrid& grid, unsigned workers = 1) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport report;
  report.grid = grid;
  report.identities = ids;
  for (const auto& f : families) report.families.push_back(f.descriptor());
  for (auto id : ids) report.checks_by_identity[std::string(to_string(id))] = 0;

  struct Task {
    std::size_t family_index;
    std::int64_t n;
  };
  std::vector<Task> tasks;
  for (std::size_t fi = 0; fi < families.size(); ++fi)
    for (std::int64_t n = std::max<std::int64_t>(grid.n.lo, 1); n <= grid.n.hi; ++n) tasks.push_back({fi, n});

  struct Partial {
    std::map<std::string, std::uint64_t> counts;
    std::vector<std::pair<std::size_t, IdentityCheck>> failures;
  };
  std::vector<Partial> partials(std::max(1u, workers));
  std::atomic<std::size_t> next{0};

  auto work = [&](Partial& out) {
    std::vector<std::optional<FamilyEvaluator>> evaluators(families.size());
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      const auto& task = tasks[t];
      auto& slot = evaluators[task.family_index];
      if (!slot) slot.emplace(families[task.family_index]);
      for (auto id : ids) {
        auto points = admissible_points(id, families[task.family_index], grid, task.n);
        out.counts[std::string(to_string(id))] += points.size();
        for (const auto& params : points) {
          IdentityCheck check = eval_identity(id, *slot, params);
          if (!check.pass) out.failures.emplace_back(task.family_index, std::move(check));
        }
      }
    }
  };

  if (partials.size() == 1) {
    work(partials[0]);
  } else {
    std::vector<std::jthread> threads;
    for (auto& p : partials) threads.emplace_back([&work, &p] { work(p); });
  }

  std::vector<std::pair<std::size_t, IdentityCheck>> failures;
  for (auto& p : partials) {
    for (const auto& [k, v] : p.counts) {
      report.checks_by_identity[k] += v;
      report.total += v;
    }
    for (auto& f : p.failures) failures.push_back(std::move(f));
  }
  std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.identity, a.first, a.second.params) < std::tie(b.second.identity, b.first, b.second.params);
  });
  for (auto& f : failures) report.failures.push_back(std::move(f.second));
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

// JSON serialization. Exact values are decimal strings ("p" or "p/q").

inline nlohmann::ordered_json to_json(const IdentityParams& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n;
  if (p.m) j["m"] = *p.m;
  if (p.p) j["p"] = *p.p;
  if (p.q) j["q"] = *p.q;
  return j;
}

inline nlohmann::ordered_json to_json(const IdentityCheck& c) {
  return {{"identity", std::string(to_string(c.identity))},
          {"family", c.family},
          {"params", to_json(c.params)},
          {"lhs", c.lhs.str()},
          {"rhs", c.rhs.str()},
          {"residual", c.residual.str()},
          {"pass", c.pass}};
}

inline nlohmann::ordered_json to_json(const SweepReport& r, bool include_wall_time = true) {
  nlohmann::ordered_json grid;
  grid["n"] = {r.grid.n.lo, r.grid.n.hi};
  if (r.grid.m_from_n) grid["m"] = {"n", r.grid.m.hi};
  else grid["m"] = {r.grid.m.lo, r.grid.m.hi};
  grid["p"] = r.grid.p ? nlohmann::ordered_json{r.grid.p->lo, r.grid.p->hi} : nlohmann::ordered_json("admissible");
  grid["q"] = r.grid.q ? nlohmann::ordered_json{r.grid.q->lo, r.grid.q->hi} : nlohmann::ordered_json("admissible");

  nlohmann::ordered_json ids = nlohmann::ordered_json::array();
  for (auto id : r.identities) ids.push_back(std::string(to_string(id)));

  nlohmann::ordered_json j;
  j["grid"] = grid;
  j["identities"] = ids;
  j["families"] = r.families;
  j["total"] = r.total;
  j["checks_by_identity"] = r.checks_by_identity;
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : r.failures) j["failures"].push_back(to_json(f));
  j["pass"] = r.ok();
  if (include_wall_time) j["wall_time_s"] = r.wall_time.count();
  return j;
}

}  // namespace seqfam
