#include <gtest/gtest.h>

#include <algorithm>
#include <memory>

#include "seqfam/identities.hpp"

using seqfam::ExactScalar;
using seqfam::FamilySpec;
using seqfam::IdentityId;
using seqfam::IdentityParams;
using seqfam::IntRange;

namespace {

IdentityParams at(std::int64_t n, std::optional<std::int64_t> m = {}, std::optional<std::int64_t> p = {},
                  std::optional<std::int64_t> q = {}) {
  return {n, m, p, q};
}

std::vector<FamilySpec> ten_families() {
  return {FamilySpec::power(0),  FamilySpec::power(1),  FamilySpec::power(-1),
          FamilySpec::power(2),  FamilySpec::power(ExactScalar::fraction(1, 2)),
          FamilySpec::pochhammer(), FamilySpec::lucas(-1), FamilySpec::lucas(1),
          FamilySpec::lucas(2),  FamilySpec::lucas(-2)};
}

}  // namespace

TEST(Catalog, TagsRoundTrip) {
  ASSERT_EQ(seqfam::all_identities().size(), 12u);
  for (auto id : seqfam::all_identities()) EXPECT_EQ(seqfam::parse_identity(seqfam::to_string(id)), id);
  EXPECT_FALSE(seqfam::parse_identity("NOPE"));
}

TEST(EvalIdentity, L1OnFibonacciRowThree) {
  // X_{3,1..3} = 3, 12, 33
  auto c = seqfam::eval_identity(IdentityId::L1, FamilySpec::fibonacci(), at(3));
  EXPECT_EQ(c.lhs, ExactScalar(0));
  EXPECT_EQ(c.rhs, ExactScalar(0));
  EXPECT_TRUE(c.pass);
  EXPECT_TRUE(c.residual.is_zero());
}

TEST(EvalIdentity, RecursionInM) {
  auto c = seqfam::eval_identity(IdentityId::REC_M, FamilySpec::fibonacci(), at(2, 2));
  EXPECT_EQ(c.lhs, ExactScalar(10));
  EXPECT_EQ(c.rhs, ExactScalar(10));
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, ExplicitPositive) {
  auto c = seqfam::eval_identity(IdentityId::EXPL_POS, FamilySpec::fibonacci(), at(2, 3));
  EXPECT_EQ(c.lhs, ExactScalar(10));
  EXPECT_EQ(c.rhs, ExactScalar(10));
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, SubfamilyZero) {
  auto c = seqfam::eval_identity(IdentityId::SUBFAM_ZERO, FamilySpec::fibonacci(), at(3, 3, 1, 0));
  EXPECT_EQ(c.lhs, ExactScalar(0));
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, ScaleIdentity) {
  auto c = seqfam::eval_identity(IdentityId::SCALE_ID, FamilySpec::fibonacci(), at(2, 2));
  EXPECT_EQ(c.lhs, ExactScalar(12));
  EXPECT_EQ(c.rhs, ExactScalar(12));
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, FibonacciPolynomialEntry) {
  auto c = seqfam::eval_identity(IdentityId::FIB_POLY, FamilySpec::fibonacci(), at(4, 2));
  EXPECT_EQ(c.lhs, ExactScalar(29));
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, RationalFamily) {
  auto half = FamilySpec::power(ExactScalar::fraction(1, 2));
  auto c = seqfam::eval_identity(IdentityId::L1, half, at(5));
  EXPECT_EQ(c.lhs, ExactScalar::fraction(5, 2));
  EXPECT_TRUE(c.pass);
  auto s = seqfam::eval_identity(IdentityId::L2_SCALE, half, at(4, -3));
  EXPECT_TRUE(s.pass);
}

TEST(EvalIdentity, DomainViolationsNameTheConstraint) {
  const auto fib = FamilySpec::fibonacci();
  auto expect_domain = [&](IdentityId id, const FamilySpec& f, IdentityParams p, const std::string& what) {
    try {
      (void)seqfam::eval_identity(id, f, p);
      ADD_FAILURE() << "expected DomainError for " << seqfam::to_string(id);
    } catch (const seqfam::DomainError& e) {
      EXPECT_NE(std::string(e.what()).find(what), std::string::npos) << e.what();
    }
  };
  expect_domain(IdentityId::L2_SCALE, fib, at(3, 0), "m != 0");
  expect_domain(IdentityId::SCALE_ID, fib, at(3, 0), "m != 0");
  expect_domain(IdentityId::EXPL_POS, fib, at(4, 3), "m >= n");
  expect_domain(IdentityId::EXPL_NEG, fib, at(4, 2), "m >= n");
  expect_domain(IdentityId::SUBFAM_ZERO, fib, at(3, 0, 3, 0), "n >= p+1");
  expect_domain(IdentityId::SUBFAM_ZERO, fib, at(4, 0, 2, 2), "0 <= q < p");
  expect_domain(IdentityId::SUBFAM_FACT, fib, at(4, 0, 0), "p >= 1");
  expect_domain(IdentityId::FIB_POSNEG, FamilySpec::power(1), at(3), "Lucas family");
  expect_domain(IdentityId::FIB_POLY, FamilySpec::lucas(2), at(3, 1), "Lucas(-1)");
  expect_domain(IdentityId::REC_M, fib, at(0, 1), "n >= 1");
  expect_domain(IdentityId::REC_M, fib, at(2), "m required");
}

TEST(EvalIdentity, UnusedParametersAreDropped) {
  auto c = seqfam::eval_identity(IdentityId::L1, FamilySpec::pochhammer(), at(4, 7, 1, 0));
  EXPECT_FALSE(c.params.m);
  EXPECT_FALSE(c.params.p);
  EXPECT_TRUE(c.pass);
}

TEST(EvalIdentity, MismatchIsReportedAsFailure) {
  auto c = seqfam::detail::make_check(IdentityId::L1, FamilySpec::fibonacci(), at(2), ExactScalar(1), ExactScalar(3));
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.residual, ExactScalar(-2));
}

TEST(Sweep, NonProductSequenceProducesFailures) {
  // roots drift with every call, so X_{n,m} is no longer a product in m
  auto drift = std::make_shared<std::int64_t>(0);
  auto bad = FamilySpec::explicit_roots("drift", [drift](std::int64_t, std::int64_t l) {
    return ExactScalar(l + (*drift)++ % 3);
  });
  auto r = seqfam::sweep({IdentityId::REC_M}, {bad}, {IntRange{2, 4}, IntRange{0, 3}}, 1);
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.failures.empty());
  for (const auto& f : r.failures) {
    EXPECT_EQ(f.family, "roots:drift");
    EXPECT_FALSE(f.pass);
    EXPECT_EQ(f.residual, f.lhs - f.rhs);
  }
  EXPECT_TRUE(std::is_sorted(r.failures.begin(), r.failures.end(),
                             [](const auto& a, const auto& b) { return a.params < b.params; }));
}

TEST(MRecursion, PowerPochhammerFibonacciInstances) {
  auto sq = seqfam::eval_m_recursion(FamilySpec::power(0), 2, 4);
  EXPECT_EQ(sq.lhs, ExactScalar(25));
  EXPECT_TRUE(sq.pass);
  EXPECT_EQ(sq.identity, IdentityId::REC_M);

  // base m = 3: a_3 = 120, a_2 = 60, a_1 = 24
  auto poch = seqfam::eval_m_recursion(FamilySpec::pochhammer(), 3, 3);
  EXPECT_EQ(poch.lhs, ExactScalar(210));
  EXPECT_EQ(poch.rhs, ExactScalar(3 * 120 - 3 * 60 + 24 + 6));
  EXPECT_TRUE(poch.pass);
  auto next = seqfam::eval_m_recursion(FamilySpec::pochhammer(), 3, 4);
  EXPECT_EQ(next.lhs, ExactScalar(336));
  EXPECT_EQ(next.rhs, ExactScalar(3 * 210 - 3 * 120 + 60 + 6));

  auto fib = seqfam::eval_m_recursion(FamilySpec::fibonacci(), 4, 3);
  EXPECT_EQ(fib.lhs, ExactScalar(305));
  EXPECT_EQ(fib.rhs, ExactScalar(4 * 109 - 6 * 29 + 4 * 5 - 1 + 24));
  EXPECT_TRUE(fib.pass);
}

TEST(MRecursion, AgreesWithRecM) {
  for (const auto& f : ten_families())
    for (int n = 1; n <= 10; ++n)
      for (int m = -6; m <= 6; ++m) {
        auto a = seqfam::eval_m_recursion(f, n, m);
        auto b = seqfam::eval_identity(IdentityId::REC_M, f, at(n, m));
        ASSERT_EQ(a.rhs, b.rhs);
        ASSERT_TRUE(a.pass);
      }
}

TEST(Sweep, FibonacciAllIdentitiesClean) {
  auto r = seqfam::sweep(seqfam::all_identities(), {FamilySpec::fibonacci()}, {IntRange{1, 12}, IntRange{-8, 8}}, 2);
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.total, 0u);
  EXPECT_EQ(r.checks_by_identity.at("L1"), 12u);
  EXPECT_EQ(r.checks_by_identity.at("REC_M"), 12u * 17u);
  EXPECT_EQ(r.checks_by_identity.at("L2_SCALE"), 12u * 16u);
  // m in [n, 8] for n = 1..8
  EXPECT_EQ(r.checks_by_identity.at("EXPL_POS"), 8u + 7 + 6 + 5 + 4 + 3 + 2 + 1);
  // sum_{n<=12} C(n,2) points (p,q) times 17 m values
  EXPECT_EQ(r.checks_by_identity.at("SUBFAM_ZERO"), 286u * 17u);
  EXPECT_EQ(r.checks_by_identity.at("SUBFAM_FACT"), 66u * 17u);
}

TEST(Sweep, RationalPowerFamily) {
  auto r = seqfam::sweep({IdentityId::L1}, {FamilySpec::power(ExactScalar::fraction(1, 2))}, {IntRange{1, 10}, IntRange{0, 0}});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.total, 10u);
}

TEST(Sweep, EmptyAdmissibleSet) {
  auto r = seqfam::sweep({IdentityId::EXPL_POS}, {FamilySpec::power(2)}, {IntRange{5, 8}, IntRange{-3, 4}});
  EXPECT_EQ(r.total, 0u);
  EXPECT_TRUE(r.ok());
}

TEST(Sweep, SoundnessAcrossFamiliesSmallGrid) {
  auto r = seqfam::sweep(seqfam::all_identities(), ten_families(), {IntRange{1, 8}, IntRange{-5, 5}}, 4);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : seqfam::to_json(r.failures.front()).dump());
}

TEST(Sweep, ExplicitPRangeIsFilteredByDomain) {
  seqfam::SweepGrid g{IntRange{1, 4}, IntRange{0, 2}};
  g.p = IntRange{1, 10};
  auto r = seqfam::sweep({IdentityId::SUBFAM_FACT}, {FamilySpec::pochhammer()}, g);
  // p beyond n-1 is filtered, not failed
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.total, (1u + 2u + 3u) * 3u);
}

TEST(Sweep, WorkerCountDoesNotChangeContent) {
  auto ids = seqfam::all_identities();
  auto fams = ten_families();
  seqfam::SweepGrid g{IntRange{1, 7}, IntRange{-4, 4}};
  auto a = seqfam::to_json(seqfam::sweep(ids, fams, g, 1), false).dump();
  auto b = seqfam::to_json(seqfam::sweep(ids, fams, g, 5), false).dump();
  auto c = seqfam::to_json(seqfam::sweep(ids, fams, g, 5), false).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
}

TEST(FibPosNeg, ParityClaim) {
  for (int n = 1; n <= 20; ++n) {
    auto c = seqfam::eval_identity(IdentityId::FIB_POSNEG, FamilySpec::fibonacci(), at(n));
    const ExactScalar expected = n % 2 ? ExactScalar(n) * seqfam::factorial(n + 1) : ExactScalar(0);
    EXPECT_EQ(c.lhs, expected) << n;
    EXPECT_TRUE(c.pass);
  }
  // n = 1: -1 * (F_2^{(-1)} - F_2^{(1)}) = 2
  EXPECT_EQ(seqfam::eval_identity(IdentityId::FIB_POSNEG, FamilySpec::fibonacci(), at(1)).lhs, ExactScalar(2));
  // n = 2 complement: -2 (2 + 2) + 2 (5 + 5) = 12
  EXPECT_EQ(seqfam::eval_identity(IdentityId::FIB_POSNEG_COMPL, FamilySpec::fibonacci(), at(2)).lhs, ExactScalar(12));
}

TEST(OracleEquivalence, ExplicitRecursionDirect) {
  for (const auto& f : ten_families())
    for (int n = 1; n <= 12; ++n)
      for (int m = n; m <= 12 + n; ++m) {
        auto expl = seqfam::eval_identity(IdentityId::EXPL_POS, f, at(n, m));
        const ExactScalar direct = seqfam::X(f, n, m);
        ASSERT_EQ(expl.rhs, direct) << f.descriptor() << " n=" << n << " m=" << m;
        ASSERT_EQ(seqfam::unroll_m_recursion(f, n, m), direct);
        ASSERT_EQ(seqfam::eval_identity(IdentityId::REC_M, f, at(n, m - 1)).rhs, direct);
      }
}

TEST(OracleEquivalence, ExplicitRootReplicasAgree) {
  auto poch_rep = FamilySpec::explicit_roots("l", [](std::int64_t, std::int64_t l) { return ExactScalar(l); });
  auto pow_rep = FamilySpec::explicit_roots("2", [](std::int64_t, std::int64_t) { return ExactScalar(2); });
  for (auto id : seqfam::all_identities()) {
    for (int n = 1; n <= 8; ++n)
      for (int m = -4; m <= 9; ++m) {
        IdentityParams p = at(n, m, n > 1 ? std::optional<std::int64_t>(1) : std::nullopt, 0);
        if (seqfam::domain_violation(id, poch_rep, p)) continue;
        auto a = seqfam::eval_identity(id, FamilySpec::pochhammer(), p);
        auto b = seqfam::eval_identity(id, poch_rep, p);
        ASSERT_EQ(a.lhs, b.lhs);
        ASSERT_EQ(a.rhs, b.rhs);
        auto c = seqfam::eval_identity(id, FamilySpec::power(2), p);
        auto d = seqfam::eval_identity(id, pow_rep, p);
        ASSERT_EQ(c.lhs, d.lhs);
        ASSERT_EQ(c.rhs, d.rhs);
      }
  }
}

TEST(OracleEquivalence, QPochhammerThroughExplicitRoots) {
  // x_{n,l} = 2^l and x_{n,l} = l^2: only the generic identities apply
  auto qp = FamilySpec::explicit_roots("2^l", [](std::int64_t, std::int64_t l) { return seqfam::pow(ExactScalar(2), l); });
  auto sq = FamilySpec::explicit_roots("l^2", [](std::int64_t, std::int64_t l) { return ExactScalar(l * l); });
  auto r = seqfam::sweep(seqfam::all_identities(), {qp, sq}, {IntRange{1, 7}, IntRange{-4, 4}});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.checks_by_identity.at("FIB_POSNEG"), 0u);
  EXPECT_EQ(r.checks_by_identity.at("FIB_POLY"), 0u);
}

TEST(Json, ReportSchema) {
  auto r = seqfam::sweep({IdentityId::REC_M}, {FamilySpec::fibonacci()}, {IntRange{1, 2}, IntRange{0, 1}});
  auto j = seqfam::to_json(r, false);
  EXPECT_EQ(j["total"], 4);
  EXPECT_EQ(j["identities"][0], "REC_M");
  EXPECT_EQ(j["families"][0], "lucas:-1");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_FALSE(j.contains("wall_time_s"));

  auto c = seqfam::to_json(seqfam::eval_identity(IdentityId::SCALE_ID, FamilySpec::fibonacci(), at(2, 2)));
  EXPECT_EQ(c["lhs"], "12");
  EXPECT_EQ(c["params"]["m"], 2);
  EXPECT_FALSE(c["params"].contains("p"));
}
