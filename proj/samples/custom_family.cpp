#include <iostream>

#include "seqfam/seqfam.hpp"

int main() {
  using namespace seqfam;

  // roots 1, 4, 9, ..., n^2
  auto squares = FamilySpec::explicit_roots("l^2", [](std::int64_t, std::int64_t l) { return ExactScalar(l * l); });

  auto w = table(squares, {1, 4}, {0, 5});
  for (std::int64_t n = 1; n <= 4; ++n) {
    for (std::int64_t m = 0; m <= 5; ++m) std::cout << w.at(n, m).str() << ' ';
    std::cout << '\n';
  }

  auto report = sweep({IdentityId::L1, IdentityId::REC_M, IdentityId::EXPL_POS}, {squares, FamilySpec::fibonacci()},
                      SweepGrid{{1, 10}, {-5, 15}});
  std::cout << report.total << " checks, " << report.failures.size() << " failures\n";
  return report.ok() ? 0 : 1;
}
