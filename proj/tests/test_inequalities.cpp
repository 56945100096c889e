#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "lmcf/inequalities.hpp"
#include "lmcf/solutions.hpp"

using namespace lmcf;

TEST_CASE("young's inequality on hand values") {
  // (a, b, eps, p, q) = (2, 3, 1, 2, 2): 6 <= 4 + 9
  CHECK(2.0 * 3.0 <= 1.0 * 4.0 + 9.0);
  // (1, 1, eps, 2, 2): 1 <= eps + 1/eps, equality at eps = 1
  for (double eps : {0.5, 1.0, 2.0}) CHECK(1.0 <= eps + 1.0 / eps + 1e-15);
  CHECK(1.0 == doctest::Approx(1.0 + 1.0 / 1.0 - 1.0));
}

TEST_CASE("young check: zero violations over the seeded domain") {
  SampleDomain dom;
  dom.sample_count = 100000;
  const LabReport rep = young_check(dom);
  CHECK(rep.violations == 0);
}

TEST_CASE("young check is reproducible bit-for-bit from the seed") {
  SampleDomain dom;
  dom.sample_count = 20000;
  dom.seed = 777;
  const LabReport a = young_check(dom);
  const LabReport b = young_check(dom);
  CHECK(a.violations == b.violations);
  CHECK(a.stream_checksum == b.stream_checksum);
  dom.seed = 778;
  CHECK(young_check(dom).stream_checksum != a.stream_checksum);
}

TEST_CASE("amgm relation: equality case and degenerate case") {
  // X = Y Z / (b - v) gives equality
  const double b = 0.8, v = 0.3, d = b - v;
  const double y = 2.0, z = 1.5;
  const double x = y * z / d;
  const double lhs = 2 * x * x / (d * d) + 2 * y * y * z * z / (d * d * d * d);
  const double rhs = 4 * x * y * z / (d * d * d);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  // X = 1, Y = Z = 0: lhs = 2/(b-v)^2 > 0 = rhs
  CHECK(2.0 / (d * d) > 0.0);
}

TEST_CASE("amgm check: zero violations over the seeded domain") {
  SampleDomain dom;
  dom.sample_count = 100000;
  const LabReport rep = amgm_mei_check(dom);
  CHECK(rep.violations == 0);
  const LabReport again = amgm_mei_check(dom);
  CHECK(again.stream_checksum == rep.stream_checksum);
}

TEST_CASE("sample domain validation") {
  SampleDomain dom;
  dom.p_min = 1.0;
  CHECK_THROWS_AS(young_check(dom), std::invalid_argument);
  dom = SampleDomain{};
  dom.sample_count = 0;
  CHECK_THROWS_AS(young_check(dom), std::invalid_argument);
}

TEST_CASE("kato on the grim reaper: exact equality where kappa > 0") {
  SolutionSpec spec;
  spec.kind = SolutionKind::GrimReaper;
  spec.samples = 400;
  // kappa keeps one sign, so |kappa| = -kappa bitwise and the gradients agree
  CHECK(curve_kato_check(sample(spec)) == 0.0);
}

TEST_CASE("kato on a straight line: guarded out, zero violation") {
  SolutionSpec spec;
  spec.kind = SolutionKind::Line;
  spec.samples = 32;
  CHECK(curve_kato_check(sample(spec)) == 0.0);
}

TEST_CASE("kato on the sine graph: violations shrink at observed order >= 0.9") {
  SolutionSpec spec;
  spec.kind = SolutionKind::SineGraph;
  std::vector<double> viol;
  for (int n : {256, 512, 1024}) {
    spec.samples = n;
    viol.push_back(std::max(curve_kato_check(sample(spec)), 1e-16));
  }
  const double span = spec.periods * 2 * 3.14159265358979;
  const double h0 = span / 256;
  CHECK(viol[0] <= 1e-9 + 5.0 * h0 * h0);
  // vacuous when the discrete inequality holds outright
  if (viol[0] > 1e-12) {
    CHECK(std::log2(viol[0] / viol[1]) >= 0.9);
    CHECK(std::log2(viol[1] / viol[2]) >= 0.9);
  }
}
