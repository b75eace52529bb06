#include <doctest.h>

#include <cmath>
#include <random>

#include "latflow/diophantine.hpp"
#include "latflow/error.hpp"
#include "oracles.hpp"

using namespace latflow;

namespace {

mpq_class rat(long n, long d) {
  mpq_class x(n, d);
  x.canonicalize();
  return x;
}

Scalar q(long n, long d = 1) { return Scalar(rat(n, d)); }

Scalar lam() { return Scalar(oracle::liouville4()); }

std::vector<unsigned long> qs(const WitnessSearch& s) {
  std::vector<unsigned long> out;
  for (const auto& w : s.witnesses) out.push_back(w.q.get_ui());
  return out;
}

// Brute-force W2 witnesses straight from the definition.
std::vector<unsigned long> brute_w2(const mpq_class& a, const mpq_class& b, const mpq_class& C, unsigned long q_max) {
  std::vector<unsigned long> out;
  for (unsigned long k = 1; k <= q_max; ++k) {
    const mpz_class qz(k);
    const mpq_class worst = std::max(oracle::distance_to_z(a, qz), oracle::distance_to_z(b, qz));
    if (worst <= C / (qz * qz)) out.push_back(k);
  }
  return out;
}

LineSegmentSpec unit_line(const Scalar& a, const Scalar& b) {
  return LineSegmentSpec(a, b, Scalar(0), Scalar(1), ModeSpec::rational());
}

}  // namespace

TEST_SUITE("diophantine") {
  TEST_CASE("nearest residuals") {
    const auto zero = nearest_residuals(q(0), q(0), 7);
    CHECK(zero.residual1 == Scalar(0));
    CHECK(zero.residual2 == Scalar(0));

    const auto third = nearest_residuals(q(0), q(1, 3), 3);
    CHECK(third.residual1 == Scalar(0));
    CHECK(third.p1 == -1);

    const auto liou = nearest_residuals(lam(), lam(), 1000000);
    CHECK(liou.residual1 == Scalar(mpq_class(1, mpz_class("1000000000000000000"))));

    const auto tie = nearest_residuals(q(1, 2), q(1, 2), 1);
    CHECK(tie.p1 == 0);
    CHECK(tie.residual1 == q(1, 2));
    CHECK_THROWS_AS(nearest_residuals(q(1), q(1), 0), InvalidInput);
  }

  TEST_CASE("residuals stay in [0, 1/2]") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long> d(-1000, 1000), den(1, 997);
    for (int i = 0; i < 500; ++i) {
      const Scalar a = q(d(rng), den(rng)), b = q(d(rng), den(rng));
      const mpz_class qq(static_cast<long>(den(rng)));
      const auto r = nearest_residuals(a, b, qq);
      CHECK(r.residual1 >= Scalar(0));
      CHECK(r.residual1 <= q(1, 2));
      CHECK(r.residual1.to_rational() == oracle::distance_to_z(b.to_rational(), qq));
      CHECK(r.residual2.to_rational() == oracle::distance_to_z(a.to_rational(), qq));
    }
  }

  TEST_CASE("W2 search examples") {
    const auto zero = w2_witness_search(q(0), q(0), q(1), 500);
    CHECK(zero.count == 500);
    CHECK(qs(zero).front() == 1);
    CHECK(qs(zero).back() == 500);

    const auto rational = w2_witness_search(q(1, 2), q(1, 3), q(1, 1000), 1000);
    for (auto k : qs(rational)) CHECK(k % 6 == 0);
    CHECK(rational.count == 166);

    // Only 10^6 qualifies within q_max: at q = 10 the residual is 0.10001 > 10^-2
    // and at q = 100 it is 10^-4 + 10^-22 > 10^-4.
    const auto liou = w2_witness_search(lam(), lam(), q(1), 1000000);
    const auto found = qs(liou);
    CHECK(std::find(found.begin(), found.end(), 1000000UL) != found.end());
    CHECK(std::find(found.begin(), found.end(), 10UL) == found.end());
    CHECK(std::find(found.begin(), found.end(), 100UL) == found.end());
    for (const auto& w : liou.witnesses) {
      const auto r = nearest_residuals(lam(), lam(), w.q);
      CHECK(r.residual1 == w.residual1);
      CHECK(r.residual2 == w.residual2);
      CHECK(w.tag == WitnessClass::w2);
    }
  }

  TEST_CASE("W2 search agrees with brute force") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<long> num(-500, 500), den(1, 400);
    for (int i = 0; i < 20; ++i) {
      const mpq_class a = rat(num(rng), den(rng)), b = rat(num(rng), den(rng));
      const mpq_class C(1, 1 + i);
      CHECK(qs(w2_witness_search(Scalar(mpq_class(a)), Scalar(mpq_class(b)), Scalar(C), 2000)) ==
            brute_w2(mpq_class(a), mpq_class(b), C, 2000));
    }
    const Scalar s2(std::sqrt(2.0)), s3(std::sqrt(3.0));
    CHECK(qs(w2_witness_search(s2, s3, q(1, 4), 3000)) ==
          brute_w2(s2.to_rational(), s3.to_rational(), mpq_class(1, 4), 3000));
  }

  TEST_CASE("W2eps search") {
    // q = 1 always passes: its residuals are at most 1/2.
    const auto rational = w2eps_witness_search(q(1, 2), q(1, 3), q(7), 600);
    CHECK(rational.count == 101);

    const auto liou = w2eps_witness_search(lam(), lam(), q(1), 1000000);
    REQUIRE(liou.count == 2);
    CHECK(liou.witnesses[0].q == 1);
    CHECK(liou.witnesses[1].q == 1000000);
    CHECK(liou.witnesses[1].bound == Scalar(mpq_class(1, mpz_class("1000000000000000000"))));

    const Scalar s2(sqrt(BigFloat(2.0, 256))), s3(sqrt(BigFloat(3.0, 256)));
    const auto generic = w2eps_witness_search(s2, s3, Scalar(0.5), 100000);
    REQUIRE(generic.count == 1);
    CHECK(generic.witnesses[0].q == 1);

    // eps = 1/3 takes the exact path, eps = 0.1 (binary) the 256-bit one.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> num(-40, 40), den(1, 60);
    for (const Scalar& eps : {q(1, 3), Scalar(0.1)}) {
      for (int i = 0; i < 10; ++i) {
        const mpq_class a = rat(num(rng), den(rng)), b = rat(num(rng), den(rng));
        std::vector<unsigned long> expected;
        for (unsigned long k = 1; k <= 300; ++k) {
          const mpz_class qz(k);
          const double worst = std::max(oracle::distance_to_z(a, qz), oracle::distance_to_z(b, qz)).get_d();
          if (worst * std::pow(static_cast<double>(k), 2 + eps.to_double()) <= 1 + 1e-12) expected.push_back(k);
        }
        CHECK(qs(w2eps_witness_search(Scalar(a), Scalar(b), eps, 300)) == expected);
      }
    }
  }

  TEST_CASE("W2 contains W2eps for a looser C") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
    for (int i = 0; i < 10; ++i) {
      const Scalar a = q(num(rng), den(rng)), b = q(num(rng), den(rng));
      const auto w2 = qs(w2_witness_search(a, b, q(1), 500));
      for (auto k : qs(w2eps_witness_search(a, b, q(1, 2), 500))) {
        CHECK(std::find(w2.begin(), w2.end(), k) != w2.end());
      }
    }
  }

  TEST_CASE("witness lists are capped") {
    const auto many = w2_witness_search(q(0), q(0), q(1), 150000);
    CHECK(many.count == 150000);
    CHECK(many.witnesses.size() == kWitnessLimit);
    CHECK(many.truncated);
  }

  TEST_CASE("W2inf profile") {
    const auto liou = w2inf_profile(lam(), lam(), {q(1), q(1, 1000), q(1, 1000000)}, 1000000);
    REQUIRE(liou.size() == 3);
    for (const auto& e : liou) REQUIRE(e.witness.has_value());
    CHECK(liou[0].witness->q == 1);
    CHECK(liou[1].witness->q == 1000000);
    CHECK(liou[2].witness->q == 1000000);
    const auto rational = w2inf_profile(q(1, 2), q(1, 3), {q(1), q(1, 1000000)}, 100);
    CHECK(rational[0].witness->q == 1);
    CHECK(rational[1].witness->q == 6);

    const Scalar s2(std::sqrt(2.0)), s3(std::sqrt(3.0));
    const auto generic = w2inf_profile(s2, s3, {q(1), q(1, 10), q(1, 1000)}, 100000);
    CHECK(generic[0].witness.has_value());
    CHECK_FALSE(generic[2].witness.has_value());
    unsigned long last = 0;
    for (const auto& e : generic) {
      if (!e.witness) continue;
      CHECK(e.witness->q.get_ui() >= last);
      last = e.witness->q.get_ui();
    }
    CHECK_THROWS_AS(w2inf_profile(s2, s3, {q(1, 10), q(1)}, 10), InvalidInput);
  }

  TEST_CASE("rational certificates") {
    const auto half_third = rational_certificate(q(1, 2), q(1, 3));
    REQUIRE(half_third.has_value());
    CHECK(half_third->p1 == 2);
    CHECK(half_third->p2 == 3);
    CHECK(half_third->q == 6);
    const LineSegmentSpec line = unit_line(q(1, 2), q(1, 3));
    for (const Scalar& s : {q(0), q(1, 2), q(1)}) {
      const auto point = flow_standard(line, s, FlowTime(0.0), half_third->annihilator());
      CHECK(point.coords[0] == Scalar(0));
      CHECK(point.coords[1] == Scalar(-3));
      CHECK(point.coords[2] == Scalar(6));
    }
    const auto zero = rational_certificate(q(0), q(0));
    CHECK(zero->p1 == 0);
    CHECK(zero->p2 == 0);
    CHECK(zero->q == 1);
    const auto ints = rational_certificate(q(5), q(7));
    CHECK(ints->p1 == 7);
    CHECK(ints->p2 == 5);
    CHECK(ints->q == 1);
    CHECK_THROWS_AS(rational_certificate(Scalar(0.5), q(1)), NotApplicable);
  }

  TEST_CASE("certificates annihilate the first coordinate for any s") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<long> num(-30, 30), den(1, 40);
    const Scalar a = q(-7, 12), b = q(5, 18);
    const auto cert = rational_certificate(a, b);
    const LineSegmentSpec line = unit_line(a, b);
    for (int i = 0; i < 10; ++i) {
      const auto point = flow_standard(line, q(num(rng), den(rng)), FlowTime(1.7), cert->annihilator());
      CHECK(point.intercept == Scalar(0));
      CHECK(point.slope == Scalar(0));
      CHECK(point.first_at(point.s) == Scalar(0));
    }
  }

  TEST_CASE("E_q intervals") {
    // q = 4, b = a = 1/8: residual 1/2 and R1 R^2 q^-2 = 1/2 with R = 1, R1 = 8.
    CHECK_FALSE(eq_interval(4, q(1, 8), q(1, 8), q(1), q(8)).has_value());
    CHECK(eq_interval(4, q(1, 8), q(1, 8), q(1), q(9)).has_value());

    const auto hundred = eq_interval(100, lam(), lam(), q(2), q(2));
    REQUIRE(hundred.has_value());
    CHECK(hundred->lo < std::log(100.0));
    CHECK(hundred->hi > std::log(100.0));
    CHECK(hundred->lo == doctest::Approx(std::log(50.0)));

    const auto one = eq_interval(1, Scalar(std::sqrt(2.0)), Scalar(std::sqrt(3.0)), q(2), q(4));
    REQUIRE(one.has_value());
    CHECK(one->lo == 0.0);

    const auto hit = eq_interval(6, q(1, 2), q(1, 3), q(2), q(4));
    REQUIRE(hit.has_value());
    CHECK(hit->unbounded);
    CHECK(std::isinf(hit->hi));
    CHECK_THROWS_AS(eq_interval(1, q(0), q(0), q(2), q(1)), InvalidInput);
  }

  TEST_CASE("density on a rational point") {
    const LineSegmentSpec line = unit_line(q(1, 2), q(1, 3));
    const DensityProfile p = ir_density(line, q(2), 20.0, 1000);
    CHECK(p.rational_hit);
    CHECK(p.union_fraction == doctest::Approx(1.0));
    CHECK(p.direct_fraction > 0.95);
    CHECK(std::abs(p.union_fraction - p.direct_fraction) < 0.05);
    CHECK(p.R1 == Scalar(4));
  }

  TEST_CASE("density of a generic point at small R") {
    const LineSegmentSpec line(Scalar(std::sqrt(2.0)), Scalar(std::sqrt(3.0)), Scalar(0.0), Scalar(1.0));
    const DensityProfile p = ir_density(line, Scalar(0.1), 1.0, 1000);
    CHECK(p.direct_fraction == 0.0);
    CHECK(p.union_fraction == 0.0);
    CHECK(segment_sup(line, FlowTime(0.0), make_ivec(0, 1, 0)) >= Scalar(1.0));
  }

  TEST_CASE("direct I_R lies inside the E_q union") {
    const LineSegmentSpec line = unit_line(lam(), lam());
    const double T = std::log(1000.0);
    const DensityProfile p = ir_density(line, q(2), T, 1000);
    CHECK(p.direct_fraction > 0.0);
    CHECK(p.union_fraction >= p.direct_fraction);
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      if (!p.in_IR[k]) continue;
      bool covered = false;
      for (const auto& e : p.intervals) covered = covered || (e.lo < p.grid[k] && p.grid[k] < e.hi);
      CHECK(covered);
    }
    CHECK(p.coverage_warning == (std::log(1000.0) - std::log(2.0) < T));
  }

  TEST_CASE("E_q gap between consecutive primitive witnesses") {
    const LineSegmentSpec line = unit_line(lam(), lam());
    const DensityProfile p = ir_density(line, q(2), 1.0, 1000000, 0.01);
    const mpz_class C = 32;  // 2 R1 R^2 with R = 2, R1 = 4
    for (std::size_t i = 0; i + 1 < p.intervals.size(); ++i) {
      const mpz_class& a = p.intervals[i].q;
      const mpz_class& b = p.intervals[i + 1].q;
      CHECK(a * a < C * b);
    }
  }

  TEST_CASE("Dirichlet direct search") {
    const Scalar s = q(2, 7);
    // x on the line (a, b) = (3/5, 2/5): x . (-3, 5) = 2.
    const Scalar x2 = q(3, 5) * s + q(2, 5);
    const auto rational = dirichlet_direct(s, x2, q(1, 100), {q(5), q(10), q(100)});
    for (const auto& v : rational) {
      CHECK(v.solvable);
      CHECK(v.residual->to_rational() <= mpq_class(1, 100) / (v.T.to_rational() * v.T.to_rational()));
    }
    const auto easy = dirichlet_direct(Scalar(std::sqrt(2.0)), Scalar(std::sqrt(3.0)), q(1, 2), {q(1)});
    CHECK(easy[0].solvable);
    CHECK_THROWS_AS(dirichlet_direct(s, x2, q(1, 2), {q(1001)}), BudgetError);
    CHECK_THROWS_AS(dirichlet_direct(s, x2, q(1), {q(10)}), InvalidInput);
  }

  TEST_CASE("Dirichlet search agrees with brute force") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const Scalar x1(u(rng)), x2(u(rng));
      const long T = 3 + i;
      const mpq_class delta(1 + i % 9, 10);
      const mpq_class bound = delta / (T * T);
      bool expected = false;
      for (long a = -T; a <= T && !expected; ++a)
        for (long b = -T; b <= T; ++b) {
          if (a == 0 && b == 0) continue;
          const mpq_class y = x1.to_rational() * a + x2.to_rational() * b;
          if (abs(mpq_class(y - oracle::nearest(y))) <= bound) {
            expected = true;
            break;
          }
        }
      CHECK(dirichlet_direct(x1, x2, Scalar(delta), {q(T)})[0].solvable == expected);
    }
  }
}
