#include <gtest/gtest.h>

#include <random>

#include "qcf/catalog.hpp"
#include "qcf/euler.hpp"

using namespace qcf;

namespace {

QSeries poly(int order, std::initializer_list<long> cs) {
  QSeries s(order);
  int i = 0;
  for (long c : cs) s[i++] = c;
  return s;
}

QSeries R(int s, const Rational& a, int N) { return build_family(Family::R, s, ParamPoint{a, 0, 0}, N); }

// Replays the expansion and checks N - D = factor * E at every step.
void expect_factor_contract(const QSeries& num, const QSeries& den, const ExpansionTrace& t) {
  QSeries n = num, d = den;
  for (const auto& s : t.steps) {
    const QSeries delta = n - d;
    const int order = s.next_denominator.order();
    EXPECT_EQ(s.next_denominator[0], 1);
    EXPECT_EQ(monomial_mul(s.factor, s.next_denominator), delta.truncated(order));
    n = d.truncated(order);
    d = s.next_denominator;
  }
}

void expect_reconstruction(const QSeries& num, const QSeries& den, const ExpansionTrace& t) {
  const int depth = static_cast<int>(t.steps.size());
  const int order = t.certified_order();
  const QSeries target = divide(num, den).truncated(order);
  EXPECT_FALSE(first_mismatch(approximant(t.produced(), depth, order), target));
}

}  // namespace

TEST(EulerStep, Examples) {
  const EulerStepResult s = euler_step(poly(6, {1, 1}), QSeries::one(6));
  EXPECT_FALSE(s.terminated);
  EXPECT_EQ(s.factor, QMonomial(1, 1));
  EXPECT_EQ(s.next_denominator, QSeries::one(5));

  EXPECT_TRUE(euler_step(poly(6, {1, 2, 3}), poly(6, {1, 2, 3})).terminated);

  const int N = 20;
  const EulerStepResult rr = euler_step(R(0, 1, N), R(1, 1, N));
  EXPECT_EQ(rr.factor, QMonomial(1, 1));
  EXPECT_EQ(rr.next_denominator, R(2, 1, N - 1));
}

TEST(EulerStep, NormalizesLeadingCoefficient) {
  const EulerStepResult s = euler_step(poly(5, {1, 0, 3, 6}), poly(5, {1}));
  EXPECT_EQ(s.factor, QMonomial(3, 2));
  EXPECT_EQ(s.next_denominator, poly(3, {1, 2}));
}

TEST(EulerStep, NonUnitInput) {
  EXPECT_THROW(euler_step(poly(4, {2, 1}), QSeries::one(4)), NonUnitInput);
  EXPECT_THROW(euler_step(QSeries::one(4), poly(4, {0, 1})), NonUnitInput);
}

TEST(EulerExpand, RogersRamanujanFactors) {
  const int N = 80;
  for (const auto& [a, depth] : {std::pair{make_rational(1), 10}, std::pair{make_rational(1, 3), 8}}) {
    const QSeries num = R(0, a, N), den = R(1, a, N);
    const ExpansionTrace t = euler_expand(num, den, depth);
    ASSERT_EQ(t.steps.size(), static_cast<std::size_t>(depth));
    for (int k = 1; k <= depth; ++k) EXPECT_EQ(t.steps[static_cast<std::size_t>(k - 1)].factor, QMonomial(a, k));
    EXPECT_EQ(t.stop, StopReason::max_depth);
    EXPECT_EQ(t.residual_order, N - depth * (depth + 1) / 2);
    expect_factor_contract(num, den, t);
    expect_reconstruction(num, den, t);
    EXPECT_FALSE(first_mismatch(approximant(t.produced(), depth, t.residual_order),
                                divide(num, den).truncated(t.residual_order)));
  }
}

TEST(EulerExpand, EqualInputsTerminate) {
  const QSeries x = R(0, make_rational(2, 3), 15);
  const ExpansionTrace t = euler_expand(x, x, 5);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.stop, StopReason::terminated);
  EXPECT_EQ(approximant(t.produced(), 0, 15), QSeries::one(15));
  EXPECT_NE(render_trace(t).find("terminated: ratio is 1"), std::string::npos);
}

TEST(EulerExpand, FiniteFractionTerminates) {
  // (1 + 2q)/(1 + q) = 1 + q/(1 + q/1)
  const QSeries num = poly(12, {1, 2}), den = poly(12, {1, 1});
  const ExpansionTrace t = euler_expand(num, den, 10);
  EXPECT_EQ(t.stop, StopReason::terminated);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.steps[0].factor, QMonomial(1, 1));
  EXPECT_EQ(t.steps[1].factor, QMonomial(1, 1));
  EXPECT_EQ(t.certified_order(), 12);
  expect_reconstruction(num, den, t);
}

TEST(EulerExpand, PrecisionExhausted) {
  const QSeries num = R(0, 1, 21), den = R(1, 1, 21);
  const ExpansionTrace t = euler_expand(num, den, 10);
  EXPECT_EQ(t.stop, StopReason::precision_exhausted);
  // q + q^2 + ... + q^5 uses 15 orders; q^6 would leave none
  EXPECT_EQ(t.steps.size(), 5u);
  EXPECT_EQ(t.residual_order, 6);
  EXPECT_GE(t.residual_order, 2);
  expect_reconstruction(num, den, t);
  EXPECT_THROW(euler_expand(num, den, 0), QcfError);
}

TEST(EulerExpand, VanishingDifferenceAtLowOrderReadsAsTerminated) {
  // After q..q^5 the working order is 5 and R(5) - R(6) = q^6 R(7) is zero there.
  const ExpansionTrace t = euler_expand(R(0, 1, 20), R(1, 1, 20), 10);
  EXPECT_EQ(t.stop, StopReason::terminated);
  EXPECT_EQ(t.steps.size(), 5u);
  EXPECT_EQ(t.residual_order, 5);
}

TEST(EulerExpand, RandomPairsInvariants) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    QSeries num(30), den(30);
    num[0] = den[0] = 1;
    for (int i = 1; i <= 30; ++i) {
      num[i] = make_rational(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 3) + 1);
      den[i] = make_rational(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 3) + 1);
    }
    const ExpansionTrace t = euler_expand(num, den, 12);
    int used = 0;
    for (const auto& s : t.steps) used += s.factor.power;
    EXPECT_EQ(t.residual_order, 30 - used);
    expect_factor_contract(num, den, t);
    expect_reconstruction(num, den, t);
  }
}

TEST(EulerExpand, RenderingAndJson) {
  const ExpansionTrace t = euler_expand(R(0, make_rational(1, 3), 30), R(1, make_rational(1, 3), 30), 2);
  EXPECT_EQ(render_trace(t),
            "1: a_1 = 1/3*q, residual_order = 29\n2: a_2 = 1/3*q^2, residual_order = 27\n"
            "stop: max_depth, residual_order = 27\n");
  const auto j = trace_json(t);
  EXPECT_EQ(j["steps"][1]["coef"], "1/3");
  EXPECT_EQ(j["steps"][1]["power"], 2);
  EXPECT_EQ(j["residual_order"], 27);
  EXPECT_EQ(j["terminated"], false);
}

// Euler's expansion of catalog ratios written as C-fractions reproduces their
// partial numerators; for the g fraction with b != 0 the expansions differ
// beyond the first levels, but both approximate the same ratio.
TEST(EulerExpand, CatalogSelfConsistency) {
  const int N = 80, depth = 8;
  for (const ParamPoint& p : sample_params(0, 3)) {
    const CFrac rr = catalog_detail::rr_cf(p.a);
    const ExpansionTrace t = euler_expand(R(0, p.a, N), R(1, p.a, N), depth);
    const CFrac eq = equivalence_unit_denominators(rr, depth);
    for (int n = 1; n <= depth; ++n)
      EXPECT_EQ(monomial_mul(t.steps[static_cast<std::size_t>(n - 1)].factor, QSeries::one(N)), eq.element(n, N).a);

    const ParamPoint g0{0, 0, p.lambda};
    const GradedPoint gg = graded(g0);
    const QSeries num = build_family(Family::g, 0, gg, N), den = build_family(Family::g, 1, gg, N);
    const ExpansionTrace tg = euler_expand(num, den, depth);
    const CFrac eqg = equivalence_unit_denominators(catalog_detail::g_cfrac2(0, p.lambda), depth);
    ASSERT_EQ(tg.steps.size(), static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n)
      EXPECT_EQ(monomial_mul(tg.steps[static_cast<std::size_t>(n - 1)].factor, QSeries::one(N)), eqg.element(n, N).a);

    const GradedPoint gb = graded(ParamPoint{0, p.b, p.lambda});
    const QSeries nb = build_family(Family::g, 0, gb, N), db = build_family(Family::g, 1, gb, N);
    const ExpansionTrace tb = euler_expand(nb, db, depth);
    const CFrac eqb = equivalence_unit_denominators(catalog_detail::g_cfrac1(p.b, p.lambda), depth);
    ASSERT_GE(tb.steps.size(), 2u);
    EXPECT_EQ(tb.steps[0].factor, QMonomial(p.lambda, 1));
    EXPECT_EQ(tb.steps[1].factor, QMonomial(p.b, 1));
    EXPECT_EQ(monomial_mul(tb.steps[0].factor, QSeries::one(N)), eqb.element(1, N).a);
    expect_reconstruction(nb, db, tb);
    const int k = static_cast<int>(tb.steps.size());
    EXPECT_EQ(inverse(approximant(tb.produced(), k, 20)).truncated(8),
              approximant(catalog_detail::g_cfrac1(p.b, p.lambda), 12, 20).truncated(8));
  }
}

TEST(ThreeTerm, RogersRamanujanRecurrence) {
  const int N = 40;
  for (int s = 0; s <= 6; ++s) {
    const auto r = verify_three_term(R(s, 1, N), R(s + 1, 1, N), R(s + 2, 1, N), QSeries::one(N),
                                     QSeries::monomial(1, s + 1, N), N);
    EXPECT_TRUE(r.pass) << "s=" << s;
    EXPECT_FALSE(r.first_mismatch);
  }
}

TEST(ThreeTerm, G1Recurrence) {
  const int N = 40;
  for (const ParamPoint& p : sample_params(7, 3)) {
    const GradedPoint g = graded(p);
    for (int s = 0; s <= 5; ++s) {
      const QSeries den = ((LaurentPoly(1) + qm(p.b, s)) * (LaurentPoly(1) + qm(p.b, s + 1))).to_series(N);
      const QSeries c2 = divide(QSeries::monomial(p.lambda, s + 1, N), den);
      const auto r = verify_three_term(build_family(Family::g1, s, g, N), build_family(Family::g1, s + 1, g, N),
                                       build_family(Family::g1, s + 2, g, N), QSeries::one(N), c2, N);
      EXPECT_TRUE(r.pass) << to_string(p) << " s=" << s;
    }
  }
}

TEST(ThreeTerm, CorruptedCoefficientFails) {
  const int N = 40;
  const auto r = verify_three_term(R(0, 1, N), R(1, 1, N), R(2, 1, N), QSeries::one(N),
                                   QSeries::monomial(1, 2, N), N);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.first_mismatch);
  EXPECT_EQ(*r.first_mismatch, 1);
  EXPECT_THROW(verify_three_term(R(0, 1, 10), R(1, 1, 10), R(2, 1, 10), QSeries::one(10), QSeries::one(10), 20),
               QcfError);
}

TEST(Euclid, Examples) {
  EXPECT_EQ(render_quotients(euclid_cf(13, 8)), "[1; 1, 1, 1, 2]");
  EXPECT_EQ(render_quotients(euclid_cf(1, 1)), "[1]");
  EXPECT_EQ(render_quotients(euclid_cf(8, 13)), "[0; 1, 1, 1, 1, 2]");
  EXPECT_THROW(euclid_cf(0, 3), QcfError);
  EXPECT_THROW(euclid_cf(3, -1), QcfError);
}

TEST(Euclid, FibonacciAllOnes) {
  // 13/8 as the unit-numerator fraction 1 + 1/(1 + 1/(1 + 1/(1 + 1/(1 + 1/1))))
  std::vector<Integer> ones(6, 1);
  EXPECT_EQ(euclid_value(ones), make_rational(13, 8));
  EXPECT_EQ(euclid_value(euclid_cf(13, 8)), make_rational(13, 8));
}

TEST(Euclid, RoundTrip) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const long p = static_cast<long>(rng() % 100000) + 1, q = static_cast<long>(rng() % 100000) + 1;
    EXPECT_EQ(euclid_value(euclid_cf(p, q)), make_rational(p, q)) << p << "/" << q;
  }
}
