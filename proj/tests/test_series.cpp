#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <formalred/series.hpp>

using namespace formalred;

namespace {

using RMat = Matrix<Rational>;
using RSeries = PuiseuxMatrix<Rational>;

RMat unit(std::size_t n, std::size_t i, std::size_t j, long long v = 1) {
    RMat m(n, n);
    m(i, j) = Rational(v);
    return m;
}

RSeries random_series(std::mt19937& rng, std::size_t n, long q, long known = 8) {
    std::uniform_int_distribution<long> e(-2 * q, 3 * q);
    std::uniform_int_distribution<long long> v(-4, 4);
    std::uniform_int_distribution<int> terms(1, 4);
    RSeries s(n, q, known);
    int t = terms(rng);
    for (int k = 0; k < t; ++k) {
        RMat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = Rational(v(rng));
        s.add_coeff(e(rng), m);
    }
    return s;
}

RSeries random_unit(std::mt19937& rng, std::size_t n, long q, long known = 8) {
    RSeries t = random_series(rng, n, q, known);
    RSeries u(n, q, known);
    u.set_coeff(0, RMat::identity(n));
    for (const auto& [e, m] : t.support())
        if (e > 0) u.add_coeff(e, m);
    return u;
}

} // namespace

TEST_CASE("normalize strips unramified content and preserves zero") {
    RSeries a(2, 2, 10);
    a.set_coeff(-4, unit(2, 0, 0));
    a.set_coeff(2, unit(2, 1, 1, 3));
    RSeries n = normalize(a);
    CHECK(n.ram() == 1);
    CHECK(n.leading_e() == -2);
    CHECK(n.known_e() == 5);
    CHECK(n.coeff(1) == unit(2, 1, 1, 3));
    CHECK(normalize(n).ram() == 1);  // idempotent
    CHECK(equal_through(normalize(n), n));

    RSeries z(3, 2, 7);
    RSeries nz = normalize(z);
    CHECK(nz.is_zero_series());
    CHECK(!nz.leading_e().has_value());
    CHECK(nz.known_e() == 7);

    RSeries half(2, 4, 20);
    half.set_coeff(-2, unit(2, 0, 1));
    half.set_coeff(4, unit(2, 1, 0));
    RSeries nh = normalize(half);
    CHECK(nh.ram() == 2);
    CHECK(nh.pole_order() == 1);
    CHECK(nh.leading_index() == 1);
}

TEST_CASE("series arithmetic on matrix units") {
    std::mt19937 rng(3);
    RSeries a = random_series(rng, 3, 2, 9);
    CHECK(equal_through(series_mul(a, identity_series<Rational>(3, 2)), a));
    CHECK(series_add(a, series_neg(a)).is_zero_series());

    // (x^-1 E12) (x^-1 E21) = x^-2 E11.
    RSeries l = monomial_series(unit(2, 0, 1), -1);
    RSeries r = monomial_series(unit(2, 1, 0), -1);
    RSeries p = series_mul(l, r);
    CHECK(p.coeff(-2) == unit(2, 0, 0));
    CHECK(p.support().size() == 1);
}

TEST_CASE("budget propagation is conservative") {
    RSeries a(2, 1, 5);
    a.set_coeff(-2, unit(2, 0, 0));
    RSeries b(2, 1, 7);
    b.set_coeff(3, unit(2, 1, 1));
    CHECK(series_add(a, b).known_e() == 5);
    // Product budget: min(E_a + lead_b, E_b + lead_a) = min(5+3, 7-2) = 5.
    CHECK(series_mul(a, b).known_e() == 5);
    // Exact inputs stay exact.
    RSeries c = monomial_series(unit(2, 0, 1), 1);
    CHECK(known_is_inf(series_mul(c, c).known_e()));
}

TEST_CASE("unit series inversion") {
    RSeries i3 = identity_series<Rational>(3);
    CHECK(equal_through(invert_unit(i3, 5), i3, 5));

    // T = I + N x, N nilpotent: inverse is the geometric series I - Nx + N^2 x^2 - ...
    RMat N(3, 3);
    N(0, 1) = Rational(1);
    N(1, 2) = Rational(1);
    RSeries t = identity_series<Rational>(3);
    t.set_coeff(1, N);
    RSeries tinv = invert_unit(t, 6);
    CHECK(tinv.coeff(1) == -N);
    CHECK(tinv.coeff(2) == N * N);
    CHECK(tinv.coeff(3).is_zero());
    CHECK(equal_through(series_mul(t, tinv), i3, 6));

    RSeries bad = monomial_series(unit(2, 0, 1), 0);
    CHECK_THROWS_AS(invert_unit(bad, 3), precondition_error);
    RSeries pole = monomial_series(RMat::identity(2), -1);
    CHECK_THROWS_AS(invert_unit(pole, 3), precondition_error);
}

TEST_CASE("block transformation from the worked 5x5 example inverts cleanly") {
    // H = [[I, U],[V, I]] with the displayed polynomial entries, taken as
    // exact data; multiply-back oracle through x^3.
    auto poly = [](std::vector<std::pair<long, long long>> terms) {
        return terms;
    };
    RSeries h = identity_series<Rational>(5);
    auto put = [&](std::size_t i, std::size_t j, std::vector<std::pair<long, long long>> terms) {
        for (auto [e, v] : terms) h.add_coeff(e, unit(5, i, j, v));
    };
    put(0, 2, poly({{2, -6}, {3, 49}}));
    put(0, 3, poly({{1, -2}, {2, 18}}));
    put(0, 4, poly({{1, 6}, {2, -48}}));
    put(1, 2, poly({{2, 1}, {3, -18}}));
    put(1, 3, poly({{2, -6}, {3, 46}}));
    put(1, 4, poly({{1, -2}, {2, 16}}));
    put(2, 0, poly({{1, 3}, {2, -29}, {3, 290}}));
    put(2, 1, poly({{0, 1}, {1, -9}, {2, 89}}));
    put(3, 0, poly({{1, -1}, {2, 8}, {3, -88}}));
    put(3, 1, poly({{1, 3}, {2, -28}, {3, 274}}));
    put(4, 0, poly({{2, -3}, {3, 28}, {4, -280}}));
    put(4, 1, poly({{1, -1}, {2, 9}, {3, -88}}));

    RSeries hinv = invert_unit(h, 3);
    CHECK(equal_through(series_mul(h, hinv), identity_series<Rational>(5), 3));
    CHECK(equal_through(series_mul(hinv, h), identity_series<Rational>(5), 3));
}

TEST_CASE("theta derivative") {
    RSeries c = monomial_series(RMat::identity(2), 0);
    CHECK(theta_derivative(c).is_zero_series());

    RSeries p = monomial_series(unit(2, 0, 1, 4), -3);
    CHECK(theta_derivative(p).coeff(-3) == unit(2, 0, 1, -12));

    RSeries half = monomial_series(unit(2, 1, 0, 2), 1, 2);
    CHECK(theta_derivative(half).coeff(1) == unit(2, 1, 0, 1));
}

TEST_CASE("gauge transform basics") {
    std::mt19937 rng(7);
    RSeries a = random_series(rng, 3, 1, 9);

    // T = I is the identity gauge.
    CHECK(equal_through(gauge_transform(identity_series<Rational>(3), a), a));

    // Constant invertible C: derivative term vanishes.
    RMat c(3, 3);
    c(0, 0) = Rational(1);
    c(0, 1) = Rational(2);
    c(1, 1) = Rational(1);
    c(2, 2) = Rational(-1);
    RSeries cs = monomial_series(c, 0);
    RSeries g = gauge_transform(cs, a, a.known_e());
    CHECK(equal_through(g, conjugate_const(c, a)));
}

TEST_CASE("gauge composition and inverse, randomized") {
    std::mt19937 rng(11);
    for (int it = 0; it < 30; ++it) {
        long q = 1 + (it % 2);
        RSeries a = random_series(rng, 2, q, 10);
        RSeries t = random_unit(rng, 2, q, 10);
        RSeries s = random_unit(rng, 2, q, 10);
        // (T*S)[A] = S[T[A]] on the overlapping budget.
        RSeries lhs = gauge_transform(series_mul(t, s), a);
        RSeries rhs = gauge_transform(s, gauge_transform(t, a));
        CHECK(!first_discrepancy(lhs, rhs).has_value());
        // T^-1[T[A]] = A on the overlapping budget.
        RSeries back = gauge_transform(invert_unit(t, t.known_e()), gauge_transform(t, a));
        CHECK(!first_discrepancy(back, a).has_value());
    }
}

TEST_CASE("monodromy substitution") {
    std::mt19937 rng(13);
    RSeries a1 = random_series(rng, 2, 1, 8);
    auto c1 = cyclo_context(1);
    CHECK(equal_through(monodromy_substitute(a1, c1), series_to_cyclo(a1, c1)));

    RSeries a2(2, 2, 8);
    a2.set_coeff(1, unit(2, 0, 1, 5));
    auto c2 = cyclo_context(2);
    auto m = monodromy_substitute(a2, c2);
    CHECK(m.coeff(1) == to_cyclo(unit(2, 0, 1, -5), c2));

    // q applications are the identity.
    for (long q : {2L, 3L}) {
        auto ctx = cyclo_context(q);
        RSeries a = random_series(rng, 2, q, 9);
        auto cyc = series_to_cyclo(a, ctx);
        auto roundtrip = cyc;
        for (long k = 0; k < q; ++k) roundtrip = monodromy_substitute(roundtrip, ctx);
        CHECK(equal_through(roundtrip, cyc));
    }
}

TEST_CASE("unramifiedness detection") {
    RSeries a(2, 1, 6);
    a.set_coeff(-2, unit(2, 0, 1));
    CHECK(is_unramified(a));

    RSeries b(2, 2, 6);
    b.set_coeff(-4, unit(2, 0, 1));
    b.set_coeff(1, unit(2, 1, 0));
    CHECK(!is_unramified(b));
    b.set_coeff(1, RMat(2, 2));
    CHECK(is_unramified(b));
}

TEST_CASE("exponential shift") {
    std::mt19937 rng(17);
    RSeries a = random_series(rng, 2, 1, 9);
    CHECK(equal_through(exponential_shift(a, Rational(0), Rational(2)), a));

    // Shift of the zero system by (lambda, k) is k*lambda*x^(-k)*I.
    RSeries z(2, 1, kKnownInf);
    RSeries sh = exponential_shift(z, Rational(5), Rational(3));
    CHECK(sh.coeff(-3) == Rational(15) * RMat::identity(2));
    CHECK(sh.support().size() == 1);

    // Shift then negated shift restores the system.
    RSeries fwd = exponential_shift(a, Rational(7, 2), Rational(2));
    RSeries back = exponential_shift(fwd, Rational(-7, 2), Rational(2));
    CHECK(equal_through(back, a));

    // Fractional k with denominator dividing the ramification.
    RSeries hq = exponential_shift(z, Rational(1), Rational(3, 2));
    CHECK(hq.ram() == 2);
    CHECK(hq.coeff(-3) == Rational(3, 2) * RMat::identity(2));
}
