#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <formalred/shearing.hpp>
#include <formalred/splitting.hpp>

#include "example_system.hpp"

using namespace formalred;

namespace {

using RMat = Matrix<Rational>;
using RSeries = PuiseuxMatrix<Rational>;

// System with block-diagonal leading matrix and disjoint block spectra:
// eigenvalues are read off triangular diagonals, drawn from disjoint pools.
RSeries random_splittable(std::mt19937& rng, std::size_t n1, std::size_t n2, long q, long r,
                          long p, long order) {
    const std::size_t n = n1 + n2;
    std::uniform_int_distribution<long long> v(-3, 3);
    auto triangular = [&](std::size_t m, long long base) {
        RMat t(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            t(i, i) = Rational(base + static_cast<long long>(i));
            for (std::size_t j = i + 1; j < m; ++j) t(i, j) = Rational(v(rng));
        }
        return t;
    };
    RSeries a(n, q);
    long lead = p - q * r;
    RMat ap(n, n);
    ap.set_block(0, 0, triangular(n1, 1));        // spectrum in {1..n1}
    ap.set_block(n1, n1, triangular(n2, -5));     // spectrum in {-5..-5+n2-1}
    a.set_coeff(lead, ap);
    for (long e = lead + 1; e <= lead + order; ++e) {
        RMat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = Rational(v(rng));
        a.add_coeff(e, m);
    }
    a.set_known(lead + order);
    return a;
}

} // namespace

TEST_CASE("already block-diagonal input keeps T = I") {
    std::mt19937 rng(3);
    RSeries a(4, 1);
    RMat ap(4, 4);
    ap.set_block(0, 0, RMat::identity(2));
    RMat low(2, 2);
    low(0, 1) = Rational(1);
    low(1, 0) = Rational(-7);
    ap.set_block(2, 2, Rational(3) * RMat::identity(2) + low);
    a.set_coeff(-2, ap);
    RMat tail(4, 4);
    tail.set_block(0, 0, RMat::identity(2));
    tail.set_block(2, 2, low);
    a.set_coeff(-1, tail);
    a.set_known(6);

    auto res = split(a, BlockPartition{2, 2}, 8);
    CHECK(equal_through(res.transform, identity_series<Rational>(4, 1), 8));
    CHECK(equal_through(res.result, a, res.certified_e));
}

TEST_CASE("hand-solved 2x2 splitting step") {
    // A = x^-1 (diag(1,2) + x E12): one step gives U_1 from 1*u - u*2 = -1,
    // so T = I + x E12 and B = diag(x^-1, 2 x^-1) with zero at order 0.
    RSeries a(2, 1);
    RMat d(2, 2);
    d(0, 0) = Rational(1);
    d(1, 1) = Rational(2);
    RMat e12(2, 2);
    e12(0, 1) = Rational(1);
    a.set_coeff(-1, d);
    a.set_coeff(0, e12);
    a.set_known(10);

    auto res = split(a, BlockPartition{1, 1}, 1);
    CHECK(res.transform.coeff(1) == e12);
    CHECK(res.result.coeff(-1) == d);
    CHECK(res.result.coeff(0).is_zero());

    // Gauge oracle: feeding T back through the independent transform
    // reproduces B coefficientwise.
    auto oracle = gauge_transform(res.transform, a);
    CHECK(equal_through(oracle, res.result, res.certified_e));
}

TEST_CASE("splitting property suite: gauge oracle and zero off-diagonal blocks") {
    std::mt19937 rng(7);
    for (int it = 0; it < 25; ++it) {
        std::uniform_int_distribution<std::size_t> n1d(1, 3), n2d(1, 2);
        std::uniform_int_distribution<long> qd(1, 3), rd(1, 2);
        std::size_t n1 = n1d(rng), n2 = n2d(rng);
        long q = qd(rng), r = rd(rng);
        std::uniform_int_distribution<long> pd(0, q - 1);
        long p = pd(rng);
        long order = 10;
        RSeries a = random_splittable(rng, n1, n2, q, r, p, order);
        auto res = split(a, BlockPartition{n1, n2}, order);

        // Off-diagonal blocks exactly zero through the certified range.
        for (const auto& [e, m] : res.result.support()) {
            CHECK(m.block(0, n1, n1, n2).is_zero());
            CHECK(m.block(n1, 0, n2, n1).is_zero());
        }
        // Independent recomputation via the gauge transform.
        CHECK(equal_through(gauge_transform(res.transform, a), res.result, res.certified_e));
        // Transform shape: identity diagonal blocks, zero leading off-diagonal.
        CHECK(res.transform.coeff(0) == RMat::identity(n1 + n2));
        for (const auto& [e, m] : res.transform.support())
            if (e > 0) {
                CHECK(m.block(0, 0, n1, n1).is_zero());
                CHECK(m.block(n1, n1, n2, n2).is_zero());
            }
        // Determinism: a rerun yields identical output.
        auto res2 = split(a, BlockPartition{n1, n2}, order);
        CHECK(equal_through(res.transform, res2.transform));
        CHECK(equal_through(res.result, res2.result));
    }
}

TEST_CASE("splitting error paths") {
    std::mt19937 rng(9);
    SUBCASE("shared eigenvalue is detected constructively") {
        RSeries a(2, 1);
        RMat same(2, 2);
        same(0, 0) = Rational(1);
        same(1, 1) = Rational(1);
        a.set_coeff(-1, same);
        RMat e21(2, 2);
        e21(1, 0) = Rational(1);
        a.set_coeff(0, e21);
        a.set_known(9);
        CHECK_THROWS_WITH_AS(split(a, BlockPartition{1, 1}, 2).certified_e,
                             "split: leading blocks share an eigenvalue", precondition_error);
    }
    SUBCASE("insufficient budget names the required exponent") {
        RSeries a = random_splittable(rng, 1, 1, 1, 1, 0, 4);
        CHECK_THROWS_AS(split(a, BlockPartition{1, 1}, 9), precondition_error);
    }
    SUBCASE("leading matrix must be block-diagonal") {
        RSeries a(2, 1);
        RMat full(2, 2);
        full(0, 0) = Rational(1);
        full(0, 1) = Rational(1);
        full(1, 1) = Rational(2);
        a.set_coeff(-1, full);
        a.set_known(5);
        CHECK_THROWS_AS(split(a, BlockPartition{1, 1}, 1), precondition_error);
    }
    SUBCASE("a pole is required") {
        RSeries a(2, 1);
        a.set_coeff(0, RMat::identity(2));
        a.set_known(5);
        CHECK_THROWS_AS(split(a, BlockPartition{1, 1}, 1), precondition_error);
    }
}

TEST_CASE("commutativity checks against the monodromy substitution") {
    RSeries a = testdata::example5_system();
    RSeries sheared = normalize(apply_shearing(a, testdata::example5_shearing()));
    auto ctx = cyclo_context(2);
    auto p = monodromy_matrix(testdata::example5_shearing(), ctx);

    CHECK(check_commutative(sheared, p, ctx));

    // Substitution route of the commutativity criterion, both sides
    // computed independently:
    // A(x) P == P A(e^(2 pi i) x) coefficientwise.
    auto ac = series_to_cyclo(sheared, ctx);
    auto twisted = monodromy_substitute(sheared, ctx);
    PuiseuxMatrix<CycloNumber> lhs(5, 2, ac.known_e());
    PuiseuxMatrix<CycloNumber> rhs(5, 2, twisted.known_e());
    for (const auto& [e, m] : ac.support()) lhs.set_coeff(e, m * p);
    for (const auto& [e, m] : twisted.support()) rhs.set_coeff(e, p * m);
    CHECK(equal_through(lhs, rhs));

    // P = I detects exactly unramifiedness.
    CHECK(!check_commutative(sheared, Matrix<CycloNumber>::identity(5), ctx));
    CHECK(check_commutative(normalize(a), Matrix<CycloNumber>::identity(1 * 5),
                            cyclo_context(1)));
}

TEST_CASE("commutative splitting preserves the structure with certificates") {
    SUBCASE("P = I, q = 1 reduces exactly to the classical split") {
        std::mt19937 rng(13);
        RSeries a = random_splittable(rng, 2, 1, 1, 1, 0, 8);
        auto plain = split(a, BlockPartition{2, 1}, 8);
        auto comm = split_commutative(a, Matrix<CycloNumber>::identity(3), BlockPartition{2, 1}, 8,
                                      cyclo_context(1));
        CHECK(comm.certified);
        CHECK(equal_through(comm.split.transform, plain.transform));
        CHECK(equal_through(comm.split.result, plain.result));
    }
    SUBCASE("worked 5x5 example with P = diag(1,-1,1,-1,1)") {
        RSeries a = testdata::example5_system();
        RSeries sheared = normalize(apply_shearing(a, testdata::example5_shearing()));
        auto ctx = cyclo_context(2);
        auto p = monodromy_matrix(testdata::example5_shearing(), ctx);
        auto res = split_commutative(sheared, p, BlockPartition{2, 3}, 16, ctx);
        CHECK(res.certified);
        CHECK(equal_through(gauge_transform(res.split.transform, sheared), res.split.result,
                            res.split.certified_e));
        // Blocks of the result are (omega, P^11)- and (omega, P^22)-commutative.
        auto b11 = sub_block(res.split.result, 0, 0, 2, 2);
        auto b22 = sub_block(res.split.result, 2, 2, 3, 3);
        CHECK(check_commutative(b11, p.block(0, 0, 2, 2), ctx));
        CHECK(check_commutative(b22, p.block(2, 2, 3, 3), ctx));
    }
    SUBCASE("violated commutativity precondition is reported") {
        std::mt19937 rng(17);
        RSeries a = random_splittable(rng, 1, 1, 2, 1, 1, 6);
        CHECK_THROWS_AS(split_commutative(a, Matrix<CycloNumber>::identity(2),
                                          BlockPartition{1, 1}, 6, cyclo_context(2)),
                        precondition_error);
    }
}
