#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <formalred/matrix.hpp>

using namespace formalred;

namespace {

using RMat = Matrix<Rational>;
using RPoly = Polynomial<Rational>;

RMat rmat(std::size_t r, std::size_t c, std::vector<long long> v) {
    std::vector<Rational> e;
    e.reserve(v.size());
    for (auto x : v) e.emplace_back(x);
    return RMat(r, c, std::move(e));
}

RPoly rpoly(std::vector<long long> c) {
    std::vector<Rational> v;
    for (auto x : c) v.emplace_back(x);
    return RPoly(std::move(v));
}

RMat random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int bound = 5) {
    std::uniform_int_distribution<long long> d(-bound, bound);
    RMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = Rational(d(rng));
    return m;
}

const RMat kJ3 = rmat(3, 3, {0, 1, 0, 0, 0, 1, 0, 0, 0});
const RMat kRot = rmat(2, 2, {0, 1, -1, 0});

} // namespace

TEST_CASE("solve, determinant, inverse") {
    RMat A = rmat(3, 3, {2, 1, 0, 1, 3, 1, 0, 1, 2});
    CHECK(bareiss_det(A) == Rational(8));
    auto Ainv = invert(A);
    REQUIRE(Ainv.has_value());
    CHECK(A * *Ainv == RMat::identity(3));
    CHECK(bareiss_det(kJ3) == Rational(0));
    CHECK(!invert(kJ3).has_value());

    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        RMat M = random_matrix(rng, 4, 4);
        RMat rhs = random_matrix(rng, 4, 2);
        auto x = bareiss_solve(M, rhs);
        if (x)
            CHECK(M * *x == rhs);
        else
            CHECK(bareiss_det(M).is_zero());
    }
}

TEST_CASE("rank, kernel, column space") {
    CHECK(rank(RMat::identity(4)) == 4);
    CHECK(rank(kJ3) == 2);
    RMat K = kernel_basis(kJ3);
    REQUIRE(K.cols() == 1);
    CHECK(K(0, 0) == Rational(1));
    CHECK(K(1, 0) == Rational(0));
    CHECK(K(2, 0) == Rational(0));
    CHECK((kJ3 * K).is_zero());

    RMat M = rmat(3, 3, {1, 2, 3, 2, 4, 6, 1, 1, 1});
    CHECK(rank(M) == 2);
    RMat ker = kernel_basis(M);
    CHECK(ker.cols() == 1);
    CHECK((M * ker).is_zero());
    CHECK(column_space_basis(M).cols() == 2);
}

TEST_CASE("characteristic polynomials") {
    CHECK(char_poly(kRot) == rpoly({1, 0, 1}));    // lambda^2 + 1
    CHECK(char_poly(kJ3) == rpoly({0, 0, 0, 1}));  // lambda^3
    RMat D = rmat(2, 2, {1, 0, 0, 2});
    CHECK(char_poly(D) == rpoly({2, -3, 1}));      // (l-1)(l-2)

    std::mt19937 rng(23);
    for (int i = 0; i < 30; ++i) {
        RMat A = random_matrix(rng, 4, 4, 4);
        // Cayley-Hamilton.
        CHECK(eval_poly_at_matrix(char_poly(A), A).is_zero());
        // Similarity invariance for random invertible C.
        RMat C = random_matrix(rng, 4, 4, 3);
        if (bareiss_det(C).is_zero()) continue;
        CHECK(char_poly(*invert(C) * A * C) == char_poly(A));
    }
}

TEST_CASE("nilpotency") {
    CHECK(is_nilpotent(kJ3));
    CHECK(!is_nilpotent(kRot));
    // Leading matrix of the 5x5 worked example: E12 + E34 + E45; cube is zero.
    RMat A0(5, 5);
    A0(0, 1) = Rational(1);
    A0(2, 3) = Rational(1);
    A0(3, 4) = Rational(1);
    CHECK((A0 * A0 * A0).is_zero());
    CHECK(is_nilpotent(A0));
}

TEST_CASE("fitting decomposition") {
    SUBCASE("nilpotent gives empty invertible part and C = I") {
        auto s = fitting_split(kJ3);
        CHECK(s.partition.n1 == 0);
        CHECK(s.partition.n2 == 3);
        CHECK(s.basis == RMat::identity(3));
    }
    SUBCASE("invertible gives empty nilpotent part and C = I") {
        auto s = fitting_split(kRot);
        CHECK(s.partition.n1 == 2);
        CHECK(s.partition.n2 == 0);
        CHECK(s.basis == RMat::identity(2));
    }
    SUBCASE("block diag(rot, J3) is already aligned") {
        RMat A(5, 5);
        A.set_block(0, 0, kRot);
        A.set_block(2, 2, kJ3);
        auto s = fitting_split(A);
        CHECK(s.partition.n1 == 2);
        CHECK(s.partition.n2 == 3);
        CHECK(s.basis == RMat::identity(5));
    }
    SUBCASE("randomized: C-conjugation yields invertible plus nilpotent blocks") {
        std::mt19937 rng(31);
        for (int i = 0; i < 40; ++i) {
            // Build a matrix with known mixed structure, then scramble it.
            RMat A(4, 4);
            A.set_block(0, 0, rmat(2, 2, {1, 1, 0, 2}));
            A.set_block(2, 2, rmat(2, 2, {0, 1, 0, 0}));
            RMat G = random_matrix(rng, 4, 4, 3);
            if (bareiss_det(G).is_zero()) continue;
            RMat M = *invert(G) * A * G;
            auto s = fitting_split(M);
            CHECK(s.partition.n1 == 2);
            CHECK(s.partition.n2 == 2);
            RMat B = *invert(s.basis) * M * s.basis;
            RMat inv = B.block(0, 0, 2, 2);
            RMat nil = B.block(2, 2, 2, 2);
            CHECK(!bareiss_det(inv).is_zero());
            CHECK(is_nilpotent(nil));
            CHECK(B.block(0, 2, 2, 2).is_zero());
            CHECK(B.block(2, 0, 2, 2).is_zero());
        }
    }
}

TEST_CASE("split by coprime characteristic factors") {
    RMat D = rmat(2, 2, {1, 0, 0, 2});
    auto s = split_by_factors(D, rpoly({-1, 1}), rpoly({-2, 1}));
    CHECK(s.basis == RMat::identity(2));
    CHECK(s.partition.n1 == 1);

    RMat A = rmat(2, 2, {0, 1, -2, 3});  // spectrum {1, 2}
    auto t = split_by_factors(A, rpoly({-1, 1}), rpoly({-2, 1}));
    CHECK(t.basis == rmat(2, 2, {1, 1, 1, 2}));
    CHECK(*invert(t.basis) * A * t.basis == D);

    // f annihilates the first block and g the second (Cayley-Hamilton on
    // the invariant subspaces).
    std::mt19937 rng2(43);
    for (int i = 0; i < 20; ++i) {
        RMat M = random_matrix(rng2, 4, 4, 3);
        auto chi = char_poly(M);
        auto roots = rational_roots(chi);
        if (roots.empty()) continue;
        auto mult = root_multiplicity(chi, roots[0]);
        if (mult == 4) continue;
        RPoly lin(std::vector<Rational>{-roots[0], Rational(1)});
        RPoly f = lin.pow(mult);
        RPoly g = chi / f;
        if (RPoly::gcd(f, g).degree() != 0) continue;
        auto sp = split_by_factors(M, f, g);
        RMat B = *invert(sp.basis) * M * sp.basis;
        RMat b1 = B.block(0, 0, sp.partition.n1, sp.partition.n1);
        RMat b2 = B.block(sp.partition.n1, sp.partition.n1, sp.partition.n2, sp.partition.n2);
        CHECK(B.block(0, sp.partition.n1, sp.partition.n1, sp.partition.n2).is_zero());
        CHECK(B.block(sp.partition.n1, 0, sp.partition.n2, sp.partition.n1).is_zero());
        CHECK(eval_poly_at_matrix(f, b1).is_zero());
        CHECK(eval_poly_at_matrix(g, b2).is_zero());
    }

    // f = char poly, g = 1: degenerate but legal.
    auto u = split_by_factors(A, char_poly(A), RPoly::constant(Rational(1)));
    CHECK(u.partition.n1 == 2);
    CHECK(u.partition.n2 == 0);
    CHECK(u.basis == RMat::identity(2));

    CHECK_THROWS_AS(split_by_factors(A, rpoly({-1, 1}), rpoly({-1, 1})), precondition_error);
    CHECK_THROWS_AS(split_by_factors(A, rpoly({-3, 1}), rpoly({-2, 1})), precondition_error);
}

TEST_CASE("sylvester equation, exact") {
    // Scalar case: 1*x - 2*x = 1 -> x = -1.
    auto x = sylvester_solve(rmat(1, 1, {1}), rmat(1, 1, {2}), rmat(1, 1, {1}), Rational(1));
    REQUIRE(x.has_value());
    CHECK((*x)(0, 0) == Rational(-1));

    // Shared eigenvalue: singular for any nonzero right-hand side.
    CHECK(!sylvester_solve(rmat(1, 1, {1}), rmat(1, 1, {1}), rmat(1, 1, {5}), Rational(1))
               .has_value());

    // Rotation block vs nilpotent Jordan block: disjoint spectra, unique
    // solution for random right-hand sides.
    std::mt19937 rng(41);
    for (int i = 0; i < 25; ++i) {
        RMat R = random_matrix(rng, 2, 3, 6);
        auto sol = sylvester_solve(kRot, kJ3, R, Rational(1));
        REQUIRE(sol.has_value());
        CHECK(kRot * *sol - *sol * kJ3 == R);
    }

    // Residual is exactly zero on random solvable instances.
    for (int i = 0; i < 25; ++i) {
        RMat A = random_matrix(rng, 3, 3, 4);
        RMat B = random_matrix(rng, 2, 2, 4);
        RMat R = random_matrix(rng, 3, 2, 9);
        Rational mu(3, 2);
        auto sol = sylvester_solve(A, B, R, mu);
        if (!sol) continue;
        CHECK(A * *sol - mu * (*sol * B) == R);
    }
}

TEST_CASE("omega-spectrum disjointness over Q(omega)") {
    // Invertible against nilpotent: disjoint for any q, p.
    CHECK(omega_disjoint(kRot, kJ3, 2, 1));
    CHECK(omega_disjoint(kRot, kJ3, 3, 2));
    CHECK(omega_disjoint(kRot, kJ3, 4, 1));
    // lambda1 = omega * lambda2 with omega = -1.
    CHECK(!omega_disjoint(rmat(1, 1, {1}), rmat(1, 1, {-1}), 2, 1));
    // Same pair is fine for plain disjointness at every power only if no
    // omega multiple matches; p = 0 tests plain spectra q times.
    CHECK(omega_disjoint(rmat(1, 1, {1}), rmat(1, 1, {2}), 2, 1));
    // Empty blocks are vacuously disjoint.
    CHECK(omega_disjoint(RMat(0, 0), kJ3, 2, 1));

    // Cross-check against directly readable diagonal spectra.
    std::mt19937 rng(47);
    std::uniform_int_distribution<long long> d(-3, 3);
    for (int i = 0; i < 40; ++i) {
        long q = 2;
        RMat A(2, 2), B(2, 2);
        A(0, 0) = Rational(d(rng));
        A(1, 1) = Rational(d(rng));
        B(0, 0) = Rational(d(rng));
        B(1, 1) = Rational(d(rng));
        bool expect = true;
        for (long k = 0; k < q; ++k)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    Rational lhs = A(a, a);
                    Rational rhs = (k % 2 == 0 ? B(b, b) : -B(b, b));
                    if (lhs == rhs) expect = false;
                }
        CHECK(omega_disjoint(A, B, q, 1) == expect);
    }
}

TEST_CASE("sylvester over Q(omega)") {
    auto ctx = cyclo_context(4);
    auto A = to_cyclo(kRot, ctx);   // spectrum {i, -i}
    auto B = to_cyclo(kJ3, ctx);    // nilpotent
    Matrix<CycloNumber> R(2, 3);
    R(0, 1) = CycloNumber::omega_power(ctx, 1);
    R(1, 2) = CycloNumber(3);
    auto mu = CycloNumber::omega_power(ctx, 1);
    auto X = sylvester_solve(A, B, R, mu);
    REQUIRE(X.has_value());
    CHECK(A * *X - mu * (*X * B) == R);
}
