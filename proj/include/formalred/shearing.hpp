#ifndef FORMALRED_SHEARING_HPP
#define FORMALRED_SHEARING_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include <formalred/commutative.hpp>
#include <formalred/series.hpp>

namespace formalred {

// Diagonal transformation diag(x^(exponents[i]/q)). Exponent signs are
// free; each operation documents its own convention.
struct Shearing {
    long q = 1;
    std::vector<long> exponents;

    std::size_t dim() const { return exponents.size(); }
    Shearing inverse() const {
        Shearing s = *this;
        for (auto& a : s.exponents) a = -a;
        return s;
    }
    static Shearing identity(std::size_t n) { return Shearing{1, std::vector<long>(n, 0)}; }
    bool is_identity() const {
        for (long a : exponents)
            if (a != exponents[0]) return false;
        return exponents.empty() || exponents[0] == 0;
    }
};

// A shearing composed with a constant invertible change of basis; as a
// transformation matrix this is S(x)*C.
template <class F>
struct GeneralizedShearing {
    Shearing shear;
    Matrix<F> basis;
};

// Gauge action of a shearing, in closed form: entry (i,k) of the series is
// shifted by x^((a_k - a_i)/q) and the constant diagonal drift
// diag(a_i/q) is subtracted. No truncation loss beyond the entrywise
// budget skew; S is never inverted as a series.
template <class F>
PuiseuxMatrix<F> apply_shearing(const PuiseuxMatrix<F>& a, const Shearing& s) {
    if (s.dim() != a.dim()) throw std::invalid_argument("apply_shearing: dimension mismatch");
    long q = std::lcm(a.ram(), s.q);
    long fa = q / a.ram();
    long fs = q / s.q;
    long spread = 0;
    if (!s.exponents.empty()) {
        auto [mn, mx] = std::minmax_element(s.exponents.begin(), s.exponents.end());
        spread = *mx - *mn;
    }
    long budget = known_is_inf(a.known_e()) ? kKnownInf
                                            : (a.known_e() + 1) * fa - 1 - fs * spread;
    PuiseuxMatrix<F> r(a.dim(), q, budget);
    for (const auto& [e, m] : a.support())
        for (std::size_t i = 0; i < a.dim(); ++i)
            for (std::size_t k = 0; k < a.dim(); ++k) {
                if (m(i, k) == F(0)) continue;
                Matrix<F> cell(a.dim(), a.dim());
                cell(i, k) = m(i, k);
                r.add_coeff(e * fa + (s.exponents[k] - s.exponents[i]) * fs, cell);
            }
    Matrix<F> drift(a.dim(), a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) drift(i, i) = F(Rational(s.exponents[i], s.q));
    r.add_coeff(0, -drift);
    return r;
}

// Similarity conjugation S M S^-1 (no gauge drift): entry (i,k) shifts by
// x^((a_i - a_k)/q). Used to assemble transformation matrices exactly.
template <class F>
PuiseuxMatrix<F> shear_conjugate(const PuiseuxMatrix<F>& m, const Shearing& s) {
    if (s.dim() != m.dim()) throw std::invalid_argument("shear_conjugate: dimension mismatch");
    long q = std::lcm(m.ram(), s.q);
    long fa = q / m.ram();
    long fs = q / s.q;
    long spread = 0;
    if (!s.exponents.empty()) {
        auto [mn, mx] = std::minmax_element(s.exponents.begin(), s.exponents.end());
        spread = *mx - *mn;
    }
    long budget = known_is_inf(m.known_e()) ? kKnownInf
                                            : (m.known_e() + 1) * fa - 1 - fs * spread;
    PuiseuxMatrix<F> r(m.dim(), q, budget);
    for (const auto& [e, mat] : m.support())
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t k = 0; k < m.dim(); ++k) {
                if (mat(i, k) == F(0)) continue;
                Matrix<F> cell(m.dim(), m.dim());
                cell(i, k) = mat(i, k);
                r.add_coeff(e * fa + (s.exponents[i] - s.exponents[k]) * fs, cell);
            }
    return r;
}

// Monodromy matrix P = S(e^(2 pi i)) = diag(omega^(a_i)).
inline Matrix<CycloNumber> monodromy_matrix(const Shearing& s, const CycloContextPtr& ctx) {
    if (ctx->order() != s.q)
        throw std::invalid_argument("monodromy_matrix: context order must equal shearing q");
    Matrix<CycloNumber> p(s.dim(), s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i)
        p(i, i) = CycloNumber::omega_power(ctx, s.exponents[i]);
    return p;
}

// For a generalized shearing S*C the monodromy is C^-1 diag(omega^(a_i)) C.
inline Matrix<CycloNumber> monodromy_matrix(const GeneralizedShearing<Rational>& gs,
                                            const CycloContextPtr& ctx) {
    Matrix<CycloNumber> c = to_cyclo(gs.basis, ctx);
    auto cinv = invert(c);
    if (!cinv) throw precondition_error("monodromy_matrix: basis matrix is singular");
    return *cinv * monodromy_matrix(gs.shear, ctx) * c;
}

inline Matrix<CycloNumber> monodromy_matrix(const GeneralizedShearing<CycloNumber>& gs,
                                            const CycloContextPtr& ctx) {
    auto cinv = invert(gs.basis);
    if (!cinv) throw precondition_error("monodromy_matrix: basis matrix is singular");
    return *cinv * monodromy_matrix(gs.shear, ctx) * gs.basis;
}

// Reconstructs a generalized shearing from a monodromy matrix P with
// P^q = I and P diagonalizable (kernel dimensions of P - omega^k I summing
// to n): C^-1 P C = diag(omega^(a_i)) and the stored exponents are -a_i,
// the sign that unshears a commutative system. Diagonal P gives C = I with
// positional exponents.
inline GeneralizedShearing<CycloNumber> shearing_from_monodromy(const Matrix<CycloNumber>& p,
                                                                const CycloContextPtr& ctx) {
    const std::size_t n = p.rows();
    const long q = ctx->order();
    if (!p.is_square()) throw std::invalid_argument("shearing_from_monodromy: not square");
    if (p.pow(static_cast<std::size_t>(q)) != Matrix<CycloNumber>::identity(n))
        throw precondition_error("not a shearing monodromy: P^q != I");

    std::vector<CycloNumber> roots;
    for (long k = 0; k < q; ++k) roots.push_back(CycloNumber::omega_power(ctx, k));

    bool diagonal = true;
    for (std::size_t i = 0; i < n && diagonal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !p(i, j).is_zero()) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        std::vector<long> exps(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            bool found = false;
            for (long k = 0; k < q && !found; ++k)
                if (p(i, i) == roots[static_cast<std::size_t>(k)]) {
                    exps[i] = -k;
                    found = true;
                }
            if (!found)
                throw precondition_error("not a shearing monodromy: diagonal entry is no omega power");
        }
        return {Shearing{q, std::move(exps)}, Matrix<CycloNumber>::identity(n)};
    }

    Matrix<CycloNumber> c(n, n);
    std::vector<long> exps;
    std::size_t col = 0;
    for (long k = 0; k < q; ++k) {
        Matrix<CycloNumber> shifted = p;
        for (std::size_t i = 0; i < n; ++i)
            shifted(i, i) = shifted(i, i) - roots[static_cast<std::size_t>(k)];
        Matrix<CycloNumber> ker = kernel_basis(shifted);
        for (std::size_t j = 0; j < ker.cols(); ++j) {
            if (col >= n) throw precondition_error("not a shearing monodromy: too many eigenvectors");
            for (std::size_t i = 0; i < n; ++i) c(i, col) = ker(i, j);
            exps.push_back(-k);
            ++col;
        }
    }
    if (col != n)
        throw precondition_error("not a shearing monodromy: P is not diagonalizable");
    return {Shearing{q, std::move(exps)}, std::move(c)};
}

// Applies the unshearing read off a monodromy matrix: conjugate by C first
// (diagonalizing P), then shear. For an (omega, P)-commutative series this
// lands on an unramified series.
template <class F>
PuiseuxMatrix<F> unshear_by_monodromy(const PuiseuxMatrix<F>& a,
                                      const GeneralizedShearing<F>& gs) {
    return apply_shearing(conjugate_const(gs.basis, a), gs.shear);
}

template <class F>
struct ShearCommutativityCertificate {
    PuiseuxMatrix<F> sheared;          // S~[A] = C^-1 S[A] C
    Matrix<CycloNumber> monodromy;     // P~ = C^-1 diag(omega^(a_i)) C
    bool commutative = false;          // A_e P~ = omega^e P~ A_e coefficientwise
    bool spectral_symmetry = false;    // char poly of the leading matrix invariant
                                       // under lambda -> omega^p lambda up to the unit
};

// Shearing an unramified system yields an
// (omega, P~)-commutative system whose leading spectrum is a union of full
// omega^p-orbits. Both facts are verified, not assumed. The spectrum check
// is the coefficient condition q | p*(n-m) for every nonzero coefficient
// c_m of det(lambda I - A_p), which is chi(omega^p lambda) = omega^(pn) chi(lambda).
inline ShearCommutativityCertificate<Rational> certify_commutative_from_shearing(
    const PuiseuxMatrix<Rational>& a, const GeneralizedShearing<Rational>& gs,
    const CycloContextPtr& ctx) {
    PuiseuxMatrix<Rational> an = normalize(a);
    if (an.ram() != 1)
        throw precondition_error("certify_commutative_from_shearing: input must be unramified");
    ShearCommutativityCertificate<Rational> cert{
        conjugate_const(gs.basis, apply_shearing(an, gs.shear)),
        monodromy_matrix(gs, ctx), false, false};
    cert.commutative = check_commutative(cert.sheared, cert.monodromy, ctx);

    const long q = gs.shear.q;
    auto lead = cert.sheared.leading_e();
    if (!lead) {
        cert.spectral_symmetry = true;
        return cert;
    }
    long p = ((*lead % q) + q) % q;
    auto chi = char_poly(cert.sheared.leading());
    long n = chi.degree();
    bool sym = true;
    for (long m = 0; m <= n; ++m)
        if (!chi.coeffs()[static_cast<std::size_t>(m)].is_zero() && (p * (n - m)) % q != 0)
            sym = false;
    cert.spectral_symmetry = sym;
    return cert;
}

// Bounded exhaustive search for a shearing that makes the leading matrix
// non-nilpotent. A bounded exhaustive search stands in for the general
// constructive transformation theory, which is out of scope here.
//
// Candidates run in a fixed deterministic order: q = 1..q_max, then max
// exponent ascending, then lexicographic; exponent vectors are canonical
// up to uniform shift (min entry 0, which only changes the scalar drift).
// A candidate is accepted iff the sheared-and-normalized system has
//   - a non-nilpotent leading matrix,
//   - effective pole order r_eff = -L/q' in (0, r], and
//   - q_norm = 1 (integer progress), or leading index p with gcd(p, q_norm) = 1.
inline std::optional<Shearing> search_shearing(const PuiseuxMatrix<Rational>& a, long q_max,
                                               long exponent_bound) {
    PuiseuxMatrix<Rational> an = normalize(a);
    const std::size_t n = an.dim();
    if (n < 2) throw std::invalid_argument("search_shearing: needs dimension >= 2");
    if (an.is_zero_series() || !is_nilpotent(an.leading()))
        throw precondition_error("search_shearing: leading matrix must be nilpotent");

    struct Entry {
        std::size_t i, k;
        long e;
        Rational v;
    };
    std::vector<Entry> entries;
    for (const auto& [e, m] : an.support())
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (!m(i, k).is_zero()) entries.push_back({i, k, e, m(i, k)});

    const long qa = an.ram();
    const long r = an.pole_order();
    const long known = an.known_e();

    auto evaluate = [&](long qs, const std::vector<long>& alpha) -> bool {
        long q = std::lcm(qa, qs);
        long fa = q / qa;
        long fs = q / qs;
        long lead = kKnownInf;
        long g = q;
        for (const auto& en : entries) {
            long lvl = en.e * fa + (alpha[en.k] - alpha[en.i]) * fs;
            lead = std::min(lead, lvl);
            if (lvl != 0) g = std::gcd(g, lvl < 0 ? -lvl : lvl);
        }
        if (lead >= 0 || lead < -q * r) return false;
        long spread = *std::max_element(alpha.begin(), alpha.end());
        if (!known_is_inf(known) && lead > (known + 1) * fa - 1 - fs * spread) return false;
        Matrix<Rational> leading(n, n);
        for (const auto& en : entries)
            if (en.e * fa + (alpha[en.k] - alpha[en.i]) * fs == lead)
                leading(en.i, en.k) = leading(en.i, en.k) + en.v;
        if (is_nilpotent(leading)) return false;
        long qn = q / g;
        if (qn == 1) return true;
        long p = (((lead / g) % qn) + qn) % qn;
        return p > 0 && std::gcd(p, qn) == 1;
    };

    std::vector<long> alpha(n, 0);
    for (long qs = 1; qs <= q_max; ++qs) {
        const long max_exp = exponent_bound * qs;
        for (long top = 0; top <= max_exp; ++top) {
            // Lexicographic enumeration of {0..top}^n containing both 0 and top.
            std::fill(alpha.begin(), alpha.end(), 0);
            while (true) {
                bool has_zero = false, has_top = false;
                for (long v : alpha) {
                    has_zero |= v == 0;
                    has_top |= v == top;
                }
                if (has_zero && has_top && evaluate(qs, alpha))
                    return Shearing{qs, alpha};
                std::size_t pos = n;
                while (pos > 0 && alpha[pos - 1] == top) --pos;
                if (pos == 0) break;
                ++alpha[pos - 1];
                std::fill(alpha.begin() + static_cast<long>(pos), alpha.end(), 0);
            }
        }
    }
    return std::nullopt;
}

} // namespace formalred

#endif // FORMALRED_SHEARING_HPP
