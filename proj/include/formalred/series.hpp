#ifndef FORMALRED_SERIES_HPP
#define FORMALRED_SERIES_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <formalred/errors.hpp>
#include <formalred/matrix.hpp>

namespace formalred {

// Budget value meaning "exact at every order" (zero tails, exact
// polynomial data). Anything at or above kKnownInf / 2 is treated as
// infinite by the saturating helpers below.
inline constexpr long kKnownInf = std::numeric_limits<long>::max() / 4;

inline bool known_is_inf(long e) { return e >= kKnownInf / 2; }
inline long known_add(long a, long b) {
    if (known_is_inf(a) || known_is_inf(b)) return kKnownInf;
    return a + b;
}

inline long floor_div(long a, long b) {
    // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}
inline long ceil_div(long a, long b) { return -floor_div(-a, b); }

// Truncated matrix Puiseux/Laurent series sum_e C_e x^(e/q) with
// ramification index q. Coefficients are stored sparsely by the exponent
// numerator e (any sign); known_e() = E means every coefficient with
// e <= E is exact and complete, which makes silent truncation loss
// impossible: each operation derives the budget its result can honestly
// claim. The externally documented pole/index frame (x^(j/q - r), j >= 0)
// is a presentation of this one via j = e + q*r.
template <class F>
class PuiseuxMatrix {
public:
    PuiseuxMatrix() = default;
    PuiseuxMatrix(std::size_t n, long q, long known = kKnownInf) : n_(n), q_(q), known_(known) {
        if (q < 1) throw std::invalid_argument("PuiseuxMatrix: ramification must be positive");
    }

    std::size_t dim() const { return n_; }
    long ram() const { return q_; }
    long known_e() const { return known_; }
    const std::map<long, Matrix<F>>& support() const { return c_; }

    bool is_zero_series() const { return c_.empty(); }
    std::optional<long> leading_e() const {
        if (c_.empty()) return std::nullopt;
        return c_.begin()->first;
    }
    Matrix<F> leading() const {
        if (c_.empty()) return Matrix<F>(n_, n_);
        return c_.begin()->second;
    }

    Matrix<F> coeff(long e) const {
        auto it = c_.find(e);
        if (it == c_.end()) return Matrix<F>(n_, n_);
        return it->second;
    }
    bool has_coeff(long e) const { return c_.find(e) != c_.end(); }

    void set_coeff(long e, Matrix<F> m) {
        if (m.rows() != n_ || m.cols() != n_)
            throw std::invalid_argument("PuiseuxMatrix: coefficient dimension mismatch");
        if (m.is_zero())
            c_.erase(e);
        else if (e <= known_)
            c_[e] = std::move(m);
    }
    void add_coeff(long e, const Matrix<F>& m) { set_coeff(e, coeff(e) + m); }

    void set_known(long e) {
        known_ = e;
        c_.erase(c_.upper_bound(e), c_.end());
    }

    // Pole order of the presentation frame: smallest r >= 0 with all
    // indices j = e + q*r nonnegative.
    long pole_order() const {
        auto lead = leading_e();
        if (!lead || *lead >= 0) return 0;
        return ceil_div(-*lead, q_);
    }
    // Leading index p in the presentation frame; p in [0, q) whenever the
    // series has a genuine pole.
    long leading_index() const {
        auto lead = leading_e();
        return lead ? *lead + q_ * pole_order() : 0;
    }

    // Rewrites the series over a coarser/finer frame with ramification q*f.
    PuiseuxMatrix rebased(long f) const {
        if (f == 1) return *this;
        PuiseuxMatrix r(n_, q_ * f,
                        known_is_inf(known_) ? kKnownInf : (known_ + 1) * f - 1);
        for (const auto& [e, m] : c_) r.c_[e * f] = m;
        return r;
    }

private:
    std::size_t n_ = 0;
    long q_ = 1;
    std::map<long, Matrix<F>> c_;
    long known_ = kKnownInf;
};

// Canonical form: explicit zeros dropped; when every stored exponent
// shares a common factor g with q, the series is rewritten over the
// ramification q/g (so genuinely unramified content always reports q = 1).
// The zero series is a distinguished value with no leading index.
template <class F>
PuiseuxMatrix<F> normalize(const PuiseuxMatrix<F>& a) {
    long g = a.is_zero_series() ? 1 : a.ram();
    for (const auto& [e, m] : a.support()) {
        if (m.is_zero()) continue;
        if (e != 0) g = std::gcd(g, e < 0 ? -e : e);
        if (g == 1) break;
    }
    PuiseuxMatrix<F> r(a.dim(), a.ram() / g,
                       known_is_inf(a.known_e()) ? kKnownInf : floor_div(a.known_e(), g));
    for (const auto& [e, m] : a.support())
        if (!m.is_zero()) r.set_coeff(e / g, m);
    return r;
}

template <class F>
void unify_frames(PuiseuxMatrix<F>& a, PuiseuxMatrix<F>& b) {
    if (a.ram() == b.ram()) return;
    long l = std::lcm(a.ram(), b.ram());
    a = a.rebased(l / a.ram());
    b = b.rebased(l / b.ram());
}

template <class F>
PuiseuxMatrix<F> series_add(PuiseuxMatrix<F> a, PuiseuxMatrix<F> b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("series_add: dimension mismatch");
    unify_frames(a, b);
    PuiseuxMatrix<F> r(a.dim(), a.ram(), std::min(a.known_e(), b.known_e()));
    for (const auto& [e, m] : a.support()) r.add_coeff(e, m);
    for (const auto& [e, m] : b.support()) r.add_coeff(e, m);
    return r;
}

template <class F>
PuiseuxMatrix<F> series_neg(const PuiseuxMatrix<F>& a) {
    PuiseuxMatrix<F> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support()) r.set_coeff(e, -m);
    return r;
}

template <class F>
PuiseuxMatrix<F> series_sub(const PuiseuxMatrix<F>& a, const PuiseuxMatrix<F>& b) {
    return series_add(a, series_neg(b));
}

template <class F>
PuiseuxMatrix<F> series_scale(const F& s, const PuiseuxMatrix<F>& a) {
    PuiseuxMatrix<F> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support()) r.set_coeff(e, s * m);
    return r;
}

// Convolution budget: a coefficient of the product at exponent e is
// complete iff no unknown tail of either factor can reach it, i.e.
//   e <= min(E_a + lead_b, E_b + lead_a, E_a + E_b + 1),
// the last term covering tail-times-tail when a factor has empty support.
template <class F>
PuiseuxMatrix<F> series_mul(PuiseuxMatrix<F> a, PuiseuxMatrix<F> b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("series_mul: dimension mismatch");
    unify_frames(a, b);
    long budget = known_add(known_add(a.known_e(), b.known_e()), 1);
    if (auto lb = b.leading_e()) budget = std::min(budget, known_add(a.known_e(), *lb));
    if (auto la = a.leading_e()) budget = std::min(budget, known_add(b.known_e(), *la));
    PuiseuxMatrix<F> r(a.dim(), a.ram(), budget);
    for (const auto& [ea, ma] : a.support())
        for (const auto& [eb, mb] : b.support()) {
            if (ea + eb > budget) continue;
            r.add_coeff(ea + eb, ma * mb);
        }
    return r;
}

template <class F>
PuiseuxMatrix<F> identity_series(std::size_t n, long q = 1) {
    PuiseuxMatrix<F> r(n, q);
    r.set_coeff(0, Matrix<F>::identity(n));
    return r;
}

template <class F>
PuiseuxMatrix<F> monomial_series(const Matrix<F>& m, long e, long q = 1, long known = kKnownInf) {
    PuiseuxMatrix<F> r(m.rows(), q, known);
    r.set_coeff(e, m);
    return r;
}

template <class F>
bool is_unramified(const PuiseuxMatrix<F>& a) {
    for (const auto& [e, m] : a.support())
        if (!m.is_zero() && ((e % a.ram()) + a.ram()) % a.ram() != 0) return false;
    return true;
}

// Inverse of a unit series: T must have no negative exponents and an
// invertible constant term T_0. The inverse is computed through
// min(through_e, known) by (T^-1)_h = -T_0^-1 sum_{i=1..h} T_i (T^-1)_{h-i}.
template <class F>
PuiseuxMatrix<F> invert_unit(const PuiseuxMatrix<F>& t, long through_e) {
    auto lead = t.leading_e();
    if (!lead || *lead < 0)
        throw precondition_error("invert_unit: not a unit series (needs pole 0, leading index 0)");
    if (*lead > 0) throw precondition_error("invert_unit: constant term is zero");
    auto t0inv = invert(t.coeff(0));
    if (!t0inv) throw precondition_error("invert_unit: not a unit series (constant term singular)");
    long bound = std::min(through_e, t.known_e());
    PuiseuxMatrix<F> r(t.dim(), t.ram(), bound);
    r.set_coeff(0, *t0inv);
    for (long h = 1; h <= bound; ++h) {
        Matrix<F> acc(t.dim(), t.dim());
        for (const auto& [i, ti] : t.support()) {
            if (i < 1 || i > h) continue;
            acc = acc + ti * r.coeff(h - i);
        }
        r.set_coeff(h, -(*t0inv * acc));
    }
    return r;
}

template <class F>
PuiseuxMatrix<F> invert_unit(const PuiseuxMatrix<F>& t) {
    if (known_is_inf(t.known_e()))
        throw std::invalid_argument(
            "invert_unit: series is exact at every order; pass an explicit order");
    return invert_unit(t, t.known_e());
}

// Euler operator x d/dx: the coefficient at exponent e/q picks up the
// factor e/q.
template <class F>
PuiseuxMatrix<F> theta_derivative(const PuiseuxMatrix<F>& a) {
    PuiseuxMatrix<F> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support())
        r.set_coeff(e, F(Rational(e, a.ram())) * m);
    return r;
}

// Gauge action B = T[A] = T^-1 A T - T^-1 (x dT/dx). The honest budget is
// min(E_A, E_T + min(lead_A, 0)); an explicit through_e may lower it.
template <class F>
PuiseuxMatrix<F> gauge_transform(PuiseuxMatrix<F> t, PuiseuxMatrix<F> a,
                                 long through_e) {
    if (t.dim() != a.dim()) throw std::invalid_argument("gauge_transform: dimension mismatch");
    unify_frames(t, a);
    long lead_a = a.is_zero_series() ? 0 : std::min(*a.leading_e(), 0L);
    long natural = std::min(a.known_e(), known_add(t.known_e(), lead_a));
    long through = std::min(through_e, natural);
    if (known_is_inf(through))
        throw std::invalid_argument(
            "gauge_transform: unbounded exact inputs; pass an explicit order");
    PuiseuxMatrix<F> tinv = invert_unit(t, through - std::min(lead_a, 1L));
    PuiseuxMatrix<F> b =
        series_sub(series_mul(series_mul(tinv, a), t), series_mul(tinv, theta_derivative(t)));
    b.set_known(std::min(b.known_e(), through));
    return b;
}

template <class F>
PuiseuxMatrix<F> gauge_transform(const PuiseuxMatrix<F>& t, const PuiseuxMatrix<F>& a) {
    return gauge_transform(t, a, kKnownInf);
}

// Constant gauge C^-1 A C; the derivative term vanishes and the budget is
// untouched.
template <class F>
PuiseuxMatrix<F> conjugate_const(const Matrix<F>& c, const PuiseuxMatrix<F>& a) {
    auto cinv = invert(c);
    if (!cinv) throw precondition_error("conjugate_const: basis matrix is singular");
    PuiseuxMatrix<F> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support()) r.set_coeff(e, *cinv * m * c);
    return r;
}

// Substitution x -> e^(2 pi i) x: the coefficient at exponent e/q is
// multiplied by omega^e. Equals the identity on unramified series.
inline PuiseuxMatrix<CycloNumber> monodromy_substitute(const PuiseuxMatrix<Rational>& a,
                                                       const CycloContextPtr& ctx) {
    if (ctx->order() != a.ram())
        throw std::invalid_argument("monodromy_substitute: context order must equal ramification");
    PuiseuxMatrix<CycloNumber> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support())
        r.set_coeff(e, CycloNumber::omega_power(ctx, e) * to_cyclo(m, ctx));
    return r;
}

inline PuiseuxMatrix<CycloNumber> monodromy_substitute(const PuiseuxMatrix<CycloNumber>& a,
                                                       const CycloContextPtr& ctx) {
    if (ctx->order() != a.ram())
        throw std::invalid_argument("monodromy_substitute: context order must equal ramification");
    PuiseuxMatrix<CycloNumber> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support())
        r.set_coeff(e, CycloNumber::omega_power(ctx, e) * m);
    return r;
}

inline PuiseuxMatrix<CycloNumber> series_to_cyclo(const PuiseuxMatrix<Rational>& a,
                                                  const CycloContextPtr& ctx) {
    PuiseuxMatrix<CycloNumber> r(a.dim(), a.ram(), a.known_e());
    for (const auto& [e, m] : a.support()) r.set_coeff(e, to_cyclo(m, ctx));
    return r;
}

// Coefficient matrix of the shifted system y = exp(lambda / x^k) z,
// which is A + k*lambda*x^(-k)*I; k is a positive rational whose
// denominator must divide the resulting ramification.
template <class F>
PuiseuxMatrix<F> exponential_shift(const PuiseuxMatrix<F>& a, const F& lambda, const Rational& k) {
    if (k.sign() < 0) throw std::invalid_argument("exponential_shift: k must be nonnegative");
    long den = k.den().to_longlong();
    long q = a.ram();
    if (q % den != 0)
        return exponential_shift(a.rebased(std::lcm(q, den) / q), lambda, k);
    // k*q is an integer by the divisibility check.
    long e_shift = -(k * Rational(q)).num().to_longlong();
    PuiseuxMatrix<F> r = a;
    r.add_coeff(e_shift, (F(k) * lambda) * Matrix<F>::identity(a.dim()));
    return r;
}

template <class F>
PuiseuxMatrix<F> sub_block(const PuiseuxMatrix<F>& a, std::size_t r0, std::size_t c0,
                           std::size_t h, std::size_t w) {
    if (h != w) throw std::invalid_argument("sub_block: blocks of systems must be square");
    PuiseuxMatrix<F> r(h, a.ram(), a.known_e());
    for (const auto& [e, m] : a.support()) r.set_coeff(e, m.block(r0, c0, h, w));
    return r;
}

// Determinant of a matrix series by permutation expansion (dimensions are
// tiny throughout); returned as a 1x1 series with the conservative budget
// of the sums of products.
template <class F>
PuiseuxMatrix<F> series_det(const PuiseuxMatrix<F>& a) {
    const std::size_t n = a.dim();
    if (n > 8) throw std::invalid_argument("series_det: dimension too large for expansion");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    PuiseuxMatrix<F> acc(1, a.ram());
    bool first = true;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        PuiseuxMatrix<F> term = identity_series<F>(1, a.ram());
        for (std::size_t i = 0; i < n; ++i) term = series_mul(term, sub_block(a, i, perm[i], 1, 1));
        if (inversions % 2 != 0) term = series_neg(term);
        acc = first ? term : series_add(acc, term);
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

// Coefficientwise comparison through min(budgets, through_e); reports the
// first differing exponent, or nullopt when the ranges agree.
template <class F>
std::optional<long> first_discrepancy(PuiseuxMatrix<F> a, PuiseuxMatrix<F> b,
                                      long through_e = kKnownInf) {
    if (a.dim() != b.dim()) throw std::invalid_argument("first_discrepancy: dimension mismatch");
    unify_frames(a, b);
    long bound = std::min({a.known_e(), b.known_e(), through_e});
    std::map<long, bool> exps;
    for (const auto& [e, m] : a.support())
        if (e <= bound) exps[e] = true;
    for (const auto& [e, m] : b.support())
        if (e <= bound) exps[e] = true;
    for (const auto& [e, unused] : exps)
        if (a.coeff(e) != b.coeff(e)) return e;
    return std::nullopt;
}

template <class F>
bool equal_through(const PuiseuxMatrix<F>& a, const PuiseuxMatrix<F>& b,
                   long through_e = kKnownInf) {
    return !first_discrepancy(a, b, through_e).has_value();
}

} // namespace formalred

#endif // FORMALRED_SERIES_HPP
