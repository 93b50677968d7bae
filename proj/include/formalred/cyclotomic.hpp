#ifndef FORMALRED_CYCLOTOMIC_HPP
#define FORMALRED_CYCLOTOMIC_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <formalred/polynomial.hpp>
#include <formalred/rational.hpp>

namespace formalred {

// The q-th cyclotomic polynomial, by the recurrence
// Phi_q(t) = (t^q - 1) / prod_{d | q, d < q} Phi_d(t), Phi_1 = t - 1.
inline Polynomial<Rational> cyclotomic_polynomial(long q) {
    if (q < 1) throw std::invalid_argument("cyclotomic_polynomial: q must be >= 1");
    std::vector<Polynomial<Rational>> phi(static_cast<std::size_t>(q) + 1);
    phi[1] = Polynomial<Rational>(std::vector<Rational>{Rational(-1), Rational(1)});
    for (long m = 2; m <= q; ++m) {
        if (q % m != 0) continue;
        std::vector<Rational> xm(static_cast<std::size_t>(m) + 1, Rational(0));
        xm[0] = Rational(-1);
        xm[static_cast<std::size_t>(m)] = Rational(1);
        Polynomial<Rational> num{std::move(xm)};
        for (long d = 1; d < m; ++d)
            if (m % d == 0) num = num / phi[static_cast<std::size_t>(d)];
        phi[static_cast<std::size_t>(m)] = num;
    }
    return phi[static_cast<std::size_t>(q)];
}

inline long euler_totient(long q) {
    long result = q;
    long m = q;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        while (m % p == 0) m /= p;
        result -= result / p;
    }
    if (m > 1) result -= result / m;
    return result;
}

// Field context for Q(omega) = Q[t]/Phi_q(t) with omega = e^(2*pi*i/q).
// Representing by the minimal polynomial (not t^q - 1) keeps the quotient a
// field, so every nonzero element is invertible.
class CycloContext {
public:
    explicit CycloContext(long q) : q_(q), phi_(cyclotomic_polynomial(q)) {
        if (phi_.degree() != euler_totient(q))
            throw std::logic_error("CycloContext: cyclotomic degree mismatch");
    }

    long order() const { return q_; }
    const Polynomial<Rational>& minimal_polynomial() const { return phi_; }
    long degree() const { return phi_.degree(); }

private:
    long q_;
    Polynomial<Rational> phi_;
};

using CycloContextPtr = std::shared_ptr<const CycloContext>;

inline CycloContextPtr cyclo_context(long q) { return std::make_shared<const CycloContext>(q); }

// Element of Q(omega): a polynomial in omega reduced mod Phi_q. A null
// context denotes a plain rational, which embeds into any context on
// contact; that keeps generic code over this type default-constructible.
class CycloNumber {
public:
    CycloNumber() : coeffs_(1, Rational(0)) {}
    CycloNumber(int v) : coeffs_(1, Rational(v)) {}
    CycloNumber(long v) : coeffs_(1, Rational(static_cast<long long>(v))) {}
    CycloNumber(long long v) : coeffs_(1, Rational(v)) {}
    CycloNumber(Rational v) : coeffs_(1, std::move(v)) {}

    CycloNumber(CycloContextPtr ctx, std::vector<Rational> coeffs)
        : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
        if (!ctx_) throw std::invalid_argument("CycloNumber: null context");
        reduce();
    }

    static CycloNumber from_rational(const CycloContextPtr& ctx, Rational v) {
        std::vector<Rational> c(static_cast<std::size_t>(ctx->degree()), Rational(0));
        c[0] = std::move(v);
        return CycloNumber(ctx, std::move(c));
    }

    // omega^(k mod q), reduced mod Phi_q.
    static CycloNumber omega_power(const CycloContextPtr& ctx, long long k) {
        long q = ctx->order();
        long long m = ((k % q) + q) % q;
        Polynomial<Rational> t = Polynomial<Rational>::x_power(static_cast<std::size_t>(m));
        Polynomial<Rational> red = t % ctx->minimal_polynomial();
        std::vector<Rational> c(static_cast<std::size_t>(ctx->degree()), Rational(0));
        for (std::size_t i = 0; i < red.coeffs().size(); ++i) c[i] = red.coeffs()[i];
        return CycloNumber(ctx, std::move(c));
    }

    const CycloContextPtr& context() const { return ctx_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_rational() const {
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            if (!coeffs_[i].is_zero()) return false;
        return true;
    }
    const Rational& rational_part() const { return coeffs_[0]; }
    Rational as_rational() const {
        if (!is_rational()) throw std::domain_error("CycloNumber: not rational");
        return coeffs_[0];
    }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }
    bool is_one() const {
        if (!coeffs_[0].is_one()) return false;
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            if (!coeffs_[i].is_zero()) return false;
        return true;
    }

    friend CycloNumber operator+(const CycloNumber& a, const CycloNumber& b) {
        return combined(a, b, [](const Rational& x, const Rational& y) { return x + y; });
    }
    friend CycloNumber operator-(const CycloNumber& a, const CycloNumber& b) {
        return combined(a, b, [](const Rational& x, const Rational& y) { return x - y; });
    }
    CycloNumber operator-() const {
        CycloNumber r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
        CycloContextPtr ctx = common_context(a, b);
        if (!ctx) return CycloNumber(a.coeffs_[0] * b.coeffs_[0]);
        Polynomial<Rational> p = as_poly(a) * as_poly(b);
        return from_poly(ctx, p % ctx->minimal_polynomial());
    }

    CycloNumber inverse() const {
        if (is_zero()) throw std::domain_error("CycloNumber: division by zero");
        if (!ctx_) return CycloNumber(coeffs_[0].inverse());
        // Extended Euclid against Phi_q: u*a + v*Phi = 1 in Q[t].
        Polynomial<Rational> u, v;
        Polynomial<Rational> g =
            Polynomial<Rational>::ext_gcd(as_poly(*this), ctx_->minimal_polynomial(), u, v);
        if (g.degree() != 0)
            throw std::logic_error("CycloNumber: minimal polynomial not coprime with element");
        return from_poly(ctx_, u % ctx_->minimal_polynomial());
    }

    friend CycloNumber operator/(const CycloNumber& a, const CycloNumber& b) {
        return a * b.inverse();
    }

    CycloNumber& operator+=(const CycloNumber& o) { return *this = *this + o; }
    CycloNumber& operator-=(const CycloNumber& o) { return *this = *this - o; }
    CycloNumber& operator*=(const CycloNumber& o) { return *this = *this * o; }
    CycloNumber& operator/=(const CycloNumber& o) { return *this = *this / o; }

    friend bool operator==(const CycloNumber& a, const CycloNumber& b) {
        return (a - b).is_zero();
    }
    friend bool operator!=(const CycloNumber& a, const CycloNumber& b) { return !(a == b); }

    std::string to_string() const {
        if (is_rational()) return coeffs_[0].to_string();
        std::string out = "[";
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (i) out += ",";
            out += coeffs_[i].to_string();
        }
        return out + "]";
    }

private:
    CycloContextPtr ctx_;              // null: plain rational
    std::vector<Rational> coeffs_;     // length degree(Phi_q), or 1 when ctx_ is null

    void reduce() {
        if (static_cast<long>(coeffs_.size()) != ctx_->degree())
            throw std::invalid_argument("CycloNumber: coefficient vector length mismatch");
    }

    static Polynomial<Rational> as_poly(const CycloNumber& a) {
        return Polynomial<Rational>(std::vector<Rational>(a.coeffs_));
    }
    static CycloNumber from_poly(const CycloContextPtr& ctx, const Polynomial<Rational>& p) {
        std::vector<Rational> c(static_cast<std::size_t>(ctx->degree()), Rational(0));
        for (std::size_t i = 0; i < p.coeffs().size(); ++i) c[i] = p.coeffs()[i];
        return CycloNumber(ctx, std::move(c));
    }

    static CycloContextPtr common_context(const CycloNumber& a, const CycloNumber& b) {
        if (a.ctx_ && b.ctx_) {
            if (a.ctx_->order() != b.ctx_->order())
                throw std::invalid_argument("CycloNumber: mixed cyclotomic orders");
            return a.ctx_;
        }
        return a.ctx_ ? a.ctx_ : b.ctx_;
    }

    template <class Op>
    static CycloNumber combined(const CycloNumber& a, const CycloNumber& b, Op op) {
        CycloContextPtr ctx = common_context(a, b);
        if (!ctx) return CycloNumber(op(a.coeffs_[0], b.coeffs_[0]));
        CycloNumber ea = a.ctx_ ? a : from_rational(ctx, a.coeffs_[0]);
        CycloNumber eb = b.ctx_ ? b : from_rational(ctx, b.coeffs_[0]);
        std::vector<Rational> c(ea.coeffs_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = op(ea.coeffs_[i], eb.coeffs_[i]);
        return CycloNumber(ctx, std::move(c));
    }
};

} // namespace formalred

#endif // FORMALRED_CYCLOTOMIC_HPP
