#ifndef FORMALRED_POLYNOMIAL_HPP
#define FORMALRED_POLYNOMIAL_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <formalred/rational.hpp>

namespace formalred {

// Dense univariate polynomial over an exact field F, coefficients stored
// ascending, no trailing zeros. The zero polynomial has empty storage and
// degree() == -1.
template <class F>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Polynomial constant(F v) { return Polynomial(std::vector<F>{std::move(v)}); }
    static Polynomial x_power(std::size_t k) {
        std::vector<F> c(k + 1, F(0));
        c[k] = F(1);
        return Polynomial(std::move(c));
    }

    long degree() const { return static_cast<long>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const F& operator[](std::size_t i) const { return c_[i]; }
    const std::vector<F>& coeffs() const { return c_; }
    const F& leading() const {
        if (c_.empty()) throw std::logic_error("Polynomial: leading of zero");
        return c_.back();
    }
    bool is_monic() const { return !c_.empty() && c_.back() == F(1); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<F> r(std::max(a.c_.size(), b.c_.size()), F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] + b.c_[i];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<F> r(std::max(a.c_.size(), b.c_.size()), F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] - b.c_[i];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial();
        std::vector<F> r(a.c_.size() + b.c_.size() - 1, F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const F& s, const Polynomial& p) {
        std::vector<F> r = p.c_;
        for (auto& v : r) v = s * v;
        return Polynomial(std::move(r));
    }
    Polynomial operator-() const { return F(-1) * *this; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    static void divmod(const Polynomial& a, const Polynomial& b, Polynomial& q, Polynomial& r) {
        if (b.is_zero()) throw std::domain_error("Polynomial: division by zero");
        q = Polynomial();
        r = a;
        if (a.degree() < b.degree()) return;
        q.c_.assign(a.c_.size() - b.c_.size() + 1, F(0));
        F inv_lead = F(1) / b.leading();
        while (!r.is_zero() && r.degree() >= b.degree()) {
            std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
            F f = r.leading() * inv_lead;
            q.c_[shift] = q.c_[shift] + f;
            for (std::size_t i = 0; i < b.c_.size(); ++i)
                r.c_[shift + i] = r.c_[shift + i] - f * b.c_[i];
            r.trim();
        }
        q.trim();
    }
    friend Polynomial operator/(const Polynomial& a, const Polynomial& b) {
        Polynomial q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend Polynomial operator%(const Polynomial& a, const Polynomial& b) {
        Polynomial q, r;
        divmod(a, b, q, r);
        return r;
    }

    Polynomial monic() const {
        if (is_zero()) return *this;
        return (F(1) / leading()) * *this;
    }

    static Polynomial gcd(Polynomial a, Polynomial b) {
        while (!b.is_zero()) {
            Polynomial r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    // g = gcd(a, b) = u*a + v*b, g monic (or zero).
    static Polynomial ext_gcd(Polynomial a, Polynomial b, Polynomial& u, Polynomial& v) {
        Polynomial u0 = constant(F(1)), v0;
        Polynomial u1, v1 = constant(F(1));
        while (!b.is_zero()) {
            Polynomial q, r;
            divmod(a, b, q, r);
            Polynomial u2 = u0 - q * u1;
            Polynomial v2 = v0 - q * v1;
            a = std::move(b);
            b = std::move(r);
            u0 = std::move(u1);
            u1 = std::move(u2);
            v0 = std::move(v1);
            v1 = std::move(v2);
        }
        if (a.is_zero()) {
            u = Polynomial();
            v = Polynomial();
            return a;
        }
        F s = F(1) / a.leading();
        u = s * u0;
        v = s * v0;
        return s * a;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial();
        std::vector<F> r(c_.size() - 1, F(0));
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = F(static_cast<long long>(i)) * c_[i];
        return Polynomial(std::move(r));
    }

    F eval(const F& x) const {
        F acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    Polynomial pow(unsigned long long e) const {
        Polynomial r = constant(F(1));
        Polynomial base = *this;
        while (e != 0) {
            if (e & 1ULL) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    // Product of distinct irreducible factors: p / gcd(p, p').
    Polynomial squarefree_part() const {
        if (is_zero()) return *this;
        Polynomial g = gcd(*this, derivative());
        return (*this / g).monic();
    }

    std::string to_string(const std::string& var = "t") const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == F(0)) continue;
            if (!out.empty()) out += " + ";
            out += to_coeff_string(c_[i]);
            if (i > 0) out += "*" + var + "^" + std::to_string(i);
        }
        return out;
    }

private:
    std::vector<F> c_;

    void trim() {
        while (!c_.empty() && c_.back() == F(0)) c_.pop_back();
    }

    static std::string to_coeff_string(const F& v) {
        if constexpr (requires { v.to_string(); })
            return v.to_string();
        else
            return std::to_string(v);
    }
};

// Rational roots of a rational polynomial, found by the rational root
// theorem on the denominator-cleared polynomial. Divisor enumeration is
// capped; callers treat a miss as "no rational root found".
inline std::vector<Rational> rational_roots(const Polynomial<Rational>& p,
                                            long long divisor_budget = 200000) {
    std::vector<Rational> roots;
    if (p.is_zero()) return roots;
    Polynomial<Rational> q = p;
    // Strip x^k so the constant term is nonzero.
    std::size_t low = 0;
    while (low < q.coeffs().size() && q.coeffs()[low].is_zero()) ++low;
    if (low > 0) {
        roots.push_back(Rational(0));
        std::vector<Rational> shifted(q.coeffs().begin() + static_cast<long>(low), q.coeffs().end());
        q = Polynomial<Rational>(std::move(shifted));
    }
    if (q.degree() < 1) return roots;
    BigInt den_lcm(1);
    for (const auto& c : q.coeffs()) den_lcm = lcm(den_lcm, c.den());
    BigInt a0 = (q.coeffs().front() * Rational(den_lcm)).num().abs();
    BigInt an = (q.coeffs().back() * Rational(den_lcm)).num().abs();

    auto divisors = [&](const BigInt& v) {
        std::vector<BigInt> out;
        BigInt i(1);
        long long tried = 0;
        while (i * i <= v && tried < divisor_budget) {
            if ((v % i).is_zero()) {
                out.push_back(i);
                BigInt other = v / i;
                if (other != i) out.push_back(other);
            }
            i += BigInt(1);
            ++tried;
        }
        return out;
    };
    for (const BigInt& r : divisors(a0))
        for (const BigInt& s : divisors(an))
            for (int sgn : {1, -1}) {
                Rational cand(sgn > 0 ? r : -r, s);
                if (q.eval(cand).is_zero()) {
                    bool seen = false;
                    for (const auto& known : roots) seen = seen || known == cand;
                    if (!seen) roots.push_back(cand);
                }
            }
    return roots;
}

// Multiplicity of a root.
inline std::size_t root_multiplicity(const Polynomial<Rational>& p, const Rational& root) {
    Polynomial<Rational> lin(std::vector<Rational>{-root, Rational(1)});
    Polynomial<Rational> q = p;
    std::size_t m = 0;
    while (!q.is_zero() && q.eval(root).is_zero()) {
        q = q / lin;
        ++m;
    }
    return m;
}

} // namespace formalred

#endif // FORMALRED_POLYNOMIAL_HPP
