#ifndef FORMALRED_BIGINT_HPP
#define FORMALRED_BIGINT_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace formalred {

// Arbitrary-precision signed integer, sign-magnitude over base-2^32 limbs.
// Magnitude is little-endian with no trailing zero limbs; zero has empty
// limbs and sign 0.
class BigInt {
public:
    BigInt() = default;

    BigInt(long long v) {
        if (v == 0) return;
        sign_ = v < 0 ? -1 : 1;
        unsigned long long m =
            v < 0 ? ~static_cast<unsigned long long>(v) + 1ULL
                  : static_cast<unsigned long long>(v);
        while (m != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(m & 0xffffffffULL));
            m >>= 32;
        }
    }
    BigInt(int v) : BigInt(static_cast<long long>(v)) {}
    BigInt(unsigned int v) : BigInt(static_cast<long long>(v)) {}
    BigInt(long v) : BigInt(static_cast<long long>(v)) {}

    static BigInt from_string(std::string_view s) {
        BigInt r;
        std::size_t i = 0;
        int sign = 1;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            if (s[i] == '-') sign = -1;
            ++i;
        }
        if (i == s.size()) throw std::invalid_argument("BigInt: empty numeral");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw std::invalid_argument("BigInt: bad digit in numeral");
            r.mul_small_add(10, static_cast<std::uint32_t>(s[i] - '0'));
        }
        if (!r.limbs_.empty()) r.sign_ = sign;
        return r;
    }

    int sign() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }
    bool is_one() const { return sign_ == 1 && limbs_.size() == 1 && limbs_[0] == 1; }
    bool is_negative() const { return sign_ < 0; }

    // Fits in [-2^62, 2^62]; enough for index arithmetic.
    bool fits_longlong() const { return limbs_.size() <= 2 && (limbs_.size() < 2 || limbs_[1] < 0x40000000u); }
    long long to_longlong() const {
        if (!fits_longlong()) throw std::overflow_error("BigInt: does not fit in long long");
        unsigned long long m = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) m = (m << 32) | limbs_[i];
        return sign_ < 0 ? -static_cast<long long>(m) : static_cast<long long>(m);
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return cmp(a, b) >= 0; }

    static int cmp(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
        int c = cmp_mag(a.limbs_, b.limbs_);
        return a.sign_ >= 0 ? c : -c;
    }

    BigInt operator-() const {
        BigInt r = *this;
        r.sign_ = -r.sign_;
        return r;
    }
    BigInt abs() const {
        BigInt r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        BigInt r;
        if (a.sign_ == b.sign_) {
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            r.sign_ = a.sign_;
        } else {
            int c = cmp_mag(a.limbs_, b.limbs_);
            if (c == 0) return BigInt();
            const BigInt& big = c > 0 ? a : b;
            const BigInt& small = c > 0 ? b : a;
            r.limbs_ = sub_mag(big.limbs_, small.limbs_);
            r.sign_ = big.sign_;
        }
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
        BigInt r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            std::uint64_t ai = a.limbs_[i];
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry != 0) {
                std::uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        r.sign_ = a.sign_ * b.sign_;
        return r;
    }

    // Truncated division (C semantics): quotient rounds toward zero,
    // remainder has the sign of the dividend.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
        int c = cmp_mag(a.limbs_, b.limbs_);
        if (c < 0) {
            q = BigInt();
            r = a;
            return;
        }
        divmod_mag(a.limbs_, b.limbs_, q.limbs_, r.limbs_);
        q.trim();
        r.trim();
        q.sign_ = q.limbs_.empty() ? 0 : a.sign_ * b.sign_;
        r.sign_ = r.limbs_.empty() ? 0 : a.sign_;
    }

    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
    BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
    BigInt& operator*=(const BigInt& o) { return *this = *this * o; }
    BigInt& operator/=(const BigInt& o) { return *this = *this / o; }
    BigInt& operator%=(const BigInt& o) { return *this = *this % o; }

    static BigInt gcd(BigInt a, BigInt b) {
        a.sign_ = a.limbs_.empty() ? 0 : 1;
        b.sign_ = b.limbs_.empty() ? 0 : 1;
        while (!b.is_zero()) {
            BigInt q, r;
            divmod(a, b, q, r);
            a = b;
            b = r;
        }
        return a;
    }

    static BigInt pow(BigInt base, unsigned long long e) {
        BigInt r(1);
        while (e != 0) {
            if (e & 1ULL) r *= base;
            base *= base;
            e >>= 1;
        }
        return r;
    }

    std::string to_string() const {
        if (sign_ == 0) return "0";
        std::vector<std::uint32_t> m = limbs_;
        std::string digits;
        while (!m.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = m.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | m[i];
                m[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
                rem = cur % 1000000000ULL;
            }
            while (!m.empty() && m.back() == 0) m.pop_back();
            char buf[10];
            for (int i = 0; i < 9; ++i) {
                buf[i] = static_cast<char>('0' + rem % 10);
                rem /= 10;
            }
            digits.append(buf, buf + 9);
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        std::string out;
        if (sign_ < 0) out.push_back('-');
        out.append(digits.rbegin(), digits.rend());
        return out;
    }

    std::size_t limb_count() const { return limbs_.size(); }

private:
    int sign_ = 0;
    std::vector<std::uint32_t> limbs_;

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) sign_ = 0;
    }

    void mul_small_add(std::uint32_t mul, std::uint32_t add) {
        std::uint64_t carry = add;
        for (auto& limb : limbs_) {
            std::uint64_t cur = static_cast<std::uint64_t>(limb) * mul + carry;
            limb = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        while (carry != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry));
            carry >>= 32;
        }
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint32_t> r(big.size() + 1, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < big.size(); ++i) {
            std::uint64_t cur = carry + big[i] + (i < small.size() ? small[i] : 0);
            r[i] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        r[big.size()] = static_cast<std::uint32_t>(carry);
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    // Requires |a| >= |b|.
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r(a.size(), 0);
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(a[i]) - borrow -
                               (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
            if (cur < 0) {
                cur += (std::int64_t(1) << 32);
                borrow = 1;
            } else {
                borrow = 0;
            }
            r[i] = static_cast<std::uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    // Knuth algorithm D on magnitudes; requires |a| >= |b| > 0.
    static void divmod_mag(const std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b,
                           std::vector<std::uint32_t>& q,
                           std::vector<std::uint32_t>& r) {
        if (b.size() == 1) {
            q.assign(a.size(), 0);
            std::uint64_t rem = 0;
            for (std::size_t i = a.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | a[i];
                q[i] = static_cast<std::uint32_t>(cur / b[0]);
                rem = cur % b[0];
            }
            r.clear();
            if (rem != 0) r.push_back(static_cast<std::uint32_t>(rem));
            return;
        }

        int shift = 0;
        for (std::uint32_t top = b.back(); (top & 0x80000000u) == 0; top <<= 1) ++shift;

        const std::size_t n = b.size();
        const std::size_t m = a.size() - n;

        std::vector<std::uint32_t> u(a.size() + 1, 0), v(n, 0);
        // Normalized copies: u = a << shift (one extra limb), v = b << shift.
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::uint64_t cur = static_cast<std::uint64_t>(a[i]) << shift;
            u[i] |= static_cast<std::uint32_t>(cur);
            if (shift != 0) u[i + 1] |= static_cast<std::uint32_t>(cur >> 32);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t cur = static_cast<std::uint64_t>(b[i]) << shift;
            v[i] |= static_cast<std::uint32_t>(cur);
            if (shift != 0 && i + 1 < n) v[i + 1] |= static_cast<std::uint32_t>(cur >> 32);
        }

        q.assign(m + 1, 0);
        const std::uint64_t base = std::uint64_t(1) << 32;
        for (std::size_t j = m + 1; j-- > 0;) {
            std::uint64_t top = (static_cast<std::uint64_t>(u[j + n]) << 32) | u[j + n - 1];
            std::uint64_t qhat = top / v[n - 1];
            std::uint64_t rhat = top % v[n - 1];
            while (qhat >= base ||
                   qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
                --qhat;
                rhat += v[n - 1];
                if (rhat >= base) break;
            }
            // Multiply-subtract qhat*v from u[j..j+n].
            std::int64_t borrow = 0;
            std::uint64_t carry = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t prod = qhat * v[i] + carry;
                carry = prod >> 32;
                std::int64_t cur = static_cast<std::int64_t>(u[i + j]) - borrow -
                                   static_cast<std::int64_t>(prod & 0xffffffffULL);
                if (cur < 0) {
                    cur += static_cast<std::int64_t>(base);
                    borrow = 1;
                } else {
                    borrow = 0;
                }
                u[i + j] = static_cast<std::uint32_t>(cur);
            }
            std::int64_t cur = static_cast<std::int64_t>(u[j + n]) - borrow -
                               static_cast<std::int64_t>(carry);
            if (cur < 0) {
                // qhat was one too large; add v back.
                cur += static_cast<std::int64_t>(base);
                --qhat;
                std::uint64_t c2 = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    std::uint64_t s = static_cast<std::uint64_t>(u[i + j]) + v[i] + c2;
                    u[i + j] = static_cast<std::uint32_t>(s);
                    c2 = s >> 32;
                }
                cur += static_cast<std::int64_t>(c2);
                cur &= static_cast<std::int64_t>(base - 1);
            }
            u[j + n] = static_cast<std::uint32_t>(cur);
            q[j] = static_cast<std::uint32_t>(qhat);
        }

        r.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = static_cast<std::uint32_t>(
                (u[i] >> shift) |
                (shift != 0 && i + 1 < u.size()
                     ? static_cast<std::uint64_t>(u[i + 1]) << (32 - shift)
                     : 0));
        while (!q.empty() && q.back() == 0) q.pop_back();
        while (!r.empty() && r.back() == 0) r.pop_back();
    }
};

inline BigInt lcm(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt();
    return (a / BigInt::gcd(a, b) * b).abs();
}

} // namespace formalred

#endif // FORMALRED_BIGINT_HPP
