#ifndef FORMALRED_COMMUTATIVE_HPP
#define FORMALRED_COMMUTATIVE_HPP

#include <formalred/series.hpp>

namespace formalred {

// (omega, P)-commutativity at coefficient level: A_e P = omega^e P A_e for
// every stored exponent within the budget. With P = I this is exactly
// unramifiedness (nonzero coefficients only at exponents divisible by q).
inline bool check_commutative(const PuiseuxMatrix<CycloNumber>& a, const Matrix<CycloNumber>& p,
                              const CycloContextPtr& ctx) {
    if (p.rows() != a.dim() || p.cols() != a.dim())
        throw std::invalid_argument("check_commutative: shape mismatch");
    for (const auto& [e, m] : a.support()) {
        CycloNumber w = CycloNumber::omega_power(ctx, e);
        if (m * p != w * (p * m)) return false;
    }
    return true;
}

inline bool check_commutative(const PuiseuxMatrix<Rational>& a, const Matrix<CycloNumber>& p,
                              const CycloContextPtr& ctx) {
    return check_commutative(series_to_cyclo(a, ctx), p, ctx);
}

inline bool check_commutative(const PuiseuxMatrix<Rational>& a, const Matrix<CycloNumber>& p,
                              long q) {
    return check_commutative(a, p, cyclo_context(q));
}

} // namespace formalred

#endif // FORMALRED_COMMUTATIVE_HPP
