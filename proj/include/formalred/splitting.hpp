#ifndef FORMALRED_SPLITTING_HPP
#define FORMALRED_SPLITTING_HPP

#include <string>
#include <vector>

#include <formalred/commutative.hpp>
#include <formalred/series.hpp>

namespace formalred {

template <class F>
struct SplitResult {
    PuiseuxMatrix<F> transform;   // T of the form [[I, U],[V, I]], U_0 = V_0 = 0
    PuiseuxMatrix<F> result;      // block-diagonal transformed system
    BlockPartition partition;
    long certified_e = 0;         // result exact and off-diagonal-free through here
};

namespace detail {

template <class F>
Matrix<F> offdiag_assembled(std::size_t n, const BlockPartition& part, const Matrix<F>& u,
                            const Matrix<F>& v) {
    Matrix<F> t(n, n);
    t.set_block(0, part.n1, u);
    t.set_block(part.n1, 0, v);
    return t;
}

// The splitting recursion, derived from B = T[A] by inserting the series
// and comparing coefficients at exponent e_h = lead + h (writing lead for
// the exponent numerator of the leading coefficient, lead = p - q*r in the
// pole/index frame, negative exactly when r > p/q):
//
//   A_p T_h - T_h A_p - B_(lead+h)
//       = sum_{j=1..h-1} (T_(h-j) B_(lead+j) - A_(lead+j) T_(h-j))
//         - A_(lead+h) + (e_h/q) T_(e_h)   =: R_h,
//
// with T_m = 0 for m < 0. The j = h term of the full convolution
// contributes the unknown B_(lead+h) on the left and the known -A_(lead+h)
// inside R_h. Diagonal blocks give B^11 = -R^11, B^22 = -R^22; off-diagonal
// blocks are the Sylvester equations
//   A_p^11 U_h - U_h A_p^22 = R^12,   A_p^22 V_h - V_h A_p^11 = R^21,
// uniquely solvable while the leading blocks have disjoint spectra.
template <class F>
SplitResult<F> split_core(const PuiseuxMatrix<F>& a, const BlockPartition& part, long order,
                          std::vector<Matrix<F>>* remainders) {
    const std::size_t n = a.dim();
    if (part.total() != n) throw std::invalid_argument("split: partition does not sum to n");
    if (part.degenerate()) throw std::invalid_argument("split: partition must have two blocks");
    if (order < 0) throw std::invalid_argument("split: order must be nonnegative");
    auto lead_opt = a.leading_e();
    if (!lead_opt || *lead_opt >= 0)
        throw precondition_error("split: system must have a pole (r > p/q)");
    const long lead = *lead_opt;
    const long q = a.ram();
    const std::size_t n1 = part.n1, n2 = part.n2;

    if (a.known_e() < lead + order)
        throw precondition_error(
            "split: input known through exponent " + std::to_string(a.known_e()) +
            " but order " + std::to_string(order) + " needs exponent " +
            std::to_string(lead + order) + "; refusing to extrapolate");

    const Matrix<F> ap = a.leading();
    if (!ap.block(0, n1, n1, n2).is_zero() || !ap.block(n1, 0, n2, n1).is_zero())
        throw precondition_error("split: leading matrix is not block-diagonal for the partition");
    const Matrix<F> ap11 = ap.block(0, 0, n1, n1);
    const Matrix<F> ap22 = ap.block(n1, n1, n2, n2);

    SplitResult<F> out;
    out.partition = part;
    out.certified_e = lead + order;
    out.transform = PuiseuxMatrix<F>(n, q, order);
    out.transform.set_coeff(0, Matrix<F>::identity(n));
    out.result = PuiseuxMatrix<F>(n, q, lead + order);
    out.result.set_coeff(lead, ap);

    for (long h = 1; h <= order; ++h) {
        Matrix<F> r = -a.coeff(lead + h);
        for (long j = 1; j < h; ++j) {
            Matrix<F> thj = out.transform.coeff(h - j);
            if (!thj.is_zero()) {
                r = r + thj * out.result.coeff(lead + j);
                r = r - a.coeff(lead + j) * thj;
            }
        }
        const long e_h = lead + h;
        if (e_h > 0 && out.transform.has_coeff(e_h))
            r = r + F(Rational(e_h, q)) * out.transform.coeff(e_h);
        if (remainders) remainders->push_back(r);

        Matrix<F> b(n, n);
        b.set_block(0, 0, -r.block(0, 0, n1, n1));
        b.set_block(n1, n1, -r.block(n1, n1, n2, n2));
        out.result.set_coeff(lead + h, b);

        auto u = sylvester_solve(ap11, ap22, r.block(0, n1, n1, n2), F(1));
        auto v = sylvester_solve(ap22, ap11, r.block(n1, 0, n2, n1), F(1));
        if (!u || !v) throw precondition_error("split: leading blocks share an eigenvalue");
        out.transform.set_coeff(h, offdiag_assembled(n, part, *u, *v));
    }
    return out;
}

} // namespace detail

// Classical Splitting Lemma recursion: block-diagonalizes a system whose
// leading matrix is block-diagonal with spectra-disjoint blocks, to the
// requested number of coefficient steps past the leading index. The
// spectral precondition is not tested up front; the first singular
// Sylvester solve aborts with a precise diagnostic.
template <class F>
SplitResult<F> split(const PuiseuxMatrix<F>& a, const BlockPartition& part, long order) {
    return detail::split_core(a, part, order, static_cast<std::vector<Matrix<F>>*>(nullptr));
}

template <class F>
struct CommutativeSplitResult {
    SplitResult<F> split;
    bool certified = false;   // commutation relations held at every computed index
};

// Splitting for (omega, P)-commutative systems. The numerical recursion is
// identical (the commutative structure is a theorem, not an algorithmic
// change); on top of it, the relations
//   R_k P = omega^(p+k) P R_k,  T_k P = omega^k P T_k,
//   B_(p+k) P = omega^(p+k) P B_(p+k)
// are verified for every computed index and any failure raises an
// internal-consistency error. The strengthened hypothesis (omega^p-spectra
// of the leading blocks disjoint) is certified via omega_disjoint.
inline CommutativeSplitResult<Rational> split_commutative(const PuiseuxMatrix<Rational>& a,
                                                          const Matrix<CycloNumber>& p,
                                                          const BlockPartition& part, long order,
                                                          const CycloContextPtr& ctx) {
    const std::size_t n1 = part.n1, n2 = part.n2;
    if (p.rows() != a.dim()) throw std::invalid_argument("split_commutative: P dimension mismatch");
    if (!p.block(0, n1, n1, n2).is_zero() || !p.block(n1, 0, n2, n1).is_zero())
        throw precondition_error("split_commutative: P is not block-diagonal for the partition");
    if (!check_commutative(a, p, ctx))
        throw precondition_error("split_commutative: system is not (omega, P)-commutative");
    {
        const Matrix<Rational> ap = a.leading();
        if (!omega_disjoint(ap.block(0, 0, n1, n1), ap.block(n1, n1, n2, n2), ctx->order(),
                            a.leading_index()))
            throw precondition_error(
                "split_commutative: omega^p-spectra of the leading blocks are not disjoint");
    }

    std::vector<Matrix<Rational>> remainders;
    CommutativeSplitResult<Rational> out{detail::split_core(a, part, order, &remainders), false};

    const long lead = *a.leading_e();
    auto commutes = [&](const Matrix<Rational>& m, long e) {
        Matrix<CycloNumber> mc = to_cyclo(m, ctx);
        return mc * p == CycloNumber::omega_power(ctx, e) * (p * mc);
    };
    for (long h = 1; h <= order; ++h)
        if (!commutes(remainders[static_cast<std::size_t>(h - 1)], lead + h))
            throw consistency_error("split_commutative: remainder certificate failed at step " +
                                    std::to_string(h));
    for (const auto& [e, m] : out.split.transform.support())
        if (!commutes(m, e))
            throw consistency_error("split_commutative: transform certificate failed at exponent " +
                                    std::to_string(e));
    for (const auto& [e, m] : out.split.result.support())
        if (!commutes(m, e))
            throw consistency_error("split_commutative: result certificate failed at exponent " +
                                    std::to_string(e));
    out.certified = true;
    return out;
}

} // namespace formalred

#endif // FORMALRED_SPLITTING_HPP
