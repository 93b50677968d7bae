#ifndef FORMALRED_MATRIX_HPP
#define FORMALRED_MATRIX_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <formalred/cyclotomic.hpp>
#include <formalred/errors.hpp>
#include <formalred/polynomial.hpp>
#include <formalred/rational.hpp>

namespace formalred {

// Dense matrix over an exact field. Dimensions stay small throughout, so
// everything is direct and exact.
template <class F>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, F(0)) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<F> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != rows * cols) throw std::invalid_argument("Matrix: entry count mismatch");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = F(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    F& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const F& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] + b.a_[i];
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] - b.a_[i];
        return r;
    }
    Matrix operator-() const {
        Matrix r = *this;
        for (auto& v : r.a_) v = -v;
        return r;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: product shape mismatch");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const F& aik = a(i, k);
                if (aik.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    r(i, j) = r(i, j) + aik * b(k, j);
            }
        return r;
    }
    friend Matrix operator*(const F& s, const Matrix& m) {
        Matrix r = m;
        for (auto& v : r.a_) v = s * v;
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    bool is_zero() const {
        for (const auto& v : a_)
            if (!v.is_zero()) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    F trace() const {
        F t(0);
        for (std::size_t i = 0; i < rows_; ++i) t = t + (*this)(i, i);
        return t;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const {
        Matrix r(h, w);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
        return r;
    }
    void set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j) (*this)(r0 + i, c0 + j) = m(i, j);
    }

    Matrix pow(std::size_t e) const {
        Matrix r = identity(rows_);
        Matrix base = *this;
        while (e != 0) {
            if (e & 1u) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<F> a_;

    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }
};

namespace detail {

inline BigInt denominator_lcm(const Rational& x) { return x.den(); }
inline BigInt denominator_lcm(const CycloNumber& x) {
    BigInt l(1);
    for (const auto& c : x.coeffs()) l = lcm(l, c.den());
    return l;
}

// Scales each row by the lcm of its denominators. Solution sets and
// singularity are unchanged; Bareiss then works on integral content.
template <class F>
void integralize_rows(Matrix<F>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        BigInt l(1);
        for (std::size_t j = 0; j < m.cols(); ++j) l = lcm(l, denominator_lcm(m(i, j)));
        if (l.is_one()) continue;
        F s{Rational(l)};
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = s * m(i, j);
    }
}

} // namespace detail

// Fraction-free (Bareiss) forward elimination on the augmented matrix
// [A | B]; returns the unique solution of A X = B or nullopt when A is
// singular. Pivoting takes the first row with a nonzero entry, keeping
// results deterministic over unordered fields.
template <class F>
std::optional<Matrix<F>> bareiss_solve(const Matrix<F>& A, const Matrix<F>& B) {
    if (!A.is_square() || A.rows() != B.rows())
        throw std::invalid_argument("bareiss_solve: shape mismatch");
    const std::size_t n = A.rows();
    const std::size_t m = B.cols();
    Matrix<F> M(n, n + m);
    M.set_block(0, 0, A);
    M.set_block(0, n, B);
    detail::integralize_rows(M);

    F prev(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && M(pivot, k) == F(0)) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != k)
            for (std::size_t j = 0; j < n + m; ++j) std::swap(M(k, j), M(pivot, j));
        const F piv = M(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n + m; ++j)
                M(i, j) = (piv * M(i, j) - M(i, k) * M(k, j)) / prev;
            M(i, k) = F(0);
        }
        prev = piv;
    }

    Matrix<F> X(n, m);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = n; i-- > 0;) {
            F acc = M(i, n + c);
            for (std::size_t j = i + 1; j < n; ++j) acc = acc - M(i, j) * X(j, c);
            X(i, c) = acc / M(i, i);
        }
    return X;
}

template <class F>
F bareiss_det(const Matrix<F>& A) {
    if (!A.is_square()) throw std::invalid_argument("bareiss_det: not square");
    const std::size_t n = A.rows();
    if (n == 0) return F(1);
    Matrix<F> M = A;
    // Row scaling multiplies the determinant; divide it back out at the end.
    F scale(1);
    for (std::size_t i = 0; i < n; ++i) {
        BigInt l(1);
        for (std::size_t j = 0; j < n; ++j) l = lcm(l, detail::denominator_lcm(M(i, j)));
        if (!l.is_one()) {
            F s{Rational(l)};
            scale = scale * s;
            for (std::size_t j = 0; j < n; ++j) M(i, j) = s * M(i, j);
        }
    }
    F prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && M(pivot, k) == F(0)) ++pivot;
        if (pivot == n) return F(0);
        if (pivot != k) {
            sign = -sign;
            for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(pivot, j));
        }
        const F piv = M(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                M(i, j) = (piv * M(i, j) - M(i, k) * M(k, j)) / prev;
            M(i, k) = F(0);
        }
        prev = piv;
    }
    F det = M(n - 1, n - 1) / scale;
    return sign < 0 ? -det : det;
}

template <class F>
std::optional<Matrix<F>> invert(const Matrix<F>& A) {
    return bareiss_solve(A, Matrix<F>::identity(A.rows()));
}

// Reduced row echelon form with the list of pivot columns.
template <class F>
std::pair<Matrix<F>, std::vector<std::size_t>> rref(Matrix<F> M) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < M.cols() && row < M.rows(); ++col) {
        std::size_t pivot = row;
        while (pivot < M.rows() && M(pivot, col) == F(0)) ++pivot;
        if (pivot == M.rows()) continue;
        if (pivot != row)
            for (std::size_t j = 0; j < M.cols(); ++j) std::swap(M(row, j), M(pivot, j));
        F inv = F(1) / M(row, col);
        for (std::size_t j = col; j < M.cols(); ++j) M(row, j) = inv * M(row, j);
        for (std::size_t i = 0; i < M.rows(); ++i) {
            if (i == row || M(i, col) == F(0)) continue;
            F f = M(i, col);
            for (std::size_t j = col; j < M.cols(); ++j) M(i, j) = M(i, j) - f * M(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return {std::move(M), std::move(pivots)};
}

template <class F>
std::size_t rank(const Matrix<F>& A) {
    return rref(A).second.size();
}

namespace detail {

inline int leading_sign(const Rational& x) { return x.sign(); }
inline int leading_sign(const CycloNumber& x) {
    for (const auto& c : x.coeffs())
        if (!c.is_zero()) return c.sign();
    return 0;
}

// Clears denominators; over the rationals also divides out integer content
// and fixes the first nonzero entry positive (primitive integer vectors).
template <class F>
void make_primitive(std::vector<F>& v) {
    BigInt l(1);
    for (const auto& x : v) l = lcm(l, denominator_lcm(x));
    if (!l.is_one()) {
        F s{Rational(l)};
        for (auto& x : v) x = s * x;
    }
    if constexpr (std::is_same_v<F, Rational>) {
        BigInt g(0);
        for (const auto& x : v) g = BigInt::gcd(g, x.num());
        if (!g.is_zero() && !g.is_one()) {
            F s{Rational(BigInt(1), g)};
            for (auto& x : v) x = s * x;
        }
    }
    int sgn = 0;
    for (const auto& x : v) {
        sgn = leading_sign(x);
        if (sgn != 0) break;
    }
    if (sgn < 0)
        for (auto& x : v) x = -x;
}

} // namespace detail

// Canonical kernel basis: unit values at free columns of the RREF, then
// scaled to primitive integer form. Columns of the result span ker(A).
template <class F>
Matrix<F> kernel_basis(const Matrix<F>& A) {
    auto [R, pivots] = rref(A);
    const std::size_t n = A.cols();
    std::vector<std::size_t> free_cols;
    {
        std::size_t p = 0;
        for (std::size_t col = 0; col < n; ++col) {
            if (p < pivots.size() && pivots[p] == col)
                ++p;
            else
                free_cols.push_back(col);
        }
    }
    Matrix<F> K(n, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        std::vector<F> v(n, F(0));
        v[free_cols[f]] = F(1);
        for (std::size_t p = 0; p < pivots.size(); ++p) v[pivots[p]] = -R(p, free_cols[f]);
        detail::make_primitive(v);
        for (std::size_t i = 0; i < n; ++i) K(i, f) = v[i];
    }
    return K;
}

// Canonical column-space basis: nonzero rows of rref(A^T), transposed back
// to columns and scaled primitive.
template <class F>
Matrix<F> column_space_basis(const Matrix<F>& A) {
    auto [R, pivots] = rref(A.transpose());
    Matrix<F> C(A.rows(), pivots.size());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        std::vector<F> v(A.rows());
        for (std::size_t i = 0; i < A.rows(); ++i) v[i] = R(r, i);
        detail::make_primitive(v);
        for (std::size_t i = 0; i < A.rows(); ++i) C(i, r) = v[i];
    }
    return C;
}

template <class F>
bool is_nilpotent(const Matrix<F>& A) {
    if (!A.is_square()) throw std::invalid_argument("is_nilpotent: not square");
    return A.pow(A.rows()).is_zero();
}

// Exact characteristic polynomial det(lambda*I - A) by the
// Faddeev-LeVerrier recurrence; monic of degree n.
template <class F>
Polynomial<F> char_poly(const Matrix<F>& A) {
    if (!A.is_square()) throw std::invalid_argument("char_poly: not square");
    const std::size_t n = A.rows();
    std::vector<F> c(n + 1, F(0));
    c[n] = F(1);
    Matrix<F> M = Matrix<F>::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        M = A * M;
        F ck = -(F(1) / F(static_cast<long long>(k))) * M.trace();
        c[n - k] = ck;
        for (std::size_t i = 0; i < n; ++i) M(i, i) = M(i, i) + ck;
    }
    return Polynomial<F>(std::move(c));
}

template <class F>
Matrix<F> eval_poly_at_matrix(const Polynomial<F>& p, const Matrix<F>& A) {
    const std::size_t n = A.rows();
    Matrix<F> acc(n, n);
    for (std::size_t i = p.coeffs().size(); i-- > 0;) {
        acc = A * acc;
        for (std::size_t d = 0; d < n; ++d) acc(d, d) = acc(d, d) + p.coeffs()[i];
    }
    return acc;
}

struct BlockPartition {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t total() const { return n1 + n2; }
    bool degenerate() const { return n1 == 0 || n2 == 0; }
};

template <class F>
struct SimilaritySplit {
    Matrix<F> basis;          // invertible C with C^-1 A C block-diagonal
    BlockPartition partition;
};

// Fitting decomposition: C^-1 A C = diag(M_inv, M_nil) with M_inv invertible
// of size rank(A^n) and M_nil nilpotent. Columns of C are the canonical
// basis of im(A^n) followed by the canonical basis of ker(A^n); degenerate
// partitions (A invertible or nilpotent) give C = I.
template <class F>
SimilaritySplit<F> fitting_split(const Matrix<F>& A) {
    if (!A.is_square()) throw std::invalid_argument("fitting_split: not square");
    const std::size_t n = A.rows();
    Matrix<F> M = A.pow(n);
    Matrix<F> img = column_space_basis(M);
    Matrix<F> ker = kernel_basis(M);
    if (img.cols() + ker.cols() != n)
        throw consistency_error("fitting_split: image/kernel dimensions do not fill the space");
    Matrix<F> C(n, n);
    C.set_block(0, 0, img);
    C.set_block(0, img.cols(), ker);
    return {std::move(C), BlockPartition{img.cols(), ker.cols()}};
}

// Similarity split from a coprime factorisation f*g of the characteristic
// polynomial: columns are canonical bases of ker(f(A)) and ker(g(A)).
template <class F>
SimilaritySplit<F> split_by_factors(const Matrix<F>& A, const Polynomial<F>& f,
                                    const Polynomial<F>& g) {
    if (!A.is_square()) throw std::invalid_argument("split_by_factors: not square");
    if (f * g != char_poly(A))
        throw precondition_error("split_by_factors: factors do not multiply to the characteristic polynomial");
    if (Polynomial<F>::gcd(f, g).degree() != 0)
        throw precondition_error("split_by_factors: factors are not coprime");
    Matrix<F> kf = kernel_basis(eval_poly_at_matrix(f, A));
    Matrix<F> kg = kernel_basis(eval_poly_at_matrix(g, A));
    if (kf.cols() != static_cast<std::size_t>(f.degree()) ||
        kg.cols() != static_cast<std::size_t>(g.degree()))
        throw consistency_error("split_by_factors: kernel dimension mismatch");
    const std::size_t n = A.rows();
    Matrix<F> C(n, n);
    C.set_block(0, 0, kf);
    C.set_block(0, kf.cols(), kg);
    return {std::move(C), BlockPartition{kf.cols(), kg.cols()}};
}

// Kronecker product, column-major vectorisation convention.
template <class F>
Matrix<F> kronecker(const Matrix<F>& A, const Matrix<F>& B) {
    Matrix<F> K(A.rows() * B.rows(), A.cols() * B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) {
            if (A(i, j).is_zero()) continue;
            for (std::size_t k = 0; k < B.rows(); ++k)
                for (std::size_t l = 0; l < B.cols(); ++l)
                    K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
        }
    return K;
}

// Solves A X - mu X B = R exactly via the (n1*n2) x (n1*n2) Kronecker
// system; nullopt means the operator is singular, i.e.
// spec(A) meets spec(mu*B).
template <class F>
std::optional<Matrix<F>> sylvester_solve(const Matrix<F>& A, const Matrix<F>& B,
                                         const Matrix<F>& R, const F& mu) {
    if (!A.is_square() || !B.is_square() || R.rows() != A.rows() || R.cols() != B.rows())
        throw std::invalid_argument("sylvester_solve: shape mismatch");
    const std::size_t n1 = A.rows();
    const std::size_t n2 = B.rows();
    // vec(AX) = (I (x) A) vec(X); vec(XB) = (B^T (x) I) vec(X), column-major.
    Matrix<F> K = kronecker(Matrix<F>::identity(n2), A) - mu * kronecker(B.transpose(), Matrix<F>::identity(n1));
    Matrix<F> rhs(n1 * n2, 1);
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t i = 0; i < n1; ++i) rhs(j * n1 + i, 0) = R(i, j);
    auto x = bareiss_solve(K, rhs);
    if (!x) return std::nullopt;
    Matrix<F> X(n1, n2);
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t i = 0; i < n1; ++i) X(i, j) = (*x)(j * n1 + i, 0);
    return X;
}

inline Matrix<CycloNumber> to_cyclo(const Matrix<Rational>& A, const CycloContextPtr& ctx) {
    Matrix<CycloNumber> R(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            R(i, j) = CycloNumber::from_rational(ctx, A(i, j));
    return R;
}

// True iff X -> A11 X - omega^(p k) X A22 is invertible over Q(omega) for
// every k in 0..q-1; equivalently spec(A11) and omega^(pk) spec(A22) are
// disjoint for all k. This is the hypothesis of the root-free splitting
// theorem, decided without computing any eigenvalue.
inline bool omega_disjoint(const Matrix<Rational>& A11, const Matrix<Rational>& A22, long q,
                           long p) {
    if (!A11.is_square() || !A22.is_square())
        throw std::invalid_argument("omega_disjoint: blocks must be square");
    if (A11.rows() == 0 || A22.rows() == 0) return true;
    CycloContextPtr ctx = cyclo_context(q);
    Matrix<CycloNumber> C11 = to_cyclo(A11, ctx);
    Matrix<CycloNumber> C22 = to_cyclo(A22, ctx);
    const std::size_t n1 = C11.rows(), n2 = C22.rows();
    for (long k = 0; k < q; ++k) {
        CycloNumber mu = CycloNumber::omega_power(ctx, static_cast<long long>(p) * k);
        Matrix<CycloNumber> K =
            kronecker(Matrix<CycloNumber>::identity(n2), C11) -
            mu * kronecker(C22.transpose(), Matrix<CycloNumber>::identity(n1));
        if (bareiss_det(K).is_zero()) return false;
    }
    return true;
}

} // namespace formalred

#endif // FORMALRED_MATRIX_HPP
