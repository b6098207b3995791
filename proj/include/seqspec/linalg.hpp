#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "seqspec/errors.hpp"
#include "seqspec/matrix.hpp"

namespace seqspec {

/// Singular values of a square matrix, stored in decreasing order.
/// The increasing-order view sigma_k addresses the same storage from the back.
struct SingularValues {
    std::vector<double> desc;

    std::size_t dim() const noexcept { return desc.size(); }

    /// Sigma_k, the k-th largest singular value (1-based).
    double largest(std::size_t k) const { return desc.at(k - 1); }

    /// sigma_k, the k-th smallest singular value (1-based).
    double smallest(std::size_t k) const { return desc.at(desc.size() - k); }
};

struct EigenDecomposition {
    std::vector<double> eigenvalues; // ascending
    Matrix basis;                    // unitary, column j pairs with eigenvalues[j]
};

namespace detail {

inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& x) { return std::conj(x); }

inline constexpr std::size_t kDefaultJacobiSweeps = 64;

// Cyclic Jacobi on a Hermitian (or real symmetric) matrix held in w, row-major.
// Each rotation zeroes w[p][q] by the unitary similarity with
//   U_pp = c, U_pq = s, U_qp = -conj(s), U_qq = c,   c real, c^2 + |s|^2 = 1,
// where s carries the phase of w[p][q]. Pairs are visited in a fixed cyclic
// order, so results are deterministic. When vt is non-null it accumulates the
// transposed eigenvector matrix (rows of vt are eigenvectors).
template <typename F>
std::vector<double> jacobi_hermitian(std::vector<F>& w, std::size_t n,
                                     std::vector<F>* vt, double tol,
                                     std::size_t max_sweeps = kDefaultJacobiSweeps) {
    if (tol <= 0.0) throw ContractError("jacobi: tolerance must be positive");
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::real(cplx(w[i * n + i]));

    double fro = 0.0;
    for (const auto& v : w) fro += std::norm(cplx(v));
    fro = std::sqrt(fro);
    const double stop = tol * (1.0 + fro);

    double off = 0.0;
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        double off2 = 0.0, off1 = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double a = std::abs(cplx(w[p * n + q]));
                off2 += a * a;
                off1 += a;
            }
        off = std::sqrt(2.0 * off2);
        if (off <= stop) {
            for (std::size_t i = 0; i < n; ++i) diag[i] = std::real(cplx(w[i * n + i]));
            return diag;
        }

        // Early sweeps rotate only the pairs that matter yet (NR-style threshold).
        const double thresh = (sweep < 4) ? 0.2 * off1 / double(n * n) : 0.0;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                F& wpq = w[p * n + q];
                const double r = std::abs(cplx(wpq));
                if (r == 0.0) continue;

                const double dp = std::real(cplx(w[p * n + p]));
                const double dq = std::real(cplx(w[q * n + q]));
                const double g = 100.0 * r;
                if (sweep > 4 && std::abs(dp) + g == std::abs(dp) &&
                    std::abs(dq) + g == std::abs(dq)) {
                    wpq = F(0);
                    w[q * n + p] = F(0);
                    continue;
                }
                if (r <= thresh) continue;

                const F u = wpq / F(r); // unit phase of the pivot
                const double tau = (dq - dp) / (2.0 * r);
                double t;
                if (tau == 0.0)
                    t = 1.0;
                else
                    t = (tau > 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const F s = u * F(t * c);

                // 2x2 block exactly.
                w[p * n + p] = F(dp - t * r);
                w[q * n + q] = F(dq + t * r);
                wpq = F(0);
                w[q * n + p] = F(0);

                // Rows p and q, mirrored into columns to keep w Hermitian.
                F* rowp = w.data() + p * n;
                F* rowq = w.data() + q * n;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == p || j == q) continue;
                    const F xp = rowp[j];
                    const F xq = rowq[j];
                    const F np_ = F(c) * xp - s * xq;
                    const F nq_ = conj_of(s) * xp + F(c) * xq;
                    rowp[j] = np_;
                    rowq[j] = nq_;
                    w[j * n + p] = conj_of(np_);
                    w[j * n + q] = conj_of(nq_);
                }

                if (vt) {
                    F* vp = vt->data() + p * n;
                    F* vq = vt->data() + q * n;
                    for (std::size_t j = 0; j < n; ++j) {
                        const F xp = vp[j];
                        const F xq = vq[j];
                        vp[j] = F(c) * xp - conj_of(s) * xq;
                        vq[j] = s * xp + F(c) * xq;
                    }
                }
            }
        }
    }
    throw NumericError("jacobi: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps, off-diagonal norm " + std::to_string(off),
                       off);
}

// True when a is Hermitian tridiagonal (exact zeros beyond the first off-diagonal).
inline bool is_tridiagonal(const Matrix& a) {
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j)
            if (a(i, j) != cplx{0.0, 0.0} || a(j, i) != cplx{0.0, 0.0}) return false;
    return true;
}

// Sturm-count bisection for a Hermitian tridiagonal matrix given by its real
// diagonal and |off-diagonal|^2. Counts negative pivots of the shifted LDL*
// factorization; zero pivots are nudged by a deterministic pivmin, the dstebz
// convention. Used as a fast path for large tridiagonal inputs; agrees with
// the Jacobi kernel to ~1e-12 relative.
inline std::vector<double> sturm_selected_eigenvalues(const std::vector<double>& diag,
                                                      const std::vector<double>& off2,
                                                      const std::vector<std::size_t>& which) {
    const std::size_t n = diag.size();
    std::vector<double> out(which.size());
    if (n == 0 || which.empty()) return out;

    double emax = 0.0;
    for (double e2 : off2) emax = std::max(emax, e2);
    const double pivmin = std::max(emax, 1.0) * 1e-290;

    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::sqrt(off2[i - 1]);
        if (i + 1 < n) radius += std::sqrt(off2[i]);
        lo = std::min(lo, diag[i] - radius);
        hi = std::max(hi, diag[i] + radius);
    }
    const double span = std::max(hi - lo, 1e-30);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    const double width_tol = 1e-14 * std::max({std::abs(lo), std::abs(hi), 1.0});

    auto count_less = [&](double x) {
        std::size_t cnt = 0;
        double d = diag[0] - x;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++cnt;
        for (std::size_t i = 1; i < n; ++i) {
            d = (diag[i] - x) - off2[i - 1] / d;
            if (std::abs(d) < pivmin) d = -pivmin;
            if (d < 0.0) ++cnt;
        }
        return cnt;
    };

    for (std::size_t t = 0; t < which.size(); ++t) {
        const std::size_t k = which[t]; // 1-based ascending index
        double a = lo, b = hi;
        while (b - a > width_tol) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (count_less(mid) >= k)
                b = mid;
            else
                a = mid;
        }
        out[t] = 0.5 * (a + b);
    }
    return out;
}

inline std::vector<double> sturm_tridiagonal_eigenvalues(const std::vector<double>& diag,
                                                         const std::vector<double>& off2) {
    std::vector<std::size_t> all(diag.size());
    std::iota(all.begin(), all.end(), std::size_t{1});
    return sturm_selected_eigenvalues(diag, off2, all);
}

// Tridiagonal Gram matrix of a matrix with bandwidths bl + bu <= 1:
// diagonal and |off-diagonal|^2 of A* A.
inline void tridiagonal_gram(const Matrix& a, std::vector<double>& diag,
                             std::vector<double>& off2) {
    const std::size_t n = a.dim();
    diag.assign(n, 0.0);
    off2.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += std::norm(a(k, j));
        diag[j] = s;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        cplx s{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) s += std::conj(a(k, j)) * a(k, j + 1);
        off2[j] = std::norm(s);
    }
}

// Lower/upper bandwidths from exact zero structure.
inline std::pair<std::size_t, std::size_t> bandwidths(const Matrix& a) {
    const std::size_t n = a.dim();
    std::size_t bl = 0, bu = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a(i, j) != cplx{0.0, 0.0}) {
                if (i > j) bl = std::max(bl, i - j);
                if (j > i) bu = std::max(bu, j - i);
            }
    return {bl, bu};
}

// Ascending sort permutation, ties kept in index order.
inline std::vector<std::size_t> ascending_order(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

inline void check_hermitian_contract(const Matrix& a) {
    const double defect = a.hermiticity_defect();
    if (defect > 1e-10 * (1.0 + a.frobenius_norm()))
        throw ContractError("hermitian_eig: input is not Hermitian (defect " +
                            std::to_string(defect) + ")");
}

// Symmetrized copies; the real variant drops exactly-zero imaginary parts.
inline std::vector<cplx> hermitian_part_complex(const Matrix& a) {
    const std::size_t n = a.dim();
    std::vector<cplx> w(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i * n + i] = 0.5 * (a(i, i) + std::conj(a(i, i)));
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx h = 0.5 * (a(i, j) + std::conj(a(j, i)));
            w[i * n + j] = h;
            w[j * n + i] = std::conj(h);
        }
    }
    return w;
}

inline std::vector<double> hermitian_part_real(const Matrix& a) {
    const std::size_t n = a.dim();
    std::vector<double> w(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w[i * n + j] = 0.5 * (a(i, j).real() + a(j, i).real());
    return w;
}

} // namespace detail

/// Eigenvalues (ascending) of a Hermitian matrix, without eigenvectors.
/// Large tridiagonal inputs take a Sturm bisection fast path; everything else
/// goes through the cyclic Jacobi kernel.
inline std::vector<double> hermitian_eigenvalues(const Matrix& a, double tol = 1e-12,
                                                 std::size_t max_sweeps = detail::kDefaultJacobiSweeps) {
    if (tol <= 0.0) throw ContractError("hermitian_eigenvalues: tol must be positive");
    detail::check_hermitian_contract(a);
    const std::size_t n = a.dim();
    if (n >= 32 && detail::is_tridiagonal(a)) {
        std::vector<double> diag(n), off2(n > 0 ? n - 1 : 0);
        for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
        for (std::size_t i = 0; i + 1 < n; ++i)
            off2[i] = std::norm(0.5 * (a(i, i + 1) + std::conj(a(i + 1, i))));
        return detail::sturm_tridiagonal_eigenvalues(diag, off2);
    }
    std::vector<double> eigs;
    if (a.is_real()) {
        auto w = detail::hermitian_part_real(a);
        eigs = detail::jacobi_hermitian<double>(w, n, nullptr, tol, max_sweeps);
    } else {
        auto w = detail::hermitian_part_complex(a);
        eigs = detail::jacobi_hermitian<cplx>(w, n, nullptr, tol, max_sweeps);
    }
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

/// Full eigendecomposition of a Hermitian matrix: ascending eigenvalues and a
/// unitary basis of eigenvectors (columns).
inline EigenDecomposition hermitian_eig(const Matrix& a, double tol = 1e-12,
                                        std::size_t max_sweeps = detail::kDefaultJacobiSweeps) {
    detail::check_hermitian_contract(a);
    const std::size_t n = a.dim();
    EigenDecomposition out;
    out.basis = Matrix(n);

    if (a.is_real()) {
        auto w = detail::hermitian_part_real(a);
        std::vector<double> vt(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;
        auto eigs = detail::jacobi_hermitian<double>(w, n, &vt, tol, max_sweeps);
        auto order = detail::ascending_order(eigs);
        out.eigenvalues.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            out.eigenvalues[k] = eigs[order[k]];
            for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = vt[order[k] * n + i];
        }
    } else {
        auto w = detail::hermitian_part_complex(a);
        std::vector<cplx> vt(n * n, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;
        auto eigs = detail::jacobi_hermitian<cplx>(w, n, &vt, tol, max_sweeps);
        auto order = detail::ascending_order(eigs);
        out.eigenvalues.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            out.eigenvalues[k] = eigs[order[k]];
            for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = vt[order[k] * n + i];
        }
    }
    return out;
}

namespace detail {

template <typename F>
std::vector<F> gram_matrix(const Matrix& a); // A* A, exactly Hermitian

template <>
inline std::vector<cplx> gram_matrix<cplx>(const Matrix& a) {
    const std::size_t n = a.dim();
    std::vector<cplx> h(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx s{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) s += std::conj(a(k, i)) * a(k, j);
            if (i == j) {
                h[i * n + i] = cplx{s.real(), 0.0};
            } else {
                h[i * n + j] = s;
                h[j * n + i] = std::conj(s);
            }
        }
    return h;
}

template <>
inline std::vector<double> gram_matrix<double>(const Matrix& a) {
    const std::size_t n = a.dim();
    std::vector<double> h(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(k, i).real() * a(k, j).real();
            h[i * n + j] = s;
            h[j * n + i] = s;
        }
    return h;
}

// Tiny values are clamped to zero so rank decisions do not wobble.
inline SingularValues clamp_and_pack(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    const double top = vals.empty() ? 0.0 : vals.front();
    const double floor = 1e-10 * top;
    for (auto& v : vals)
        if (v < floor) v = 0.0;
    return SingularValues{std::move(vals)};
}

} // namespace detail

/// Singular values of a square complex matrix, decreasing order, computed from
/// the eigendecomposition of A* A. Accuracy for tiny singular values is about
/// sqrt(machine epsilon) relative to the largest one.
inline SingularValues svd_values(const Matrix& a, double tol = 1e-12) {
    if (tol <= 0.0) throw ContractError("svd_values: tol must be positive");
    const std::size_t n = a.dim();
    if (n == 0) return SingularValues{};
    std::vector<double> eigs;
    if (n >= 32) {
        // When A is bidiagonal-or-narrower, A*A is tridiagonal and Sturm
        // bisection beats the dense kernel by orders of magnitude.
        auto [bl, bu] = detail::bandwidths(a);
        if (bl + bu <= 1) {
            std::vector<double> diag, off2;
            detail::tridiagonal_gram(a, diag, off2);
            eigs = detail::sturm_tridiagonal_eigenvalues(diag, off2);
            for (auto& v : eigs) v = std::sqrt(std::max(v, 0.0));
            return detail::clamp_and_pack(std::move(eigs));
        }
    }
    if (a.is_real()) {
        auto h = detail::gram_matrix<double>(a);
        eigs = detail::jacobi_hermitian<double>(h, n, nullptr, tol);
    } else {
        auto h = detail::gram_matrix<cplx>(a);
        eigs = detail::jacobi_hermitian<cplx>(h, n, nullptr, tol);
    }
    for (auto& v : eigs) v = std::sqrt(std::max(v, 0.0));
    return detail::clamp_and_pack(std::move(eigs));
}

/// The k largest and k smallest singular values of a square matrix.
struct ExtremeSingularValues {
    std::vector<double> top_desc;   // Sigma_1 >= ... >= Sigma_k
    std::vector<double> bottom_asc; // sigma_1 <= ... <= sigma_k
};

/// Both ends of the singular spectrum without the middle. Cheap for
/// bidiagonal-or-narrower matrices, otherwise computed from the full set.
inline ExtremeSingularValues svd_extreme_values(const Matrix& a, std::size_t k,
                                                double tol = 1e-12) {
    const std::size_t n = a.dim();
    k = std::min(k, n);
    if (n >= 32 && n > 2 * k) {
        auto [bl, bu] = detail::bandwidths(a);
        if (bl + bu <= 1) {
            std::vector<double> diag, off2;
            detail::tridiagonal_gram(a, diag, off2);
            std::vector<std::size_t> which;
            which.reserve(2 * k);
            for (std::size_t i = 1; i <= k; ++i) which.push_back(i);          // bottom
            for (std::size_t i = n - k + 1; i <= n; ++i) which.push_back(i);  // top
            auto vals = detail::sturm_selected_eigenvalues(diag, off2, which);
            for (auto& v : vals) v = std::sqrt(std::max(v, 0.0));
            ExtremeSingularValues out;
            out.bottom_asc.assign(vals.begin(), vals.begin() + k);
            out.top_desc.assign(vals.rbegin(), vals.rbegin() + k);
            const double top = out.top_desc.empty() ? 0.0 : out.top_desc.front();
            const double floor = 1e-10 * top;
            for (auto& v : out.bottom_asc)
                if (v < floor) v = 0.0;
            return out;
        }
    }
    auto sv = svd_values(a, tol);
    ExtremeSingularValues out;
    out.top_desc.assign(sv.desc.begin(), sv.desc.begin() + k);
    out.bottom_asc.assign(sv.desc.rbegin(), sv.desc.rbegin() + k);
    return out;
}

/// Singular values of a self-adjoint matrix given its eigenvalues: the sorted
/// absolute values. Agrees with svd_values on Hermitian inputs.
inline SingularValues singular_values_from_eigs(const std::vector<double>& eigs,
                                                double shift = 0.0) {
    std::vector<double> v(eigs.size());
    for (std::size_t i = 0; i < eigs.size(); ++i) v[i] = std::abs(eigs[i] - shift);
    return detail::clamp_and_pack(std::move(v));
}

/// Spectral norm (largest singular value).
inline double spectral_norm(const Matrix& a) {
    if (a.dim() == 0) return 0.0;
    return svd_values(a).desc.front();
}

} // namespace seqspec
