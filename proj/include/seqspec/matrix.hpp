#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "seqspec/errors.hpp"

namespace seqspec {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major storage.
class Matrix {
public:
    Matrix() = default;

    explicit Matrix(std::size_t dim) : dim_(dim), a_(dim * dim, cplx{0.0, 0.0}) {}

    Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        dim_ = rows.size();
        a_.reserve(dim_ * dim_);
        for (const auto& r : rows) {
            if (r.size() != dim_)
                throw AlgebraError("Matrix initializer is not square");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t dim) {
        Matrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix zero(std::size_t dim) { return Matrix(dim); }

    static Matrix diagonal(const std::vector<cplx>& d) {
        Matrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    cplx* row(std::size_t i) { return a_.data() + i * dim_; }
    const cplx* row(std::size_t i) const { return a_.data() + i * dim_; }

    const std::vector<cplx>& data() const noexcept { return a_; }
    std::vector<cplx>& data() noexcept { return a_; }

    Matrix& operator+=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    Matrix& operator*=(cplx c) {
        for (auto& v : a_) v *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx c) { return a *= c; }
    friend Matrix operator*(cplx c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.dim_;
        Matrix c(n);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx* ai = a.row(i);
            cplx* ci = c.row(i);
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = ai[k];
                if (aik == cplx{0.0, 0.0}) continue;
                const cplx* bk = b.row(k);
                for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    Matrix adjoint() const {
        Matrix m(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Frobenius norm of A - A*.
    double hermiticity_defect() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (const auto& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    bool is_real(double tol = 0.0) const {
        for (const auto& v : a_)
            if (std::abs(v.imag()) > tol) return false;
        return true;
    }

    bool operator==(const Matrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

private:
    void require_same_dim(const Matrix& o) const {
        if (dim_ != o.dim_)
            throw AlgebraError("matrix dimension mismatch: " + std::to_string(dim_) +
                               " vs " + std::to_string(o.dim_));
    }

    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw AlgebraError("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

} // namespace seqspec
