#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seqspec/errors.hpp"
#include "seqspec/linalg.hpp"
#include "seqspec/matrix.hpp"

namespace seqspec {

/// Maps a sequence index n >= 1 to the matrix dimension delta(n) >= 1.
class DimensionFunction {
public:
    enum class Kind { linear, explicit_list, custom };

    /// Defaults to the Toeplitz filtration delta(n) = n.
    DimensionFunction() = default;

    static DimensionFunction identity() { return linear(1, 0); }

    static DimensionFunction linear(std::size_t slope, std::size_t offset) {
        DimensionFunction d;
        d.kind_ = Kind::linear;
        d.slope_ = slope;
        d.offset_ = offset;
        d.filtration_ = slope >= 1;
        return d;
    }

    static DimensionFunction constant(std::size_t dim) { return linear(0, dim); }

    static DimensionFunction explicit_list(std::vector<std::size_t> dims) {
        DimensionFunction d;
        d.kind_ = Kind::explicit_list;
        d.list_ = std::move(dims);
        d.filtration_ = false;
        return d;
    }

    static DimensionFunction custom(std::function<std::size_t(std::size_t)> rule,
                                    bool filtration = false) {
        DimensionFunction d;
        d.kind_ = Kind::custom;
        d.rule_ = std::move(rule);
        d.filtration_ = filtration;
        return d;
    }

    std::size_t operator()(std::size_t n) const {
        if (n == 0) throw ContractError("dimension function: index must be >= 1");
        std::size_t dim = 0;
        switch (kind_) {
            case Kind::linear: dim = slope_ * n + offset_; break;
            case Kind::explicit_list:
                if (n > list_.size())
                    throw ConfigError("dimension list has no entry for n=" + std::to_string(n));
                dim = list_[n - 1];
                break;
            case Kind::custom: dim = rule_(n); break;
        }
        if (dim == 0)
            throw ConfigError("dimension rule returned 0 at n=" + std::to_string(n));
        return dim;
    }

    Kind kind() const noexcept { return kind_; }
    bool filtration_flag() const noexcept { return filtration_; }

    /// Checks strict growth over 1..horizon; required for filtration dimension
    /// functions.
    bool strictly_increasing_up_to(std::size_t horizon) const {
        for (std::size_t n = 1; n + 1 <= horizon; ++n)
            if ((*this)(n + 1) <= (*this)(n)) return false;
        return true;
    }

private:
    Kind kind_ = Kind::linear;
    std::size_t slope_ = 1, offset_ = 0;
    std::vector<std::size_t> list_;
    std::function<std::size_t(std::size_t)> rule_;
    bool filtration_ = true;
};

/// Strictly increasing index map n -> eta(n): an explicit prefix, optionally
/// continued by an arithmetic rule.
class Restriction {
public:
    /// Defaults to the identity map eta(n) = n.
    Restriction() : tail_(Tail{1, 1}) {}

    static Restriction identity() { return arithmetic(1, 1); }

    /// eta(n) = start + (n-1)*stride.
    static Restriction arithmetic(std::size_t start, std::size_t stride) {
        if (start == 0 || stride == 0)
            throw ConfigError("restriction: start and stride must be positive");
        Restriction r;
        r.tail_ = Tail{start, stride};
        return r;
    }

    static Restriction from_indices(std::vector<std::size_t> indices) {
        Restriction r;
        r.tail_.reset();
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] == 0 || (i > 0 && indices[i] <= indices[i - 1]))
                throw ConfigError("restriction indices must be strictly increasing positives");
        }
        r.prefix_ = std::move(indices);
        return r;
    }

    std::size_t operator()(std::size_t n) const {
        if (n == 0) throw ContractError("restriction: index must be >= 1");
        if (n <= prefix_.size()) return prefix_[n - 1];
        if (!tail_)
            throw ConfigError("restriction has no entry for n=" + std::to_string(n));
        return tail_->start + (n - prefix_.size() - 1) * tail_->stride;
    }

    /// Number of represented indices; nullopt when the map continues forever.
    std::optional<std::size_t> length() const {
        if (tail_) return std::nullopt;
        return prefix_.size();
    }

    const std::vector<std::size_t>& prefix() const noexcept { return prefix_; }

    /// Indices as a flat list up to count entries.
    std::vector<std::size_t> materialize(std::size_t count) const {
        std::vector<std::size_t> out;
        out.reserve(count);
        for (std::size_t n = 1; n <= count; ++n) out.push_back((*this)(n));
        return out;
    }

private:
    struct Tail {
        std::size_t start, stride;
    };
    std::vector<std::size_t> prefix_;
    std::optional<Tail> tail_;
};

/// Lazily evaluated sequence of square complex matrices A_n with dimension
/// function delta. Evaluation memoizes into a bounded cache shared by all
/// copies; correctness never depends on the cache. Generators must be pure,
/// so concurrent evaluation of different n is safe and reproducible.
class MatrixSequence {
public:
    using Generator = std::function<Matrix(std::size_t)>;

    MatrixSequence() = default;

    MatrixSequence(DimensionFunction dims, Generator gen, bool selfadjoint_hint,
                   std::string label)
        : impl_(std::make_shared<Impl>()) {
        impl_->dims = std::move(dims);
        impl_->gen = std::move(gen);
        impl_->hint = selfadjoint_hint;
        impl_->label = std::move(label);
        impl_->id = next_id();
    }

    bool valid() const noexcept { return impl_ != nullptr; }
    const DimensionFunction& dims() const { return impl_->dims; }
    bool selfadjoint_hint() const { return impl_->hint; }
    const std::string& label() const { return impl_->label; }
    std::uint64_t id() const { return impl_->id; }

    std::size_t dim_at(std::size_t n) const { return impl_->dims(n); }

    /// A_n, validated against the dimension rule and (when hinted) the
    /// self-adjointness contract.
    Matrix eval(std::size_t n) const {
        if (n == 0) throw ContractError("eval: index must be >= 1");
        if (auto hit = impl_->cache_lookup(n)) return **hit;
        const std::size_t expected = impl_->dims(n);
        Matrix m = impl_->gen(n);
        if (m.dim() != expected)
            throw ContractError("generator dimension " + std::to_string(m.dim()) +
                                " does not match rule " + std::to_string(expected) +
                                " at n=" + std::to_string(n));
        if (!m.all_finite())
            throw ContractError("generator produced non-finite entries at n=" +
                                std::to_string(n));
        if (impl_->hint) {
            const double defect = m.hermiticity_defect();
            if (defect > 1e-12 * (1.0 + m.frobenius_norm()))
                throw ContractError("sequence '" + impl_->label +
                                    "' violates its self-adjointness hint at n=" +
                                    std::to_string(n));
        }
        auto stored = std::make_shared<const Matrix>(std::move(m));
        impl_->cache_store(n, stored);
        return *stored;
    }

    /// Ascending eigenvalues of A_n for self-adjoint sequences, memoized.
    std::vector<double> eigenvalues_at(std::size_t n) const {
        if (!impl_->hint)
            throw ContractError("eigenvalues_at requires a self-adjoint sequence");
        {
            std::lock_guard<std::mutex> lock(impl_->mu);
            auto it = impl_->eig_cache.find(n);
            if (it != impl_->eig_cache.end()) return *it->second;
        }
        auto eigs = std::make_shared<const std::vector<double>>(
            hermitian_eigenvalues(eval(n)));
        {
            std::lock_guard<std::mutex> lock(impl_->mu);
            if (impl_->eig_cache.size() >= kEigCacheEntries) impl_->eig_cache.clear();
            impl_->eig_cache.emplace(n, eigs);
        }
        return *eigs;
    }

private:
    static constexpr std::size_t kCacheEntries = 256;
    static constexpr std::size_t kCacheBytes = 64u << 20;
    static constexpr std::size_t kEigCacheEntries = 4096;

    struct Impl {
        DimensionFunction dims;
        Generator gen;
        bool hint = false;
        std::string label;
        std::uint64_t id = 0;

        mutable std::mutex mu;
        mutable std::unordered_map<std::size_t, std::shared_ptr<const Matrix>> cache;
        mutable std::list<std::size_t> order; // front = oldest
        mutable std::size_t bytes = 0;
        mutable std::unordered_map<std::size_t, std::shared_ptr<const std::vector<double>>>
            eig_cache;

        std::optional<std::shared_ptr<const Matrix>> cache_lookup(std::size_t n) const {
            std::lock_guard<std::mutex> lock(mu);
            auto it = cache.find(n);
            if (it == cache.end()) return std::nullopt;
            return it->second;
        }

        void cache_store(std::size_t n, std::shared_ptr<const Matrix> m) const {
            const std::size_t sz = m->dim() * m->dim() * sizeof(cplx);
            std::lock_guard<std::mutex> lock(mu);
            if (cache.count(n)) return;
            while (!order.empty() &&
                   (cache.size() >= kCacheEntries || bytes + sz > kCacheBytes)) {
                auto victim = order.front();
                order.pop_front();
                auto it = cache.find(victim);
                if (it != cache.end()) {
                    bytes -= it->second->dim() * it->second->dim() * sizeof(cplx);
                    cache.erase(it);
                }
            }
            if (sz <= kCacheBytes) {
                cache.emplace(n, std::move(m));
                order.push_back(n);
                bytes += sz;
            }
        }
    };

    static std::uint64_t next_id() {
        static std::atomic<std::uint64_t> counter{0};
        return ++counter;
    }

    std::shared_ptr<Impl> impl_;
};

inline MatrixSequence identity_sequence(DimensionFunction dims = DimensionFunction::identity()) {
    return MatrixSequence(dims, [dims](std::size_t n) { return Matrix::identity(dims(n)); },
                          true, "identity");
}

inline MatrixSequence zero_sequence(DimensionFunction dims = DimensionFunction::identity()) {
    return MatrixSequence(dims, [dims](std::size_t n) { return Matrix::zero(dims(n)); },
                          true, "zero");
}

inline MatrixSequence add(const MatrixSequence& a, const MatrixSequence& b) {
    return MatrixSequence(
        a.dims(),
        [a, b](std::size_t n) {
            if (a.dim_at(n) != b.dim_at(n))
                throw AlgebraError("add: dimension mismatch at n=" + std::to_string(n));
            return a.eval(n) + b.eval(n);
        },
        a.selfadjoint_hint() && b.selfadjoint_hint(),
        "add(" + a.label() + "," + b.label() + ")");
}

inline MatrixSequence mul(const MatrixSequence& a, const MatrixSequence& b) {
    return MatrixSequence(
        a.dims(),
        [a, b](std::size_t n) {
            if (a.dim_at(n) != b.dim_at(n))
                throw AlgebraError("mul: dimension mismatch at n=" + std::to_string(n));
            return a.eval(n) * b.eval(n);
        },
        false, "mul(" + a.label() + "," + b.label() + ")");
}

inline MatrixSequence adjoint(const MatrixSequence& a) {
    return MatrixSequence(
        a.dims(), [a](std::size_t n) { return a.eval(n).adjoint(); },
        a.selfadjoint_hint(), "adjoint(" + a.label() + ")");
}

inline MatrixSequence scale(const MatrixSequence& a, cplx c) {
    return MatrixSequence(
        a.dims(), [a, c](std::size_t n) { return a.eval(n) * c; },
        a.selfadjoint_hint() && c.imag() == 0.0, "scale(" + a.label() + ")");
}

/// Subsequence (A_eta(n)).
inline MatrixSequence restrict_to(const MatrixSequence& a, const Restriction& eta) {
    return MatrixSequence(
        DimensionFunction::custom([a, eta](std::size_t n) { return a.dim_at(eta(n)); }),
        [a, eta](std::size_t n) { return a.eval(eta(n)); },
        a.selfadjoint_hint(), "restrict(" + a.label() + ")");
}

/// Odd indices from a, even indices from b.
inline MatrixSequence alternate(const MatrixSequence& a, const MatrixSequence& b) {
    return MatrixSequence(
        a.dims(),
        [a, b](std::size_t n) {
            if (a.dim_at(n) != b.dim_at(n))
                throw AlgebraError("alternate: dimension mismatch at n=" + std::to_string(n));
            return (n % 2 == 1) ? a.eval(n) : b.eval(n);
        },
        a.selfadjoint_hint() && b.selfadjoint_hint(),
        "alternate(" + a.label() + "," + b.label() + ")");
}

/// Blockwise direct sum, delta(n) = delta_a(n) + delta_b(n).
inline MatrixSequence direct_sum(const MatrixSequence& a, const MatrixSequence& b) {
    return MatrixSequence(
        DimensionFunction::custom([a, b](std::size_t n) { return a.dim_at(n) + b.dim_at(n); }),
        [a, b](std::size_t n) {
            const Matrix ma = a.eval(n), mb = b.eval(n);
            Matrix m(ma.dim() + mb.dim());
            for (std::size_t i = 0; i < ma.dim(); ++i)
                for (std::size_t j = 0; j < ma.dim(); ++j) m(i, j) = ma(i, j);
            for (std::size_t i = 0; i < mb.dim(); ++i)
                for (std::size_t j = 0; j < mb.dim(); ++j)
                    m(ma.dim() + i, ma.dim() + j) = mb(i, j);
            return m;
        },
        a.selfadjoint_hint() && b.selfadjoint_hint(),
        "direct_sum(" + a.label() + "," + b.label() + ")");
}

/// Finite-horizon estimate of sup_n ||A_n|| (spectral norms).
inline double sup_norm(const MatrixSequence& seq, std::size_t horizon) {
    if (horizon == 0) throw ContractError("sup_norm: horizon must be >= 1");
    double best = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        double nrm;
        if (seq.selfadjoint_hint()) {
            const auto& e = seq.eigenvalues_at(n);
            nrm = std::max(std::abs(e.front()), std::abs(e.back()));
        } else {
            nrm = svd_extreme_values(seq.eval(n), 1).top_desc.front();
        }
        best = std::max(best, nrm);
    }
    return best;
}

} // namespace seqspec
