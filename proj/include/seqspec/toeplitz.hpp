#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "seqspec/errors.hpp"
#include "seqspec/linalg.hpp"
#include "seqspec/matrix.hpp"
#include "seqspec/sequence.hpp"

namespace seqspec {

/// Trigonometric polynomial on the unit circle, stored by Fourier
/// coefficients a_k for k in [-m, m]. Sampled input is converted by discrete
/// Fourier sums; frequencies above half the sample count alias and are
/// truncated, which is the documented limitation of sampled symbols.
class Symbol {
public:
    enum class Source { explicit_coeffs, sampled };

    Symbol() = default;

    static Symbol from_coeffs(std::map<long, cplx> coeffs) {
        Symbol s;
        for (auto& [k, v] : coeffs)
            if (v != cplx{0.0, 0.0}) s.coeffs_[k] = v;
        s.source_ = Source::explicit_coeffs;
        return s;
    }

    /// Coefficients by discrete Fourier sum over the given samples of a on the
    /// uniform grid theta_j = 2 pi j / N.
    static Symbol from_samples(const std::vector<cplx>& samples) {
        const std::size_t N = samples.size();
        if (N == 0) throw ConfigError("symbol samples are empty");
        Symbol s;
        s.source_ = Source::sampled;
        s.grid_size_ = N;
        const double twopi = 2.0 * std::numbers::pi;
        double maxmag = 0.0;
        std::map<long, cplx> raw;
        const long kmax = static_cast<long>(N) / 2;
        for (long k = -kmax; k <= kmax; ++k) {
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < N; ++j) {
                const double ang = -twopi * double(j) * double(k) / double(N);
                acc += samples[j] * cplx{std::cos(ang), std::sin(ang)};
            }
            acc /= double(N);
            raw[k] = acc;
            maxmag = std::max(maxmag, std::abs(acc));
        }
        for (auto& [k, v] : raw)
            if (std::abs(v) > 1e-12 * std::max(maxmag, 1.0)) s.coeffs_[k] = v;
        return s;
    }

    cplx coeff(long k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? cplx{0.0, 0.0} : it->second;
    }

    const std::map<long, cplx>& coeffs() const noexcept { return coeffs_; }
    Source source() const noexcept { return source_; }
    std::size_t grid_size() const noexcept { return grid_size_; }

    long band() const {
        long m = 0;
        for (const auto& [k, v] : coeffs_) m = std::max(m, std::labs(k));
        return m;
    }

    cplx evaluate(double theta) const {
        cplx acc{0.0, 0.0};
        for (const auto& [k, v] : coeffs_)
            acc += v * cplx{std::cos(k * theta), std::sin(k * theta)};
        return acc;
    }

    /// The flipped symbol with coefficients a~_k = a_{-k}.
    Symbol flipped() const {
        Symbol s;
        s.source_ = source_;
        s.grid_size_ = grid_size_;
        for (const auto& [k, v] : coeffs_) s.coeffs_[-k] = v;
        return s;
    }

    /// Real-valued on the circle, i.e. a_{-k} = conj(a_k) for all k.
    bool real_valued(double tol = 1e-12) const {
        double scale = 1.0;
        for (const auto& [k, v] : coeffs_) scale = std::max(scale, std::abs(v));
        for (const auto& [k, v] : coeffs_)
            if (std::abs(v - std::conj(coeff(-k))) > tol * scale) return false;
        return true;
    }

    double max_abs_on_grid(std::size_t grid = 1024) const {
        double best = 0.0;
        for (std::size_t j = 0; j < grid; ++j)
            best = std::max(best, std::abs(evaluate(2.0 * std::numbers::pi * j / grid)));
        return best;
    }

    double min_abs_on_grid(std::size_t grid = 1024) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid; ++j)
            best = std::min(best, std::abs(evaluate(2.0 * std::numbers::pi * j / grid)));
        return best;
    }

private:
    std::map<long, cplx> coeffs_;
    Source source_ = Source::explicit_coeffs;
    std::size_t grid_size_ = 0;
};

/// n x n finite section of T(a): entry (i, j) = a_{i-j}.
inline Matrix toeplitz_section(const Symbol& sym, std::size_t n) {
    if (n == 0) throw ContractError("toeplitz_section: n must be >= 1");
    Matrix m(n);
    for (const auto& [k, v] : sym.coeffs()) {
        if (std::labs(k) >= static_cast<long>(n)) continue;
        // a_k sits on the k-th subdiagonal (i - j = k).
        if (k >= 0)
            for (std::size_t j = 0; j + k < n; ++j) m(j + k, j) = v;
        else
            for (std::size_t i = 0; i + std::size_t(-k) < n; ++i) m(i, i + std::size_t(-k)) = v;
    }
    return m;
}

/// R_n M R_n: entry (i, j) -> entry (n-1-i, n-1-j).
inline Matrix reflect(const Matrix& m) {
    const std::size_t n = m.dim();
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = m(n - 1 - i, n - 1 - j);
    return out;
}

namespace detail {

inline Matrix pad_top_left(const Matrix& block, std::size_t n) {
    Matrix out(n);
    for (std::size_t i = 0; i < block.dim(); ++i)
        for (std::size_t j = 0; j < block.dim(); ++j) out(i, j) = block(i, j);
    return out;
}

} // namespace detail

/// The structured sequences P_n T(a) P_n + P_n K P_n + R_n L R_n + G_n on the
/// Toeplitz filtration delta(n) = n. K and L are kept as explicit finite
/// blocks with declared ranks so tests have exact ground truth.
struct StructuredToeplitzSequence {
    Symbol symbol;
    Matrix k_block;           // finite matrix, padded by zeros
    std::size_t k_rank = 0;   // declared rank of k_block
    Matrix l_block;
    std::size_t l_rank = 0;
    MatrixSequence noise;     // optional; must tend to zero in norm
    std::string label = "toeplitz";
};

inline bool structured_selfadjoint(const StructuredToeplitzSequence& s) {
    auto block_hermitian = [](const Matrix& b) {
        return b.dim() == 0 ||
               b.hermiticity_defect() <= 1e-12 * (1.0 + b.frobenius_norm());
    };
    const bool noise_ok = !s.noise.valid() || s.noise.selfadjoint_hint();
    return s.symbol.real_valued() && block_hermitian(s.k_block) &&
           block_hermitian(s.l_block) && noise_ok;
}

/// Evaluable four-term sequence. Evaluation below the perturbation size fails.
inline MatrixSequence assemble(const StructuredToeplitzSequence& s) {
    const bool hint = structured_selfadjoint(s);
    return MatrixSequence(
        DimensionFunction::identity(),
        [s](std::size_t n) {
            if (n < s.k_block.dim() || n < s.l_block.dim())
                throw AlgebraError("perturbation block larger than section size n=" +
                                   std::to_string(n));
            Matrix m = toeplitz_section(s.symbol, n);
            for (std::size_t i = 0; i < s.k_block.dim(); ++i)
                for (std::size_t j = 0; j < s.k_block.dim(); ++j)
                    m(i, j) += s.k_block(i, j);
            for (std::size_t i = 0; i < s.l_block.dim(); ++i)
                for (std::size_t j = 0; j < s.l_block.dim(); ++j)
                    m(n - 1 - i, n - 1 - j) += s.l_block(i, j);
            if (s.noise.valid()) m += s.noise.eval(n);
            return m;
        },
        hint, s.label);
}

/// N x N section of the strong limit W(A) = T(a) + K.
inline Matrix limit_W(const StructuredToeplitzSequence& s, std::size_t N) {
    if (N < s.k_block.dim() || N < s.l_block.dim())
        throw ContractError("limit_W: N must cover the perturbation blocks");
    Matrix m = toeplitz_section(s.symbol, N);
    for (std::size_t i = 0; i < s.k_block.dim(); ++i)
        for (std::size_t j = 0; j < s.k_block.dim(); ++j) m(i, j) += s.k_block(i, j);
    return m;
}

/// N x N section of the reflected strong limit W~(A) = T(a~) + L, a~_k = a_{-k}.
inline Matrix limit_Wtilde(const StructuredToeplitzSequence& s, std::size_t N) {
    if (N < s.k_block.dim() || N < s.l_block.dim())
        throw ContractError("limit_Wtilde: N must cover the perturbation blocks");
    Matrix m = toeplitz_section(s.symbol.flipped(), N);
    for (std::size_t i = 0; i < s.l_block.dim(); ++i)
        for (std::size_t j = 0; j < s.l_block.dim(); ++j) m(i, j) += s.l_block(i, j);
    return m;
}

/// Winding number of the symbol around the origin; requires the symbol to stay
/// away from zero, which is the invertibility oracle for T(a).
inline int winding_number(const Symbol& sym, std::size_t grid = 4096) {
    if (grid < 8) throw ContractError("winding_number: grid too small");
    const double twopi = 2.0 * std::numbers::pi;
    if (sym.min_abs_on_grid(grid) <= 1e-8)
        throw ContractError("symbol vanishes on the unit circle; T(a) is not Fredholm");
    double total = 0.0;
    cplx prev = sym.evaluate(0.0);
    for (std::size_t j = 1; j <= grid; ++j) {
        const cplx cur = sym.evaluate(twopi * double(j % grid) / double(grid));
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / twopi));
}

enum class StabilityVerdict { Stable, Unstable, Undecided };

inline const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "Stable";
        case StabilityVerdict::Unstable: return "Unstable";
        default: return "Undecided";
    }
}

struct StabilityReport {
    StabilityVerdict verdict = StabilityVerdict::Undecided;
    double sigma_min_window = 0.0; // min sigma_1(A_n) over [horizon/2, horizon]
    bool trend_ok = false;
    double sigma_W_half = 0.0, sigma_W_full = 0.0;
    double sigma_Wtilde_half = 0.0, sigma_Wtilde_full = 0.0;
    bool window_stable = false;
    bool limits_stable = false;
    double tol = 0.0;
    std::size_t horizon = 0;
};

namespace detail {

inline double smallest_singular(const Matrix& m) {
    return svd_extreme_values(m, 1).bottom_asc.front();
}

} // namespace detail

/// Stability estimate: the window statistic on sigma_1(A_n) cross-checked
/// against truncations of the two limit operators. Disagreement yields
/// Undecided with both pieces of evidence in the report.
inline StabilityReport stability_check(const StructuredToeplitzSequence& s,
                                       std::size_t horizon, double tol = 1e-4) {
    if (horizon < 16) throw ContractError("stability_check: horizon must be >= 16");
    if (tol <= 0.0) throw ContractError("stability_check: tol must be positive");

    MatrixSequence seq = assemble(s);
    StabilityReport rep;
    rep.tol = tol;
    rep.horizon = horizon;

    const std::size_t half = horizon / 2;
    const std::size_t q3 = (3 * horizon) / 4;
    double min_all = std::numeric_limits<double>::infinity();
    double min_q3 = min_all, min_q4 = min_all;
    for (std::size_t n = half; n <= horizon; ++n) {
        const double s1 = detail::smallest_singular(seq.eval(n));
        min_all = std::min(min_all, s1);
        if (n > half && n <= q3) min_q3 = std::min(min_q3, s1);
        if (n > q3) min_q4 = std::min(min_q4, s1);
    }
    rep.sigma_min_window = min_all;
    rep.trend_ok = min_q4 >= 0.9 * min_q3;
    rep.window_stable = min_all > tol && rep.trend_ok;

    rep.sigma_W_half = detail::smallest_singular(limit_W(s, half));
    rep.sigma_W_full = detail::smallest_singular(limit_W(s, horizon));
    rep.sigma_Wtilde_half = detail::smallest_singular(limit_Wtilde(s, half));
    rep.sigma_Wtilde_full = detail::smallest_singular(limit_Wtilde(s, horizon));
    rep.limits_stable = rep.sigma_W_half > tol && rep.sigma_W_full > tol &&
                        rep.sigma_Wtilde_half > tol && rep.sigma_Wtilde_full > tol;

    if (rep.window_stable == rep.limits_stable)
        rep.verdict = rep.window_stable ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
    else
        rep.verdict = StabilityVerdict::Undecided;
    return rep;
}

/// Checks the declared noise term against a fitted power-law decay envelope:
/// the late norms must stay within twice the fit.
inline bool noise_decay_ok(const StructuredToeplitzSequence& s, std::size_t horizon) {
    if (!s.noise.valid()) return true;
    std::vector<std::pair<std::size_t, double>> norms;
    for (std::size_t n = std::max<std::size_t>(1, horizon / 4); n <= horizon; ++n)
        norms.emplace_back(n, svd_extreme_values(s.noise.eval(n), 1).top_desc.front());

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (auto [n, g] : norms) {
        if (g <= 0.0) continue;
        const double x = std::log(double(n)), y = std::log(g);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) return true; // nothing to fit; zero noise passes
    const double denom = double(cnt) * sxx - sx * sx;
    if (denom == 0.0) return true;
    const double slope = (double(cnt) * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / double(cnt);
    if (slope > -0.1) return false; // no actual decay in the fit
    for (auto [n, g] : norms) {
        if (n < horizon / 2) continue;
        const double envelope = std::exp(intercept + slope * std::log(double(n)));
        if (g > 2.0 * envelope + 1e-12) return false;
    }
    return true;
}

} // namespace seqspec
