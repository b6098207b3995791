#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "seqspec/asymptotics.hpp"
#include "seqspec/errors.hpp"
#include "seqspec/sequence.hpp"

namespace seqspec {

/// Input of the subsequence extractor: a finite family of sequences whose
/// tracked singular value statistics should all settle, a horizon, and the
/// oscillation target.
struct ExtractionRequest {
    std::vector<MatrixSequence> sequences;
    std::size_t horizon = 0;
    double epsilon = 0.0;
    std::size_t k_max = 0;      // 0 tracks norms only, >= 1 tracks Sigma_1..Sigma_k_max
    std::size_t min_length = 0; // 0 picks the default max(8, horizon/16)
};

struct OscillationEntry {
    std::size_t sequence = 0; // index into the request family
    std::size_t k = 1;        // tracked statistic Sigma_k
    double oscillation = 0.0; // max pairwise gap along the tail of eta
};

struct ExtractionResult {
    Restriction eta;
    std::vector<std::size_t> indices; // the same map, flat
    std::vector<OscillationEntry> oscillations;
    bool success = false;
};

namespace detail {

// Tail of an index list: its last two thirds.
inline std::size_t tail_begin(std::size_t len) { return len - (2 * len + 2) / 3; }

struct StatTable {
    // values[m][k-1][n-1] = Sigma_k(A^m_n), 0 beyond the matrix dimension
    std::vector<std::vector<std::vector<double>>> values;

    double at(std::size_t m, std::size_t k, std::size_t n) const {
        return values[m][k - 1][n - 1];
    }
};

inline StatTable build_stats(const std::vector<MatrixSequence>& seqs, std::size_t horizon,
                             std::size_t k_track) {
    StatTable t;
    t.values.resize(seqs.size());
    for (std::size_t m = 0; m < seqs.size(); ++m) {
        auto profile = singular_profile(seqs[m], horizon, k_track);
        t.values[m].assign(k_track, std::vector<double>(horizon, 0.0));
        for (std::size_t n = 1; n <= horizon; ++n)
            for (std::size_t k = 1; k <= k_track; ++k)
                if (auto v = profile.top(n, k)) t.values[m][k - 1][n - 1] = *v;
    }
    return t;
}

inline double oscillation_along(const StatTable& stats, std::size_t m, std::size_t k,
                                const std::vector<std::size_t>& indices) {
    if (indices.empty()) return 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = tail_begin(indices.size()); i < indices.size(); ++i) {
        const double v = stats.at(m, k, indices[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

} // namespace detail

/// Diagonal-style subsequence extraction at finite horizon. For each tracked
/// statistic, in family order and k ascending, the surviving indices are
/// binned by value into epsilon/2-wide bins and the most populous bin is kept
/// (ties go to the lowest bin), the finite stand-in for choosing a convergent
/// subsequence. Stops as soon as every statistic oscillates at most epsilon
/// along the tail, or reports failure when the next refinement would fall
/// below min_length.
inline ExtractionResult extract_convergent(const ExtractionRequest& req) {
    if (req.sequences.empty())
        throw ConfigError("extract_convergent: request has no sequences");
    if (req.horizon < 4)
        throw ConfigError("extract_convergent: horizon must be >= 4");
    if (req.epsilon <= 0.0)
        throw ConfigError("extract_convergent: epsilon must be positive");
    const std::size_t min_length =
        req.min_length > 0 ? req.min_length
                           : std::max<std::size_t>(8, req.horizon / 16);
    if (min_length > req.horizon)
        throw ConfigError("extract_convergent: min_length exceeds horizon");

    const std::size_t k_track = std::max<std::size_t>(1, req.k_max);
    const auto stats = detail::build_stats(req.sequences, req.horizon, k_track);

    std::vector<std::size_t> current(req.horizon);
    for (std::size_t n = 1; n <= req.horizon; ++n) current[n - 1] = n;

    auto collect = [&](const std::vector<std::size_t>& idx) {
        std::vector<OscillationEntry> out;
        for (std::size_t m = 0; m < req.sequences.size(); ++m)
            for (std::size_t k = 1; k <= k_track; ++k)
                out.push_back({m, k, detail::oscillation_along(stats, m, k, idx)});
        return out;
    };
    auto all_settled = [&](const std::vector<std::size_t>& idx) {
        for (std::size_t m = 0; m < req.sequences.size(); ++m)
            for (std::size_t k = 1; k <= k_track; ++k)
                if (detail::oscillation_along(stats, m, k, idx) > req.epsilon) return false;
        return true;
    };
    auto finish = [&](std::vector<std::size_t> idx, bool ok) {
        ExtractionResult res;
        res.oscillations = collect(idx);
        res.success = ok;
        res.eta = Restriction::from_indices(idx);
        res.indices = std::move(idx);
        return res;
    };

    if (all_settled(current)) return finish(std::move(current), true);

    const double bin_width = req.epsilon / 2.0;
    for (std::size_t m = 0; m < req.sequences.size(); ++m) {
        for (std::size_t k = 1; k <= k_track; ++k) {
            std::map<long long, std::size_t> census;
            for (std::size_t n : current) {
                const long long bin =
                    static_cast<long long>(std::floor(stats.at(m, k, n) / bin_width));
                ++census[bin];
            }
            long long best_bin = census.begin()->first;
            std::size_t best_count = census.begin()->second;
            for (const auto& [bin, cnt] : census)
                if (cnt > best_count) { best_bin = bin; best_count = cnt; }
            // std::map iterates bins ascending, so the first maximum is the lowest bin.

            if (best_count < min_length) return finish(std::move(current), false);

            std::vector<std::size_t> refined;
            refined.reserve(best_count);
            for (std::size_t n : current) {
                const long long bin =
                    static_cast<long long>(std::floor(stats.at(m, k, n) / bin_width));
                if (bin == best_bin) refined.push_back(n);
            }
            current = std::move(refined);
            if (all_settled(current)) return finish(std::move(current), true);
        }
    }
    return finish(std::move(current), all_settled(current));
}

struct ConvergenceReport {
    bool converged = false;
    std::vector<OscillationEntry> oscillations;
};

/// Independent re-check of an extraction: recomputes every tracked statistic
/// along eta and measures tail oscillations from scratch.
inline ConvergenceReport verify_convergence(const std::vector<MatrixSequence>& seqs,
                                            const Restriction& eta, double epsilon,
                                            std::size_t k_max, std::size_t horizon) {
    if (seqs.empty()) throw ConfigError("verify_convergence: no sequences");
    if (epsilon <= 0.0) throw ConfigError("verify_convergence: epsilon must be positive");

    std::vector<std::size_t> indices;
    for (std::size_t n = 1;; ++n) {
        if (auto len = eta.length(); len && n > *len) break;
        const std::size_t target = eta(n);
        if (target > horizon) break;
        indices.push_back(target);
    }
    const std::size_t k_track = std::max<std::size_t>(1, k_max);

    ConvergenceReport rep;
    rep.converged = true;
    if (indices.empty()) return rep;

    const std::size_t tb = detail::tail_begin(indices.size());
    for (std::size_t m = 0; m < seqs.size(); ++m) {
        for (std::size_t k = 1; k <= k_track; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = tb; i < indices.size(); ++i) {
                const Matrix a = seqs[m].eval(indices[i]);
                double v = 0.0;
                if (k <= a.dim()) {
                    if (seqs[m].selfadjoint_hint())
                        v = singular_values_from_eigs(seqs[m].eigenvalues_at(indices[i]))
                                .largest(k);
                    else
                        v = svd_extreme_values(a, std::min(k, a.dim())).top_desc[k - 1];
                }
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double osc = hi - lo;
            rep.oscillations.push_back({m, k, osc});
            if (osc > epsilon) rep.converged = false;
        }
    }
    return rep;
}

} // namespace seqspec
