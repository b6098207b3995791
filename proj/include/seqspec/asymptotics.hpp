#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "seqspec/errors.hpp"
#include "seqspec/linalg.hpp"
#include "seqspec/sequence.hpp"

namespace seqspec {

/// Per-n slice of the singular value table: the k_max largest values
/// (descending) and the k_max smallest (ascending). When the dimension is
/// small both views cover the whole spectrum.
struct ProfileRow {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> top_desc;
    std::vector<double> bottom_asc;
};

/// Table of Sigma_k(A_n) over a finite horizon; the raw material of the
/// compactness, essential-rank and Fredholm estimators.
struct SingularProfile {
    std::size_t horizon = 0;
    std::size_t k_max = 0;
    std::vector<ProfileRow> rows; // rows[n-1] holds index n

    const ProfileRow& row(std::size_t n) const { return rows.at(n - 1); }

    /// Sigma_k(A_n), 1-based k; nullopt when k exceeds the stored range.
    std::optional<double> top(std::size_t n, std::size_t k) const {
        const auto& r = row(n);
        if (k == 0 || k > r.top_desc.size()) return std::nullopt;
        return r.top_desc[k - 1];
    }

    /// sigma_k(A_n), 1-based k (increasing order).
    std::optional<double> bottom(std::size_t n, std::size_t k) const {
        const auto& r = row(n);
        if (k == 0 || k > r.bottom_asc.size()) return std::nullopt;
        return r.bottom_asc[k - 1];
    }
};

namespace detail {

inline ProfileRow profile_row_from_values(std::size_t n, const SingularValues& sv,
                                          std::size_t k_max) {
    ProfileRow r;
    r.n = n;
    r.dim = sv.dim();
    const std::size_t k = std::min(k_max, sv.dim());
    r.top_desc.assign(sv.desc.begin(), sv.desc.begin() + k);
    r.bottom_asc.assign(sv.desc.rbegin(), sv.desc.rbegin() + k);
    return r;
}

} // namespace detail

/// Builds the Sigma_k table for n = n_min..horizon (rows below n_min stay
/// empty; sequences with perturbation blocks are not evaluable below the
/// block size). Self-adjoint sequences reuse their cached eigenvalues
/// (singular values are the sorted |eigenvalue|s); everything else goes
/// through the SVD kernel.
inline SingularProfile singular_profile(const MatrixSequence& seq, std::size_t horizon,
                                        std::size_t k_max, std::size_t n_min = 1,
                                        std::size_t threads = 1) {
    if (horizon < 4) throw ContractError("singular_profile: horizon must be >= 4");
    if (k_max < 1) throw ContractError("singular_profile: k_max must be >= 1");
    if (n_min < 1 || n_min > horizon)
        throw ContractError("singular_profile: n_min must lie in [1, horizon]");
    SingularProfile p;
    p.horizon = horizon;
    p.k_max = k_max;
    p.rows.assign(horizon, ProfileRow{});
    for (std::size_t n = 1; n < n_min; ++n) p.rows[n - 1] = ProfileRow{n, 0, {}, {}};

    auto compute_row = [&](std::size_t n) {
        try {
            if (seq.selfadjoint_hint()) {
                auto sv = singular_values_from_eigs(seq.eigenvalues_at(n));
                p.rows[n - 1] = detail::profile_row_from_values(n, sv, k_max);
            } else {
                const Matrix m = seq.eval(n);
                if (m.dim() <= 2 * k_max) {
                    p.rows[n - 1] = detail::profile_row_from_values(n, svd_values(m), k_max);
                } else {
                    auto ev = svd_extreme_values(m, k_max);
                    ProfileRow r;
                    r.n = n;
                    r.dim = m.dim();
                    r.top_desc = std::move(ev.top_desc);
                    r.bottom_asc = std::move(ev.bottom_asc);
                    p.rows[n - 1] = std::move(r);
                }
            }
        } catch (const NumericError& e) {
            throw NumericError("profile failed at n=" + std::to_string(n) + ": " + e.what(),
                               e.achieved_residual());
        }
    };

    if (threads <= 1) {
        for (std::size_t n = n_min; n <= horizon; ++n) compute_row(n);
        return p;
    }

    // Rows are independent, so work can spread over threads; each row lands in
    // its own slot and the result matches the serial order exactly.
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(threads, horizon - n_min + 1);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t n = n_min + t; n <= horizon; n += workers) {
                try {
                    compute_row(n);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return p;
}

/// Profile of (A_n - lambda I); for self-adjoint sequences computed from the
/// cached eigenvalues, which equals the SVD route on such inputs.
inline SingularProfile shifted_profile(const MatrixSequence& seq, double lambda,
                                       std::size_t horizon, std::size_t k_max) {
    if (!seq.selfadjoint_hint()) {
        MatrixSequence shifted = add(seq, scale(identity_sequence(seq.dims()), cplx{-lambda, 0.0}));
        return singular_profile(shifted, horizon, k_max);
    }
    if (horizon < 4) throw ContractError("shifted_profile: horizon must be >= 4");
    if (k_max < 1) throw ContractError("shifted_profile: k_max must be >= 1");
    SingularProfile p;
    p.horizon = horizon;
    p.k_max = k_max;
    p.rows.reserve(horizon);
    for (std::size_t n = 1; n <= horizon; ++n) {
        auto sv = singular_values_from_eigs(seq.eigenvalues_at(n), lambda);
        p.rows.push_back(detail::profile_row_from_values(n, sv, k_max));
    }
    return p;
}

namespace detail {

// Window boundaries on 1..h. Q2 = (h/4, h/2], Q3 = (h/2, 3h/4], Q4 = (3h/4, h];
// the "last half" begins at ceil(h/2).
struct Windows {
    std::size_t h, q1_end, q2_end, q3_end, half_start;
    explicit Windows(std::size_t horizon)
        : h(horizon), q1_end(horizon / 4), q2_end(horizon / 2),
          q3_end(3 * horizon / 4), half_start((horizon + 1) / 2) {}
};

// Tail test for a decaying row: everything already below tol, or the last
// quarter sits below tol and at half the second-quarter level.
template <typename RowFn> // RowFn: n -> optional<double>
bool row_zero_test(RowFn value_at, std::size_t horizon, double tol) {
    const Windows w(horizon);
    double max_all = 0.0, max_q2 = 0.0, max_q4 = 0.0;
    bool any = false, any_q2 = false, any_q4 = false;
    for (std::size_t n = 1; n <= horizon; ++n) {
        auto v = value_at(n);
        if (!v) continue;
        any = true;
        max_all = std::max(max_all, *v);
        if (n > w.q1_end && n <= w.q2_end) { any_q2 = true; max_q2 = std::max(max_q2, *v); }
        if (n > w.q3_end) { any_q4 = true; max_q4 = std::max(max_q4, *v); }
    }
    if (!any) return true; // vacuous
    if (max_all < tol) return true;
    if (!any_q4 || !any_q2) return false;
    return max_q4 < tol && max_q4 <= 0.5 * max_q2;
}

} // namespace detail

/// Membership test for the ideal of zero sequences, applied to the Sigma_1 row.
inline bool zero_sequence_test(const SingularProfile& p, double tol) {
    if (p.rows.empty()) throw ContractError("zero_sequence_test: empty profile");
    return detail::row_zero_test([&](std::size_t n) { return p.top(n, 1); }, p.horizon, tol);
}

struct CompactnessVerdict {
    enum class Kind { Compact, NotCompact, Undecided };
    Kind kind = Kind::Undecided;
    std::size_t ess_rank = 0;  // Compact
    std::size_t witness_k = 0; // NotCompact
    double floor = 0.0;        // NotCompact
    std::vector<double> tail_sup; // s_k evidence, k = 1..k_max (NaN where undefined)
};

inline const char* to_string(CompactnessVerdict::Kind k) {
    switch (k) {
        case CompactnessVerdict::Kind::Compact: return "Compact";
        case CompactnessVerdict::Kind::NotCompact: return "NotCompact";
        default: return "Undecided";
    }
}

/// Compactness estimator: s_k = sup of Sigma_k(A_n) over the late window
/// n >= max(k, h/2). A compact sequence shows s_k falling below tol past its
/// essential rank; stabilization above tol witnesses non-compactness.
inline CompactnessVerdict compactness_test(const SingularProfile& p, double tol) {
    if (p.k_max < 2) throw ContractError("compactness_test: k_max must be >= 2");
    const detail::Windows w(p.horizon);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CompactnessVerdict v;
    v.tail_sup.assign(p.k_max, nan);
    for (std::size_t k = 1; k <= p.k_max; ++k) {
        const std::size_t start = std::max(k, w.half_start);
        double s = nan;
        for (std::size_t n = start; n <= p.horizon; ++n) {
            auto val = p.top(n, k);
            if (!val) continue;
            s = std::isnan(s) ? *val : std::max(s, *val);
        }
        v.tail_sup[k - 1] = s;
    }

    bool nonincreasing = true;
    for (std::size_t k = 1; k < p.k_max; ++k) {
        const double a = v.tail_sup[k - 1], b = v.tail_sup[k];
        if (!std::isnan(a) && !std::isnan(b) && b > a + 1e-12) nonincreasing = false;
    }

    if (nonincreasing) {
        for (std::size_t r = 0; r + 1 <= p.k_max; ++r) {
            const double s_next = v.tail_sup[r];
            if (!std::isnan(s_next) && s_next < tol) {
                v.kind = CompactnessVerdict::Kind::Compact;
                v.ess_rank = r;
                return v;
            }
        }
    }

    if (p.k_max >= 3) {
        const double a = v.tail_sup[p.k_max - 3], b = v.tail_sup[p.k_max - 2],
                     c = v.tail_sup[p.k_max - 1];
        if (!std::isnan(a) && !std::isnan(b) && !std::isnan(c)) {
            const double lo = std::min({a, b, c}), hi = std::max({a, b, c});
            if (lo > tol && hi <= 1.1 * lo) {
                v.kind = CompactnessVerdict::Kind::NotCompact;
                v.witness_k = p.k_max;
                v.floor = lo;
                return v;
            }
        }
    }
    v.kind = CompactnessVerdict::Kind::Undecided;
    return v;
}

/// Smallest r whose Sigma_{r+1} row already behaves like a zero sequence;
/// nullopt means no such r <= k_max - 1 (essential rank looks infinite at this
/// horizon).
inline std::optional<std::size_t> essential_rank(const SingularProfile& p, double tol) {
    if (p.k_max < 2) throw ContractError("essential_rank: k_max must be >= 2");
    for (std::size_t r = 0; r + 1 <= p.k_max; ++r) {
        const bool zero_row = detail::row_zero_test(
            [&](std::size_t n) { return p.top(n, r + 1); }, p.horizon, tol);
        if (zero_row) return r;
    }
    return std::nullopt;
}

struct FredholmVerdict {
    enum class Kind { Fredholm, NotNormallySolvable, Undecided };
    Kind kind = Kind::Undecided;
    std::size_t k = 0;   // Fredholm: number of decaying singular values
    double floor = 0.0;  // Fredholm: estimated liminf of sigma_{k+1}
    std::vector<double> tail_min;    // per k: min sigma_k over the last half
    std::vector<double> tail_q4_max; // per k: max sigma_k over the last quarter
    std::vector<double> trend;       // per k: minQ4 / minQ3 of sigma_k
};

inline const char* to_string(FredholmVerdict::Kind k) {
    switch (k) {
        case FredholmVerdict::Kind::Fredholm: return "Fredholm";
        case FredholmVerdict::Kind::NotNormallySolvable: return "NotNormallySolvable";
        default: return "Undecided";
    }
}

/// Fredholm estimator on the increasing-order singular values. All rows
/// decaying to zero means not normally solvable; otherwise the smallest k
/// whose sigma_{k+1} floor clears tau without a downward trend wins. The
/// trend guard keeps slowly vanishing rows (like C/n) from faking a floor.
inline FredholmVerdict fredholm_test(const SingularProfile& p, double tau,
                                     double zero_tol = 0.05) {
    if (tau <= 0.0) throw ContractError("fredholm_test: tau must be positive");
    const detail::Windows w(p.horizon);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    FredholmVerdict v;
    v.tail_min.assign(p.k_max, nan);
    v.tail_q4_max.assign(p.k_max, nan);
    v.trend.assign(p.k_max, nan);

    std::vector<bool> zero_row(p.k_max + 1, false);
    for (std::size_t k = 1; k <= p.k_max; ++k) {
        zero_row[k] = detail::row_zero_test(
            [&](std::size_t n) { return p.bottom(n, k); }, p.horizon, zero_tol);

        double mn = nan, q3 = nan, q4 = nan, q4mx = nan;
        for (std::size_t n = w.half_start; n <= p.horizon; ++n) {
            auto val = p.bottom(n, k);
            if (!val) continue;
            mn = std::isnan(mn) ? *val : std::min(mn, *val);
            if (n > w.q2_end && n <= w.q3_end) q3 = std::isnan(q3) ? *val : std::min(q3, *val);
            if (n > w.q3_end) {
                q4 = std::isnan(q4) ? *val : std::min(q4, *val);
                q4mx = std::isnan(q4mx) ? *val : std::max(q4mx, *val);
            }
        }
        v.tail_min[k - 1] = mn;
        v.tail_q4_max[k - 1] = q4mx;
        if (!std::isnan(q3) && !std::isnan(q4))
            v.trend[k - 1] = (q3 == 0.0) ? (q4 == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                         : q4 / q3;
    }

    bool all_zero = true;
    for (std::size_t k = 1; k <= p.k_max; ++k) all_zero = all_zero && zero_row[k];
    if (all_zero) {
        v.kind = FredholmVerdict::Kind::NotNormallySolvable;
        return v;
    }

    for (std::size_t k = 0; k + 1 <= p.k_max; ++k) {
        const double floor = v.tail_min[k];
        if (std::isnan(floor) || floor <= tau) continue;
        const double trend = v.trend[k];
        if (!std::isnan(trend) && trend < 0.9) continue;
        if (k > 0 && !zero_row[k]) continue;
        v.kind = FredholmVerdict::Kind::Fredholm;
        v.k = k;
        v.floor = floor;
        return v;
    }
    v.kind = FredholmVerdict::Kind::Undecided;
    return v;
}

} // namespace seqspec
