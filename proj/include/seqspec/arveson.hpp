#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "seqspec/asymptotics.hpp"
#include "seqspec/errors.hpp"
#include "seqspec/sequence.hpp"

namespace seqspec {

/// Thresholds for the point classifier. The paper-side notions are limits;
/// these finite-horizon stand-ins prefer Undecided over a forced verdict.
struct ClassifyRules {
    std::size_t c_min = 4;  // essential needs at least this many late eigenvalues
    std::size_t c_max = 32; // transient plateaus above this are not trusted
    double growth = 1.5;    // late-window average must outgrow the mid window
};

inline std::vector<double> default_eps_ladder() { return {0.4, 0.2, 0.1, 0.05}; }

/// N(A_n, (lambda - eps, lambda + eps)) for n = 1..horizon, multiplicities
/// counted. The interval is open; eigenvalues within 1e-9 of an endpoint are
/// excluded, which pins the boundary behaviour of floating point counts.
inline std::vector<std::size_t> eig_counts(const MatrixSequence& seq, double lambda,
                                           double eps, std::size_t horizon) {
    if (!seq.selfadjoint_hint())
        throw ContractError("eig_counts requires a self-adjoint sequence");
    if (eps <= 0.0) throw ContractError("eig_counts: eps must be positive");
    constexpr double kEdge = 1e-9;
    std::vector<std::size_t> counts(horizon, 0);
    const double lo = lambda - eps, hi = lambda + eps;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const auto& eigs = seq.eigenvalues_at(n);
        std::size_t c = 0;
        for (double e : eigs)
            if (e > lo && e < hi && std::abs(e - lo) > kEdge && std::abs(e - hi) > kEdge) ++c;
        counts[n - 1] = c;
    }
    return counts;
}

/// Count evidence across the epsilon ladder.
struct CountTable {
    double lambda = 0.0;
    std::vector<double> half_widths;                // descending ladder
    std::vector<std::vector<std::size_t>> counts;   // counts[e][n-1]
};

enum class PointVerdict { Essential, Transient, Undecided };

inline const char* to_string(PointVerdict v) {
    switch (v) {
        case PointVerdict::Essential: return "Essential";
        case PointVerdict::Transient: return "Transient";
        default: return "Undecided";
    }
}

struct SpectralClassification {
    double lambda = 0.0;
    PointVerdict verdict = PointVerdict::Undecided;
    double eps = 0.0;          // interval witnessing the verdict
    std::size_t bound = 0;     // Transient: plateau bound
    double growth_ratio = 0.0; // Essential: late/mid average count ratio
    CountTable table;
};

/// Classifies one real point. Transient: some ladder interval whose maximal
/// count is already reached in the first quarter and stays <= c_max; a
/// nonzero plateau must be corroborated by a plateau at the next larger
/// interval, otherwise a single eigenvalue pinned at lambda would fake a
/// bound while the neighbouring counts are still growing. Essential: at the
/// smallest interval the late counts are all nonzero, reach c_min, and their
/// average outgrows the second-quarter average. Anything else stays
/// Undecided, oscillating sequences in particular.
inline SpectralClassification classify_point(const MatrixSequence& seq, double lambda,
                                             const std::vector<double>& ladder,
                                             std::size_t horizon,
                                             const ClassifyRules& rules = {}) {
    if (ladder.empty()) throw ContractError("classify_point: ladder must be nonempty");
    if (horizon < 8) throw ContractError("classify_point: horizon must be >= 8");
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
        if (ladder[i + 1] >= ladder[i])
            throw ContractError("classify_point: ladder must be strictly decreasing");

    SpectralClassification out;
    out.lambda = lambda;
    out.table.lambda = lambda;
    out.table.half_widths = ladder;
    for (double eps : ladder)
        out.table.counts.push_back(eig_counts(seq, lambda, eps, horizon));

    const detail::Windows w(horizon);

    std::vector<bool> plateau(ladder.size(), false);
    std::vector<std::size_t> plateau_bound(ladder.size(), 0);
    for (std::size_t e = 0; e < ladder.size(); ++e) {
        const auto& c = out.table.counts[e];
        std::size_t max_all = 0, max_q1 = 0;
        for (std::size_t n = 1; n <= horizon; ++n) {
            max_all = std::max(max_all, c[n - 1]);
            if (n <= w.q1_end) max_q1 = std::max(max_q1, c[n - 1]);
        }
        plateau[e] = max_all == max_q1 && max_all <= rules.c_max;
        plateau_bound[e] = max_all;
    }
    for (std::size_t e = 0; e < ladder.size(); ++e) {
        if (!plateau[e]) continue;
        const bool corroborated =
            plateau_bound[e] == 0 || (e >= 1 && plateau[e - 1]);
        if (!corroborated) continue;
        out.verdict = PointVerdict::Transient;
        out.eps = ladder[e];
        out.bound = plateau_bound[e];
        return out;
    }

    const auto& c = out.table.counts.back();
    std::size_t max_q4 = 0, min_q4 = std::size_t(-1);
    double sum_q4 = 0.0, sum_q2 = 0.0;
    std::size_t n_q4 = 0, n_q2 = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const std::size_t v = c[n - 1];
        if (n > w.q3_end) {
            max_q4 = std::max(max_q4, v);
            min_q4 = std::min(min_q4, v);
            sum_q4 += double(v);
            ++n_q4;
        }
        if (n > w.q1_end && n <= w.q2_end) {
            sum_q2 += double(v);
            ++n_q2;
        }
    }
    if (n_q4 > 0 && n_q2 > 0) {
        const double avg_q4 = sum_q4 / double(n_q4);
        const double avg_q2 = std::max(sum_q2 / double(n_q2), 0.5);
        if (max_q4 >= rules.c_min && min_q4 >= 1 && avg_q4 >= rules.growth * avg_q2) {
            out.verdict = PointVerdict::Essential;
            out.eps = ladder.back();
            out.growth_ratio = avg_q4 / avg_q2;
            return out;
        }
    }
    out.verdict = PointVerdict::Undecided;
    out.eps = ladder.back();
    return out;
}

/// Grid estimate of the essential spectrum: the non-transient points.
struct SpectrumEstimate {
    std::vector<SpectralClassification> points;
    std::vector<double> non_transient;
    bool bounded_sanity_ok = true; // non-transient set must fit in the norm bound
};

inline SpectrumEstimate essential_spectrum_estimate(const MatrixSequence& seq,
                                                    const std::vector<double>& grid,
                                                    const std::vector<double>& ladder,
                                                    std::size_t horizon,
                                                    const ClassifyRules& rules = {}) {
    if (grid.empty()) throw ContractError("essential_spectrum_estimate: empty grid");
    SpectrumEstimate est;
    for (double lambda : grid) {
        est.points.push_back(classify_point(seq, lambda, ladder, horizon, rules));
        if (est.points.back().verdict != PointVerdict::Transient)
            est.non_transient.push_back(lambda);
    }
    if (!est.non_transient.empty()) {
        const double bound = sup_norm(seq, horizon) +
                             *std::max_element(ladder.begin(), ladder.end()) + 1e-9;
        for (double lambda : est.non_transient)
            if (std::abs(lambda) > bound) est.bounded_sanity_ok = false;
    }
    return est;
}

enum class CrossCheckOutcome { AgreeTransient, AgreeEssentialish, Conflict, Undecided };

inline const char* to_string(CrossCheckOutcome o) {
    switch (o) {
        case CrossCheckOutcome::AgreeTransient: return "agree-transient";
        case CrossCheckOutcome::AgreeEssentialish: return "agree-essentialish";
        case CrossCheckOutcome::Conflict: return "conflict";
        default: return "undecided";
    }
}

struct CrossCheckReport {
    CrossCheckOutcome outcome = CrossCheckOutcome::Undecided;
    SpectralClassification classification;
    FredholmVerdict fredholm;
};

/// Pairs the point classifier with the Fredholm estimator on (A_n - lambda I):
/// transient must meet Fredholm, essential must meet not-Fredholm (no floor or
/// not normally solvable). Disagreement ships both evidence sets.
inline CrossCheckReport cross_check_fredholm(const MatrixSequence& seq, double lambda,
                                             std::size_t horizon, double tau,
                                             std::size_t k_max = 16,
                                             const std::vector<double>& ladder = default_eps_ladder(),
                                             const ClassifyRules& rules = {}) {
    if (!seq.selfadjoint_hint())
        throw ContractError("cross_check_fredholm requires a self-adjoint sequence");
    CrossCheckReport rep;
    rep.classification = classify_point(seq, lambda, ladder, horizon, rules);
    rep.fredholm = fredholm_test(shifted_profile(seq, lambda, horizon, k_max), tau);

    const bool fredholm_yes = rep.fredholm.kind == FredholmVerdict::Kind::Fredholm;
    switch (rep.classification.verdict) {
        case PointVerdict::Transient:
            rep.outcome = fredholm_yes ? CrossCheckOutcome::AgreeTransient
                                       : CrossCheckOutcome::Conflict;
            break;
        case PointVerdict::Essential:
            rep.outcome = fredholm_yes ? CrossCheckOutcome::Conflict
                                       : CrossCheckOutcome::AgreeEssentialish;
            break;
        default:
            rep.outcome = CrossCheckOutcome::Undecided;
            break;
    }
    return rep;
}

/// Full-grid dichotomy audit. Persistent Undecided points are the
/// finite-horizon symptom of a failing dichotomy.
struct DichotomyReport {
    std::vector<SpectralClassification> points;
    std::vector<double> essential;
    std::vector<double> transient;
    std::vector<double> undecided;
    bool dichotomy = false;
    bool bounded_sanity_ok = true;
};

inline DichotomyReport dichotomy_audit(const MatrixSequence& seq,
                                       const std::vector<double>& grid,
                                       const std::vector<double>& ladder,
                                       std::size_t horizon,
                                       const ClassifyRules& rules = {}) {
    if (grid.empty()) throw ContractError("dichotomy_audit: empty grid");
    DichotomyReport rep;
    auto est = essential_spectrum_estimate(seq, grid, ladder, horizon, rules);
    rep.points = std::move(est.points);
    rep.bounded_sanity_ok = est.bounded_sanity_ok;
    for (const auto& p : rep.points) {
        switch (p.verdict) {
            case PointVerdict::Essential: rep.essential.push_back(p.lambda); break;
            case PointVerdict::Transient: rep.transient.push_back(p.lambda); break;
            default: rep.undecided.push_back(p.lambda); break;
        }
    }
    rep.dichotomy = rep.undecided.empty();
    return rep;
}

} // namespace seqspec
