#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqspec/arveson.hpp"
#include "seqspec/asymptotics.hpp"
#include "seqspec/restriction.hpp"
#include "seqspec/toeplitz.hpp"

namespace seqspec::reports {

using ordered_json = nlohmann::ordered_json;

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline ordered_json json_of(const CompactnessVerdict& v, double tol, std::size_t horizon) {
    ordered_json j;
    j["verdict"] = to_string(v.kind);
    if (v.kind == CompactnessVerdict::Kind::Compact) j["ess_rank"] = v.ess_rank;
    if (v.kind == CompactnessVerdict::Kind::NotCompact) {
        j["witness_k"] = v.witness_k;
        j["floor"] = v.floor;
    }
    j["tol"] = tol;
    j["horizon"] = horizon;
    ordered_json sup = ordered_json::array();
    for (double s : v.tail_sup) sup.push_back(std::isnan(s) ? ordered_json(nullptr) : ordered_json(s));
    j["evidence"]["tail_sup"] = sup;
    return j;
}

inline ordered_json json_of(const FredholmVerdict& v, double tau, std::size_t horizon) {
    ordered_json j;
    j["verdict"] = to_string(v.kind);
    if (v.kind == FredholmVerdict::Kind::Fredholm) {
        j["k"] = v.k;
        j["floor"] = v.floor;
    }
    j["tau"] = tau;
    j["horizon"] = horizon;
    auto arr = [](const std::vector<double>& xs) {
        ordered_json a = ordered_json::array();
        for (double x : xs) a.push_back(std::isnan(x) ? ordered_json(nullptr) : ordered_json(x));
        return a;
    };
    j["evidence"]["tail_min"] = arr(v.tail_min);
    j["evidence"]["tail_q4_max"] = arr(v.tail_q4_max);
    j["evidence"]["trend"] = arr(v.trend);
    return j;
}

inline ordered_json json_of(const SpectralClassification& c, bool with_counts = true) {
    ordered_json j;
    j["lambda"] = c.lambda;
    j["verdict"] = to_string(c.verdict);
    j["eps"] = c.eps;
    if (c.verdict == PointVerdict::Transient) j["bound"] = c.bound;
    if (c.verdict == PointVerdict::Essential) j["growth"] = c.growth_ratio;
    if (!c.table.counts.empty()) {
        const auto& last = c.table.counts.back();
        const auto mx = *std::max_element(last.begin(), last.end());
        ordered_json s;
        s["final"] = last.back();
        s["max"] = mx;
        s["at_eps"] = c.table.half_widths.back();
        j["counts_summary"] = s;
    }
    if (with_counts) {
        ordered_json tbl = ordered_json::array();
        for (std::size_t e = 0; e < c.table.half_widths.size(); ++e) {
            ordered_json row;
            row["eps"] = c.table.half_widths[e];
            row["counts"] = c.table.counts[e];
            tbl.push_back(row);
        }
        j["count_table"] = tbl;
    }
    return j;
}

inline ordered_json json_of(const DichotomyReport& r, bool with_counts = false) {
    ordered_json j;
    j["dichotomy"] = r.dichotomy;
    j["essential"] = r.essential;
    j["transient"] = r.transient;
    j["undecided"] = r.undecided;
    j["bounded_sanity_ok"] = r.bounded_sanity_ok;
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.points) pts.push_back(json_of(p, with_counts));
    j["points"] = pts;
    return j;
}

inline ordered_json json_of(const SpectrumEstimate& e, bool with_counts = false) {
    ordered_json j;
    j["non_transient"] = e.non_transient;
    j["bounded_sanity_ok"] = e.bounded_sanity_ok;
    ordered_json pts = ordered_json::array();
    for (const auto& p : e.points) pts.push_back(json_of(p, with_counts));
    j["points"] = pts;
    return j;
}

inline ordered_json json_of(const StabilityReport& r) {
    ordered_json j;
    j["verdict"] = to_string(r.verdict);
    j["tol"] = r.tol;
    j["horizon"] = r.horizon;
    j["sigma_min_window"] = r.sigma_min_window;
    j["trend_ok"] = r.trend_ok;
    j["window_stable"] = r.window_stable;
    j["limits_stable"] = r.limits_stable;
    j["sigma1_limit_W"] = {r.sigma_W_half, r.sigma_W_full};
    j["sigma1_limit_Wtilde"] = {r.sigma_Wtilde_half, r.sigma_Wtilde_full};
    return j;
}

inline ordered_json json_of(const ExtractionResult& r) {
    ordered_json j;
    j["success"] = r.success;
    j["eta_length"] = r.indices.size();
    ordered_json osc = ordered_json::array();
    for (const auto& o : r.oscillations) {
        ordered_json e;
        e["sequence"] = o.sequence;
        e["k"] = o.k;
        e["oscillation"] = o.oscillation;
        osc.push_back(e);
    }
    j["oscillations"] = osc;
    return j;
}

inline ordered_json json_of(const ConvergenceReport& r) {
    ordered_json j;
    j["converged"] = r.converged;
    ordered_json osc = ordered_json::array();
    for (const auto& o : r.oscillations) {
        ordered_json e;
        e["sequence"] = o.sequence;
        e["k"] = o.k;
        e["oscillation"] = o.oscillation;
        osc.push_back(e);
    }
    j["oscillations"] = osc;
    return j;
}

/// Profile CSV: header n,dim,k,sigma_desc; rows for every stored Sigma_k.
inline std::string profile_csv(const SingularProfile& p) {
    std::string out = "n,dim,k,sigma_desc\n";
    for (const auto& r : p.rows) {
        for (std::size_t k = 1; k <= r.top_desc.size(); ++k) {
            out += std::to_string(r.n);
            out += ',';
            out += std::to_string(r.dim);
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += fmt_double(r.top_desc[k - 1]);
            out += '\n';
        }
    }
    return out;
}

/// Gnuplot-friendly n-vs-sigma_k table (increasing-order values).
inline std::string sigma_plot_csv(const SingularProfile& p) {
    std::string out = "n";
    for (std::size_t k = 1; k <= p.k_max; ++k) out += ",sigma_" + std::to_string(k);
    out += '\n';
    for (const auto& r : p.rows) {
        if (r.dim == 0) continue;
        out += std::to_string(r.n);
        for (std::size_t k = 1; k <= p.k_max; ++k) {
            out += ',';
            out += k <= r.bottom_asc.size() ? fmt_double(r.bottom_asc[k - 1]) : std::string();
        }
        out += '\n';
    }
    return out;
}

/// Full count tables as CSV: lambda,eps,n,count.
inline std::string counts_csv(const std::vector<SpectralClassification>& points) {
    std::string out = "lambda,eps,n,count\n";
    for (const auto& p : points)
        for (std::size_t e = 0; e < p.table.half_widths.size(); ++e)
            for (std::size_t n = 1; n <= p.table.counts[e].size(); ++n) {
                out += fmt_double(p.lambda);
                out += ',';
                out += fmt_double(p.table.half_widths[e]);
                out += ',';
                out += std::to_string(n);
                out += ',';
                out += std::to_string(p.table.counts[e][n - 1]);
                out += '\n';
            }
    return out;
}

/// Gnuplot-friendly lambda-vs-verdict table (0 transient, 1 essential, 2 undecided).
inline std::string verdict_plot_csv(const std::vector<SpectralClassification>& points) {
    std::string out = "lambda,verdict_code\n";
    for (const auto& p : points) {
        int code = 2;
        if (p.verdict == PointVerdict::Transient) code = 0;
        if (p.verdict == PointVerdict::Essential) code = 1;
        out += fmt_double(p.lambda);
        out += ',';
        out += std::to_string(code);
        out += '\n';
    }
    return out;
}

} // namespace seqspec::reports
