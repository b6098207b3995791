#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "seqspec/config.hpp"
#include "seqspec/reports.hpp"

namespace seqspec::cli {

struct Options {
    std::string command;
    std::string config_path;
    std::optional<std::size_t> horizon_override;
    std::optional<std::string> out_override;
    bool no_timestamp = false;
    bool plot_data = false;
};

namespace detail {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndecided = 2;

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

inline void stamp(reports::ordered_json& j, const Options& opt) {
    if (!opt.no_timestamp) j["timestamp"] = reports::utc_timestamp();
}

struct Session {
    config::AnalysisConfig cfg;
    std::filesystem::path out_dir;

    std::size_t horizon() const { return cfg.horizon; }
};

inline Session open_session(const Options& opt) {
    Session s{config::load_config(opt.config_path), {}};
    if (opt.horizon_override) {
        if (*opt.horizon_override < 16) throw ConfigError("--horizon must be >= 16");
        s.cfg.horizon = *opt.horizon_override;
    }
    s.out_dir = opt.out_override ? *opt.out_override : s.cfg.out_dir;
    std::filesystem::create_directories(s.out_dir);
    return s;
}

inline int run_analyze(const Options& opt, Session& s) {
    auto built = config::build_sequence(s.cfg.sequence_node);
    auto profile =
        singular_profile(built.seq, s.horizon(), s.cfg.k_max, built.n_min, s.cfg.threads);
    write_file(s.out_dir / "profile.csv", reports::profile_csv(profile));
    if (opt.plot_data)
        write_file(s.out_dir / "plot_sigma.csv", reports::sigma_plot_csv(profile));
    std::cout << "profile written: horizon " << s.horizon() << ", k_max " << s.cfg.k_max
              << "\n";
    return kExitOk;
}

inline int run_compact(const Options& opt, Session& s) {
    auto built = config::build_sequence(s.cfg.sequence_node);
    auto profile =
        singular_profile(built.seq, s.horizon(), s.cfg.k_max, built.n_min, s.cfg.threads);
    auto verdict = compactness_test(profile, s.cfg.tolerances.tol);
    auto j = reports::json_of(verdict, s.cfg.tolerances.tol, s.horizon());
    j["command"] = "compact";
    auto rank = essential_rank(profile, s.cfg.tolerances.tol);
    j["essential_rank"] = rank ? reports::ordered_json(*rank) : reports::ordered_json("Infinite");
    stamp(j, opt);
    write_file(s.out_dir / "compact.json", j.dump(2) + "\n");
    std::cout << "compactness: " << to_string(verdict.kind) << "\n";
    return verdict.kind == CompactnessVerdict::Kind::Undecided ? kExitUndecided : kExitOk;
}

inline int run_fredholm(const Options& opt, Session& s) {
    auto built = config::build_sequence(s.cfg.sequence_node);
    auto profile =
        singular_profile(built.seq, s.horizon(), s.cfg.k_max, built.n_min, s.cfg.threads);
    auto verdict = fredholm_test(profile, s.cfg.tolerances.tau, s.cfg.tolerances.zero_tol);
    auto j = reports::json_of(verdict, s.cfg.tolerances.tau, s.horizon());
    j["command"] = "fredholm";
    stamp(j, opt);
    write_file(s.out_dir / "fredholm.json", j.dump(2) + "\n");
    if (opt.plot_data)
        write_file(s.out_dir / "plot_sigma.csv", reports::sigma_plot_csv(profile));
    std::cout << "fredholm: " << to_string(verdict.kind) << "\n";
    return verdict.kind == FredholmVerdict::Kind::Undecided ? kExitUndecided : kExitOk;
}

inline int run_spectrum(const Options& opt, Session& s) {
    if (!s.cfg.grid) throw ConfigError("config.grid: required for spectrum");
    auto built = config::build_sequence(s.cfg.sequence_node);
    if (!built.seq.selfadjoint_hint())
        throw ContractError("spectrum requires a self-adjoint sequence");
    auto est = essential_spectrum_estimate(built.seq, s.cfg.grid->points(),
                                           s.cfg.tolerances.eps_ladder, s.horizon(),
                                           s.cfg.tolerances.rules);
    auto j = reports::json_of(est, true);
    j["command"] = "spectrum";
    stamp(j, opt);
    write_file(s.out_dir / "spectrum.json", j.dump(2) + "\n");
    if (opt.plot_data) {
        write_file(s.out_dir / "plot_verdicts.csv", reports::verdict_plot_csv(est.points));
        write_file(s.out_dir / "counts.csv", reports::counts_csv(est.points));
    }
    bool undecided = false;
    for (const auto& p : est.points)
        undecided = undecided || p.verdict == PointVerdict::Undecided;
    std::cout << "spectrum: " << est.non_transient.size() << " non-transient points\n";
    return undecided ? kExitUndecided : kExitOk;
}

inline int run_dichotomy(const Options& opt, Session& s) {
    if (!s.cfg.grid) throw ConfigError("config.grid: required for dichotomy");
    auto built = config::build_sequence(s.cfg.sequence_node);
    if (!built.seq.selfadjoint_hint())
        throw ContractError("dichotomy requires a self-adjoint sequence");
    auto rep = dichotomy_audit(built.seq, s.cfg.grid->points(), s.cfg.tolerances.eps_ladder,
                               s.horizon(), s.cfg.tolerances.rules);
    auto j = reports::json_of(rep, true);
    j["command"] = "dichotomy";
    stamp(j, opt);
    write_file(s.out_dir / "dichotomy.json", j.dump(2) + "\n");
    if (opt.plot_data) {
        write_file(s.out_dir / "plot_verdicts.csv", reports::verdict_plot_csv(rep.points));
        write_file(s.out_dir / "counts.csv", reports::counts_csv(rep.points));
    }
    std::cout << "dichotomy: " << (rep.dichotomy ? "holds" : "fails") << " ("
              << rep.undecided.size() << " undecided)\n";
    return rep.dichotomy ? kExitOk : kExitUndecided;
}

inline int run_restrict(const Options& opt, Session& s) {
    ExtractionRequest req;
    req.sequences.push_back(config::build_sequence(s.cfg.sequence_node).seq);
    for (const auto& node : s.cfg.family)
        req.sequences.push_back(config::build_sequence(node).seq);
    req.horizon = s.horizon();
    req.epsilon = s.cfg.restrict_options.epsilon;
    req.k_max = s.cfg.restrict_options.k_max;
    req.min_length = s.cfg.restrict_options.min_length;

    auto result = extract_convergent(req);
    auto verification = verify_convergence(req.sequences, result.eta, req.epsilon, req.k_max,
                                           req.horizon);

    reports::ordered_json eta_json = result.indices;
    write_file(s.out_dir / "eta.json", eta_json.dump() + "\n");

    auto j = reports::json_of(result);
    j["command"] = "restrict";
    j["epsilon"] = req.epsilon;
    j["k_max"] = req.k_max;
    j["verification"] = reports::json_of(verification);
    stamp(j, opt);
    write_file(s.out_dir / "restrict_report.json", j.dump(2) + "\n");
    std::cout << "restrict: " << (result.success ? "success" : "failed") << ", eta length "
              << result.indices.size() << "\n";
    return result.success && verification.converged ? kExitOk : kExitUndecided;
}

inline int run_stability(const Options& opt, Session& s) {
    auto built = config::build_sequence(s.cfg.sequence_node);
    if (!built.structured)
        throw ConfigError("stability requires a plain toeplitz sequence node");
    auto rep = stability_check(*built.structured, s.horizon(), s.cfg.tolerances.stability_tol);
    auto j = reports::json_of(rep);
    j["command"] = "stability";
    stamp(j, opt);
    write_file(s.out_dir / "stability.json", j.dump(2) + "\n");
    std::cout << "stability: " << to_string(rep.verdict) << "\n";
    return rep.verdict == StabilityVerdict::Undecided ? kExitUndecided : kExitOk;
}

} // namespace detail

/// Dispatches one command; returns the process exit code (0 decided,
/// 2 undecided, 1 error).
inline int run(const Options& opt) {
    try {
        auto session = detail::open_session(opt);
        if (opt.command == "analyze") return detail::run_analyze(opt, session);
        if (opt.command == "compact") return detail::run_compact(opt, session);
        if (opt.command == "fredholm") return detail::run_fredholm(opt, session);
        if (opt.command == "spectrum") return detail::run_spectrum(opt, session);
        if (opt.command == "dichotomy") return detail::run_dichotomy(opt, session);
        if (opt.command == "restrict") return detail::run_restrict(opt, session);
        if (opt.command == "stability") return detail::run_stability(opt, session);
        std::cerr << "unknown command '" << opt.command << "'\n";
        return detail::kExitError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return detail::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return detail::kExitError;
    }
}

} // namespace seqspec::cli
