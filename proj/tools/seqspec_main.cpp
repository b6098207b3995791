#include <string>

#include "CLI11.hpp"

#include "seqspec/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"seqspec: finite-horizon spectral estimators for matrix sequences"};
    app.require_subcommand(1);

    seqspec::cli::Options opt;
    std::size_t horizon = 0;
    std::string out;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"analyze", "tabulate the singular values Sigma_k(A_n) as CSV"},
        {"compact", "compactness and essential-rank verdict"},
        {"fredholm", "Fredholm / not-normally-solvable verdict"},
        {"spectrum", "essential spectrum estimate over a lambda grid"},
        {"dichotomy", "classify every grid point and audit the dichotomy"},
        {"restrict", "extract a convergent subsequence eta"},
        {"stability", "stability of a structured Toeplitz sequence"},
    };
    for (const auto& [name, blurb] : commands) {
        auto* sub = app.add_subcommand(name, blurb);
        sub->add_option("--config", opt.config_path, "JSON config file")->required();
        sub->add_option("--horizon", horizon, "override config horizon");
        sub->add_option("--out", out, "report output directory");
        sub->add_flag("--no-timestamp", opt.no_timestamp, "omit timestamps from reports");
        sub->add_flag("--plot-data", opt.plot_data, "emit gnuplot-ready CSV files");
        sub->callback([&opt, name = name] { opt.command = name; });
    }

    CLI11_PARSE(app, argc, argv);
    if (horizon > 0) opt.horizon_override = horizon;
    if (!out.empty()) opt.out_override = out;
    return seqspec::cli::run(opt);
}
