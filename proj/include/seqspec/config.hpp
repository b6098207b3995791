#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqspec/arveson.hpp"
#include "seqspec/errors.hpp"
#include "seqspec/sequence.hpp"
#include "seqspec/toeplitz.hpp"

namespace seqspec::config {

using nlohmann::json;

/// A sequence built from a config tree, together with the first index at
/// which it can be evaluated (perturbation blocks push that up).
struct BuiltSequence {
    MatrixSequence seq;
    std::size_t n_min = 1;
    std::optional<StructuredToeplitzSequence> structured; // set for plain toeplitz nodes
};

struct Tolerances {
    double tol = 0.05;          // compactness / essential rank / zero tests
    double tau = 1e-3;          // Fredholm floors
    double zero_tol = 0.05;     // decay detection inside fredholm_test
    double stability_tol = 1e-4;
    std::vector<double> eps_ladder = default_eps_ladder();
    ClassifyRules rules;
};

struct GridSpec {
    double min = 0.0, max = 0.0, step = 1.0;

    std::vector<double> points() const {
        std::vector<double> out;
        if (step <= 0.0) throw ConfigError("grid.step must be positive");
        for (double x = min; x <= max + 1e-12; x += step) out.push_back(x);
        return out;
    }
};

struct RestrictOptions {
    double epsilon = 0.01;
    std::size_t k_max = 0;
    std::size_t min_length = 0; // 0 = default rule
};

struct AnalysisConfig {
    json sequence_node;
    std::size_t horizon = 128;
    std::size_t k_max = 16;
    Tolerances tolerances;
    std::optional<GridSpec> grid;
    RestrictOptions restrict_options;
    std::vector<json> family; // extra sequences for the restrict command
    std::string out_dir = ".";
    std::size_t threads = 1; // profile construction parallelism
};

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

inline double num_at(const json& j, const std::string& key, const std::string& where,
                     std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        fail(where + "." + key, "missing");
    }
    if (!j[key].is_number()) fail(where + "." + key, "must be a number");
    return j[key].get<double>();
}

inline cplx cplx_entry(const json& j, const std::string& where) {
    if (j.is_number()) return cplx{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    fail(where, "matrix entry must be a number or [re, im]");
}

inline Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "must be a nonempty array of rows");
    const std::size_t n = j.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n)
            fail(where, "row " + std::to_string(i) + " must have " + std::to_string(n) +
                            " entries");
        for (std::size_t c = 0; c < n; ++c)
            m(i, c) = cplx_entry(j[i][c], where + "[" + std::to_string(i) + "]");
    }
    return m;
}

inline DimensionFunction dims_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "must be an object");
    const std::string kind = j.value("kind", "linear");
    if (kind == "linear") {
        const auto slope = static_cast<std::size_t>(num_at(j, "slope", where, 1.0));
        const auto offset = static_cast<std::size_t>(num_at(j, "offset", where, 0.0));
        if (slope == 0 && offset == 0) fail(where, "dimension rule is identically zero");
        return DimensionFunction::linear(slope, offset);
    }
    if (kind == "explicit") {
        if (!j.contains("dims") || !j["dims"].is_array()) fail(where + ".dims", "missing list");
        std::vector<std::size_t> dims;
        for (const auto& d : j["dims"]) {
            if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
                fail(where + ".dims", "entries must be positive integers");
            dims.push_back(d.get<std::size_t>());
        }
        return DimensionFunction::explicit_list(std::move(dims));
    }
    fail(where + ".kind", "unknown dimension kind '" + kind + "'");
}

inline Symbol symbol_from_json(const json& j, const std::string& where) {
    if (j.contains("coeffs")) {
        if (!j["coeffs"].is_array()) fail(where + ".coeffs", "must be an array");
        std::map<long, cplx> coeffs;
        for (const auto& c : j["coeffs"]) {
            if (!c.is_object() || !c.contains("k")) fail(where + ".coeffs", "entries need k");
            const long k = c["k"].get<long>();
            coeffs[k] = cplx{num_at(c, "re", where + ".coeffs", 0.0),
                             num_at(c, "im", where + ".coeffs", 0.0)};
        }
        return Symbol::from_coeffs(std::move(coeffs));
    }
    if (j.contains("samples")) {
        if (!j["samples"].is_array() || j["samples"].empty())
            fail(where + ".samples", "must be a nonempty array");
        std::vector<cplx> samples;
        for (const auto& s : j["samples"]) samples.push_back(cplx_entry(s, where + ".samples"));
        return Symbol::from_samples(samples);
    }
    fail(where, "symbol needs either coeffs or samples");
}

inline Symbol symbol_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("symbol_file", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("symbol_file", std::string("parse error: ") + e.what());
    }
    return symbol_from_json(j, "symbol_file");
}

inline BuiltSequence build_sequence(const json& j, const std::string& where);

inline BuiltSequence build_toeplitz(const json& j, const std::string& where) {
    StructuredToeplitzSequence s;
    if (j.contains("symbol_file"))
        s.symbol = symbol_from_file(j["symbol_file"].get<std::string>());
    else if (j.contains("symbol"))
        s.symbol = symbol_from_json(j["symbol"], where + ".symbol");
    // no symbol at all means a = 0, a pure perturbation sequence

    std::size_t n_min = 1;
    if (j.contains("K")) {
        s.k_block = matrix_from_json(j["K"], where + ".K");
        s.k_rank = j.value("K_rank", s.k_block.dim());
        n_min = std::max(n_min, s.k_block.dim());
    }
    if (j.contains("L")) {
        s.l_block = matrix_from_json(j["L"], where + ".L");
        s.l_rank = j.value("L_rank", s.l_block.dim());
        n_min = std::max(n_min, s.l_block.dim());
    }
    if (j.contains("noise") && !j["noise"].is_null()) {
        const auto& nj = j["noise"];
        const std::string kind = nj.value("kind", "none");
        if (kind == "scaled_identity") {
            const double c = num_at(nj, "c", where + ".noise", 1.0);
            s.noise = MatrixSequence(
                DimensionFunction::identity(),
                [c](std::size_t n) {
                    return Matrix::identity(n) * cplx{c / double(n), 0.0};
                },
                true, "noise(c/n)");
        } else if (kind != "none") {
            fail(where + ".noise.kind", "unknown noise kind '" + kind + "'");
        }
    }
    BuiltSequence out;
    out.structured = s;
    out.seq = assemble(s);
    out.n_min = n_min;
    return out;
}

inline BuiltSequence build_sequence(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "sequence node must be an object");
    const std::string type = j.value("type", "");
    if (type.empty()) fail(where + ".type", "missing");

    auto dims_of = [&](const char* fallback_kind) {
        (void)fallback_kind;
        return j.contains("dims") ? dims_from_json(j["dims"], where + ".dims")
                                  : DimensionFunction::identity();
    };

    if (type == "identity") return {identity_sequence(dims_of("linear")), 1, std::nullopt};
    if (type == "zero") return {zero_sequence(dims_of("linear")), 1, std::nullopt};
    if (type == "toeplitz") return build_toeplitz(j, where);

    if (type == "explicit") {
        if (!j.contains("matrices") || !j["matrices"].is_array() || j["matrices"].empty())
            fail(where + ".matrices", "must be a nonempty array");
        auto mats = std::make_shared<std::vector<Matrix>>();
        std::vector<std::size_t> dims;
        for (std::size_t i = 0; i < j["matrices"].size(); ++i) {
            mats->push_back(matrix_from_json(j["matrices"][i],
                                             where + ".matrices[" + std::to_string(i) + "]"));
            dims.push_back(mats->back().dim());
        }
        bool hermitian = true;
        for (const auto& m : *mats)
            hermitian = hermitian &&
                        m.hermiticity_defect() <= 1e-12 * (1.0 + m.frobenius_norm());
        return {MatrixSequence(DimensionFunction::explicit_list(dims),
                               [mats](std::size_t n) {
                                   if (n > mats->size())
                                       throw ConfigError("explicit sequence has no matrix " +
                                                         std::to_string(n));
                                   return (*mats)[n - 1];
                               },
                               hermitian, "explicit"),
                1, std::nullopt};
    }

    if (type == "alternate" || type == "direct_sum" || type == "add" || type == "mul") {
        const char* a_key = type == "alternate" ? "odd" : "a";
        const char* b_key = type == "alternate" ? "even" : "b";
        if (!j.contains(a_key)) fail(where + "." + a_key, "missing");
        if (!j.contains(b_key)) fail(where + "." + b_key, "missing");
        auto a = build_sequence(j[a_key], where + "." + a_key);
        auto b = build_sequence(j[b_key], where + "." + b_key);
        BuiltSequence out;
        out.n_min = std::max(a.n_min, b.n_min);
        if (type == "alternate") out.seq = alternate(a.seq, b.seq);
        if (type == "direct_sum") out.seq = direct_sum(a.seq, b.seq);
        if (type == "add") out.seq = add(a.seq, b.seq);
        if (type == "mul") out.seq = mul(a.seq, b.seq);
        return out;
    }

    if (type == "adjoint" || type == "scale") {
        if (!j.contains("of")) fail(where + ".of", "missing");
        auto of = build_sequence(j["of"], where + ".of");
        BuiltSequence out;
        out.n_min = of.n_min;
        if (type == "adjoint")
            out.seq = adjoint(of.seq);
        else
            out.seq = scale(of.seq, cplx{num_at(j, "re", where, 1.0), num_at(j, "im", where, 0.0)});
        return out;
    }

    if (type == "restrict") {
        if (!j.contains("of")) fail(where + ".of", "missing");
        auto of = build_sequence(j["of"], where + ".of");
        Restriction eta;
        if (!j.contains("eta")) fail(where + ".eta", "missing");
        const auto& ej = j["eta"];
        if (ej.is_array()) {
            std::vector<std::size_t> idx;
            for (const auto& e : ej) {
                if (!e.is_number_unsigned()) fail(where + ".eta", "indices must be positive");
                idx.push_back(e.get<std::size_t>());
            }
            try {
                eta = Restriction::from_indices(std::move(idx));
            } catch (const ConfigError& e) {
                fail(where + ".eta", e.what());
            }
        } else if (ej.is_object()) {
            eta = Restriction::arithmetic(
                static_cast<std::size_t>(num_at(ej, "start", where + ".eta", 1.0)),
                static_cast<std::size_t>(num_at(ej, "stride", where + ".eta", 1.0)));
        } else {
            fail(where + ".eta", "must be an index array or {start, stride}");
        }
        BuiltSequence out;
        out.seq = restrict_to(of.seq, eta);
        out.n_min = 1;
        if (of.n_min > 1) {
            std::size_t n = 1;
            while (eta(n) < of.n_min) ++n;
            out.n_min = n;
        }
        return out;
    }

    fail(where + ".type", "unknown sequence type '" + type + "'");
}

} // namespace detail

inline BuiltSequence build_sequence(const json& node) {
    return detail::build_sequence(node, "sequence");
}

inline AnalysisConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("sequence")) throw ConfigError("config.sequence: missing");
    AnalysisConfig cfg;
    cfg.sequence_node = j["sequence"];

    if (j.contains("horizon")) {
        if (!j["horizon"].is_number_unsigned())
            throw ConfigError("config.horizon: must be a positive integer");
        cfg.horizon = j["horizon"].get<std::size_t>();
    }
    if (cfg.horizon < 16) throw ConfigError("config.horizon: must be >= 16");

    if (j.contains("k_max")) {
        if (!j["k_max"].is_number_unsigned() || j["k_max"].get<std::size_t>() == 0)
            throw ConfigError("config.k_max: must be a positive integer");
        cfg.k_max = j["k_max"].get<std::size_t>();
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        cfg.tolerances.tol = detail::num_at(t, "tol", "config.tolerances", cfg.tolerances.tol);
        cfg.tolerances.tau = detail::num_at(t, "tau", "config.tolerances", cfg.tolerances.tau);
        cfg.tolerances.zero_tol =
            detail::num_at(t, "zero_tol", "config.tolerances", cfg.tolerances.zero_tol);
        cfg.tolerances.stability_tol = detail::num_at(t, "stability_tol", "config.tolerances",
                                                      cfg.tolerances.stability_tol);
        if (cfg.tolerances.tol <= 0 || cfg.tolerances.tau <= 0 || cfg.tolerances.zero_tol <= 0 ||
            cfg.tolerances.stability_tol <= 0)
            throw ConfigError("config.tolerances: all tolerances must be positive");
        if (t.contains("eps_ladder")) {
            if (!t["eps_ladder"].is_array() || t["eps_ladder"].empty())
                throw ConfigError("config.tolerances.eps_ladder: must be a nonempty array");
            cfg.tolerances.eps_ladder.clear();
            for (const auto& e : t["eps_ladder"])
                cfg.tolerances.eps_ladder.push_back(e.get<double>());
        }
        if (t.contains("rules")) {
            const auto& r = t["rules"];
            cfg.tolerances.rules.c_min = static_cast<std::size_t>(
                detail::num_at(r, "c_min", "config.tolerances.rules", 4.0));
            cfg.tolerances.rules.c_max = static_cast<std::size_t>(
                detail::num_at(r, "c_max", "config.tolerances.rules", 32.0));
            cfg.tolerances.rules.growth =
                detail::num_at(r, "growth", "config.tolerances.rules", 1.5);
        }
    }

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        GridSpec grid;
        grid.min = detail::num_at(g, "min", "config.grid");
        grid.max = detail::num_at(g, "max", "config.grid");
        grid.step = detail::num_at(g, "step", "config.grid");
        if (grid.step <= 0) throw ConfigError("config.grid.step: must be positive");
        if (grid.max < grid.min) throw ConfigError("config.grid: max must be >= min");
        cfg.grid = grid;
    }

    if (j.contains("restriction")) {
        const auto& r = j["restriction"];
        cfg.restrict_options.epsilon =
            detail::num_at(r, "epsilon", "config.restriction", cfg.restrict_options.epsilon);
        if (cfg.restrict_options.epsilon <= 0)
            throw ConfigError("config.restriction.epsilon: must be positive");
        if (r.contains("k_max")) {
            if (!r["k_max"].is_number_unsigned())
                throw ConfigError("config.restriction.k_max: must be a nonnegative integer");
            cfg.restrict_options.k_max = r["k_max"].get<std::size_t>();
        }
        if (r.contains("min_length")) {
            if (!r["min_length"].is_number_unsigned())
                throw ConfigError("config.restriction.min_length: must be a nonnegative integer");
            cfg.restrict_options.min_length = r["min_length"].get<std::size_t>();
        }
        if (r.contains("sequences")) {
            if (!r["sequences"].is_array())
                throw ConfigError("config.restriction.sequences: must be an array");
            for (const auto& s : r["sequences"]) cfg.family.push_back(s);
        }
    }

    if (j.contains("threads")) {
        if (!j["threads"].is_number_unsigned() || j["threads"].get<std::size_t>() == 0)
            throw ConfigError("config.threads: must be a positive integer");
        cfg.threads = j["threads"].get<std::size_t>();
    }

    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("config.out: must be a string");
        cfg.out_dir = j["out"].get<std::string>();
    }
    return cfg;
}

inline AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

} // namespace seqspec::config
