// Command-line front end: JSON configs in, polynomial/report JSON and
// optional CSV sample dumps out. Exit codes: 0 success, 1 config or parse
// error, 2 tolerance unachievable, 3 verification failure, 4 invalid
// sum-of-squares certificate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polycert/json_io.hpp"

namespace {

using nlohmann::json;
using namespace polycert;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int grid_override = 0;
    bool csv = false;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw JsonError("cannot open \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw JsonError(std::string("cannot parse \"") + path + "\": " + ex.what());
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

Rational json_to_rational(const json& j, const char* key) {
    if (j.is_string()) {
        try {
            return rational_from_string(j.get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw JsonError(std::string(key) + ": " + ex.what());
        }
    }
    if (j.is_number()) return rational_from_double(j.get<double>());
    throw JsonError(std::string(key) + " must be a number or a rational string");
}

double get_double(const json& cfg, const char* key) {
    if (!cfg.contains(key)) throw JsonError(std::string("missing field \"") + key + "\"");
    const json& j = cfg[key];
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return rational_to_double(json_to_rational(j, key));
    throw JsonError(std::string(key) + " must be a number");
}

double get_double_or(const json& cfg, const char* key, double fallback) {
    return cfg.contains(key) ? get_double(cfg, key) : fallback;
}

int get_int_or(const json& cfg, const char* key, int fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number_integer()) {
        throw JsonError(std::string(key) + " must be an integer");
    }
    return cfg[key].get<int>();
}

std::string get_string(const json& cfg, const char* key) {
    if (!cfg.contains(key) || !cfg[key].is_string()) {
        throw JsonError(std::string("missing or non-string field \"") + key + "\"");
    }
    return cfg[key].get<std::string>();
}

struct ProblemSetup {
    int n;
    Box box;
    int grid;
};

ProblemSetup problem_setup(const json& cfg, const CommonArgs& args) {
    int n = get_int_or(cfg, "n", 0);
    if (n < 1) throw JsonError("\"n\" must be a positive integer");
    if (!cfg.contains("radius")) throw JsonError("missing field \"radius\"");
    Rational radius = json_to_rational(cfg["radius"], "radius");
    if (radius <= 0) throw JsonError("\"radius\" must be positive");
    int grid = args.grid_override > 0 ? args.grid_override : get_int_or(cfg, "grid", 64);
    if (grid < 2) throw JsonError("grid density must be at least 2");
    return {n, Box(n, radius), grid};
}

ApproxOptions approx_options(const json& cfg, int grid) {
    ApproxOptions opts;
    opts.start_degree = get_int_or(cfg, "start_degree", opts.start_degree);
    opts.degree_cap = get_int_or(cfg, "degree_cap", opts.degree_cap);
    opts.iterates = get_int_or(cfg, "iterates", opts.iterates);
    opts.grid_density = grid;
    opts.safety = get_double_or(cfg, "safety", opts.safety);
    opts.lipschitz = get_double_or(cfg, "lipschitz", opts.lipschitz);
    if (opts.start_degree < 1 || opts.iterates < 1) {
        throw JsonError("start_degree and iterates must be positive");
    }
    return opts;
}

WeightedOptions weighted_options(const json& cfg, int grid) {
    WeightedOptions wopts;
    wopts.approx = approx_options(cfg, grid);
    wopts.eta = get_double_or(cfg, "eta", wopts.eta);
    wopts.taylor_order_start = get_int_or(cfg, "taylor_order_start", wopts.taylor_order_start);
    wopts.taylor_order_cap = get_int_or(cfg, "taylor_order_cap", wopts.taylor_order_cap);
    if (wopts.eta <= 0.0) throw JsonError("eta must be positive");
    return wopts;
}

void append_number(std::string& row, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += buf;
}

// Sample dump over the inclusive uniform grid: coordinates, then |p - v| (or
// the weighted quotient), then one column per nonzero derivative index in
// graded-lex order. Weighted rows inside the eta-ball report zeros.
void write_error_csv(const std::filesystem::path& path, const Polynomial& p, const Expression& v,
                     const Box& box, int density, bool weighted, double eta) {
    int n = box.dimension;
    std::vector<MultiIndex> alphas = binary_multi_indices(n);
    std::vector<CompiledPolynomial> dps;
    std::vector<Expression> dvs;
    for (const MultiIndex& a : alphas) {
        dps.emplace_back(p.diff(a));
        dvs.push_back(differentiate(v, a));
    }

    std::string text;
    for (int i = 1; i <= n; ++i) text += "x" + std::to_string(i) + ",";
    text += "value_error";
    for (size_t k = 1; k < alphas.size(); ++k) {
        text += ",err";
        for (uint32_t e : alphas[k].entries()) text += "_" + std::to_string(e);
    }
    text += "\n";

    double eta2 = eta * eta;
    auto axes = tensor_grid(box, density, /*offset=*/false);
    for_each_grid_point(axes, [&](const std::vector<double>& x) {
        std::string row;
        for (double xi : x) {
            append_number(row, xi);
            row += ",";
        }
        double ss = dot_self(x);
        for (size_t k = 0; k < alphas.size(); ++k) {
            if (k > 0) row += ",";
            double err;
            if (weighted && ss <= eta2) {
                err = 0.0;
            } else {
                err = std::abs(dps[k].eval(x) - evaluate(dvs[k], x));
                if (weighted) err /= ss;
            }
            append_number(row, err);
        }
        row += "\n";
        text += row;
    });
    write_text_file(path, text);
}

int run_approx(const CommonArgs& args, bool weighted) {
    json cfg = read_json_file(args.config_path);
    ProblemSetup setup = problem_setup(cfg, args);
    Expression v = parse_expression(get_string(cfg, "target"), setup.n);
    double eps = get_double(cfg, "epsilon");
    if (!(eps > 0.0)) throw JsonError("\"epsilon\" must be positive");

    std::filesystem::create_directories(args.out_dir);
    json report;
    report["command"] = weighted ? "weighted" : "approx";

    Polynomial p(setup.n);
    try {
        if (weighted) {
            WeightedOptions wopts = weighted_options(cfg, setup.grid);
            WeightedSobolevReport rep;
            p = approximate_weighted_sobolev(v, eps, setup.box, wopts, &rep);
            report["result"] = weighted_sobolev_report_to_json(rep);
        } else {
            ApproxOptions opts = approx_options(cfg, setup.grid);
            SobolevReport rep;
            p = approximate_sobolev(v, eps, setup.box, opts, &rep);
            report["result"] = sobolev_report_to_json(rep);
        }
    } catch (const PosthocFailure& ex) {
        report["error"] = ex.what();
        report["pass"] = false;
        write_json_file(std::filesystem::path(args.out_dir) / "report.json", report);
        std::cerr << ex.what() << "\n";
        return 3;
    }

    report["pass"] = true;
    write_json_file(std::filesystem::path(args.out_dir) / "polynomial.json",
                    polynomial_to_json(p));
    write_json_file(std::filesystem::path(args.out_dir) / "report.json", report);
    if (args.csv) {
        double eta = weighted ? get_double_or(cfg, "eta", kOriginExclusionRadius)
                              : kOriginExclusionRadius;
        write_error_csv(std::filesystem::path(args.out_dir) / "samples.csv", p, v, setup.box,
                        setup.grid, weighted, eta);
    }
    return 0;
}

int run_lyapunov(const CommonArgs& args) {
    json cfg = read_json_file(args.config_path);
    ProblemSetup setup = problem_setup(cfg, args);
    Expression v = parse_expression(get_string(cfg, "v"), setup.n);

    if (!cfg.contains("f") || !cfg["f"].is_array() ||
        cfg["f"].size() != static_cast<size_t>(setup.n)) {
        throw JsonError("\"f\" must be an array of n expression strings");
    }
    std::vector<Expression> comps;
    for (const auto& c : cfg["f"]) {
        if (!c.is_string()) throw JsonError("\"f\" entries must be expression strings");
        comps.push_back(parse_expression(c.get<std::string>(), setup.n));
    }
    std::optional<VectorField> f;
    try {
        f.emplace(std::move(comps));
    } catch (const std::invalid_argument& ex) {
        throw JsonError(ex.what());
    }

    if (!cfg.contains("hypotheses") || !cfg.contains("targets")) {
        throw JsonError("config needs \"hypotheses\" and \"targets\" objects");
    }
    const json& hj = cfg["hypotheses"];
    const json& tj = cfg["targets"];
    std::optional<LyapunovHypotheses> hyp;
    try {
        hyp.emplace(get_double(hj, "beta0"), get_double(hj, "gamma0"), get_double(hj, "delta0"),
                    setup.box);
    } catch (const std::invalid_argument& ex) {
        throw JsonError(ex.what());
    }
    TransferTargets targets{get_double(tj, "beta"), get_double(tj, "gamma"),
                            get_double(tj, "delta")};

    std::optional<double> bound;
    if (cfg.contains("sup_norm_bound")) bound = get_double(cfg, "sup_norm_bound");

    WeightedOptions wopts = weighted_options(cfg, setup.grid);

    std::filesystem::create_directories(args.out_dir);
    json report;
    report["command"] = "lyapunov";

    TransferResult res = [&] {
        try {
            return transfer_certificate(v, *f, *hyp, targets, wopts, setup.grid, bound);
        } catch (const std::invalid_argument& ex) {
            throw JsonError(ex.what());
        }
    }();
    report["result"] = transfer_report_to_json(res.report);
    report["pass"] = res.report.target_report.pass;
    write_json_file(std::filesystem::path(args.out_dir) / "polynomial.json",
                    polynomial_to_json(res.p));
    write_json_file(std::filesystem::path(args.out_dir) / "report.json", report);
    if (!res.report.target_report.pass) {
        std::cerr << "target rates fail on the sampling grid\n";
        return 3;
    }
    return 0;
}

int run_check_sos(const CommonArgs& args) {
    json cfg = read_json_file(args.config_path);
    SOSCertificateFile file = sos_certificate_from_json(cfg);
    SOSCheckResult res = check_sos_certificate(file.certificate, file.field);

    std::filesystem::create_directories(args.out_dir);
    json report;
    report["command"] = "check-sos";
    report["result"] = sos_result_to_json(res);
    report["pass"] = res.valid;
    write_json_file(std::filesystem::path(args.out_dir) / "report.json", report);
    if (!res.valid) {
        std::cerr << "certificate identities do not hold exactly\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive polynomial approximation and certificate transfer"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool with_csv) {
        sub->add_option("--config", args.config_path, "JSON problem configuration")->required();
        sub->add_option("--out", args.out_dir, "output directory (default: current)");
        sub->add_option("--grid", args.grid_override, "sampling grid density override");
        if (with_csv) sub->add_flag("--csv", args.csv, "dump per-point error samples");
    };

    CLI::App* approx = app.add_subcommand("approx", "polynomial approximation in Sobolev norm");
    add_common(approx, true);
    CLI::App* weighted =
        app.add_subcommand("weighted", "polynomial approximation in weighted Sobolev norm");
    add_common(weighted, true);
    CLI::App* lyapunov = app.add_subcommand("lyapunov", "transfer a certificate to a polynomial");
    add_common(lyapunov, false);
    CLI::App* checksos = app.add_subcommand("check-sos", "verify an exact SOS certificate");
    add_common(checksos, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (approx->parsed()) return run_approx(args, false);
        if (weighted->parsed()) return run_approx(args, true);
        if (lyapunov->parsed()) return run_lyapunov(args);
        if (checksos->parsed()) return run_check_sos(args);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const ToleranceUnachievable& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    } catch (const PosthocFailure& ex) {
        std::cerr << ex.what() << "\n";
        return 3;
    } catch (const HypothesisViolation& ex) {
        std::cerr << ex.what() << "\n";
        return 3;
    } catch (const JsonError& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const ParseError& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const EvalError& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const GridCapExceeded& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& ex) {
        std::cerr << "invalid JSON input: " << ex.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
