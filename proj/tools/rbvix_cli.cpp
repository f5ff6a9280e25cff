// Command-line front end: pricing, the three convergence studies and the covariance self-check.

#include "rbvix/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace rbvix;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Artifacts {
    std::string timestamp = utc_timestamp();
    std::string stamp;  // timestamp plus -k when an earlier run in the same second used the same directory
    std::vector<std::string> files;
};

fs::path output_dir(const RunConfig& c) {
    fs::path dir = c.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("output-dir: cannot create '" + dir.string() + "': " + ec.message());
    return dir;
}

const std::string& file_stamp(const fs::path& dir, Artifacts& art) {
    if (!art.stamp.empty()) return art.stamp;
    auto taken = [&](const std::string& stamp) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            const auto stem = entry.path().stem().string();
            if (stem.size() >= stamp.size() && stem.compare(stem.size() - stamp.size(), stamp.size(), stamp) == 0)
                return true;
        }
        return false;
    };
    art.stamp = art.timestamp;
    for (int k = 2; taken(art.stamp); ++k) art.stamp = art.timestamp + "-" + std::to_string(k);
    return art.stamp;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_manifest(const RunConfig& c, Artifacts& art, const std::string& tag, const nlohmann::json& results,
                    double wall) {
    nlohmann::json config = c;
    const std::string name = artifact_name(to_string(c.command), tag, file_stamp(output_dir(c), art), "json");
    nlohmann::json manifest = {{"schema", "rbvix-manifest"},
                               {"schema_version", 1},
                               {"command", to_string(c.command)},
                               {"seed", c.seed},
                               {"config", config},
                               {"config_hash", git_blob_hash(config.dump())},
                               {"artifacts", art.files},
                               {"results", results},
                               {"wall_seconds", wall},
                               {"created", art.timestamp}};
    write_file(output_dir(c) / name, manifest.dump(2) + "\n");
    art.files.push_back(name);
}

template <typename T>
void write_csv_artifact(const RunConfig& c, Artifacts& art, const std::string& tag, const T& table) {
    if (c.format != "csv") return;
    std::ostringstream csv;
    write_csv(csv, table);
    const std::string name = artifact_name(to_string(c.command), tag, file_stamp(output_dir(c), art), "csv");
    write_file(output_dir(c) / name, csv.str());
    art.files.push_back(name);
}

std::string sci(double v, int digits = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string join_schemes(const std::vector<SchemeKind>& schemes) {
    std::string out;
    for (auto s : schemes) out += (out.empty() ? "" : "-") + to_string(s);
    return out;
}

std::string run_price(const RunConfig& c, Artifacts& art, double& wall) {
    const auto payoff = c.payoff_spec();
    const auto scheme = c.schemes.front();
    nlohmann::json results;
    Estimate e;
    std::string label;
    if (c.estimator == EstimatorKind::Mc) {
        e = mc_price(scheme, c.n, c.M, payoff, c.cv, c.model, c.stream_key(), c.simulation());
        label = "mc n=" + std::to_string(c.n) + " M=" + std::to_string(c.M) + (c.cv ? " cv" : "");
    } else {
        PilotOptions pilot;
        pilot.probe_samples = c.probe_M;
        const auto plan = mlmc_plan(c.epsilon, c.n0, scheme, payoff, c.model, c.plan,
                                    c.stream_key().with_experiment(1), pilot, c.simulation());
        e = mlmc_price(plan, payoff, c.model, c.stream_key(), c.simulation());
        results["plan"] = plan;
        label = "mlmc eps=" + sci(c.epsilon) + " L=" + std::to_string(plan.L) + " M0=" + std::to_string(plan.m0);
    }
    results["estimate"] = e;
    wall = e.wall_seconds;
    if (c.format == "csv") {
        std::ostringstream csv;
        char row[256];
        csv << "estimator,scheme,payoff,kappa,value,std_error,ci_halfwidth,cost\n";
        std::snprintf(row, sizeof row, "%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      c.estimator == EstimatorKind::Mc ? "mc" : "mlmc", to_string(scheme).c_str(),
                      to_string(payoff.kind).c_str(), payoff.strike, e.value, e.std_error, 1.96 * e.std_error, e.cost);
        csv << row;
        const std::string name = artifact_name("price", to_string(scheme), file_stamp(output_dir(c), art), "csv");
        write_file(output_dir(c) / name, csv.str());
        art.files.push_back(name);
    }
    write_manifest(c, art, to_string(scheme), results, wall);
    char line[256];
    std::snprintf(line, sizeof line, "price %s %s: %.8f +/- %.2e (95%%) cost %.3g wall %.2fs", to_string(scheme).c_str(),
                  label.c_str(), e.value, 1.96 * e.std_error, e.cost, e.wall_seconds);
    return line;
}

std::string describe_curve(const ErrorCurve& c) {
    std::string s = to_string(c.scheme) + " slope " + sci(c.fit.slope);
    if (!c.errors.empty())
        s += ", error " + sci(c.errors.back()) + " at n=" + std::to_string(c.n_values.back());
    if (!c.overlay.empty())
        s += ", n*error/Lambda " + sci(c.errors.back() / c.overlay.back());
    return s;
}

std::string run_strong(const RunConfig& c, Artifacts& art, double& wall) {
    const auto start = std::chrono::steady_clock::now();
    const auto curves = strong_error_curves(c.schemes, c.n_values, c.n_ref, c.M, c.model, c.stream_key(), c.simulation());
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string summary = "strong-error n_ref=" + std::to_string(c.n_ref) + " M=" + std::to_string(c.M) + ":";
    for (const auto& curve : curves) {
        write_csv_artifact(c, art, to_string(curve.scheme), curve);
        summary += " " + describe_curve(curve) + ";";
    }
    write_manifest(c, art, join_schemes(c.schemes), curves, wall);
    return summary + " wall " + sci(wall) + "s";
}

std::string run_weak(const RunConfig& c, Artifacts& art, double& wall) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<ErrorCurve> curves;
    std::string summary = "weak-error M=" + std::to_string(c.M) + ":";
    for (std::size_t k = 0; k < c.schemes.size(); ++k) {
        curves.push_back(weak_error_curve(c.schemes[k], c.n_values, c.payoff_spec(), *c.reference_price,
                                          c.reference_ci, c.M, c.model, c.stream_key().with_experiment(k << 16),
                                          c.simulation()));
        write_csv_artifact(c, art, to_string(c.schemes[k]), curves.back());
        summary += " " + describe_curve(curves.back()) + ";";
    }
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(c, art, join_schemes(c.schemes), curves, wall);
    return summary + " wall " + sci(wall) + "s";
}

std::string run_mse(const RunConfig& c, Artifacts& art, double& wall) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<MseCostTable> tables;
    std::string summary = "mse-cost N_mse=" + std::to_string(c.N_mse) + ":";
    std::string tag;
    for (auto family : c.families) {
        tables.push_back(mse_cost_curve(family, c.epsilons, c.N_mse, *c.reference_price, c.model, c.payoff_spec(),
                                        c.stream_key(), c.simulation(), c.n0, c.plan));
        write_csv_artifact(c, art, to_string(family), tables.back());
        summary += " " + to_string(family) + " slope " + sci(tables.back().fit.slope) + ";";
        tag += (tag.empty() ? "" : "-") + to_string(family);
    }
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(c, art, tag, tables, wall);
    return summary + " wall " + sci(wall) + "s";
}

std::string run_covariance(const RunConfig& c, Artifacts& art, double& wall) {
    const auto check = covariance_check(c.pairs, c.seed);
    wall = check.seconds;
    write_manifest(c, art, "hyp2f1", check, wall);
    return "covariance-check pairs=" + std::to_string(check.pairs) + " seed=" + std::to_string(c.seed) +
           ": max relative deviation " + sci(check.max_rel_deviation) + (check.max_rel_deviation <= 1e-9 ? " (<= 1e-9)" : " (> 1e-9)") +
           " wall " + sci(check.seconds) + "s";
}

struct Flags {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string preset;
    bool paper_scale = false;
    bool cv = false;
    CLI::Option* cv_opt = nullptr;
    std::string config_file;
};

// key = value file (TOML subset); [command] sections are allowed.
std::map<std::string, std::string> read_config_file(const std::string& path, Command command) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::ParseError& e) {
        throw UsageError("config: " + path + ": " + e.what());
    }
    const auto& keys = setting_keys();
    std::map<std::string, std::string> out;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == to_string(command))) continue;
        if (std::find(keys.begin(), keys.end(), item.name) == keys.end())
            throw UsageError("config: " + path + ": unknown key '" + item.name + "'");
        std::string joined;
        for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
        out[item.name] = joined;
    }
    return out;
}

void add_flags(CLI::App* sub, Flags& f) {
    struct Spec {
        const char* key;
        const char* help;
    };
    static const Spec specs[] = {
        {"hurst", "Hurst index H"},
        {"eta", "vol-of-vol eta"},
        {"maturity", "option maturity T (years)"},
        {"window", "VIX window Delta (years)"},
        {"x0", "constant initial log forward variance"},
        {"x0-interp", "interpolation for --x0-file: linear or step"},
        {"x0-file", "CSV with columns u,x0 for the initial curve"},
        {"scheme", "rect, trap, both or a comma list"},
        {"payoff", "call, put or future"},
        {"kappa", "strike in volatility units"},
        {"estimator", "mc or mlmc"},
        {"n", "grid steps (mc)"},
        {"M", "Monte Carlo samples"},
        {"epsilon", "target RMSE (mlmc)"},
        {"n0", "base grid steps (mlmc)"},
        {"plan", "auto, analytic or pilot"},
        {"probe-M", "pilot samples per level"},
        {"n-values", "comma list of grid sizes"},
        {"n-ref", "reference grid for the strong error"},
        {"reference-price", "reference price"},
        {"reference-ci", "reference price half-width"},
        {"epsilons", "comma list of tolerances"},
        {"N-mse", "replications per tolerance"},
        {"families", "comma list of mc-rect, ml-rect, ml-trap"},
        {"pairs", "random covariance pairs"},
        {"seed", "root seed"},
        {"workers", "worker threads"},
        {"batch-size", "samples per random stream"},
        {"output-dir", "artifact directory (default $RBVIX_OUTPUT_DIR or .)"},
        {"format", "csv or json"},
    };
    for (const auto& s : specs) f.options[s.key] = sub->add_option(std::string("--") + s.key, f.values[s.key], s.help);
    sub->add_option("--preset", f.preset, "fig1 (= fig1-h0.1), fig1-h0.2, fig1-h0.3, fig2 or fig3");
    sub->add_flag("--paper-scale", f.paper_scale, "use the full-size protocol of the preset");
    f.cv_opt = sub->add_flag("--cv,!--no-cv", f.cv, "lognormal control variate (mc only)");
    sub->add_option("--config", f.config_file, "key = value file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
}

RunConfig resolve(Command command, const Flags& f) {
    RunConfig c = f.preset.empty() ? RunConfig{} : preset_config(f.preset, f.paper_scale, command);
    c.command = command;
    c.paper_scale = f.paper_scale;
    if (const char* dir = std::getenv("RBVIX_OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
    const auto file = f.config_file.empty() ? std::map<std::string, std::string>{} : read_config_file(f.config_file, command);
    bool cv_given = false;
    for (const auto& key : setting_keys()) {
        const auto it = f.options.find(key);
        if (key == "cv" && f.cv_opt->count() > 0) {
            c.cv = f.cv;
        } else if (it != f.options.end() && it->second->count() > 0) {
            apply_setting(c, key, f.values.at(key));
        } else if (const auto v = file.find(key); v != file.end()) {
            apply_setting(c, key, v->second);
        } else {
            continue;
        }
        cv_given = cv_given || key == "cv";
    }
    // a preset's control variate does not carry over to an explicitly requested mlmc run
    if (c.estimator == EstimatorKind::Mlmc && !cv_given) c.cv = false;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VIX option pricing under rough Bergomi: Monte Carlo, multilevel Monte Carlo and convergence studies"};
    app.require_subcommand(1);
    const std::vector<std::pair<Command, std::string>> commands = {
        {Command::Price, "price a VIX option or future"},
        {Command::StrongError, "L2 strong error of the quadrature schemes against a fine grid"},
        {Command::WeakError, "weak error of control-variate prices against a reference"},
        {Command::MseCost, "MSE against cost for plain and multilevel Monte Carlo"},
        {Command::CovarianceCheck, "closed-form covariance against adaptive quadrature"},
    };
    std::map<CLI::App*, std::pair<Command, Flags>> subs;
    for (const auto& [command, help] : commands) {
        auto* sub = app.add_subcommand(to_string(command), help);
        auto& entry = subs[sub];
        entry.first = command;
        add_flags(sub, entry.second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        for (auto& [sub, entry] : subs) {
            if (!sub->parsed()) continue;
            const RunConfig config = resolve(entry.first, entry.second);
            Artifacts art;
            double wall = 0.0;
            std::string summary;
            switch (config.command) {
                case Command::Price: summary = run_price(config, art, wall); break;
                case Command::StrongError: summary = run_strong(config, art, wall); break;
                case Command::WeakError: summary = run_weak(config, art, wall); break;
                case Command::MseCost: summary = run_mse(config, art, wall); break;
                case Command::CovarianceCheck: summary = run_covariance(config, art, wall); break;
            }
            std::cout << summary << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
