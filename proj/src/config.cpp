#include "rbvix/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rbvix {

namespace {

const double kX0Default = std::log(0.235 * 0.235);

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(key + ": expected a number, got '" + text + "'");
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    // Accept integral values written in floating notation, e.g. 1e5.
    const double d = parse_double(key, text);
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<Int>(d);
    throw UsageError(key + ": expected an integer, got '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw UsageError(key + ": expected true or false, got '" + text + "'");
}

std::vector<SchemeKind> parse_schemes(const std::string& text) {
    if (text == "both") return {SchemeKind::Rectangle, SchemeKind::Trapezoid};
    std::vector<SchemeKind> out;
    for (const auto& s : split_list(text)) out.push_back(scheme_from_string(s));
    return out;
}

nlohmann::json curve_json(const ForwardCurve& c) {
    if (c.is_constant()) return c.constant_value();
    return {{"knots", c.knots()}, {"values", c.values()}, {"interpolation", to_string(c.interpolation())}};
}

ForwardCurve curve_from_json(const nlohmann::json& j) {
    if (j.is_number()) return ForwardCurve(j.get<double>());
    return ForwardCurve(j.at("knots").get<std::vector<double>>(), j.at("values").get<std::vector<double>>(),
                        interpolation_from_string(j.at("interpolation").get<std::string>()));
}

bool analytic_plan_ok(const RunConfig& c) {
    return c.model.hurst < 0.5 && c.model.has_flat_x0() && c.payoff == PayoffKind::Call;
}

bool uses_plan(const RunConfig& c) {
    if (c.command == Command::Price) return c.estimator == EstimatorKind::Mlmc;
    if (c.command == Command::MseCost)
        return std::any_of(c.families.begin(), c.families.end(),
                           [](EstimatorFamily f) { return f != EstimatorFamily::McRect; });
    return false;
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Price: return "price";
        case Command::StrongError: return "strong-error";
        case Command::WeakError: return "weak-error";
        case Command::MseCost: return "mse-cost";
        case Command::CovarianceCheck: return "covariance-check";
    }
    return "price";
}

Command command_from_string(const std::string& name) {
    for (auto c : {Command::Price, Command::StrongError, Command::WeakError, Command::MseCost, Command::CovarianceCheck})
        if (to_string(c) == name) return c;
    throw UsageError("command: unknown '" + name + "'");
}

Payoff RunConfig::payoff_spec() const {
    if (payoff == PayoffKind::Future) return Payoff::future();
    if (!kappa) throw UsageError("kappa: strike required for " + to_string(payoff) + " payoffs");
    return {payoff, *kappa};
}

std::vector<std::string> RunConfig::violations() const {
    std::vector<std::string> out = model.violations();
    auto need = [&](bool ok, const std::string& message) {
        if (!ok) out.push_back(message);
    };
    const bool prices = command == Command::Price || command == Command::WeakError || command == Command::MseCost;
    if (prices && payoff != PayoffKind::Future) {
        need(kappa.has_value(), "kappa: strike required for " + to_string(payoff) + " payoffs");
        if (kappa) need(*kappa > 0.0 && std::isfinite(*kappa), "kappa: strike must be > 0");
    }
    need(workers >= 1, "workers: must be >= 1");
    need(batch_size >= 1, "batch-size: must be >= 1");
    need(format == "csv" || format == "json", "format: expected csv or json");
    need(!schemes.empty(), "scheme: at least one scheme required");

    switch (command) {
        case Command::Price:
            need(schemes.size() == 1, "scheme: price takes a single scheme");
            if (estimator == EstimatorKind::Mc) {
                need(n >= 1, "n: must be >= 1");
                need(M >= 2, "M: must be >= 2");
            } else {
                need(!cv, "cv: the control variate is only available with --estimator mc");
            }
            break;
        case Command::StrongError:
            need(!n_values.empty(), "n-values: required");
            need(n_ref >= 1, "n-ref: must be >= 1");
            for (auto v : n_values)
                need(v >= 1 && n_ref >= 1 && n_ref % v == 0,
                     "n-values: " + std::to_string(v) + " does not divide n-ref = " + std::to_string(n_ref));
            need(M >= 2, "M: must be >= 2");
            break;
        case Command::WeakError:
            need(!n_values.empty(), "n-values: required");
            for (auto v : n_values) need(v >= 1, "n-values: entries must be >= 1");
            need(M >= 2, "M: must be >= 2");
            need(reference_price.has_value(), "reference-price: required for weak-error");
            need(reference_ci >= 0.0, "reference-ci: must be >= 0");
            break;
        case Command::MseCost:
            need(!epsilons.empty(), "epsilons: required");
            for (double e : epsilons) need(e > 0.0, "epsilons: entries must be > 0");
            need(N_mse >= 2, "N-mse: must be >= 2");
            need(reference_price.has_value(), "reference-price: required for mse-cost");
            need(!families.empty(), "families: at least one estimator family required");
            break;
        case Command::CovarianceCheck: need(pairs >= 1, "pairs: must be >= 1"); break;
    }

    if (uses_plan(*this)) {
        need(command != Command::Price || epsilon > 0.0, "epsilon: must be > 0");
        need(n0 >= 1, "n0: must be >= 1");
        need(probe_M >= 100, "probe-M: must be >= 100");
        if (plan == PlanMode::Analytic && model.violations().empty())
            need(analytic_plan_ok(*this),
                 "plan: the analytic MLMC plan needs H < 1/2, X0 constant on [T, T+Delta] and a call or put "
                 "payoff (the strong-error constant is only available then); use --plan pilot or --plan auto");
    }
    return out;
}

void RunConfig::validate() const {
    const auto problems = violations();
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw UsageError(msg.str());
}

std::vector<std::string> preset_names() { return {"fig1", "fig1-h0.1", "fig1-h0.2", "fig1-h0.3", "fig2", "fig3"}; }

RunConfig preset_config(const std::string& name, bool paper_scale, Command command) {
    RunConfig c;
    c.command = command;
    c.preset = name;
    c.paper_scale = paper_scale;
    c.model.eta = 0.5;
    c.model.window = 1.0 / 12.0;
    c.model.x0 = kX0Default;
    if (name == "fig1" || name.starts_with("fig1-h")) {
        // fig1 is the H = 0.1 member of the strong-error family
        if (name == "fig1" || name == "fig1-h0.1") c.model.hurst = 0.1;
        else if (name == "fig1-h0.2") c.model.hurst = 0.2;
        else if (name == "fig1-h0.3") c.model.hurst = 0.3;
        else throw UsageError("preset: unknown '" + name + "' (strong-error presets are fig1-h0.1, fig1-h0.2, fig1-h0.3)");
        c.model.maturity = 0.5;
        c.schemes = {SchemeKind::Rectangle, SchemeKind::Trapezoid};
        c.kappa = 0.1;
        if (paper_scale) {
            c.n_ref = 2000;
            c.M = 100000;
            c.n_values = {10, 20, 40, 80, 125, 250, 500};
        } else {
            c.n_ref = 512;
            c.M = 20000;
            c.n_values = {8, 16, 32, 64};
        }
        c.n = c.n_ref;
    } else if (name == "fig2") {
        c.model.hurst = 0.3;
        c.model.maturity = 0.25;
        c.kappa = 0.1;
        c.schemes = {SchemeKind::Rectangle, SchemeKind::Trapezoid};
        c.n_values = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
        c.reference_price = 0.13093742;
        c.reference_ci = 5e-8;
        c.cv = true;
        c.M = paper_scale ? 10000000 : 4000000;
        if (command == Command::Price) {
            c.schemes = {SchemeKind::Rectangle};
            c.n = 400;
            c.M = paper_scale ? 3000000 : 100000;
        }
    } else if (name == "fig3") {
        c.model.hurst = 0.1;
        c.model.maturity = 0.5;
        c.kappa = 0.1;
        c.reference_price = 0.121971;
        c.reference_ci = 6e-7;
        c.epsilons = {0.04, 0.02, 0.01, 0.005};
        c.N_mse = paper_scale ? 400 : 100;
        c.n0 = 6;
        c.epsilon = 0.01;
        c.schemes = {SchemeKind::Rectangle};
        c.cv = command == Command::Price;
        c.n = paper_scale ? 500 : 250;
        c.M = paper_scale ? 10000000 : 200000;
    } else {
        throw UsageError("preset: unknown '" + name + "' (expected fig1, fig1-h0.1, fig1-h0.2, fig1-h0.3, fig2 or fig3)");
    }
    return c;
}

const std::vector<std::string>& setting_keys() {
    static const std::vector<std::string> keys = {
        "hurst",  "eta",       "maturity",  "window",          "x0",           "x0-interp", "x0-file",
        "scheme", "payoff",    "kappa",     "estimator",       "n",            "M",         "cv",
        "epsilon", "n0",       "plan",      "probe-M",         "n-values",     "n-ref",     "reference-price",
        "reference-ci", "epsilons", "N-mse", "families",       "pairs",        "seed",      "workers",
        "batch-size", "output-dir", "format"};
    return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "hurst") c.model.hurst = parse_double(key, value);
    else if (key == "eta") c.model.eta = parse_double(key, value);
    else if (key == "maturity") c.model.maturity = parse_double(key, value);
    else if (key == "window") c.model.window = parse_double(key, value);
    else if (key == "x0") c.model.x0 = parse_double(key, value);
    else if (key == "x0-interp") c.x0_interp = interpolation_from_string(value);
    else if (key == "x0-file") c.model.x0 = ForwardCurve::from_csv(value, c.x0_interp);
    else if (key == "scheme") c.schemes = parse_schemes(value);
    else if (key == "payoff") c.payoff = payoff_kind_from_string(value);
    else if (key == "kappa") c.kappa = parse_double(key, value);
    else if (key == "estimator") {
        if (value == "mc") c.estimator = EstimatorKind::Mc;
        else if (value == "mlmc") c.estimator = EstimatorKind::Mlmc;
        else throw UsageError("estimator: expected mc or mlmc, got '" + value + "'");
    } else if (key == "n") c.n = parse_int<Eigen::Index>(key, value);
    else if (key == "M") c.M = parse_int<std::int64_t>(key, value);
    else if (key == "cv") c.cv = parse_bool(key, value);
    else if (key == "epsilon") c.epsilon = parse_double(key, value);
    else if (key == "n0") c.n0 = parse_int<Eigen::Index>(key, value);
    else if (key == "plan") c.plan = plan_mode_from_string(value);
    else if (key == "probe-M") c.probe_M = parse_int<std::int64_t>(key, value);
    else if (key == "n-values") {
        c.n_values.clear();
        for (const auto& v : split_list(value)) c.n_values.push_back(parse_int<Eigen::Index>(key, v));
    } else if (key == "n-ref") c.n_ref = parse_int<Eigen::Index>(key, value);
    else if (key == "reference-price") c.reference_price = parse_double(key, value);
    else if (key == "reference-ci") c.reference_ci = parse_double(key, value);
    else if (key == "epsilons") {
        c.epsilons.clear();
        for (const auto& v : split_list(value)) c.epsilons.push_back(parse_double(key, v));
    } else if (key == "N-mse") c.N_mse = parse_int<int>(key, value);
    else if (key == "families") {
        c.families.clear();
        for (const auto& v : split_list(value)) c.families.push_back(family_from_string(v));
    } else if (key == "pairs") c.pairs = parse_int<int>(key, value);
    else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "workers") c.workers = parse_int<int>(key, value);
    else if (key == "batch-size") c.batch_size = parse_int<Eigen::Index>(key, value);
    else if (key == "output-dir") c.output_dir = value;
    else if (key == "format") c.format = value;
    else throw UsageError("unknown setting '" + key + "'");
}

void to_json(nlohmann::json& j, const RunConfig& c) {
    std::vector<std::string> schemes, families;
    for (auto s : c.schemes) schemes.push_back(to_string(s));
    for (auto f : c.families) families.push_back(to_string(f));
    j = {{"command", to_string(c.command)},
         {"preset", c.preset},
         {"paper_scale", c.paper_scale},
         {"model",
          {{"hurst", c.model.hurst},
           {"eta", c.model.eta},
           {"maturity", c.model.maturity},
           {"window", c.model.window},
           {"x0", curve_json(c.model.x0)}}},
         {"x0_interp", to_string(c.x0_interp)},
         {"schemes", schemes},
         {"payoff", to_string(c.payoff)},
         {"kappa", c.kappa ? nlohmann::json(*c.kappa) : nlohmann::json(nullptr)},
         {"estimator", c.estimator == EstimatorKind::Mc ? "mc" : "mlmc"},
         {"n", c.n},
         {"M", c.M},
         {"cv", c.cv},
         {"epsilon", c.epsilon},
         {"n0", c.n0},
         {"plan", to_string(c.plan)},
         {"probe_M", c.probe_M},
         {"n_values", c.n_values},
         {"n_ref", c.n_ref},
         {"reference_price", c.reference_price ? nlohmann::json(*c.reference_price) : nlohmann::json(nullptr)},
         {"reference_ci", c.reference_ci},
         {"epsilons", c.epsilons},
         {"N_mse", c.N_mse},
         {"families", families},
         {"pairs", c.pairs},
         {"seed", c.seed},
         {"workers", c.workers},
         {"batch_size", c.batch_size},
         {"output_dir", c.output_dir},
         {"format", c.format}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    c = RunConfig{};
    c.command = command_from_string(j.at("command").get<std::string>());
    j.at("preset").get_to(c.preset);
    j.at("paper_scale").get_to(c.paper_scale);
    const auto& m = j.at("model");
    m.at("hurst").get_to(c.model.hurst);
    m.at("eta").get_to(c.model.eta);
    m.at("maturity").get_to(c.model.maturity);
    m.at("window").get_to(c.model.window);
    c.model.x0 = curve_from_json(m.at("x0"));
    c.x0_interp = interpolation_from_string(j.at("x0_interp").get<std::string>());
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(scheme_from_string(s.get<std::string>()));
    c.payoff = payoff_kind_from_string(j.at("payoff").get<std::string>());
    if (!j.at("kappa").is_null()) c.kappa = j.at("kappa").get<double>();
    c.estimator = j.at("estimator").get<std::string>() == "mc" ? EstimatorKind::Mc : EstimatorKind::Mlmc;
    j.at("n").get_to(c.n);
    j.at("M").get_to(c.M);
    j.at("cv").get_to(c.cv);
    j.at("epsilon").get_to(c.epsilon);
    j.at("n0").get_to(c.n0);
    c.plan = plan_mode_from_string(j.at("plan").get<std::string>());
    j.at("probe_M").get_to(c.probe_M);
    j.at("n_values").get_to(c.n_values);
    j.at("n_ref").get_to(c.n_ref);
    if (!j.at("reference_price").is_null()) c.reference_price = j.at("reference_price").get<double>();
    j.at("reference_ci").get_to(c.reference_ci);
    j.at("epsilons").get_to(c.epsilons);
    j.at("N_mse").get_to(c.N_mse);
    c.families.clear();
    for (const auto& f : j.at("families")) c.families.push_back(family_from_string(f.get<std::string>()));
    j.at("pairs").get_to(c.pairs);
    j.at("seed").get_to(c.seed);
    j.at("workers").get_to(c.workers);
    j.at("batch_size").get_to(c.batch_size);
    j.at("output_dir").get_to(c.output_dir);
    j.at("format").get_to(c.format);
}

}  // namespace rbvix
