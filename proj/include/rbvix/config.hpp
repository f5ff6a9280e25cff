#pragma once

#include "rbvix/estimators.hpp"
#include "rbvix/experiments.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rbvix {

enum class Command { Price, StrongError, WeakError, MseCost, CovarianceCheck };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

enum class EstimatorKind { Mc, Mlmc };

/// Everything a run needs, fully resolved before any computation.
struct RunConfig {
    Command command = Command::Price;
    std::string preset;
    bool paper_scale = false;

    ModelParams model;
    /// Interpolation applied when x0 is read from a file.
    Interpolation x0_interp = Interpolation::Linear;
    std::vector<SchemeKind> schemes{SchemeKind::Rectangle};
    PayoffKind payoff = PayoffKind::Call;
    std::optional<double> kappa;

    EstimatorKind estimator = EstimatorKind::Mc;
    Eigen::Index n = 100;
    std::int64_t M = 10000;
    bool cv = false;
    double epsilon = 0.01;
    Eigen::Index n0 = 6;
    PlanMode plan = PlanMode::Auto;
    std::int64_t probe_M = 10000;

    // Experiments
    std::vector<Eigen::Index> n_values;
    Eigen::Index n_ref = 512;
    std::optional<double> reference_price;
    double reference_ci = 0.0;
    std::vector<double> epsilons;
    int N_mse = 100;
    std::vector<EstimatorFamily> families{EstimatorFamily::McRect, EstimatorFamily::MlRect, EstimatorFamily::MlTrap};
    int pairs = 100;

    std::uint64_t seed = 0;
    int workers = 1;
    Eigen::Index batch_size = 1024;
    std::string output_dir = ".";
    std::string format = "csv";

    Payoff payoff_spec() const;
    SimulationOptions simulation() const { return {workers, batch_size}; }
    StreamKey stream_key() const { return {seed, 0, 0, 0}; }

    /// Every problem, each prefixed by the offending field.
    std::vector<std::string> violations() const;
    /// Throws UsageError listing all violations at once.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// fig1 (strong error), fig2 (weak error) or fig3 (MSE vs cost); desk scale unless paper_scale.
RunConfig preset_config(const std::string& name, bool paper_scale, Command command);
std::vector<std::string> preset_names();

/// Sets one field from its textual form; keys match the CLI long flags without dashes.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Keys accepted by apply_setting, in the order they must be applied (x0-interp before x0-file).
const std::vector<std::string>& setting_keys();

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace rbvix
