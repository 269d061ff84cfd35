#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descore/decorrelate.hpp"
#include "descore/inference.hpp"

namespace descore {

enum class BetaPattern { Dirac, Uniform };
enum class SimFamily { Linear, Logistic };
enum class NoiseKind { Homoscedastic, Heteroscedastic };
enum class SimStatistic { ModelInfo, PluginSigma, Sandwich, Bootstrap };

std::string sim_statistic_name(SimStatistic s);

struct SimConfig {
    Index n = 200;
    Index d = 100;
    double rho = 0.25;
    Index s = 2;
    BetaPattern pattern = BetaPattern::Dirac;
    double uniform_lo = 0.0;
    double uniform_hi = 2.0;
    SimFamily family = SimFamily::Linear;
    double theta_true = 0.0;
    int reps = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;

    Index d0 = 1;                        // interest coordinates 0..d0-1, all equal to theta_true
    std::optional<Index> support_offset; // first support index; defaults to d0
    NoiseKind noise = NoiseKind::Homoscedastic;
    Index hetero_column = 1;             // eps_i = (0.5 + |Q_i,hetero_column|) N(0,1)

    DirectionMethod method = DirectionMethod::LassoQuadratic;
    PenaltyKind penalty = PenaltyKind::L1;
    TuningPolicy tuning;                 // seed is overwritten per replication
    SolverConfig solver;

    SimStatistic statistic = SimStatistic::ModelInfo;
    bool compute_ci = false;
    bool compute_all = true;             // evaluate every applicable statistic per replication
    int bootstrap_B = 1000;
    bool bootstrap_rescaled = false;
    int threads = 1;

    void validate() const;
    Index support_start() const { return support_offset ? *support_offset : d0; }
};

struct SimDataset {
    Dataset data;
    Vector beta_true;
};

/// Draws Q ~ N(0, Sigma) with Sigma_jk = rho^|j-k| and the response from the configured model.
SimDataset generate_dataset(const SimConfig& cfg, std::uint64_t rep_seed);

/// Lower Cholesky factor of the Toeplitz covariance.
Matrix toeplitz_cholesky(Index d, double rho);

struct RepOutcome {
    bool ok = false;
    std::string error;
    std::map<std::string, bool> rejects;  // keyed by sim_statistic_name
    bool covered = false;
    double ci_width = 0.0;
    double p_value = 1.0;  // of the selected statistic
    double statistic = 0.0;
};

struct SimulationReport {
    SimConfig config;
    double rejection_rate = 0.0;
    double mc_se = 0.0;
    std::map<std::string, double> rates;
    double coverage_rate = 0.0;
    double mean_ci_width = 0.0;
    int failure_count = 0;
    int reps_ok = 0;
    std::vector<std::uint64_t> rep_seeds;
    std::vector<double> p_values;  // selected statistic, successful replications in order
    double wall_time = 0.0;
};

/// Replication hook: returns whether the test rejects. Used to swap in custom procedures.
using RepFunction = std::function<RepOutcome(const SimConfig&, const SimDataset&, std::uint64_t)>;

/// One replication with the built-in pipeline.
RepOutcome run_replication(const SimConfig& cfg, const SimDataset& sim, std::uint64_t rep_seed);

SimulationReport run_size_power(const SimConfig& cfg, const RepFunction& rep = {});

/// Partial information of coordinate 0 under the Toeplitz design with unit noise.
double population_partial_information(Index d, double rho);

struct LocalPowerCheck {
    double empirical_power = 0.0;
    double predicted_power = 0.0;
    double c_tilde = 0.0;
    double info = 0.0;
    SimulationReport report;
};

/// Runs the configuration at theta = c / sqrt(n) and compares with the local power formula.
LocalPowerCheck run_local_power_check(const SimConfig& cfg, double c_tilde);

}  // namespace descore
