#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "descore/bootstrap.hpp"
#include "descore/decorrelate.hpp"
#include "descore/errors.hpp"
#include "descore/inference.hpp"
#include "descore/io.hpp"
#include "descore/simulation.hpp"

namespace descore {

namespace {

using json = nlohmann::json;

struct AnalysisOptions {
    std::string data_path;
    std::string response = "y";
    std::vector<std::string> interest;
    std::string family = "gaussian";
    double sigma2 = 1.0;
    std::string penalty = "l1";
    std::string method = "lasso-quadratic";
    std::string nuisance = "full";
    std::optional<double> lambda;
    std::optional<double> lambda_prime;
    double lambda_prime_c = 0.5;
    bool cv_lambda_prime = false;
    int folds = 10;
    std::uint64_t seed = 0;
    std::string output;

    double alpha = 0.05;
    std::string alternative = "two-sided";
    std::string variance = "model";
    double level = 0.95;
    int B = 1000;
    bool rescaled = false;
};

struct SimulateOptions {
    std::string preset = "table1";
    std::optional<Index> n, d, s;
    std::optional<double> rho, alpha;
    std::optional<std::string> pattern;
    std::vector<double> thetas;
    std::optional<int> reps;
    std::uint64_t seed = 1;
    std::optional<int> threads;
    std::string statistic = "model_info";
    std::string method = "lasso-quadratic";
    bool ci = false;
    std::string output;
    std::string dump_dataset;
};

void add_analysis_options(CLI::App* cmd, AnalysisOptions& o) {
    cmd->add_option("--data", o.data_path, "Headered CSV file")->required();
    cmd->add_option("--response", o.response, "Response column name");
    cmd->add_option("--interest", o.interest, "Interest column names or 0-based covariate indices")
        ->required()
        ->delimiter(',');
    cmd->add_option("--family", o.family, "gaussian | gaussian-unknown-var | logistic | poisson");
    cmd->add_option("--sigma2", o.sigma2, "Noise variance for the gaussian family");
    cmd->add_option("--penalty", o.penalty, "l1 | scad | mcp");
    cmd->add_option("--method", o.method, "lasso-quadratic | lasso-residual | dantzig");
    cmd->add_option("--nuisance-source", o.nuisance, "full | null");
    cmd->add_option("--lambda", o.lambda, "Penalty level (cross-validated when omitted)");
    cmd->add_option("--lambda-prime", o.lambda_prime, "Direction penalty level");
    cmd->add_option("--lambda-prime-c", o.lambda_prime_c, "Constant c in lambda' = c sqrt(log d / n)");
    cmd->add_flag("--cv-lambda-prime", o.cv_lambda_prime, "Cross-validate lambda'");
    cmd->add_option("--folds", o.folds, "Cross-validation folds");
    cmd->add_option("--seed", o.seed, "Seed for folds and bootstrap draws");
    cmd->add_option("--output", o.output, "Write the JSON result here instead of stdout");
}

std::string format_json(const json& j) { return j.dump(2) + "\n"; }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty())
        out << text;
    else
        write_file_atomic(path, text);
}

struct Prepared {
    Dataset data;
    ModelFamily family;
    DecorrelatedFit fit;
};

Prepared prepare(const AnalysisOptions& o) {
    ModelFamily family = family_from_name(o.family, o.sigma2);
    PenaltyConfig pen;
    pen.kind = penalty_kind_from_name(o.penalty);
    DirectionMethod method = direction_method_from_name(o.method);
    NuisanceSource source;
    if (o.nuisance == "full")
        source = NuisanceSource::FullFit;
    else if (o.nuisance == "null")
        source = NuisanceSource::NullConstrainedFit;
    else
        throw InvalidArgument("unknown nuisance source '" + o.nuisance + "'");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InvalidArgument("--alpha must lie in (0, 1)");

    Dataset data = read_dataset(o.data_path, o.response, o.interest);
    TuningPolicy tuning;
    tuning.lambda = o.lambda;
    tuning.lambda_prime = o.lambda_prime;
    tuning.lambda_prime_c = o.lambda_prime_c;
    tuning.cv_lambda_prime = o.cv_lambda_prime;
    tuning.folds = o.folds;
    tuning.seed = o.seed;
    DecorrelatedFit fit = build_decorrelated_fit(data, family, pen, method, tuning, source);
    return Prepared{std::move(data), family, std::move(fit)};
}

json common_fields(const Prepared& p, const AnalysisOptions& o) {
    json j;
    j["n"] = p.data.n();
    j["d"] = p.data.d();
    j["interest"] = p.data.interest();
    j["family"] = p.family.name();
    j["method"] = direction_method_name(p.fit.method);
    j["lambda"] = p.fit.lambda;
    j["lambda_prime"] = p.fit.lambda_prime;
    j["fit_converged"] = p.fit.fit_converged;
    j["seed"] = o.seed;
    return j;
}

int cmd_test(const AnalysisOptions& o, std::ostream& out) {
    Prepared p = prepare(o);
    Alternative alt = alternative_from_name(o.alternative);
    std::string variance = o.variance;
    if (variance == "auto") variance = p.family.kind() == FamilyKind::GaussianUnknownVar ? "plugin" : "model";
    TestResult r;
    if (variance == "model")
        r = score_test(p.fit, p.data.n(), o.alpha, alt);
    else if (variance == "plugin") {
        if (!p.family.is_gaussian()) throw InvalidArgument("--variance plugin requires a gaussian family");
        r = score_test_unknown_sigma(p.data, p.fit, o.alpha, alt);
    } else if (variance == "sandwich")
        r = sandwich_test(p.data, p.family, p.fit, o.alpha, alt);
    else
        throw InvalidArgument("unknown variance '" + o.variance + "'");
    json j = common_fields(p, o);
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["alpha"] = r.alpha;
    j["alternative"] = alternative_name(r.alternative);
    j["variance_kind"] = variance_kind_name(r.variance_kind);
    j["s_hat"] = p.fit.s_hat(0);
    j["info_hat"] = p.fit.info_hat(0, 0);
    emit(o.output, format_json(j), out);
    return 0;
}

int cmd_ci(const AnalysisOptions& o, std::ostream& out) {
    Prepared p = prepare(o);
    OneStepEstimate e = one_step(p.fit, p.data.n(), o.level);
    json j = common_fields(p, o);
    j["theta_hat"] = p.fit.theta_hat(0);
    j["theta_tilde"] = e.theta_tilde;
    j["std_err"] = e.std_err;
    j["ci_lower"] = e.ci_lower;
    j["ci_upper"] = e.ci_upper;
    j["level"] = e.level;
    emit(o.output, format_json(j), out);
    return 0;
}

int cmd_group(const AnalysisOptions& o, std::ostream& out) {
    Prepared p = prepare(o);
    GroupTestResult g = group_test(p.fit, p.data.n(), o.alpha, o.B, o.seed, o.rescaled);
    json j = common_fields(p, o);
    j["t_stat"] = g.t_stat;
    j["critical_value"] = g.critical_value;
    j["p_value"] = g.p_value_boot;
    j["reject"] = g.reject;
    j["alpha"] = o.alpha;
    j["B"] = g.B;
    j["rescaled"] = g.rescaled;
    j["per_coordinate"] = std::vector<double>(g.per_coordinate.data(), g.per_coordinate.data() + g.per_coordinate.size());
    emit(o.output, format_json(j), out);
    return 0;
}

SimConfig preset_config(const std::string& preset, std::vector<double>& thetas) {
    SimConfig c;
    c.n = 200;
    c.d = 100;
    c.rho = 0.25;
    c.s = 2;
    c.reps = 500;
    c.pattern = BetaPattern::Dirac;
    thetas = {0.0};
    if (preset == "table1") {
    } else if (preset == "table2") {
        c.d = 500;
        c.s = 3;
    } else if (preset == "table3") {
        c.family = SimFamily::Logistic;
        c.tuning.cv_lambda_prime = true;
    } else if (preset == "figure1") {
        thetas.clear();
        for (int k = 0; k <= 11; ++k) thetas.push_back(0.05 * k);
    } else {
        throw InvalidArgument("unknown preset '" + preset + "'");
    }
    return c;
}

SimStatistic statistic_from_name(const std::string& s) {
    if (s == "model_info") return SimStatistic::ModelInfo;
    if (s == "plugin_sigma") return SimStatistic::PluginSigma;
    if (s == "sandwich") return SimStatistic::Sandwich;
    if (s == "bootstrap") return SimStatistic::Bootstrap;
    throw InvalidArgument("unknown statistic '" + s + "'");
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    std::vector<double> thetas;
    SimConfig c = preset_config(o.preset, thetas);
    if (o.n) c.n = *o.n;
    if (o.d) c.d = *o.d;
    if (o.s) c.s = *o.s;
    if (o.rho) c.rho = *o.rho;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.reps) c.reps = *o.reps;
    if (o.pattern) {
        if (*o.pattern == "dirac")
            c.pattern = BetaPattern::Dirac;
        else if (*o.pattern == "uniform")
            c.pattern = BetaPattern::Uniform;
        else
            throw InvalidArgument("unknown pattern '" + *o.pattern + "'");
    }
    if (!o.thetas.empty()) thetas = o.thetas;
    c.seed = o.seed;
    c.statistic = statistic_from_name(o.statistic);
    c.method = direction_method_from_name(o.method);
    c.compute_ci = o.ci;
    c.compute_all = false;
    if (o.threads) {
        c.threads = *o.threads;
    } else if (const char* env = std::getenv("DESCORE_THREADS")) {
        try {
            c.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw InvalidArgument("DESCORE_THREADS must be an integer");
        }
    }
    if (c.threads < 1) throw InvalidArgument("thread count must be >= 1");
    c.validate();

    if (!o.dump_dataset.empty()) {
        SimConfig first = c;
        first.theta_true = thetas.front();
        SimDataset sim = generate_dataset(first, substream_seed(c.seed, 0));
        write_file_atomic(o.dump_dataset, format_dataset_csv(sim.data));
    }

    std::ostringstream csv;
    csv.precision(10);
    csv << "preset,family,n,d,rho,s,pattern,theta,reps,alpha,seed,statistic,rejection_rate,mc_se,"
           "coverage_rate,mean_ci_width,failure_count,reps_ok,wall_time\n";
    for (double theta : thetas) {
        SimConfig run = c;
        run.theta_true = theta;
        SimulationReport r = run_size_power(run);
        csv << o.preset << ',' << (c.family == SimFamily::Linear ? "linear" : "logistic") << ',' << c.n << ',' << c.d
            << ',' << c.rho << ',' << c.s << ',' << (c.pattern == BetaPattern::Dirac ? "dirac" : "uniform") << ','
            << theta << ',' << c.reps << ',' << c.alpha << ',' << c.seed << ',' << sim_statistic_name(c.statistic)
            << ',' << r.rejection_rate << ',' << r.mc_se << ',';
        if (c.compute_ci)
            csv << r.coverage_rate << ',' << r.mean_ci_width;
        else
            csv << ',';
        csv << ',' << r.failure_count << ',' << r.reps_ok << ',' << r.wall_time << '\n';
    }
    emit(o.output, csv.str(), out);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decorrelated score inference for sparse high-dimensional regression", "descore"};
    app.require_subcommand(1);

    AnalysisOptions test_o, ci_o, group_o;
    SimulateOptions sim_o;

    CLI::App* test = app.add_subcommand("test", "Decorrelated score test for one coefficient");
    add_analysis_options(test, test_o);
    test->add_option("--alpha", test_o.alpha, "Significance level");
    test->add_option("--alternative", test_o.alternative, "two-sided | greater | less");
    test->add_option("--variance", test_o.variance, "model | plugin | sandwich | auto");

    CLI::App* ci = app.add_subcommand("ci", "One-step estimate and confidence interval");
    add_analysis_options(ci, ci_o);
    ci->add_option("--level", ci_o.level, "Confidence level");

    CLI::App* group = app.add_subcommand("group-test", "Multiplier-bootstrap test of several coefficients");
    add_analysis_options(group, group_o);
    group->add_option("--alpha", group_o.alpha, "Significance level");
    group->add_option("--B", group_o.B, "Bootstrap draws");
    group->add_flag("--rescaled", group_o.rescaled, "Standardize coordinates by the information diagonal");

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo size/power sweep");
    sim->add_option("--preset", sim_o.preset, "table1 | table2 | table3 | figure1");
    sim->add_option("--n", sim_o.n);
    sim->add_option("--d", sim_o.d);
    sim->add_option("--s", sim_o.s);
    sim->add_option("--rho", sim_o.rho);
    sim->add_option("--alpha", sim_o.alpha);
    sim->add_option("--pattern", sim_o.pattern, "dirac | uniform");
    sim->add_option("--theta", sim_o.thetas, "True coefficient(s) of the tested coordinate")->delimiter(',');
    sim->add_option("--reps", sim_o.reps);
    sim->add_option("--seed", sim_o.seed);
    sim->add_option("--threads", sim_o.threads, "Worker threads (falls back to DESCORE_THREADS)");
    sim->add_option("--statistic", sim_o.statistic, "model_info | plugin_sigma | sandwich | bootstrap");
    sim->add_option("--method", sim_o.method, "lasso-quadratic | lasso-residual | dantzig");
    sim->add_flag("--ci", sim_o.ci, "Also record one-step interval coverage");
    sim->add_option("--output", sim_o.output, "Write the CSV here instead of stdout");
    sim->add_option("--dump-dataset", sim_o.dump_dataset, "Write the first replication's data as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (test->parsed()) return cmd_test(test_o, out);
        if (ci->parsed()) return cmd_ci(ci_o, out);
        if (group->parsed()) return cmd_group(group_o, out);
        if (sim->parsed()) return cmd_simulate(sim_o, out);
    } catch (const InvalidArgument& e) {
        err << e.name() << ": " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        err << e.name() << ": " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace descore
