// Command-line front end: fit / score / rank / delta-opt / sweep / gen-data.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ocksr/bench.hpp"
#include "ocksr/csv.hpp"
#include "ocksr/model.hpp"

namespace {

using namespace ocksr;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct InputFlags {
    bool header = false;
    std::string label_col;  // name or 0-based index; stripped from the features
    bool normalize = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
    cmd->add_flag("--header", flags.header, "First CSV row is a header (default: off)");
    cmd->add_option("--label-col", flags.label_col,
                    "Label column to strip, by name (needs --header) or 0-based index "
                    "(default: none)");
    cmd->add_flag("--normalize", flags.normalize,
                  "Scale every sample to unit l2 norm before use (default: off)");
}

CsvData read_input(const std::string& path, const InputFlags& flags) {
    CsvOptions opts;
    opts.header = flags.header;
    if (!flags.label_col.empty()) {
        const bool numeric = std::all_of(flags.label_col.begin(), flags.label_col.end(),
                                         [](unsigned char c) { return std::isdigit(c); });
        if (numeric)
            opts.label_index = static_cast<std::size_t>(std::stoull(flags.label_col));
        else
            opts.label_name = flags.label_col;
    }
    CsvData data = load_csv(path, opts);
    if (flags.normalize) data.samples = normalize_features(data.samples);
    return data;
}

std::optional<double> parse_sigma(const std::string& s) {
    if (s == "median") return std::nullopt;
    return std::stod(s);
}

void apply_delta_flag(const std::string& s, RidgeConfig& cfg) {
    if (s == "auto") {
        cfg.delta_mode = DeltaMode::optimal_normalized;
    } else if (s == "auto-general") {
        cfg.delta_mode = DeltaMode::optimal_general;
    } else {
        cfg.delta_mode = DeltaMode::explicit_value;
        cfg.delta = std::stod(s);
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string train_path;
    std::string output = "model.ocksr";
    std::string method = "tikhonov";
    std::string delta = "auto";
    double sparsity = 0.9;
    std::size_t n0 = 0;
    std::string sigma = "median";
    double tol = 1e-6;
    std::size_t max_iter = 100;
    double tau_quantile = 0.05;
    InputFlags input;
};

int cmd_fit(const FitArgs& args) {
    const CsvData data = read_input(args.train_path, args.input);

    std::string method_key = args.method;
    for (char& c : method_key)
        if (c == '-') c = '_';
    const std::optional<MethodTag> tag = method_tag_from_string(method_key);
    if (!tag) throw IoError("unknown method '" + args.method + "'");

    FitSpec spec;
    spec.method = *tag;
    spec.sigma = parse_sigma(args.sigma);
    apply_delta_flag(args.delta, spec.ridge);
    spec.sparsity = SparsityTarget{args.sparsity};
    spec.n0 = args.n0;
    spec.stop = StopRule{args.tol, args.max_iter};
    spec.tau_quantile = args.tau_quantile;

    const TrainedModel model = fit_model(data.samples, spec);
    save_model_file(model, args.output);

    std::size_t zeros = 0;
    for (const double a : model.alpha.alpha) zeros += (a == 0.0);
    std::cout << "method: " << to_string(model.method) << '\n'
              << "samples: " << model.train_samples.n << " x " << model.train_samples.d << '\n'
              << "sigma: " << fmt17(model.params.sigma) << '\n'
              << "delta: " << fmt17(model.delta) << '\n'
              << "iterations: " << model.fit_report.iterations << '\n'
              << "final_error: "
              << (model.fit_report.error_trace.empty()
                      ? "n/a"
                      : fmt17(model.fit_report.error_trace.back()))
              << '\n'
              << "converged: " << (model.fit_report.converged ? "yes" : "no") << '\n'
              << "zero_coefficients: " << zeros << " of " << model.alpha.alpha.size() << '\n'
              << "tau: " << fmt17(model.tau) << '\n';
    for (const std::string& flag : model.fit_report.substitution_flags)
        std::cout << "flag: " << flag << '\n';
    if (!model.identified_outliers.empty()) {
        std::cout << "identified_outliers:";
        for (const std::size_t i : model.identified_outliers) std::cout << ' ' << i;
        std::cout << '\n';
    }
    std::cout << "model: " << args.output << '\n';
    return 0;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
    std::string model_path;
    std::string query_path;
    std::string output;  // empty -> stdout
    double tau = 0.0;
    bool tau_set = false;
    InputFlags input;
};

int cmd_score(const ScoreArgs& args) {
    const TrainedModel model = load_model_file(args.model_path);
    const CsvData data = read_input(args.query_path, args.input);
    const std::vector<double> scores = score(model, data.samples);
    const double tau = args.tau_set ? args.tau : model.tau;
    const std::vector<int> labels = decide(scores, tau);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.output.empty()) {
        file = open_output(args.output);
        out = &file;
    }
    *out << "index,score,decision\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        *out << i << ',' << fmt17(scores[i]) << ',' << labels[i] << '\n';
    return 0;
}

// ---------------------------------------------------------------- rank

struct RankArgs {
    std::string model_path;
    std::string output;
};

int cmd_rank(const RankArgs& args) {
    const TrainedModel model = load_model_file(args.model_path);
    const RankedList ranked = rank_training(model);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.output.empty()) {
        file = open_output(args.output);
        out = &file;
    }
    *out << "rank,index,response\n";
    for (std::size_t r = 0; r < ranked.order.size(); ++r)
        *out << r + 1 << ',' << ranked.order[r] << ',' << fmt17(ranked.responses[r]) << '\n';
    return 0;
}

// ---------------------------------------------------------------- delta-opt

struct DeltaOptArgs {
    std::string train_path;
    std::string sigma = "median";
    InputFlags input;
};

int cmd_delta_opt(const DeltaOptArgs& args) {
    const CsvData data = read_input(args.train_path, args.input);
    const std::optional<double> sigma = parse_sigma(args.sigma);
    const KernelParams params = sigma ? KernelParams{*sigma} : median_bandwidth(data.samples);
    const GramMatrix gram = gram_matrix(data.samples, params);
    const EigenSummary es = extreme_eigenvalues(gram.matrix);
    if (!(es.lambda_min > 0.0))
        throw InvalidSpectrum("kernel matrix is numerically singular");

    const DeltaChoice general = delta_opt_general(es);
    const DeltaChoice normalized = delta_opt_normalized(es.lambda_min / es.lambda_max);

    std::cout << "sigma: " << fmt17(params.sigma) << '\n'
              << "lambda_min: " << fmt17(es.lambda_min) << '\n'
              << "lambda_max: " << fmt17(es.lambda_max) << '\n'
              << "condition: " << fmt17(es.condition) << '\n'
              << "delta_opt_general: " << fmt17(general.delta)
              << (general.floored ? " (floored)" : "") << '\n'
              << "delta_opt_normalized: " << fmt17(normalized.delta)
              << (normalized.floored ? " (floored)" : "") << '\n';
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string out_prefix = "sweep";
    std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t repeats = 10;
    std::vector<std::string> methods{"org", "tikhonov", "lasso"};
    std::uint64_t seed = 42;
    std::size_t n_train = 100;
    std::size_t n_test = 50;
    std::size_t dim = 10;
    double separation = 6.0;
    std::string sigma = "median";
    std::string delta = "auto";
    double sparsity = 0.9;
    std::size_t kmeans_k = 5;
    double tol = 1e-6;
    std::size_t max_iter = 100;
    bool ranking = false;
    std::string data_path;  // empty -> synthetic fixture
    InputFlags input;
};

int cmd_sweep(const SweepArgs& args) {
    SweepConfig cfg;
    cfg.levels = args.levels;
    cfg.repeats = args.repeats;
    cfg.master_seed = args.seed;
    cfg.n_train = args.n_train;
    cfg.n_test_each = args.n_test;
    cfg.dim = args.dim;
    cfg.separation = args.separation;
    cfg.sigma = parse_sigma(args.sigma);
    apply_delta_flag(args.delta, cfg.ridge);
    cfg.sparsity = SparsityTarget{args.sparsity};
    cfg.kmeans_k = args.kmeans_k;
    cfg.stop = StopRule{args.tol, args.max_iter};

    cfg.methods.clear();
    for (const std::string& name : args.methods) {
        const std::optional<SweepMethod> m = sweep_method_from_string(name);
        if (!m) throw IoError("unknown sweep method '" + name + "'");
        cfg.methods.push_back(*m);
    }

    SweepResult result;
    if (args.data_path.empty()) {
        SyntheticSource source(cfg.dim, cfg.separation);
        result = args.ranking ? run_ranking(cfg, source) : run_sweep(cfg, source);
    } else {
        const CsvData data = read_input(args.data_path, args.input);
        if (!data.labels)
            throw IoError("sweep over a CSV pool needs --label-col");
        FixedPoolSource source(LabeledSet{data.samples, *data.labels, args.seed, "csv"});
        result = args.ranking ? run_ranking(cfg, source) : run_sweep(cfg, source);
    }

    auto records = open_output(args.out_prefix + "_records.csv");
    write_records_csv(result, records);
    auto summary = open_output(args.out_prefix + "_summary.csv");
    write_summary_csv(result, summary);
    auto plot = open_output(args.out_prefix + "_plot.txt");
    write_plot_data(result, plot);

    std::cout << "records: " << result.records.size() << " -> " << args.out_prefix
              << "_records.csv\n";
    for (const SweepAggregate& a : result.aggregates) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-16s level %.2f  mean AUC %.4f  std %.4f",
                      to_string(a.method), a.level, a.mean_auc, a.std_auc);
        std::cout << line << '\n';
    }
    for (const auto& [method, mean] : result.method_means) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-16s overall mean AUC %.4f", to_string(method),
                      mean);
        std::cout << line << '\n';
    }
    if (!result.errors.empty()) {
        std::cerr << result.errors.size() << " cell(s) failed:\n";
        for (const SweepError& e : result.errors)
            std::cerr << "  " << to_string(e.method) << " level " << e.level << " repeat "
                      << e.repeat << ": " << e.message << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
    std::string output = "data.csv";
    std::size_t n_target = 100;
    std::size_t n_outlier = 100;
    std::size_t dim = 10;
    double separation = 6.0;
    std::uint64_t seed = 42;
    bool with_labels = false;
    bool header = false;
};

int cmd_gen_data(const GenDataArgs& args) {
    const LabeledSet set =
        make_synthetic(args.n_target, args.n_outlier, args.dim, args.separation, args.seed);
    write_csv(args.output, set.samples, args.with_labels ? &set.labels : nullptr, args.header);
    std::cout << "wrote " << set.samples.n << " x " << set.samples.d << " samples to "
              << args.output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust one-class kernel spectral regression"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Plain key = value file; command-line flags take precedence");

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Fit a one-class model on a training CSV");
    fit->add_option("train", fit_args.train_path, "Training CSV")->required();
    fit->add_option("-o,--output", fit_args.output, "Model file to write")
        ->capture_default_str();
    fit->add_option("--method", fit_args.method,
                    "org | tikhonov | lasso | tikhonov-plus | lasso-plus")
        ->capture_default_str();
    fit->add_option("--delta", fit_args.delta,
                    "Ridge weight: auto (unit spectral norm), auto-general, or a number")
        ->capture_default_str();
    fit->add_option("--sparsity", fit_args.sparsity,
                    "Fraction of zero coefficients for the lasso methods")
        ->capture_default_str();
    fit->add_option("--n0", fit_args.n0,
                    "Known contamination count for the -plus methods (default: 0)");
    fit->add_option("--sigma", fit_args.sigma, "RBF bandwidth: median or a number")
        ->capture_default_str();
    fit->add_option("--tol", fit_args.tol, "Convergence tolerance on ||delta alpha||")
        ->capture_default_str();
    fit->add_option("--max-iter", fit_args.max_iter, "Iteration cap")->capture_default_str();
    fit->add_option("--tau-quantile", fit_args.tau_quantile,
                    "Training-response quantile for the stored threshold")
        ->capture_default_str();
    add_input_flags(fit, fit_args.input);

    ScoreArgs score_args;
    CLI::App* score_cmd = app.add_subcommand("score", "Score query samples under a model");
    score_cmd->add_option("--model,-m", score_args.model_path, "Model file")->required();
    score_cmd->add_option("query", score_args.query_path, "Query CSV")->required();
    score_cmd->add_option("-o,--output", score_args.output,
                          "Output CSV (default: standard output)");
    score_cmd->add_option("--tau", score_args.tau, "Decision threshold override")
        ->each([&](const std::string&) { score_args.tau_set = true; });
    add_input_flags(score_cmd, score_args.input);

    RankArgs rank_args;
    CLI::App* rank_cmd =
        app.add_subcommand("rank", "Rank the model's training samples by conformity");
    rank_cmd->add_option("--model,-m", rank_args.model_path, "Model file")->required();
    rank_cmd->add_option("-o,--output", rank_args.output,
                         "Output CSV (default: standard output)");

    DeltaOptArgs delta_args;
    CLI::App* delta_cmd = app.add_subcommand(
        "delta-opt", "Report the kernel spectrum and the sensitivity-optimal ridge weights");
    delta_cmd->add_option("train", delta_args.train_path, "Training CSV")->required();
    delta_cmd->add_option("--sigma", delta_args.sigma, "RBF bandwidth: median or a number")
        ->capture_default_str();
    add_input_flags(delta_cmd, delta_args.input);

    SweepArgs sweep_args;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Contamination sweep over methods and levels");
    sweep_cmd->add_option("-o,--output", sweep_args.out_prefix, "Output file prefix")
        ->capture_default_str();
    sweep_cmd->add_option("--levels", sweep_args.levels, "Contamination fractions")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--repeats", sweep_args.repeats, "Repetitions per level")
        ->capture_default_str();
    sweep_cmd
        ->add_option("--methods", sweep_args.methods,
                     "Subset of org,tikhonov,lasso,tikhonov-plus,lasso-plus,kmeans")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_args.seed, "Master seed; all randomness flows from it")
        ->capture_default_str();
    sweep_cmd->add_option("--n-train", sweep_args.n_train, "Training-set size")
        ->capture_default_str();
    sweep_cmd->add_option("--n-test", sweep_args.n_test, "Test samples per class")
        ->capture_default_str();
    sweep_cmd->add_option("--dim", sweep_args.dim, "Synthetic feature dimension")
        ->capture_default_str();
    sweep_cmd->add_option("--separation", sweep_args.separation, "Synthetic outlier distance")
        ->capture_default_str();
    sweep_cmd->add_option("--sigma", sweep_args.sigma, "RBF bandwidth: median or a number")
        ->capture_default_str();
    sweep_cmd->add_option("--delta", sweep_args.delta, "auto | auto-general | number")
        ->capture_default_str();
    sweep_cmd->add_option("--sparsity", sweep_args.sparsity, "Lasso zero fraction")
        ->capture_default_str();
    sweep_cmd->add_option("--kmeans-k", sweep_args.kmeans_k, "Cluster count for the baseline")
        ->capture_default_str();
    sweep_cmd->add_option("--tol", sweep_args.tol, "Fit tolerance")->capture_default_str();
    sweep_cmd->add_option("--max-iter", sweep_args.max_iter, "Fit iteration cap")
        ->capture_default_str();
    sweep_cmd->add_flag("--ranking", sweep_args.ranking,
                        "Rank the training set instead of scoring a test set (default: off)");
    sweep_cmd->add_option("--data", sweep_args.data_path,
                          "Labelled CSV pool instead of the synthetic fixture");
    add_input_flags(sweep_cmd, sweep_args.input);

    GenDataArgs gen_args;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic labelled data set");
    gen_cmd->add_option("-o,--output", gen_args.output, "Output CSV")->capture_default_str();
    gen_cmd->add_option("--n-target", gen_args.n_target, "Target sample count")
        ->capture_default_str();
    gen_cmd->add_option("--n-outlier", gen_args.n_outlier, "Outlier sample count")
        ->capture_default_str();
    gen_cmd->add_option("--dim", gen_args.dim, "Feature dimension")->capture_default_str();
    gen_cmd->add_option("--separation", gen_args.separation, "Outlier centre distance")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen_args.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_flag("--with-labels", gen_args.with_labels,
                      "Append a {0,1} label column (default: off)");
    gen_cmd->add_flag("--header", gen_args.header, "Write a header row (default: off)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_args);
        if (score_cmd->parsed()) return cmd_score(score_args);
        if (rank_cmd->parsed()) return cmd_rank(rank_args);
        if (delta_cmd->parsed()) return cmd_delta_opt(delta_args);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
        if (gen_cmd->parsed()) return cmd_gen_data(gen_args);
    } catch (const ocksr::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ocksr::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
