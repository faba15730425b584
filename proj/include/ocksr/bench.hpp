#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocksr/model.hpp"

namespace ocksr {

// Samples with ground-truth labels (1 = target, 0 = outlier), kept for
// evaluation only.
struct LabeledSet {
    SampleMatrix samples;
    std::vector<int> labels;
    std::uint64_t seed = 0;
    std::string generator;
};

enum class SweepMethod { org, tikhonov, lasso, tikhonov_plus, lasso_plus, kmeans_baseline };

const char* to_string(SweepMethod m);
std::optional<SweepMethod> sweep_method_from_string(const std::string& s);

struct SweepConfig {
    std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t repeats = 10;
    std::vector<SweepMethod> methods{SweepMethod::org, SweepMethod::tikhonov,
                                     SweepMethod::lasso};
    std::uint64_t master_seed = 42;

    // synthetic fixture geometry (ignored by fixed-pool sources)
    std::size_t n_train = 100;
    std::size_t n_test_each = 50;  // test targets and test outliers
    std::size_t dim = 10;
    double separation = 6.0;

    // per-method settings
    RidgeConfig ridge;
    SparsityTarget sparsity{0.9};
    std::size_t kmeans_k = 5;
    StopRule stop;
    std::optional<double> sigma;  // absent -> median heuristic per training set
    double tau_quantile = 0.05;
};

struct SweepRecord {
    SweepMethod method;
    double level;
    std::size_t repeat;
    double auc;
    std::size_t iterations;
    double wall_ms;
};

struct SweepError {
    SweepMethod method;
    double level;
    std::size_t repeat;
    std::string message;
};

struct SweepAggregate {
    SweepMethod method;
    double level;
    double mean_auc;
    double std_auc;  // sample standard deviation over repeats
    std::size_t count;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::vector<SweepError> errors;
    std::vector<SweepAggregate> aggregates;
    // grand mean per method: unweighted mean of the per-level means
    std::vector<std::pair<SweepMethod, double>> method_means;

    const SweepAggregate* find(SweepMethod m, double level) const;
    double method_mean(SweepMethod m) const;
};

// Supplies target/outlier pools for one sweep cell.
class DataSource {
public:
    virtual ~DataSource() = default;
    virtual std::pair<LabeledSet, LabeledSet> pools(std::uint64_t cell_seed,
                                                    std::size_t n_targets,
                                                    std::size_t n_outliers) = 0;
};

// Fresh Gaussian draws per cell: targets at the origin, outliers around a few
// component centres at the configured separation.
class SyntheticSource : public DataSource {
public:
    SyntheticSource(std::size_t dim, double separation) : dim_(dim), separation_(separation) {}
    std::pair<LabeledSet, LabeledSet> pools(std::uint64_t cell_seed, std::size_t n_targets,
                                            std::size_t n_outliers) override;

private:
    std::size_t dim_;
    double separation_;
};

// Deterministically resamples a user-provided labelled pool per cell.
class FixedPoolSource : public DataSource {
public:
    explicit FixedPoolSource(LabeledSet all);
    std::pair<LabeledSet, LabeledSet> pools(std::uint64_t cell_seed, std::size_t n_targets,
                                            std::size_t n_outliers) override;

private:
    LabeledSet targets_;
    LabeledSet outliers_;
};

// Targets ~ N(0, I); outliers from a small mixture of unit-variance
// Gaussians whose centres sit at `separation` from the origin in seeded
// random directions. Target rows come first.
LabeledSet make_synthetic(std::size_t n_target, std::size_t n_outlier, std::size_t d,
                          double separation, std::uint64_t seed);

// Training set of |targets| samples in which round(rate * n) randomly chosen
// targets are replaced by distinct pool outliers; the result is shuffled.
LabeledSet inject_contamination(const LabeledSet& targets, const LabeledSet& outliers,
                                double rate, std::uint64_t seed);

// Mann-Whitney AUC with half credit for ties.
double auc(std::span<const double> scores, std::span<const int> labels);

// The contamination-sweep protocol: per (level, repeat) cell a fresh
// train/test split, one fit per method on the contaminated training set,
// AUC on a held-out test set with equal class counts.
SweepResult run_sweep(const SweepConfig& cfg, DataSource& source);

// Ranking protocol: methods rank the (contaminated) training set itself and
// the AUC is computed against the true training labels.
SweepResult run_ranking(const SweepConfig& cfg, DataSource& source);

// Lloyd k-means from seeded random centers; scores are negated distances to
// the nearest centre.
std::vector<double> kmeans_baseline(const SampleMatrix& train, std::size_t k,
                                    const SampleMatrix& z, std::uint64_t seed);

void write_records_csv(const SweepResult& result, std::ostream& out);
void write_summary_csv(const SweepResult& result, std::ostream& out);
void write_plot_data(const SweepResult& result, std::ostream& out);

}  // namespace ocksr
