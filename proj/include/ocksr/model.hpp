#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocksr/trainer.hpp"

namespace ocksr {

enum class MethodTag { org, tikhonov, lasso, tikhonov_plus, lasso_plus };

const char* to_string(MethodTag tag);
std::optional<MethodTag> method_tag_from_string(const std::string& s);

// The deployable artifact: training samples, kernel bandwidth, expansion
// weights and a decision threshold.
struct TrainedModel {
    SampleMatrix train_samples;
    KernelParams params;
    Coefficients alpha;  // unit norm except for the org baseline
    double tau = 0.0;
    MethodTag method = MethodTag::org;
    double delta = 0.0;  // resolved ridge delta / last implied lasso penalty
    FitReport fit_report;
    std::vector<std::size_t> identified_outliers;  // known-fraction variants only
};

// Training indices ordered by response, highest first.
struct RankedList {
    std::vector<std::size_t> order;
    std::vector<double> responses;  // non-increasing, aligned with order
};

struct FitSpec {
    MethodTag method = MethodTag::tikhonov;
    std::optional<double> sigma;  // absent -> median pairwise-distance heuristic
    RidgeConfig ridge;
    SparsityTarget sparsity{0.9};
    std::size_t n0 = 0;  // known contamination count for the _plus variants
    StopRule stop;
    double tau_quantile = 0.05;
};

// Fits the requested method on a training set and calibrates the threshold
// from the training responses.
TrainedModel fit_model(const SampleMatrix& train, const FitSpec& spec);

// f(z_i) = sum_j alpha_j kappa(z_i, x_j); terms with alpha_j == 0 are skipped,
// so sparse models only touch their stored atoms.
std::vector<double> score(const TrainedModel& model, const SampleMatrix& z);

// 1 where score >= tau, else 0 (the boundary counts as a target).
std::vector<int> decide(std::span<const double> scores, double tau);

// Training responses sorted descending; ties keep the smaller index first.
RankedList rank_training(const TrainedModel& model);

// Empirical quantile of the training responses, interpolated linearly
// between order statistics.
double calibrate_threshold(std::span<const double> train_responses, double quantile);

// Versioned line-oriented text format; values are printed with 17 significant
// digits so the round-trip is bit exact. Lasso-family models store only the
// nonzero coefficients.
void save_model(const TrainedModel& model, std::ostream& sink);
TrainedModel load_model(std::istream& source);

void save_model_file(const TrainedModel& model, const std::string& path);
TrainedModel load_model_file(const std::string& path);

}  // namespace ocksr
