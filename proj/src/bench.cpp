#include "ocksr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ocksr/kernels.hpp"
#include "ocksr/rng.hpp"

namespace ocksr {

namespace {

constexpr std::size_t kOutlierComponents = 3;
constexpr std::size_t kLloydMaxIters = 100;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_level(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

LabeledSet take_rows(const LabeledSet& src, const std::vector<std::size_t>& idx) {
    LabeledSet out;
    out.samples = SampleMatrix(idx.size(), src.samples.d);
    out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* row = src.samples.rows.row(idx[i]);
        std::copy(row, row + src.samples.d, out.samples.rows.row(i));
        out.labels.push_back(src.labels[idx[i]]);
    }
    out.seed = src.seed;
    out.generator = src.generator;
    return out;
}

LabeledSet take_range(const LabeledSet& src, std::size_t offset, std::size_t count) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), offset);
    return take_rows(src, idx);
}

LabeledSet concat(const LabeledSet& a, const LabeledSet& b) {
    LabeledSet out;
    out.samples = SampleMatrix(a.samples.n + b.samples.n, a.samples.d);
    for (std::size_t i = 0; i < a.samples.n; ++i)
        std::copy(a.samples.rows.row(i), a.samples.rows.row(i) + a.samples.d,
                  out.samples.rows.row(i));
    for (std::size_t i = 0; i < b.samples.n; ++i)
        std::copy(b.samples.rows.row(i), b.samples.rows.row(i) + b.samples.d,
                  out.samples.rows.row(a.samples.n + i));
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

MethodTag model_tag(SweepMethod m) {
    switch (m) {
        case SweepMethod::org: return MethodTag::org;
        case SweepMethod::tikhonov: return MethodTag::tikhonov;
        case SweepMethod::lasso: return MethodTag::lasso;
        case SweepMethod::tikhonov_plus: return MethodTag::tikhonov_plus;
        case SweepMethod::lasso_plus: return MethodTag::lasso_plus;
        case SweepMethod::kmeans_baseline: break;
    }
    throw DomainError("k-means has no model tag");
}

struct CellData {
    LabeledSet train;
    LabeledSet test;  // empty for the ranking protocol
    std::size_t planted = 0;
};

// Shared per-cell protocol: draw pools, contaminate the training set and
// (for the sweep protocol) carve out an equal-count test set.
CellData build_cell(const SweepConfig& cfg, DataSource& source, std::size_t level_idx,
                    std::size_t repeat, bool with_test) {
    const double level = cfg.levels[level_idx];
    const std::size_t n_out_train =
        static_cast<std::size_t>(std::llround(level * static_cast<double>(cfg.n_train)));
    const std::size_t n_test = with_test ? cfg.n_test_each : 0;

    const std::uint64_t data_seed = derive_seed(cfg.master_seed, level_idx, repeat, 1);
    const std::uint64_t inject_seed = derive_seed(cfg.master_seed, level_idx, repeat, 2);

    auto [targets, outliers] = source.pools(data_seed, cfg.n_train + n_test,
                                            n_out_train + n_test);
    if (targets.samples.n < cfg.n_train + n_test || outliers.samples.n < n_out_train + n_test)
        throw InsufficientPool("data source returned fewer samples than requested");

    CellData cell;
    cell.planted = n_out_train;
    const LabeledSet train_targets = take_range(targets, 0, cfg.n_train);
    const LabeledSet train_outlier_pool = take_range(outliers, 0, n_out_train);
    cell.train = inject_contamination(train_targets, train_outlier_pool, level, inject_seed);
    if (with_test) {
        const LabeledSet test_targets = take_range(targets, cfg.n_train, n_test);
        const LabeledSet test_outliers = take_range(outliers, n_out_train, n_test);
        cell.test = concat(test_targets, test_outliers);
    }
    return cell;
}

FitSpec make_fit_spec(const SweepConfig& cfg, SweepMethod method, std::size_t planted) {
    FitSpec spec;
    spec.method = model_tag(method);
    spec.sigma = cfg.sigma;
    spec.ridge = cfg.ridge;
    spec.sparsity = cfg.sparsity;
    spec.stop = cfg.stop;
    spec.tau_quantile = cfg.tau_quantile;
    if (method == SweepMethod::tikhonov_plus || method == SweepMethod::lasso_plus)
        spec.n0 = planted;
    return spec;
}

void finalize(SweepResult& result, const SweepConfig& cfg) {
    for (const SweepMethod m : cfg.methods) {
        for (const double level : cfg.levels) {
            double sum = 0.0;
            double sumsq = 0.0;
            std::size_t count = 0;
            for (const SweepRecord& r : result.records) {
                if (r.method != m || r.level != level) continue;
                sum += r.auc;
                ++count;
            }
            if (count == 0) continue;
            const double mean = sum / static_cast<double>(count);
            for (const SweepRecord& r : result.records) {
                if (r.method != m || r.level != level) continue;
                sumsq += (r.auc - mean) * (r.auc - mean);
            }
            const double sd =
                count > 1 ? std::sqrt(sumsq / static_cast<double>(count - 1)) : 0.0;
            result.aggregates.push_back({m, level, mean, sd, count});
        }
        double level_sum = 0.0;
        std::size_t level_count = 0;
        for (const SweepAggregate& a : result.aggregates) {
            if (a.method != m) continue;
            level_sum += a.mean_auc;
            ++level_count;
        }
        if (level_count > 0)
            result.method_means.emplace_back(m, level_sum / static_cast<double>(level_count));
    }
}

template <typename ScoreFn>
void run_protocol(const SweepConfig& cfg, DataSource& source, bool with_test,
                  ScoreFn&& evaluate, SweepResult& result) {
    if (cfg.repeats < 1) throw DomainError("repeats must be at least 1");
    for (const double level : cfg.levels)
        if (!(level > 0.0) || level >= 1.0)
            throw DomainError("contamination levels must lie in (0, 1)");

    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
            CellData cell;
            try {
                cell = build_cell(cfg, source, li, rep, with_test);
            } catch (const DomainError& e) {
                for (const SweepMethod m : cfg.methods)
                    result.errors.push_back({m, cfg.levels[li], rep, e.what()});
                continue;
            }
            for (const SweepMethod m : cfg.methods) {
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    auto [auc_value, iterations] = evaluate(m, cell, li, rep);
                    const auto t1 = std::chrono::steady_clock::now();
                    const double ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                    result.records.push_back(
                        {m, cfg.levels[li], rep, auc_value, iterations, ms});
                } catch (const DomainError& e) {
                    result.errors.push_back({m, cfg.levels[li], rep, e.what()});
                }
            }
        }
    }
    finalize(result, cfg);
}

}  // namespace

const char* to_string(SweepMethod m) {
    switch (m) {
        case SweepMethod::org: return "org";
        case SweepMethod::tikhonov: return "tikhonov";
        case SweepMethod::lasso: return "lasso";
        case SweepMethod::tikhonov_plus: return "tikhonov_plus";
        case SweepMethod::lasso_plus: return "lasso_plus";
        case SweepMethod::kmeans_baseline: return "kmeans_baseline";
    }
    return "org";
}

std::optional<SweepMethod> sweep_method_from_string(const std::string& s) {
    if (s == "org") return SweepMethod::org;
    if (s == "tikhonov") return SweepMethod::tikhonov;
    if (s == "lasso") return SweepMethod::lasso;
    if (s == "tikhonov_plus" || s == "tikhonov-plus") return SweepMethod::tikhonov_plus;
    if (s == "lasso_plus" || s == "lasso-plus") return SweepMethod::lasso_plus;
    if (s == "kmeans_baseline" || s == "kmeans") return SweepMethod::kmeans_baseline;
    return std::nullopt;
}

const SweepAggregate* SweepResult::find(SweepMethod m, double level) const {
    for (const SweepAggregate& a : aggregates)
        if (a.method == m && a.level == level) return &a;
    return nullptr;
}

double SweepResult::method_mean(SweepMethod m) const {
    for (const auto& [method, mean] : method_means)
        if (method == m) return mean;
    throw DomainError("no records for method");
}

LabeledSet make_synthetic(std::size_t n_target, std::size_t n_outlier, std::size_t d,
                          double separation, std::uint64_t seed) {
    if (d < 1) throw InvalidCounts("dimension must be at least 1");
    if (n_target + n_outlier == 0) throw InvalidCounts("need at least one sample");
    if (!(separation > 0.0)) throw InvalidCounts("separation must be positive");

    Rng rng(seed);
    LabeledSet out;
    out.samples = SampleMatrix(n_target + n_outlier, d);
    out.labels.assign(n_target + n_outlier, 1);
    out.seed = seed;
    out.generator = "synthetic";

    for (std::size_t i = 0; i < n_target; ++i) {
        double* row = out.samples.rows.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal();
    }
    if (n_outlier == 0) return out;

    const std::size_t components = std::min<std::size_t>(kOutlierComponents, n_outlier);
    Matrix centres(components, d);
    for (std::size_t c = 0; c < components; ++c) {
        double* centre = centres.row(c);
        double norm = 0.0;
        do {
            for (std::size_t j = 0; j < d; ++j) centre[j] = rng.normal();
            norm = norm2({centre, d});
        } while (norm == 0.0);
        for (std::size_t j = 0; j < d; ++j) centre[j] *= separation / norm;
    }
    for (std::size_t i = 0; i < n_outlier; ++i) {
        const std::size_t c = static_cast<std::size_t>(rng.below(components));
        double* row = out.samples.rows.row(n_target + i);
        for (std::size_t j = 0; j < d; ++j) row[j] = centres(c, j) + rng.normal();
        out.labels[n_target + i] = 0;
    }
    return out;
}

LabeledSet inject_contamination(const LabeledSet& targets, const LabeledSet& outliers,
                                double rate, std::uint64_t seed) {
    if (!(rate >= 0.0) || rate >= 1.0) throw DomainError("rate must lie in [0, 1)");
    const std::size_t n = targets.samples.n;
    const std::size_t n_out =
        static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    if (outliers.samples.n < n_out)
        throw InsufficientPool("outlier pool has " + std::to_string(outliers.samples.n) +
                               " samples, need " + std::to_string(n_out));
    if (n_out > 0 && outliers.samples.d != targets.samples.d)
        throw DimensionMismatch("target and outlier pools differ in dimension");

    Rng rng(seed);
    std::vector<std::size_t> target_idx(n);
    std::iota(target_idx.begin(), target_idx.end(), 0);
    rng.shuffle(target_idx);
    target_idx.resize(n - n_out);

    std::vector<std::size_t> outlier_idx(outliers.samples.n);
    std::iota(outlier_idx.begin(), outlier_idx.end(), 0);
    rng.shuffle(outlier_idx);
    outlier_idx.resize(n_out);

    LabeledSet mixed = concat(take_rows(targets, target_idx), take_rows(outliers, outlier_idx));
    for (std::size_t i = 0; i < n - n_out; ++i) mixed.labels[i] = 1;
    for (std::size_t i = n - n_out; i < n; ++i) mixed.labels[i] = 0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    LabeledSet out = take_rows(mixed, order);
    out.seed = seed;
    out.generator = targets.generator;
    return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw DimensionMismatch("scores and labels differ in length");
    std::size_t n_pos = 0;
    for (const int l : labels) n_pos += (l == 1);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClass("AUC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups, then the Mann-Whitney statistic
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    const double n1 = static_cast<double>(n_pos);
    const double n0 = static_cast<double>(n_neg);
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

std::pair<LabeledSet, LabeledSet> SyntheticSource::pools(std::uint64_t cell_seed,
                                                         std::size_t n_targets,
                                                         std::size_t n_outliers) {
    const LabeledSet all =
        make_synthetic(n_targets, n_outliers, dim_, separation_, cell_seed);
    return {take_range(all, 0, n_targets), take_range(all, n_targets, n_outliers)};
}

FixedPoolSource::FixedPoolSource(LabeledSet all) {
    std::vector<std::size_t> t_idx;
    std::vector<std::size_t> o_idx;
    for (std::size_t i = 0; i < all.labels.size(); ++i)
        (all.labels[i] == 1 ? t_idx : o_idx).push_back(i);
    targets_ = take_rows(all, t_idx);
    outliers_ = take_rows(all, o_idx);
}

std::pair<LabeledSet, LabeledSet> FixedPoolSource::pools(std::uint64_t cell_seed,
                                                         std::size_t n_targets,
                                                         std::size_t n_outliers) {
    if (targets_.samples.n < n_targets || outliers_.samples.n < n_outliers)
        throw InsufficientPool("fixed pool is too small for the requested cell");
    Rng rng(cell_seed);
    std::vector<std::size_t> t_idx(targets_.samples.n);
    std::iota(t_idx.begin(), t_idx.end(), 0);
    rng.shuffle(t_idx);
    t_idx.resize(n_targets);
    std::vector<std::size_t> o_idx(outliers_.samples.n);
    std::iota(o_idx.begin(), o_idx.end(), 0);
    rng.shuffle(o_idx);
    o_idx.resize(n_outliers);
    return {take_rows(targets_, t_idx), take_rows(outliers_, o_idx)};
}

std::vector<double> kmeans_baseline(const SampleMatrix& train, std::size_t k,
                                    const SampleMatrix& z, std::uint64_t seed) {
    const std::size_t n = train.n;
    if (k < 1 || k > n) throw InvalidK("k must lie in [1, n]");
    if (z.d != train.d) throw DimensionMismatch("query dimension differs from training data");

    Rng rng(seed);
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    rng.shuffle(pick);

    Matrix centres(k, train.d);
    for (std::size_t c = 0; c < k; ++c)
        std::copy(train.rows.row(pick[c]), train.rows.row(pick[c]) + train.d, centres.row(c));

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> prev(n, SIZE_MAX);
    for (std::size_t iter = 0; iter < kLloydMaxIters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = kernels::sqdist(train.rows.row(i), centres.row(0), train.d);
            std::size_t best_c = 0;
            for (std::size_t c = 1; c < k; ++c) {
                const double d2 = kernels::sqdist(train.rows.row(i), centres.row(c), train.d);
                if (d2 < best) {
                    best = d2;
                    best_c = c;
                }
            }
            assign[i] = best_c;
        }
        if (assign == prev) break;
        prev = assign;

        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> mean(train.d, 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                kernels::axpy(1.0, train.rows.row(i), mean.data(), train.d);
                ++count;
            }
            if (count == 0) continue;  // empty cluster keeps its centre
            for (std::size_t j = 0; j < train.d; ++j) centres(c, j) = mean[j] / count;
        }
    }

    std::vector<double> scores(z.n);
    for (std::size_t i = 0; i < z.n; ++i) {
        double best = kernels::sqdist(z.rows.row(i), centres.row(0), z.d);
        for (std::size_t c = 1; c < k; ++c)
            best = std::min(best, kernels::sqdist(z.rows.row(i), centres.row(c), z.d));
        scores[i] = -std::sqrt(best);
    }
    return scores;
}

SweepResult run_sweep(const SweepConfig& cfg, DataSource& source) {
    SweepResult result;
    auto evaluate = [&](SweepMethod m, const CellData& cell, std::size_t li,
                        std::size_t rep) -> std::pair<double, std::size_t> {
        if (m == SweepMethod::kmeans_baseline) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, li, rep, 3);
            const std::vector<double> scores =
                kmeans_baseline(cell.train.samples, cfg.kmeans_k, cell.test.samples, seed);
            return {auc(scores, cell.test.labels), 0};
        }
        const TrainedModel model =
            fit_model(cell.train.samples, make_fit_spec(cfg, m, cell.planted));
        const std::vector<double> scores = score(model, cell.test.samples);
        return {auc(scores, cell.test.labels), model.fit_report.iterations};
    };
    run_protocol(cfg, source, /*with_test=*/true, evaluate, result);
    return result;
}

SweepResult run_ranking(const SweepConfig& cfg, DataSource& source) {
    SweepResult result;
    auto evaluate = [&](SweepMethod m, const CellData& cell, std::size_t li,
                        std::size_t rep) -> std::pair<double, std::size_t> {
        if (m == SweepMethod::kmeans_baseline) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, li, rep, 3);
            const std::vector<double> scores =
                kmeans_baseline(cell.train.samples, cfg.kmeans_k, cell.train.samples, seed);
            return {auc(scores, cell.train.labels), 0};
        }
        const TrainedModel model =
            fit_model(cell.train.samples, make_fit_spec(cfg, m, cell.planted));
        const std::vector<double> responses = score(model, model.train_samples);
        return {auc(responses, cell.train.labels), model.fit_report.iterations};
    };
    run_protocol(cfg, source, /*with_test=*/false, evaluate, result);
    return result;
}

void write_records_csv(const SweepResult& result, std::ostream& out) {
    out << "method,level,repeat,auc,iterations,wall_ms\n";
    char ms[40];
    for (const SweepRecord& r : result.records) {
        std::snprintf(ms, sizeof(ms), "%.3f", r.wall_ms);
        out << to_string(r.method) << ',' << fmt_level(r.level) << ',' << r.repeat << ','
            << fmt17(r.auc) << ',' << r.iterations << ',' << ms << '\n';
    }
}

void write_summary_csv(const SweepResult& result, std::ostream& out) {
    out << "method,level,mean_auc,std_auc\n";
    for (const SweepAggregate& a : result.aggregates)
        out << to_string(a.method) << ',' << fmt_level(a.level) << ',' << fmt17(a.mean_auc)
            << ',' << fmt17(a.std_auc) << '\n';
}

void write_plot_data(const SweepResult& result, std::ostream& out) {
    SweepMethod current{};
    bool first = true;
    for (const SweepAggregate& a : result.aggregates) {
        if (first || a.method != current) {
            if (!first) out << '\n';
            out << "# method " << to_string(a.method) << '\n';
            current = a.method;
            first = false;
        }
        out << fmt_level(a.level) << '\t' << fmt17(a.mean_auc) << '\t' << fmt17(a.std_auc)
            << '\n';
    }
}

}  // namespace ocksr
