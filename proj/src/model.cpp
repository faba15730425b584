#include "ocksr/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ocksr {

namespace {

constexpr double kSparseZero = 1e-12;  // below this a coefficient is stored as zero

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

bool is_sparse_method(MethodTag m) {
    return m == MethodTag::lasso || m == MethodTag::lasso_plus;
}

// Accumulates the stored numeric payload in a fixed order so the writer and
// the reader arrive at bitwise-identical sums.
class Checksum {
public:
    void add(double v) { sum_ += v; }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
};

std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line))
        throw MalformedModelFile(std::string("unexpected end of model file, expected ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_kv(const std::vector<std::string>& toks, std::size_t i, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (i >= toks.size() || toks[i].rfind(prefix, 0) != 0)
        throw MalformedModelFile(std::string("model header is missing ") + key + "=");
    double v = 0.0;
    if (!parse_double(toks[i].substr(prefix.size()), v))
        throw MalformedModelFile(std::string("model header has a bad value for ") + key);
    return v;
}

}  // namespace

const char* to_string(MethodTag tag) {
    switch (tag) {
        case MethodTag::org: return "org";
        case MethodTag::tikhonov: return "tikhonov";
        case MethodTag::lasso: return "lasso";
        case MethodTag::tikhonov_plus: return "tikhonov_plus";
        case MethodTag::lasso_plus: return "lasso_plus";
    }
    return "org";
}

std::optional<MethodTag> method_tag_from_string(const std::string& s) {
    if (s == "org") return MethodTag::org;
    if (s == "tikhonov") return MethodTag::tikhonov;
    if (s == "lasso") return MethodTag::lasso;
    if (s == "tikhonov_plus") return MethodTag::tikhonov_plus;
    if (s == "lasso_plus") return MethodTag::lasso_plus;
    return std::nullopt;
}

TrainedModel fit_model(const SampleMatrix& train, const FitSpec& spec) {
    TrainedModel model;
    model.train_samples = train;
    model.params = spec.sigma ? KernelParams{*spec.sigma} : median_bandwidth(train);
    model.method = spec.method;

    const GramMatrix gram = gram_matrix(train, model.params);
    const ResponseVector ones = init_labels(train.n, 0);

    switch (spec.method) {
        case MethodTag::org: {
            std::vector<double> y(train.n, 1.0);
            model.alpha = fit_ocksr_baseline(gram, y);
            model.delta = 0.0;
            break;
        }
        case MethodTag::tikhonov: {
            FitResult fit = alternate_fit_tikhonov(gram, ones, spec.ridge, spec.stop);
            model.alpha = std::move(fit.alpha);
            model.fit_report = std::move(fit.report);
            model.delta = model.fit_report.delta_used;
            break;
        }
        case MethodTag::lasso: {
            FitResult fit = alternate_fit_lasso(gram, ones, spec.sparsity, spec.stop);
            model.alpha = std::move(fit.alpha);
            model.fit_report = std::move(fit.report);
            model.delta = model.fit_report.delta_used;
            break;
        }
        case MethodTag::tikhonov_plus:
        case MethodTag::lasso_plus: {
            std::variant<RidgeConfig, SparsityTarget> reg;
            if (spec.method == MethodTag::tikhonov_plus)
                reg = spec.ridge;
            else
                reg = spec.sparsity;
            FitResult fit = alternate_fit_known_fraction(gram, spec.n0, reg, spec.stop);
            model.alpha = std::move(fit.alpha);
            model.fit_report = std::move(fit.report);
            model.delta = model.fit_report.delta_used;
            for (std::size_t i = 0; i < fit.labels.y.size(); ++i)
                if (fit.labels.y[i] == 0.0) model.identified_outliers.push_back(i);
            break;
        }
    }

    const std::vector<double> train_responses = score(model, train);
    model.tau = calibrate_threshold(train_responses, spec.tau_quantile);
    return model;
}

std::vector<double> score(const TrainedModel& model, const SampleMatrix& z) {
    if (z.d != model.train_samples.d)
        throw DimensionMismatch("query feature dimension differs from the model");
    const std::size_t n = model.train_samples.n;
    if (model.alpha.alpha.size() != n)
        throw DimensionMismatch("model coefficients do not match its training set");
    std::vector<double> out(z.n, 0.0);
    for (std::size_t i = 0; i < z.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = model.alpha.alpha[j];
            if (a == 0.0) continue;
            s += a * rbf_kernel(z.sample(i), model.train_samples.sample(j), model.params);
        }
        out[i] = s;
    }
    return out;
}

std::vector<int> decide(std::span<const double> scores, double tau) {
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= tau ? 1 : 0;
    return labels;
}

RankedList rank_training(const TrainedModel& model) {
    const std::vector<double> responses = score(model, model.train_samples);
    RankedList ranked;
    ranked.order.resize(responses.size());
    std::iota(ranked.order.begin(), ranked.order.end(), 0);
    std::sort(ranked.order.begin(), ranked.order.end(), [&](std::size_t a, std::size_t b) {
        if (responses[a] != responses[b]) return responses[a] > responses[b];
        return a < b;
    });
    ranked.responses.reserve(responses.size());
    for (const std::size_t i : ranked.order) ranked.responses.push_back(responses[i]);
    return ranked;
}

double calibrate_threshold(std::span<const double> train_responses, double quantile) {
    if (train_responses.empty()) throw EmptyInput("no responses to calibrate from");
    if (!(quantile >= 0.0) || quantile > 1.0)
        throw DomainError("quantile must lie in [0, 1]");
    std::vector<double> sorted(train_responses.begin(), train_responses.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = quantile * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void save_model(const TrainedModel& model, std::ostream& sink) {
    const std::size_t n = model.train_samples.n;
    const std::size_t d = model.train_samples.d;
    if (model.alpha.alpha.size() != n)
        throw DimensionMismatch("model coefficients do not match its training set");

    Checksum sum;
    sum.add(model.params.sigma);
    sum.add(model.tau);
    sum.add(model.delta);

    sink << "OCKSR v1 " << to_string(model.method) << " n=" << n << " d=" << d
         << " sigma=" << fmt17(model.params.sigma) << " tau=" << fmt17(model.tau)
         << " delta=" << fmt17(model.delta) << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = model.train_samples.rows.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            sum.add(row[j]);
            sink << (j ? " " : "") << fmt17(row[j]);
        }
        sink << '\n';
    }
    if (is_sparse_method(model.method)) {
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < n; ++j)
            if (std::fabs(model.alpha.alpha[j]) >= kSparseZero) nz.push_back(j);
        sink << "sparse k=" << nz.size() << '\n';
        for (const std::size_t j : nz) {
            sum.add(static_cast<double>(j));
            sum.add(model.alpha.alpha[j]);
            sink << j << ' ' << fmt17(model.alpha.alpha[j]) << '\n';
        }
    } else {
        sink << "dense\n";
        for (std::size_t j = 0; j < n; ++j) {
            sum.add(model.alpha.alpha[j]);
            sink << fmt17(model.alpha.alpha[j]) << '\n';
        }
    }
    sink << fmt17(sum.value()) << '\n';
    if (!sink) throw MalformedModelFile("failed to write model");
}

TrainedModel load_model(std::istream& source) {
    const std::string header = expect_line(source, "header");
    const std::vector<std::string> toks = split_ws(header);
    if (toks.size() != 8 || toks[0] != "OCKSR")
        throw MalformedModelFile("not an OCKSR model file");
    if (toks[1] != "v1") throw MalformedModelFile("unsupported model version " + toks[1]);
    const std::optional<MethodTag> tag = method_tag_from_string(toks[2]);
    if (!tag) throw MalformedModelFile("unknown method tag " + toks[2]);

    const double nd = parse_kv(toks, 3, "n");
    const double dd = parse_kv(toks, 4, "d");
    if (nd < 1 || dd < 1 || nd != std::floor(nd) || dd != std::floor(dd))
        throw MalformedModelFile("model header has invalid dimensions");
    const auto n = static_cast<std::size_t>(nd);
    const auto dim = static_cast<std::size_t>(dd);

    TrainedModel model;
    model.method = *tag;
    model.params.sigma = parse_kv(toks, 5, "sigma");
    model.tau = parse_kv(toks, 6, "tau");
    model.delta = parse_kv(toks, 7, "delta");
    if (!(model.params.sigma > 0.0))
        throw MalformedModelFile("model bandwidth must be positive");

    Checksum sum;
    sum.add(model.params.sigma);
    sum.add(model.tau);
    sum.add(model.delta);

    model.train_samples = SampleMatrix(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<std::string> row = split_ws(expect_line(source, "training row"));
        if (row.size() != dim)
            throw MalformedModelFile("training row " + std::to_string(i) + " has " +
                                     std::to_string(row.size()) + " values, expected " +
                                     std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            double v = 0.0;
            if (!parse_double(row[j], v))
                throw MalformedModelFile("bad number in training row " + std::to_string(i));
            model.train_samples.rows(i, j) = v;
            sum.add(v);
        }
    }

    const std::vector<std::string> kind = split_ws(expect_line(source, "coefficient block"));
    model.alpha.alpha.assign(n, 0.0);
    model.alpha.unit_norm = (*tag != MethodTag::org);
    if (kind.size() == 1 && kind[0] == "dense") {
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            if (!parse_double(expect_line(source, "coefficient"), v))
                throw MalformedModelFile("bad dense coefficient " + std::to_string(j));
            model.alpha.alpha[j] = v;
            sum.add(v);
        }
    } else if (kind.size() == 2 && kind[0] == "sparse" && kind[1].rfind("k=", 0) == 0) {
        double kd = 0.0;
        if (!parse_double(kind[1].substr(2), kd) || kd < 0 || kd != std::floor(kd) || kd > nd)
            throw MalformedModelFile("bad sparse coefficient count");
        const auto k = static_cast<std::size_t>(kd);
        for (std::size_t p = 0; p < k; ++p) {
            const std::vector<std::string> entry = split_ws(expect_line(source, "sparse entry"));
            double idx = 0.0;
            double v = 0.0;
            if (entry.size() != 2 || !parse_double(entry[0], idx) || !parse_double(entry[1], v) ||
                idx < 0 || idx != std::floor(idx) || idx >= nd)
                throw MalformedModelFile("bad sparse entry " + std::to_string(p));
            model.alpha.alpha[static_cast<std::size_t>(idx)] = v;
            sum.add(idx);
            sum.add(v);
        }
    } else {
        throw MalformedModelFile("expected 'dense' or 'sparse k=<count>'");
    }

    const std::vector<std::string> check = split_ws(expect_line(source, "checksum"));
    double stored = 0.0;
    if (check.size() != 1 || !parse_double(check[0], stored))
        throw MalformedModelFile("missing checksum line");
    if (stored != sum.value())
        throw MalformedModelFile("checksum mismatch: stored " + check[0] + ", recomputed " +
                                 fmt17(sum.value()));
    return model;
}

void save_model_file(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    save_model(model, out);
}

TrainedModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return load_model(in);
}

}  // namespace ocksr
