#include "freespec/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freespec/error.hpp"
#include "freespec/quadrature.hpp"
#include "freespec/rng.hpp"

namespace freespec {

MeasurementWindow::MeasurementWindow(Matrix data, std::vector<std::string> channel_labels)
    : data_(std::move(data)), labels_(std::move(channel_labels)) {
    if (data_.rows() < 2)
        throw InvalidArgument(fmt::format("window needs N >= 2 channels, got {}", data_.rows()));
    if (data_.cols() < data_.rows())
        throw InvalidArgument(fmt::format(
            "window needs T >= N (ratio c = N/T in (0, 1]), got N = {}, T = {}", data_.rows(),
            data_.cols()));
    if (!data_.allFinite()) throw InvalidArgument("window contains non-finite entries");
    if (!labels_.empty() && Eigen::Index(labels_.size()) != data_.rows())
        throw InvalidArgument(fmt::format("{} channel labels for {} channels", labels_.size(),
                                          data_.rows()));
}

MeasurementWindow MeasurementWindow::columns(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > n_samples())
        throw InvalidArgument(fmt::format("column range [{}, {}) outside window of {} samples",
                                          first, first + count, n_samples()));
    return MeasurementWindow(data_.middleCols(first, count), labels_);
}

std::vector<double> EsdHistogram::normalized_heights() const {
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double width = bin_edges[i + 1] - bin_edges[i];
        out[i] = double(counts[i]) / (double(total_eigenvalues) * width);
    }
    return out;
}

double MpParams::lower_edge() const {
    const double s = 1.0 - std::sqrt(ratio);
    return variance * s * s;
}

double MpParams::upper_edge() const {
    const double s = 1.0 + std::sqrt(ratio);
    return variance * s * s;
}

void validate(const MpParams& params) {
    if (!(params.ratio > 0.0 && params.ratio <= 1.0))
        throw InvalidArgument(fmt::format("MP ratio must lie in (0, 1], got {}", params.ratio));
    if (!(params.variance > 0.0) || !std::isfinite(params.variance))
        throw InvalidArgument(fmt::format("MP variance must be positive, got {}", params.variance));
}

MeasurementWindow sample_gaussian_matrix(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
    if (n < 2 || t < n)
        throw InvalidArgument(
            fmt::format("sample_gaussian_matrix needs n >= 2 and t >= n, got n = {}, t = {}", n, t));
    Matrix data(n, t);
    Engine engine = substream(seed, 0);
    fill_gaussian(data, engine);
    return MeasurementWindow(std::move(data));
}

namespace {

Matrix standardize_rows(Matrix x) {
    const double t = double(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        const double mean = row.sum() / t;
        row.array() -= mean;
        const double var = row.squaredNorm() / t;
        if (!(var > 0.0) || !std::isfinite(var))
            throw DegenerateRowError(
                std::size_t(i), fmt::format("row {} has zero variance and cannot be standardized", i));
        row /= std::sqrt(var);
    }
    return x;
}

MeasurementWindow preprocess_with(const MeasurementWindow& window, double eta, Engine& engine) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw InvalidArgument(fmt::format("noise level eta must be >= 0, got {}", eta));
    Matrix noisy = window.data();
    if (eta > 0.0) {
        Matrix noise(noisy.rows(), noisy.cols());
        fill_gaussian(noise, engine);
        noisy += eta * noise;
    }
    return MeasurementWindow(standardize_rows(std::move(noisy)), window.channel_labels());
}

std::vector<double> repetition_eigenvalues(const MeasurementWindow& window, double eta,
                                           std::uint64_t seed, int rep) {
    Engine engine = substream(seed, std::uint64_t(rep));
    const auto cov = sample_covariance(preprocess_with(window, eta, engine));
    const auto eig = symmetric_eigen(cov.matrix, false);
    return {eig.values.data(), eig.values.data() + eig.values.size()};
}

void check_repetitions(int repetitions) {
    if (repetitions < 1)
        throw InvalidArgument(fmt::format("repetitions must be >= 1, got {}", repetitions));
}

}  // namespace

MeasurementWindow preprocess(const MeasurementWindow& window, double eta, std::uint64_t seed) {
    Engine engine = substream(seed, 0);
    return preprocess_with(window, eta, engine);
}

SampleCovariance sample_covariance(const MeasurementWindow& window) {
    const auto& x = window.data();
    SampleCovariance out;
    out.matrix = Matrix::Zero(x.rows(), x.rows());
    out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / double(x.cols()));
    out.matrix = out.matrix.selfadjointView<Eigen::Lower>();
    out.n_samples_used = x.cols();
    return out;
}

std::vector<double> esd_eigenvalues_serial(const MeasurementWindow& window, int repetitions,
                                           double eta, std::uint64_t seed) {
    check_repetitions(repetitions);
    std::vector<double> pooled;
    pooled.reserve(std::size_t(repetitions) * std::size_t(window.n_channels()));
    for (int rep = 0; rep < repetitions; ++rep) {
        auto values = repetition_eigenvalues(window, eta, seed, rep);
        pooled.insert(pooled.end(), values.begin(), values.end());
    }
    std::sort(pooled.begin(), pooled.end());
    return pooled;
}

std::vector<double> esd_eigenvalues(const MeasurementWindow& window, int repetitions, double eta,
                                    std::uint64_t seed) {
    check_repetitions(repetitions);
    const std::size_t n = std::size_t(window.n_channels());
    std::vector<double> pooled(std::size_t(repetitions) * n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < repetitions; ++rep) {
        try {
            auto values = repetition_eigenvalues(window, eta, seed, rep);
            std::copy(values.begin(), values.end(), pooled.begin() + std::ptrdiff_t(rep * n));
        } catch (...) {
#pragma omp critical(freespec_esd_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    std::sort(pooled.begin(), pooled.end());
    return pooled;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * double(sorted.size() - 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

int freedman_diaconis_bins(std::vector<double> samples) {
    if (samples.size() < 2) return 2;
    std::sort(samples.begin(), samples.end());
    const double range = samples.back() - samples.front();
    const double iqr = quantile_sorted(samples, 0.75) - quantile_sorted(samples, 0.25);
    if (!(range > 0.0) || !(iqr > 0.0)) return 2;
    const double width = 2.0 * iqr / std::cbrt(double(samples.size()));
    return std::clamp(int(std::ceil(range / width)), 2, 100000);
}

EsdHistogram histogram(const std::vector<double>& samples, int n_bins) {
    if (samples.empty()) throw InvalidArgument("histogram of an empty sample");
    if (n_bins != 0 && n_bins < 2)
        throw InvalidArgument(fmt::format("n_bins must be >= 2 (or 0 for automatic), got {}", n_bins));
    const int bins = n_bins == 0 ? freedman_diaconis_bins(samples) : n_bins;
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn, hi = *mx;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    EsdHistogram h;
    h.bin_edges.resize(std::size_t(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = lo + (hi - lo) * double(i) / double(bins);
    h.bin_edges.back() = hi;
    h.counts.assign(std::size_t(bins), 0);
    const double width = (hi - lo) / bins;
    for (double v : samples) {
        auto idx = std::size_t(std::floor((v - lo) / width));
        if (idx >= std::size_t(bins)) idx = std::size_t(bins) - 1;
        ++h.counts[idx];
    }
    h.total_eigenvalues = long(samples.size());
    return h;
}

EsdHistogram esd(const MeasurementWindow& window, int repetitions, double eta, int n_bins,
                 std::uint64_t seed) {
    if (n_bins != 0 && n_bins < 2)
        throw InvalidArgument(fmt::format("n_bins must be >= 2 (or 0 for automatic), got {}", n_bins));
    return histogram(esd_eigenvalues(window, repetitions, eta, seed), n_bins);
}

double mp_density(const MpParams& params, double x) {
    validate(params);
    const double a = params.lower_edge(), b = params.upper_edge();
    if (x < a || x > b || x <= 0.0) return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * params.ratio * params.variance * x);
}

double mp_mass(const MpParams& params, double lo, double hi) {
    validate(params);
    const double a = params.lower_edge(), b = params.upper_edge();
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (!(hi > lo)) return 0.0;
    // Same cosine substitution as mp_rule: integrand in theta is smooth.
    const double r = 0.5 * (b - a);
    auto theta_of = [&](double t) {
        return std::acos(std::clamp(1.0 - (t - a) / r, -1.0, 1.0));
    };
    const auto rule = composite_gauss_legendre(theta_of(lo), theta_of(hi), 8);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const double sh = std::sin(0.5 * rule.nodes[j]);
        const double ch = std::cos(0.5 * rule.nodes[j]);
        const double t = a + 2.0 * r * sh * sh;
        sum += rule.weights[j] * r * r * 4.0 * sh * sh * ch * ch /
               (2.0 * std::numbers::pi * params.ratio * params.variance * t);
    }
    return sum;
}

double histogram_l1(const EsdHistogram& hist,
                    const std::function<double(double, double)>& mass) {
    double l1 = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double model = mass(hist.bin_edges[i], hist.bin_edges[i + 1]);
        inside += model;
        l1 += std::abs(double(hist.counts[i]) / double(hist.total_eigenvalues) - model);
    }
    const double total = mass(-INFINITY, INFINITY);
    return l1 + std::abs(total - inside);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidArgument("KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
    }
    return d;
}

}  // namespace freespec
