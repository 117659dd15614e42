#pragma once

// Measurement windows, preprocessing, sample covariance, empirical spectral
// distributions and the Marchenko-Pastur reference law.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "freespec/linalg.hpp"

namespace freespec {

/// An N x T real data matrix, channels in rows and time samples in columns.
/// Invariants: N >= 2, T >= N, all entries finite.
class MeasurementWindow {
public:
    explicit MeasurementWindow(Matrix data, std::vector<std::string> channel_labels = {});

    const Matrix& data() const noexcept { return data_; }
    Eigen::Index n_channels() const noexcept { return data_.rows(); }
    Eigen::Index n_samples() const noexcept { return data_.cols(); }
    double ratio() const noexcept { return double(n_channels()) / double(n_samples()); }
    const std::vector<std::string>& channel_labels() const noexcept { return labels_; }

    /// Columns [first, first + count) as a new window.
    MeasurementWindow columns(Eigen::Index first, Eigen::Index count) const;

private:
    Matrix data_;
    std::vector<std::string> labels_;
};

struct SampleCovariance {
    Matrix matrix;
    Eigen::Index n_samples_used = 0;
};

struct EsdHistogram {
    std::vector<double> bin_edges;
    std::vector<long> counts;
    long total_eigenvalues = 0;

    /// Density-normalized bar heights, count / (total * width).
    std::vector<double> normalized_heights() const;
};

/// Marchenko-Pastur law with ratio c = N/T and entry variance sigma^2.
struct MpParams {
    double ratio = 1.0;
    double variance = 1.0;

    double lower_edge() const;
    double upper_edge() const;
};

void validate(const MpParams& params);

MeasurementWindow sample_gaussian_matrix(Eigen::Index n, Eigen::Index t, std::uint64_t seed);

inline constexpr double kDefaultEta = 1e-5;
inline constexpr int kDefaultRepetitions = 10;

/// Adds eta * white noise and standardizes every row to mean 0, variance 1.
/// Throws DegenerateRowError when a row is constant after the noise step.
MeasurementWindow preprocess(const MeasurementWindow& window, double eta, std::uint64_t seed);

/// Sigma = X X^T / T.
SampleCovariance sample_covariance(const MeasurementWindow& window);

/// Pooled ascending eigenvalues of `repetitions` independently re-noised
/// and re-standardized copies of the window (Monte Carlo ESD estimate).
std::vector<double> esd_eigenvalues(const MeasurementWindow& window, int repetitions, double eta,
                                    std::uint64_t seed);

/// Same as esd_eigenvalues, one repetition at a time on the calling thread.
/// Kept as the reference for the parallel kernel.
std::vector<double> esd_eigenvalues_serial(const MeasurementWindow& window, int repetitions,
                                           double eta, std::uint64_t seed);

/// Freedman-Diaconis bin count for the given sample (at least 2).
int freedman_diaconis_bins(std::vector<double> samples);

/// Histogram over [min, max] of the samples; n_bins == 0 selects
/// Freedman-Diaconis, otherwise n_bins must be >= 2.
EsdHistogram histogram(const std::vector<double>& samples, int n_bins);

EsdHistogram esd(const MeasurementWindow& window, int repetitions, double eta, int n_bins,
                 std::uint64_t seed);

double mp_density(const MpParams& params, double x);

/// Probability mass of the MP law on [lo, hi].
double mp_mass(const MpParams& params, double lo, double hi);

/// Sum over bins of |empirical bin probability - model bin probability|
/// plus the model mass falling outside the histogram range.
double histogram_l1(const EsdHistogram& hist, const std::function<double(double, double)>& mass);

/// Kolmogorov-Smirnov distance between the samples and a model CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace freespec
