#pragma once

// Fault location from outlier eigenvectors. Channel i gets
//   L_i = sum_k w_k v_ik^2 / sum_k w_k
// over the outlier eigenpairs, with w_k = lambda_k for P2 and |lambda_k| for
// P1 (P1 outliers can be negative). loc is the argmax, lowest index on ties.
// Channel indices are 0-based.

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "freespec/detect.hpp"
#include "freespec/randmat.hpp"

namespace freespec {

struct LocationReport {
    std::vector<double> indicator;
    std::size_t loc = 0;
    std::size_t outlier_count = 0;
    std::vector<double> outlier_eigenvalues;
    Matrix outlier_vectors;  // column j pairs with outlier_eigenvalues[j]
};

/// Throws PreconditionError without outliers, or for P2 outliers of mixed
/// sign; InvalidArgument if `eigenvectors` is not orthonormal (1e-8) or does
/// not match the report's dimension.
LocationReport locate(const DetectionReport& report, const Matrix& eigenvectors);

struct ComponentDistribution {
    std::vector<double> components;  // pooled, each vector scaled to squared norm N
    EsdHistogram histogram;
    double ks = 0.0;  // against the standard normal
};

/// Pooled components of the selected eigenvector columns.
ComponentDistribution eigenvector_component_distribution(const Matrix& eigenvectors,
                                                         const std::vector<std::size_t>& selection,
                                                         int n_bins = 0);

/// Squared components of the leading left singular vector of
/// window1 - window0. A zero difference gives uniform L and loc 0.
LocationReport lim_baseline(const MeasurementWindow& window0, const MeasurementWindow& window1);

struct SeriesEntry {
    long t_index = 0;  // last sample of the window
    std::size_t outlier_count = 0;
    std::vector<double> indicator;  // all zeros without outliers
    std::optional<std::size_t> loc;
};

struct SeriesOptions {
    PolynomialKind kind = PolynomialKind::P2;
    long window_length = 0;  // 0: the reference window's sample count
    long stride = 1;
    double eta = kDefaultEta;
    double margin_eps = 0.0;  // <= 0: default_margin(asd, kind)
    std::uint64_t seed = 0;
};

/// Slides a window over `stream`, detecting and locating against the fixed
/// reference. S0 is computed once; S1 is recomputed per step.
std::vector<SeriesEntry> locate_series(const MeasurementWindow& reference,
                                       const MeasurementWindow& stream, const SpectralDensity& asd,
                                       const SeriesOptions& options);

/// {t_index, L, loc, outlier_count}; loc is null without outliers.
nlohmann::ordered_json to_json(const SeriesEntry& entry);
nlohmann::ordered_json to_json(const LocationReport& report, long t_index);

}  // namespace freespec
