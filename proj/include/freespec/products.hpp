#pragma once

// Outliers of the non-Hermitian product M = (V0 / sqrt(N)) (V1 / sqrt(N)).
// For noise-only factors the eigenvalues fill a disk whose radius is the
// product of the per-factor noise scales; eigenvalues beyond (1 + delta)
// times that radius are outliers.

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "freespec/randmat.hpp"

namespace freespec {

inline constexpr double kDefaultDelta = 0.15;

struct ProductSpectrum {
    std::vector<Complex> eigenvalues;          // sorted by modulus, descending
    std::vector<std::size_t> outlier_indices;  // into eigenvalues
    double bulk_radius = 1.0;
    double delta = kDefaultDelta;
    double scale = 1.0;  // factor applied to each window, 1 / sqrt(N)

    std::vector<Complex> outliers() const;
    bool is_outlier(std::size_t index) const;
};

/// Both windows must be N x N. `noise_scale0/1` are the per-entry noise
/// standard deviations of the factors (1 for standardized data); the bulk
/// radius is their product.
ProductSpectrum product_spectrum(const MeasurementWindow& window0, const MeasurementWindow& window1,
                                 double delta = kDefaultDelta, double noise_scale0 = 1.0,
                                 double noise_scale1 = 1.0);

/// Eigenvalues of the deterministic low-rank term with modulus beyond
/// (1 + delta) * bulk_radius. Throws PreconditionError if the numerical
/// rank exceeds 5.
std::vector<Complex> rank1_outlier_prediction(const Matrix& signal_matrix, double bulk_radius,
                                              double delta = kDefaultDelta);

nlohmann::ordered_json to_json(const ProductSpectrum& spectrum);

}  // namespace freespec
