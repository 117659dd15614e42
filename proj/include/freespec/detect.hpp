#pragma once

// Outlier-based anomaly test: eigenvalues of P(S0, S1) that fall outside the
// (dilated) support of the asymptotic density reject the noise-only
// hypothesis. The statistic s compares outlier and bulk eigenvalue mass.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "freespec/freeprob.hpp"
#include "freespec/randmat.hpp"

namespace freespec {

enum class PolynomialKind { P1, P2 };

std::string_view to_string(PolynomialKind kind);
/// Accepts "p1"/"P1"/"p2"/"P2"; anything else is an InvalidArgument.
PolynomialKind parse_polynomial(std::string_view text);

enum class Verdict { H0Retained, Anomaly };

std::string_view to_string(Verdict verdict);

/// P1 -> S1 - S0, P2 -> D * D with D = S1 - S0 (symmetrized).
Matrix evaluate_polynomial(PolynomialKind kind, const SampleCovariance& sigma0,
                           const SampleCovariance& sigma1);

struct DetectionReport {
    PolynomialKind polynomial = PolynomialKind::P2;
    std::vector<double> eigenvalues;           // ascending
    std::vector<std::size_t> outlier_indices;  // into eigenvalues, ascending
    std::vector<double> outliers;
    std::vector<std::pair<double, double>> support;
    double margin_eps = 0.0;
    double s = 0.0;
    /// Set when the bulk has (numerically) no mass and s is reported as +inf.
    bool s_degenerate = false;
    Verdict verdict = Verdict::H0Retained;

    std::size_t n() const noexcept { return eigenvalues.size(); }
};

/// Fraction of the support width added to half the grid spacing in the
/// default margin. P1 keeps 2%; the P2 edge fluctuates roughly 2 * edge times
/// more at finite N (and the thresholded support stops short of the true
/// edge), so its fraction is calibrated on noise-only N = T = 118 windows to
/// keep false alarms below 5%.
inline constexpr double kMarginFractionP1 = 0.02;
inline constexpr double kMarginFractionP2 = 0.10;

/// 0.5 * grid spacing + fraction(kind) * (width of the support hull).
double default_margin(const SpectralDensity& asd, PolynomialKind kind);

/// Classify already computed eigenvalues against the density's support.
/// Outliers are strictly farther than margin_eps from every interval.
/// s = sum |outliers| / sum |bulk| (0 without outliers, +inf with flag when
/// the bulk sum is below 1e-9).
DetectionReport classify(PolynomialKind kind, std::vector<double> eigenvalues,
                         const SpectralDensity& asd, double margin_eps);

/// Eigendecomposes P(S0, S1) and classifies. Eigenvectors of the polynomial
/// matrix are written to `eigenvectors` when non-null (column k pairs with
/// eigenvalue k).
DetectionReport detect(PolynomialKind kind, const SampleCovariance& sigma0,
                       const SampleCovariance& sigma1, const SpectralDensity& asd,
                       double margin_eps, Matrix* eigenvectors = nullptr);

/// Indices of `reports` sorted ascending by s; ties keep input order.
std::vector<std::size_t> ordering_check(const std::vector<DetectionReport>& reports);

/// Grid covering the theoretical support with 0.5 of slack on each side.
std::vector<double> default_grid(PolynomialKind kind, const MpParams& params0,
                                 const MpParams& params1, int points = kDefaultGridPoints);

SpectralDensity compute_asd(PolynomialKind kind, const MpParams& params0, const MpParams& params1,
                            std::span<const double> grid, const AsdOptions& options = {});

/// Canonical text of everything the ASD depends on; used as the cache key.
std::string asd_key(PolynomialKind kind, const MpParams& params0, const MpParams& params1,
                    int grid_points, const AsdOptions& options);

/// In-memory ASD cache, safe for concurrent use. Densities are shared
/// read-only between callers.
class AsdCache {
public:
    std::shared_ptr<const SpectralDensity> get(PolynomialKind kind, const MpParams& params0,
                                               const MpParams& params1,
                                               int grid_points = kDefaultGridPoints,
                                               const AsdOptions& options = {});
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const SpectralDensity>> entries_;
};

/// {polynomial, n, eigenvalues, outliers, support, margin_eps, s, verdict}
nlohmann::ordered_json to_json(const DetectionReport& report);

}  // namespace freespec
