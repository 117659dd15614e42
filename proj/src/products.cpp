#include "freespec/products.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "freespec/error.hpp"

namespace freespec {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidArgument(fmt::format("delta must be > 0, got {}", delta));
}

std::vector<Complex> sorted_eigenvalues(const Matrix& m) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw Error("nonsymmetric eigensolver failed");
    const auto& ev = solver.eigenvalues();
    std::vector<Complex> out(ev.data(), ev.data() + ev.size());
    // Descending modulus; ties by real then imaginary part for a stable order.
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

}  // namespace

std::vector<Complex> ProductSpectrum::outliers() const {
    std::vector<Complex> out;
    for (auto i : outlier_indices) out.push_back(eigenvalues[i]);
    return out;
}

bool ProductSpectrum::is_outlier(std::size_t index) const {
    return std::find(outlier_indices.begin(), outlier_indices.end(), index) !=
           outlier_indices.end();
}

ProductSpectrum product_spectrum(const MeasurementWindow& window0, const MeasurementWindow& window1,
                                 double delta, double noise_scale0, double noise_scale1) {
    check_delta(delta);
    const auto n = window0.n_channels();
    if (window0.n_samples() != n || window1.n_channels() != n || window1.n_samples() != n)
        throw InvalidArgument(fmt::format(
            "product spectra need square windows of equal size, got {}x{} and {}x{}", n,
            window0.n_samples(), window1.n_channels(), window1.n_samples()));
    if (!(noise_scale0 > 0.0) || !(noise_scale1 > 0.0))
        throw InvalidArgument("noise scales must be > 0");

    ProductSpectrum out;
    out.delta = delta;
    out.scale = 1.0 / std::sqrt(double(n));
    out.bulk_radius = noise_scale0 * noise_scale1;
    out.eigenvalues = sorted_eigenvalues((out.scale * out.scale) * (window0.data() * window1.data()));
    const double limit = (1.0 + delta) * out.bulk_radius;
    for (std::size_t i = 0; i < out.eigenvalues.size(); ++i)
        if (std::abs(out.eigenvalues[i]) > limit) out.outlier_indices.push_back(i);
    return out;
}

std::vector<Complex> rank1_outlier_prediction(const Matrix& signal_matrix, double bulk_radius,
                                              double delta) {
    check_delta(delta);
    if (signal_matrix.rows() != signal_matrix.cols() || signal_matrix.rows() == 0)
        throw InvalidArgument("signal matrix must be square");
    if (!(bulk_radius > 0.0)) throw InvalidArgument("bulk_radius must be > 0");
    Eigen::BDCSVD<Matrix> svd(signal_matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, s(0)) * double(signal_matrix.rows());
    const auto rank = Eigen::Index((s.array() > tol).count());
    if (rank > 5)
        throw PreconditionError(fmt::format("signal matrix has numerical rank {} (at most 5)", rank));
    std::vector<Complex> out;
    if (rank == 0) return out;
    // Nonzero eigenvalues of U S V^T are those of the small S V^T U.
    const Matrix u = svd.matrixU().leftCols(rank);
    const Matrix v = svd.matrixV().leftCols(rank);
    const Matrix core = s.head(rank).asDiagonal() * (v.transpose() * u);
    for (Complex z : sorted_eigenvalues(core))
        if (std::abs(z) > (1.0 + delta) * bulk_radius) out.push_back(z);
    return out;
}

nlohmann::ordered_json to_json(const ProductSpectrum& spectrum) {
    nlohmann::ordered_json j;
    j["n"] = spectrum.eigenvalues.size();
    j["bulk_radius"] = spectrum.bulk_radius;
    j["delta"] = spectrum.delta;
    j["scale"] = spectrum.scale;
    auto outliers = nlohmann::ordered_json::array();
    for (Complex v : spectrum.outliers()) outliers.push_back({v.real(), v.imag()});
    j["outliers"] = std::move(outliers);
    return j;
}

}  // namespace freespec
