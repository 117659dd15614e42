#include "freespec/locate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freespec/error.hpp"

namespace freespec {

namespace {

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

LocationReport locate(const DetectionReport& report, const Matrix& eigenvectors) {
    if (report.outlier_indices.empty())
        throw PreconditionError("no outliers: fault location is undefined under H0");
    const auto n = Eigen::Index(report.n());
    if (eigenvectors.rows() != n || eigenvectors.cols() != n)
        throw InvalidArgument(fmt::format("eigenvector matrix is {}x{}, report has N = {}",
                                          eigenvectors.rows(), eigenvectors.cols(), n));
    const double ortho = (eigenvectors.transpose() * eigenvectors -
                          Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(ortho < 1e-8))
        throw InvalidArgument(fmt::format("eigenvectors are not orthonormal (deviation {:.3g})", ortho));

    bool any_pos = false, any_neg = false;
    for (double v : report.outliers) {
        any_pos |= v > 0.0;
        any_neg |= v < 0.0;
    }
    if (report.polynomial == PolynomialKind::P2 && any_pos && any_neg)
        throw PreconditionError("outlier eigenvalues of mixed sign: weighting is undefined");

    LocationReport out;
    out.outlier_count = report.outlier_indices.size();
    out.indicator.assign(std::size_t(n), 0.0);
    out.outlier_vectors.resize(n, Eigen::Index(out.outlier_count));
    double total = 0.0;
    for (std::size_t j = 0; j < out.outlier_count; ++j) {
        const std::size_t k = report.outlier_indices[j];
        const double lambda = report.eigenvalues[k];
        const double w = report.polynomial == PolynomialKind::P1 ? std::abs(lambda) : lambda;
        const auto col = eigenvectors.col(Eigen::Index(k));
        for (Eigen::Index i = 0; i < n; ++i) out.indicator[std::size_t(i)] += w * col(i) * col(i);
        total += w;
        out.outlier_eigenvalues.push_back(lambda);
        out.outlier_vectors.col(Eigen::Index(j)) = col;
    }
    if (total == 0.0) throw PreconditionError("outlier weights sum to zero");
    for (double& l : out.indicator) l /= total;
    out.loc = argmax_lowest(out.indicator);
    return out;
}

ComponentDistribution eigenvector_component_distribution(const Matrix& eigenvectors,
                                                         const std::vector<std::size_t>& selection,
                                                         int n_bins) {
    if (selection.empty()) throw InvalidArgument("empty eigenvector selection");
    const auto n = eigenvectors.rows();
    ComponentDistribution out;
    out.components.reserve(selection.size() * std::size_t(n));
    for (std::size_t k : selection) {
        if (Eigen::Index(k) >= eigenvectors.cols())
            throw InvalidArgument(fmt::format("eigenvector index {} out of range", k));
        const auto col = eigenvectors.col(Eigen::Index(k));
        const double norm = col.norm();
        if (!(norm > 0.0)) throw InvalidArgument("zero eigenvector column");
        const double scale = std::sqrt(double(n)) / norm;
        for (Eigen::Index i = 0; i < n; ++i) out.components.push_back(col(i) * scale);
    }
    out.histogram = histogram(out.components, n_bins);
    out.ks = ks_statistic(out.components,
                          [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); });
    return out;
}

LocationReport lim_baseline(const MeasurementWindow& window0, const MeasurementWindow& window1) {
    if (window0.n_channels() != window1.n_channels() || window0.n_samples() != window1.n_samples())
        throw InvalidArgument("lim_baseline needs windows of equal shape");
    const Matrix diff = window1.data() - window0.data();
    const auto n = std::size_t(diff.rows());
    LocationReport out;
    if (diff.cwiseAbs().maxCoeff() == 0.0) {
        out.indicator.assign(n, 1.0 / double(n));
        out.loc = 0;
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(diff, Eigen::ComputeThinU);
    const auto u = svd.matrixU().col(0);
    out.indicator.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.indicator[i] = u(Eigen::Index(i)) * u(Eigen::Index(i));
    out.loc = argmax_lowest(out.indicator);
    out.outlier_count = 1;
    out.outlier_eigenvalues.push_back(svd.singularValues()(0));
    out.outlier_vectors = u;
    return out;
}

std::vector<SeriesEntry> locate_series(const MeasurementWindow& reference,
                                       const MeasurementWindow& stream, const SpectralDensity& asd,
                                       const SeriesOptions& options) {
    const long len = options.window_length > 0 ? options.window_length : long(reference.n_samples());
    if (options.stride < 1) throw InvalidArgument("stride must be >= 1");
    if (stream.n_channels() != reference.n_channels())
        throw InvalidArgument("reference and stream have different channel counts");
    if (len > stream.n_samples())
        throw InvalidArgument(fmt::format("window length {} exceeds stream length {}", len,
                                          stream.n_samples()));
    const double margin = options.margin_eps > 0.0 ? options.margin_eps : default_margin(asd, options.kind);
    const auto sigma0 = sample_covariance(preprocess(reference, options.eta, options.seed));

    std::vector<SeriesEntry> out;
    std::uint64_t step = 0;
    for (long first = 0; first + len <= stream.n_samples(); first += options.stride, ++step) {
        const auto window = stream.columns(first, len);
        const auto sigma1 = sample_covariance(preprocess(window, options.eta, options.seed + 1 + step));
        Matrix vectors;
        const auto report = detect(options.kind, sigma0, sigma1, asd, margin, &vectors);
        SeriesEntry e;
        e.t_index = first + len - 1;
        e.outlier_count = report.outliers.size();
        if (report.outliers.empty()) {
            e.indicator.assign(std::size_t(stream.n_channels()), 0.0);
        } else {
            const auto loc = locate(report, vectors);
            e.indicator = loc.indicator;
            e.loc = loc.loc;
        }
        out.push_back(std::move(e));
    }
    return out;
}

nlohmann::ordered_json to_json(const SeriesEntry& entry) {
    nlohmann::ordered_json j;
    j["t_index"] = entry.t_index;
    j["L"] = entry.indicator;
    if (entry.loc)
        j["loc"] = *entry.loc;
    else
        j["loc"] = nullptr;
    j["outlier_count"] = entry.outlier_count;
    return j;
}

nlohmann::ordered_json to_json(const LocationReport& report, long t_index) {
    nlohmann::ordered_json j;
    j["t_index"] = t_index;
    j["L"] = report.indicator;
    j["loc"] = report.loc;
    j["outlier_count"] = report.outlier_count;
    return j;
}

}  // namespace freespec
