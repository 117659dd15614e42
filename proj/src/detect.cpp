#include "freespec/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "freespec/error.hpp"

namespace freespec {

std::string_view to_string(PolynomialKind kind) {
    return kind == PolynomialKind::P1 ? "p1" : "p2";
}

PolynomialKind parse_polynomial(std::string_view text) {
    if (text == "p1" || text == "P1") return PolynomialKind::P1;
    if (text == "p2" || text == "P2") return PolynomialKind::P2;
    throw InvalidArgument(fmt::format("unknown polynomial '{}' (expected p1 or p2)", text));
}

std::string_view to_string(Verdict verdict) {
    return verdict == Verdict::Anomaly ? "anomaly" : "H0_retained";
}

Matrix evaluate_polynomial(PolynomialKind kind, const SampleCovariance& sigma0,
                           const SampleCovariance& sigma1) {
    const Matrix& s0 = sigma0.matrix;
    const Matrix& s1 = sigma1.matrix;
    if (s0.rows() != s0.cols() || s1.rows() != s1.cols() || s0.rows() != s1.rows())
        throw InvalidArgument(fmt::format("covariance dimensions differ: {}x{} vs {}x{}", s0.rows(),
                                          s0.cols(), s1.rows(), s1.cols()));
    Matrix d = s1 - s0;
    d = 0.5 * (d + d.transpose()).eval();
    if (kind == PolynomialKind::P1) return d;
    Matrix p = d * d;
    return 0.5 * (p + p.transpose());
}

double default_margin(const SpectralDensity& asd, PolynomialKind kind) {
    if (asd.support_intervals.empty() || asd.grid.size() < 2)
        throw InvalidAsdError("density has no support");
    const double spacing = (asd.grid.back() - asd.grid.front()) / double(asd.grid.size() - 1);
    const double width = asd.support_intervals.back().second - asd.support_intervals.front().first;
    const double fraction = kind == PolynomialKind::P1 ? kMarginFractionP1 : kMarginFractionP2;
    return 0.5 * spacing + fraction * width;
}

DetectionReport classify(PolynomialKind kind, std::vector<double> eigenvalues,
                         const SpectralDensity& asd, double margin_eps) {
    if (asd.support_intervals.empty())
        throw InvalidAsdError("density has no support; cannot classify outliers");
    if (!(margin_eps > 0.0) || !std::isfinite(margin_eps))
        throw InvalidArgument(fmt::format("margin_eps must be positive, got {}", margin_eps));
    std::sort(eigenvalues.begin(), eigenvalues.end());

    DetectionReport r;
    r.polynomial = kind;
    r.support = asd.support_intervals;
    r.margin_eps = margin_eps;
    double outlier_sum = 0.0, bulk_sum = 0.0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        const double v = eigenvalues[k];
        bool inside = false;
        for (const auto& [lo, hi] : r.support)
            if (v >= lo - margin_eps && v <= hi + margin_eps) {
                inside = true;
                break;
            }
        if (inside) {
            bulk_sum += std::abs(v);
        } else {
            r.outlier_indices.push_back(k);
            r.outliers.push_back(v);
            outlier_sum += std::abs(v);
        }
    }
    r.eigenvalues = std::move(eigenvalues);
    if (!r.outliers.empty()) {
        r.verdict = Verdict::Anomaly;
        if (bulk_sum < 1e-9) {
            r.s = INFINITY;
            r.s_degenerate = true;
        } else {
            r.s = outlier_sum / bulk_sum;
        }
    }
    return r;
}

DetectionReport detect(PolynomialKind kind, const SampleCovariance& sigma0,
                       const SampleCovariance& sigma1, const SpectralDensity& asd,
                       double margin_eps, Matrix* eigenvectors) {
    if (asd.support_intervals.empty())
        throw InvalidAsdError("density has no support; cannot classify outliers");
    const Matrix p = evaluate_polynomial(kind, sigma0, sigma1);
    auto eig = symmetric_eigen(p, eigenvectors != nullptr);
    if (eigenvectors) *eigenvectors = std::move(eig.vectors);
    return classify(kind, {eig.values.data(), eig.values.data() + eig.values.size()}, asd,
                    margin_eps);
}

std::vector<std::size_t> ordering_check(const std::vector<DetectionReport>& reports) {
    for (const auto& r : reports)
        if (r.polynomial != reports.front().polynomial)
            throw InvalidArgument("ordering_check needs reports of a single polynomial kind");
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return reports[a].s < reports[b].s; });
    return order;
}

std::vector<double> default_grid(PolynomialKind kind, const MpParams& params0,
                                 const MpParams& params1, int points) {
    validate(params0);
    validate(params1);
    const double e = std::max(params0.upper_edge(), params1.upper_edge());
    if (kind == PolynomialKind::P1) return uniform_grid(-e - 0.5, e + 0.5, points);
    return uniform_grid(-0.5, e * e + 0.5, points);
}

SpectralDensity compute_asd(PolynomialKind kind, const MpParams& params0, const MpParams& params1,
                            std::span<const double> grid, const AsdOptions& options) {
    return kind == PolynomialKind::P1 ? asd_p1(params0, params1, grid, options)
                                      : asd_p2(params0, params1, grid, options);
}

std::string asd_key(PolynomialKind kind, const MpParams& params0, const MpParams& params1,
                    int grid_points, const AsdOptions& options) {
    const auto& fp = options.fixed_point;
    return fmt::format(
        "polynomial={};c0={:.17g};var0={:.17g};c1={:.17g};var1={:.17g};grid_points={};"
        "smoothing_offset={:.17g};corner_eps={:.17g};corner_extrapolation={};"
        "support_threshold_fraction={:.17g};method={};tolerance={:.17g};max_iterations={};"
        "damping={:.17g}",
        to_string(kind), params0.ratio, params0.variance, params1.ratio, params1.variance,
        grid_points, options.smoothing_offset, options.corner_eps,
        int(options.corner_extrapolation), options.support_threshold_fraction,
        options.method == WishartMethod::Spectral ? "spectral" : "quadrature", fp.tolerance,
        fp.max_iterations, fp.damping);
}

std::shared_ptr<const SpectralDensity> AsdCache::get(PolynomialKind kind, const MpParams& params0,
                                                     const MpParams& params1, int grid_points,
                                                     const AsdOptions& options) {
    const std::string key = asd_key(kind, params0, params1, grid_points, options);
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    // Computed outside the lock; a concurrent duplicate computation is
    // harmless because the result is deterministic.
    const auto grid = default_grid(kind, params0, params1, grid_points);
    auto density =
        std::make_shared<const SpectralDensity>(compute_asd(kind, params0, params1, grid, options));
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(density)).first->second;
}

std::size_t AsdCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

nlohmann::ordered_json to_json(const DetectionReport& report) {
    nlohmann::ordered_json j;
    j["polynomial"] = to_string(report.polynomial);
    j["n"] = report.n();
    j["eigenvalues"] = report.eigenvalues;
    j["outliers"] = report.outliers;
    auto support = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : report.support) support.push_back({lo, hi});
    j["support"] = std::move(support);
    j["margin_eps"] = report.margin_eps;
    // JSON has no infinity; the degenerate case is carried by the flag.
    if (report.s_degenerate)
        j["s"] = "inf";
    else
        j["s"] = report.s;
    j["verdict"] = to_string(report.verdict);
    j["s_degenerate"] = report.s_degenerate;
    return j;
}

}  // namespace freespec
