#include "freespec/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freespec/error.hpp"
#include "freespec/quadrature.hpp"
#include "freespec/sweep.hpp"

namespace freespec {

bool in_upper_half_plane(const CMatrix& point) {
    return point.rows() == point.cols() && point.rows() > 0 &&
           min_eigenvalue(imag_part(point)) > 0.0;
}

// ---------------------------------------------------------------------------
// Scalar MP transform

Complex cauchy_mp_analytic(const MpParams& params, Complex w) {
    const double a = params.lower_edge(), b = params.upper_edge();
    const Complex root = std::sqrt(w - a) * std::sqrt(w - b);
    return 2.0 / (w - params.variance * (1.0 - params.ratio) + root);
}

Complex cauchy_mp(const MpParams& params, Complex z) {
    validate(params);
    if (!(z.imag() > 0.0))
        throw DomainError(fmt::format("cauchy_mp requires Im z > 0, got {}", z.imag()));
    return cauchy_mp_analytic(params, z);
}

// ---------------------------------------------------------------------------
// Operator-valued Wishart transform

namespace {

void check_square(const CMatrix& point, const RMatrix& coeff) {
    if (point.rows() != point.cols() || point.rows() != coeff.rows() ||
        coeff.rows() != coeff.cols() || point.rows() == 0)
        throw InvalidArgument(fmt::format("operator point {}x{} does not match coefficient {}x{}",
                                          point.rows(), point.cols(), coeff.rows(), coeff.cols()));
}

CMatrix quadrature_sum(const RMatrix& coeff, const QuadratureRule& rule, const CMatrix& point,
                       double max_condition) {
    const CMatrix c = coeff.cast<Complex>();
    CMatrix sum = CMatrix::Zero(point.rows(), point.cols());
    for (std::size_t j = 0; j < rule.size(); ++j)
        sum += rule.weights[j] * checked_inverse(point - rule.nodes[j] * c, max_condition);
    return sum;
}

// phi(l) = int dMP(t) / (1 - t l) = G(1/l) / l, written without cancellation.
Complex resolvent_moment(const MpParams& params, Complex l) {
    if (std::abs(l) < 1e-12) {
        const double m1 = params.variance;
        const double m2 = params.variance * params.variance * (1.0 + params.ratio);
        return 1.0 + m1 * l + m2 * l * l;
    }
    const double a = params.lower_edge(), b = params.upper_edge();
    const Complex w = 1.0 / l;
    const Complex root = std::sqrt(w - a) * std::sqrt(w - b);
    return 2.0 / (1.0 - l * params.variance * (1.0 - params.ratio) + l * root);
}

}  // namespace

CMatrix operator_cauchy_wishart(const RMatrix& coeff, const MpParams& params,
                                const CMatrix& point, const QuadratureConfig& config) {
    validate(params);
    check_square(point, coeff);
    if (!in_upper_half_plane(point))
        throw DomainError("operator_cauchy_wishart requires Im(point) positive definite");
    int panels = std::max(1, config.initial_panels);
    CMatrix previous = quadrature_sum(coeff, mp_rule(params, panels), point, config.max_condition);
    double change = INFINITY;
    while (panels < config.max_panels) {
        panels *= 2;
        CMatrix next = quadrature_sum(coeff, mp_rule(params, panels), point, config.max_condition);
        change = max_norm(next - previous);
        previous = std::move(next);
        if (change < config.tolerance) return previous;
    }
    throw NonConvergenceError(change, panels,
                              fmt::format("Wishart quadrature did not settle below {} with {} nodes "
                                          "(last change {:.3g})",
                                          config.tolerance, panels * 32, change));
}

WishartTransform::WishartTransform(RMatrix coeff, MpParams params, WishartMethod method,
                                   QuadratureConfig quadrature)
    : coeff_(std::move(coeff)), params_(params), method_(method), quadrature_(quadrature) {
    validate(params_);
    if (coeff_.rows() != coeff_.cols() || coeff_.rows() == 0 || coeff_.rows() > 4)
        throw InvalidArgument("Wishart coefficient must be square, at most 4x4");
    if (!coeff_.isApprox(coeff_.transpose(), 0.0))
        throw InvalidArgument("Wishart coefficient must be symmetric");
}

CMatrix WishartTransform::operator()(const CMatrix& point) const {
    check_square(point, coeff_);
    if (method_ == WishartMethod::Quadrature)
        return operator_cauchy_wishart(coeff_, params_, point, quadrature_);
    return spectral(point);
}

CMatrix WishartTransform::spectral(const CMatrix& point) const {
    const CMatrix point_inv = checked_inverse(point, quadrature_.max_condition);
    const auto k = point.rows();
    if (k == 1) {
        const Complex l = point_inv(0, 0) * coeff_(0, 0);
        return CMatrix::Constant(1, 1, resolvent_moment(params_, l) * point_inv(0, 0));
    }
    // (point - t C)^{-1} = (I - t A)^{-1} point^{-1} with A = point^{-1} C.
    const CMatrix a = point_inv * coeff_.cast<Complex>();
    Eigen::ComplexEigenSolver<CMatrix> eig(a);
    if (eig.info() == Eigen::Success) {
        const CMatrix& v = eig.eigenvectors();
        Eigen::JacobiSVD<CMatrix> svd(v);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        if (std::isfinite(cond) && cond < 1e8) {
            CMatrix phi = CMatrix::Zero(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                phi(i, i) = resolvent_moment(params_, eig.eigenvalues()(i));
            return v * phi * v.inverse() * point_inv;
        }
    }
    // Near-defective A: integrate directly.
    return operator_cauchy_wishart(coeff_, params_, point, quadrature_);
}

CauchyTransform point_mass_transform(CMatrix value) {
    return [value = std::move(value)](const CMatrix& b) -> CMatrix {
        return checked_inverse(b - value);
    };
}

CMatrix h_transform(const CMatrix& g_value, const CMatrix& point) {
    return checked_inverse(g_value) - point;
}

// ---------------------------------------------------------------------------
// Subordination

void validate(const FixedPointConfig& config) {
    if (!(config.tolerance > 0.0)) throw InvalidArgument("fixed-point tolerance must be > 0");
    if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (!(config.damping > 0.0 && config.damping <= 1.0))
        throw InvalidArgument("damping must lie in (0, 1]");
}

namespace {

void check_herglotz(const CMatrix& g, const char* which) {
    const double scale = std::max(1.0, max_norm(g));
    const double top = max_eigenvalue(imag_part(g));
    if (!(top <= 1e-12 * scale))
        throw HerglotzViolation(fmt::format(
            "{} transform left the lower half-plane (largest Im eigenvalue {:.3g})", which, top));
}

}  // namespace

SubordinationResult subordination_sum(const CauchyTransform& gx, const CauchyTransform& gy,
                                      const CMatrix& point, const FixedPointConfig& config) {
    validate(config);
    if (!in_upper_half_plane(point))
        throw DomainError("subordination_sum requires Im(point) positive definite");

    CMatrix omega = point;
    double residual = INFINITY;
    long iter = 0;
    while (iter < config.max_iterations) {
        ++iter;
        const CMatrix g_x = gx(omega);
        if (config.check_herglotz) check_herglotz(g_x, "x");
        const CMatrix u = h_transform(g_x, omega) + point;
        const CMatrix g_y = gy(u);
        if (config.check_herglotz) check_herglotz(g_y, "y");
        const CMatrix mapped = h_transform(g_y, u) + point;
        const CMatrix next = omega + config.damping * (mapped - omega);
        residual = max_norm(next - omega);
        omega = next;
        if (residual < config.tolerance) break;
    }
    if (!(residual < config.tolerance))
        throw NonConvergenceError(
            residual, iter,
            fmt::format("subordination fixed point did not converge in {} iterations "
                        "(residual {:.3g})",
                        iter, residual));

    SubordinationResult out;
    out.g = gx(omega);
    out.omega2 = h_transform(out.g, omega) + point;
    out.omega1 = std::move(omega);
    out.iterations = iter;
    out.residual = residual;
    return out;
}

// ---------------------------------------------------------------------------
// Linearization

Linearization linearize_p2() {
    Linearization lin;
    lin.c = RMatrix::Zero(3, 3);
    lin.c(1, 2) = lin.c(2, 1) = -1.0;
    lin.b0 = RMatrix::Zero(3, 3);
    lin.b0(0, 1) = lin.b0(1, 0) = -1.0;
    lin.b0(0, 2) = lin.b0(2, 0) = -0.5;
    lin.b1 = -lin.b0;
    return lin;
}

// ---------------------------------------------------------------------------
// Densities

double SpectralDensity::total_mass() const {
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        sum += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    return sum;
}

double SpectralDensity::mass(double lo, double hi) const {
    if (grid.size() < 2) return 0.0;
    lo = std::max(lo, grid.front());
    hi = std::min(hi, grid.back());
    if (!(hi > lo)) return 0.0;
    auto value_at = [&](std::size_t i, double x) {
        const double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
        return values[i] + w * (values[i + 1] - values[i]);
    };
    double sum = 0.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), lo);
    std::size_t i = std::size_t(std::max<std::ptrdiff_t>(0, (it - grid.begin()) - 1));
    for (; i + 1 < grid.size() && grid[i] < hi; ++i) {
        const double left = std::max(lo, grid[i]);
        const double right = std::min(hi, grid[i + 1]);
        if (right <= left) continue;
        sum += 0.5 * (value_at(i, left) + value_at(i, right)) * (right - left);
    }
    return sum;
}

std::size_t SpectralDensity::invalid_points() const {
    return std::size_t(std::count(valid.begin(), valid.end(), std::uint8_t{0}));
}

SpectralDensity stieltjes_invert(std::span<const Complex> g_on_grid, std::span<const double> grid,
                                 double smoothing_offset, double support_threshold) {
    if (g_on_grid.size() != grid.size())
        throw InvalidArgument("stieltjes_invert: transform and grid sizes differ");
    if (grid.size() < 2) throw InvalidArgument("stieltjes_invert: grid needs at least 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidArgument("stieltjes_invert: grid not ascending");

    SpectralDensity d;
    d.grid.assign(grid.begin(), grid.end());
    d.values.resize(grid.size());
    d.valid.assign(grid.size(), 1);
    d.smoothing_offset = smoothing_offset;

    std::vector<double> negative(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = -g_on_grid[i].imag() / std::numbers::pi;
        if (rho < 0.0) negative[i] = -rho;
        d.values[i] = std::max(rho, 0.0);
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        d.clipped_mass += 0.5 * (negative[i] + negative[i - 1]) * (grid[i] - grid[i - 1]);

    const double peak = *std::max_element(d.values.begin(), d.values.end());
    d.support_threshold = support_threshold > 0.0 ? support_threshold : 1e-3 * peak;
    std::size_t i = 0;
    while (i < grid.size()) {
        if (d.values[i] > d.support_threshold) {
            std::size_t j = i;
            while (j + 1 < grid.size() && d.values[j + 1] > d.support_threshold) ++j;
            d.support_intervals.emplace_back(grid[i], grid[j]);
            i = j + 1;
        } else {
            d.values[i] = 0.0;
            ++i;
        }
    }
    return d;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw InvalidArgument("uniform_grid needs points >= 2 and hi > lo");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * double(i) / double(points - 1);
    g.back() = hi;
    return g;
}

namespace {

double resolve_smoothing(std::span<const double> grid, const AsdOptions& options) {
    if (options.smoothing_offset > 0.0) return options.smoothing_offset;
    return kDefaultSmoothingFraction * (grid.back() - grid.front());
}

void check_grid(std::span<const double> grid) {
    if (grid.size() < 2) throw InvalidArgument("ASD grid needs at least 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidArgument("ASD grid must be strictly ascending");
}

SpectralDensity invert_sweep(std::span<const double> grid, double y, const AsdOptions& options,
                             const PointFunction& fn) {
    std::vector<Complex> points(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) points[i] = Complex(grid[i], y);
    const auto swept = options.parallel ? sweep_parallel(points, fn) : sweep_serial(points, fn);
    std::vector<Complex> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) g[i] = swept[i].value;
    double peak = 0.0;
    for (const Complex& v : g) peak = std::max(peak, -v.imag() / std::numbers::pi);
    const double threshold =
        options.support_threshold_fraction > 0.0 ? options.support_threshold_fraction * peak : 0.0;
    SpectralDensity d = stieltjes_invert(g, grid, y, threshold);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (swept[i].status != PointStatus::Ok) {
            d.valid[i] = 0;
            d.values[i] = 0.0;
        }
    return d;
}

}  // namespace

SubordinationResult p1_transform(const MpParams& params0, const MpParams& params1, Complex z,
                                 const AsdOptions& options) {
    const WishartTransform gx(RMatrix::Constant(1, 1, 1.0), params1, options.method);
    const WishartTransform gy(RMatrix::Constant(1, 1, -1.0), params0, options.method);
    return subordination_sum(gx, gy, CMatrix::Constant(1, 1, z), options.fixed_point);
}

namespace {

CMatrix corner_point(Complex z, double eps, const Linearization& lin) {
    CMatrix lambda = CMatrix::Zero(lin.dim(), lin.dim());
    lambda(0, 0) = z;
    for (Eigen::Index i = 1; i < lin.dim(); ++i) lambda(i, i) = Complex(0.0, eps);
    return lambda - lin.c.cast<Complex>();
}

Complex corner_value(const CauchyTransform& gx, const CauchyTransform& gy, Complex z,
                     const AsdOptions& options, const Linearization& lin) {
    auto at = [&](double eps) {
        // G_L(Lambda) = G_{L - c}(Lambda - c); the scalar transform is the corner.
        return subordination_sum(gx, gy, corner_point(z, eps, lin), options.fixed_point).g(0, 0);
    };
    if (!options.corner_extrapolation) return at(options.corner_eps);
    constexpr double e1 = 1e-5, e2 = 1e-6;
    const Complex g1 = at(e1), g2 = at(e2);
    return g2 + (g2 - g1) * (e2 / (e1 - e2));
}

}  // namespace

Complex p2_transform(const MpParams& params0, const MpParams& params1, Complex z,
                     const AsdOptions& options) {
    if (!(options.corner_eps > 0.0)) throw InvalidArgument("corner_eps must be > 0");
    const Linearization lin = linearize_p2();
    const WishartTransform gx(lin.b0, params0, options.method);
    const WishartTransform gy(lin.b1, params1, options.method);
    return corner_value(gx, gy, z, options, lin);
}

Complex p2_transform_point_masses(double a, double b, Complex z, const AsdOptions& options) {
    const Linearization lin = linearize_p2();
    const auto gx = point_mass_transform((a * lin.b0).cast<Complex>());
    const auto gy = point_mass_transform((b * lin.b1).cast<Complex>());
    return corner_value(gx, gy, z, options, lin);
}

SpectralDensity asd_p1(const MpParams& params0, const MpParams& params1,
                       std::span<const double> grid, const AsdOptions& options) {
    validate(params0);
    validate(params1);
    validate(options.fixed_point);
    check_grid(grid);
    const double y = resolve_smoothing(grid, options);
    return invert_sweep(grid, y, options, [&](Complex z) {
        return p1_transform(params0, params1, z, options).g(0, 0);
    });
}

SpectralDensity asd_p2(const MpParams& params0, const MpParams& params1,
                       std::span<const double> grid, const AsdOptions& options) {
    validate(params0);
    validate(params1);
    validate(options.fixed_point);
    check_grid(grid);
    if (!(options.corner_eps > 0.0)) throw InvalidArgument("corner_eps must be > 0");
    const double y = resolve_smoothing(grid, options);
    const Linearization lin = linearize_p2();
    const WishartTransform gx(lin.b0, params0, options.method);
    const WishartTransform gy(lin.b1, params1, options.method);
    return invert_sweep(grid, y, options,
                        [&](Complex z) { return corner_value(gx, gy, z, options, lin); });
}

}  // namespace freespec
