#pragma once

// Operator-valued free probability for the Wishart polynomials
//   P1(S0, S1) = S1 - S0  and  P2(S0, S1) = (S1 - S0)^2.
//
// Cauchy transforms G(b) = E[(b - x)^{-1}] are evaluated on k x k complex
// arguments b with positive definite imaginary part (k = 1 for P1, k = 3 for
// the P2 linearization). Sums of free variables are handled by the
// subordination fixed point, the P2 transform is read from the (0, 0) corner
// of the linearized pencil, and densities are recovered by Stieltjes
// inversion at a fixed height above the real axis.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "freespec/linalg.hpp"
#include "freespec/randmat.hpp"

namespace freespec {

/// A k x k point in the operator upper half-plane, or a transform value.
using OperatorPoint = CMatrix;

/// Operator-valued Cauchy transform evaluator b -> G(b).
using CauchyTransform = std::function<CMatrix(const CMatrix&)>;

bool in_upper_half_plane(const CMatrix& point);

/// Scalar MP Cauchy transform; requires Im z > 0 (DomainError otherwise).
Complex cauchy_mp(const MpParams& params, Complex z);

/// Analytic continuation of the MP Cauchy transform to C minus the support.
/// Uses G(w) = 2 / (w - s^2 (1 - c) + sqrt(w - a) sqrt(w - b)); the product of
/// principal roots has its cut exactly on [a, b].
Complex cauchy_mp_analytic(const MpParams& params, Complex w);

struct QuadratureConfig {
    int initial_panels = 16;  // 16 x 32 = 512 nodes
    int max_panels = 8192;
    double tolerance = 1e-8;
    double max_condition = 1e14;
};

/// E[(point - coeff (x) S)^{-1}] for S distributed by the MP law, computed by
/// Gauss-Legendre quadrature of the MP density with node doubling until two
/// successive estimates agree to `tolerance` in max-norm.
CMatrix operator_cauchy_wishart(const RMatrix& coeff, const MpParams& params,
                                const CMatrix& point, const QuadratureConfig& config = {});

enum class WishartMethod {
    /// Closed form through the eigendecomposition of point^{-1} coeff and the
    /// scalar MP transform. Falls back to quadrature when the eigenbasis is
    /// ill-conditioned.
    Spectral,
    Quadrature,
};

/// Evaluator for the operator-valued Cauchy transform of coeff (x) S.
class WishartTransform {
public:
    WishartTransform(RMatrix coeff, MpParams params, WishartMethod method = WishartMethod::Spectral,
                     QuadratureConfig quadrature = {});

    CMatrix operator()(const CMatrix& point) const;

    const RMatrix& coefficient() const noexcept { return coeff_; }
    const MpParams& params() const noexcept { return params_; }

private:
    CMatrix spectral(const CMatrix& point) const;

    RMatrix coeff_;
    MpParams params_;
    WishartMethod method_;
    QuadratureConfig quadrature_;
};

/// Transform of the constant (deterministic) operator `value`: (b - value)^{-1}.
CauchyTransform point_mass_transform(CMatrix value);

/// h(b) = G(b)^{-1} - b. Throws ConditioningError if G is singular.
CMatrix h_transform(const CMatrix& g_value, const CMatrix& point);

struct FixedPointConfig {
    double tolerance = 1e-9;  // max-norm change between iterates
    long max_iterations = 10000;
    double damping = 1.0;  // 1 = plain iteration
    bool check_herglotz = true;
};

void validate(const FixedPointConfig& config);

struct SubordinationResult {
    CMatrix g;       // G_{x+y}(b) = G_x(omega1)
    CMatrix omega1;  // fixed point of w -> h_y(h_x(w) + b) + b
    CMatrix omega2;  // h_x(omega1) + b
    long iterations = 0;
    double residual = 0.0;
};

/// Cauchy transform of x + y for x, y free, via the subordination fixed
/// point started at omega = point. Throws NonConvergenceError (carrying the
/// last residual) when the iteration budget runs out, and HerglotzViolation
/// if an iterate's transform value leaves the lower half-plane.
SubordinationResult subordination_sum(const CauchyTransform& gx, const CauchyTransform& gy,
                                      const CMatrix& point, const FixedPointConfig& config = {});

/// Self-adjoint linearization L = c (x) 1 + b0 (x) S0 + b1 (x) S1.
struct Linearization {
    RMatrix c;
    RMatrix b0;
    RMatrix b1;

    Eigen::Index dim() const noexcept { return c.rows(); }
};

/// The 3 x 3 linearization of (S1 - S0)^2.
Linearization linearize_p2();

/// A density sampled on an ascending grid, with its thresholded support.
struct SpectralDensity {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<std::pair<double, double>> support_intervals;
    double smoothing_offset = 0.0;
    double support_threshold = 0.0;
    double clipped_mass = 0.0;         // negative mass removed by clipping
    std::vector<std::uint8_t> valid;  // 0 where the transform could not be evaluated

    /// Trapezoidal integral over the grid.
    double total_mass() const;
    /// Integral of the piecewise-linear interpolant over [lo, hi].
    double mass(double lo, double hi) const;
    std::size_t invalid_points() const;
};

/// rho(x) = -Im G(x + iy) / pi, negative values clipped. Support intervals
/// are maximal runs with rho above `support_threshold`; values below it are
/// zeroed. A non-positive threshold selects 1e-3 * max(rho).
SpectralDensity stieltjes_invert(std::span<const Complex> g_on_grid, std::span<const double> grid,
                                 double smoothing_offset, double support_threshold = 0.0);

struct AsdOptions {
    FixedPointConfig fixed_point;
    /// Height above the real axis; <= 0 selects kDefaultSmoothingFraction * span.
    double smoothing_offset = 0.0;
    double corner_eps = 1e-6;
    /// Two-point linear extrapolation eps in {1e-5, 1e-6} -> 0.
    bool corner_extrapolation = false;
    /// Threshold as a fraction of max(rho).
    double support_threshold_fraction = 1e-3;
    WishartMethod method = WishartMethod::Spectral;
    bool parallel = true;
};

inline constexpr double kDefaultSmoothingFraction = 1e-4;
inline constexpr int kDefaultGridPoints = 4096;

std::vector<double> uniform_grid(double lo, double hi, int points);

/// Scalar transform of S1 - S0 at z (Im z > 0), S0 ~ MP(params0), S1 ~ MP(params1).
SubordinationResult p1_transform(const MpParams& params0, const MpParams& params1, Complex z,
                                 const AsdOptions& options = {});

/// Scalar transform of (S1 - S0)^2 at z via the linearization corner.
Complex p2_transform(const MpParams& params0, const MpParams& params1, Complex z,
                     const AsdOptions& options = {});

/// Same corner recovery for deterministic inputs S0 = a, S1 = b; the exact
/// answer is 1 / (z - (b - a)^2).
Complex p2_transform_point_masses(double a, double b, Complex z, const AsdOptions& options = {});

SpectralDensity asd_p1(const MpParams& params0, const MpParams& params1,
                       std::span<const double> grid, const AsdOptions& options = {});

SpectralDensity asd_p2(const MpParams& params0, const MpParams& params1,
                       std::span<const double> grid, const AsdOptions& options = {});

}  // namespace freespec
