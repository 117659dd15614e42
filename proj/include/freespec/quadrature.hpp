#pragma once

#include <span>
#include <vector>

namespace freespec {

struct MpParams;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Composite rule: `panels` equal panels on [lo, hi], 32-point
/// Gauss-Legendre on each.
QuadratureRule composite_gauss_legendre(double lo, double hi, int panels);

/// Nodes t_j and weights w_j with sum_j w_j f(t_j) ~ int f(t) dMP(t).
///
/// Uses t = a + r (1 - cos theta) on theta in [0, pi] (r = (b - a) / 2).
/// The MP weight becomes r^2 sin^2(theta) / (2 pi sigma^2 t), which stays
/// bounded and smooth at both edges, including the hard edge a = 0 when
/// c = 1. `panels` 32-point panels, 16 panels = 512 nodes.
QuadratureRule mp_rule(const MpParams& params, int panels);

}  // namespace freespec
