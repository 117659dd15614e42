#include "freespec/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "freespec/error.hpp"
#include "freespec/randmat.hpp"

namespace freespec {

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace {

const QuadratureRule& base_rule() {
    static const QuadratureRule rule = gauss_legendre(32);
    return rule;
}

}  // namespace

QuadratureRule composite_gauss_legendre(double lo, double hi, int panels) {
    if (panels < 1) throw InvalidArgument("composite_gauss_legendre: panels must be >= 1");
    const auto& base = base_rule();
    QuadratureRule rule;
    rule.nodes.reserve(base.size() * panels);
    rule.weights.reserve(base.size() * panels);
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double left = lo + p * width;
        for (std::size_t j = 0; j < base.size(); ++j) {
            rule.nodes.push_back(left + 0.5 * width * (base.nodes[j] + 1.0));
            rule.weights.push_back(0.5 * width * base.weights[j]);
        }
    }
    return rule;
}

QuadratureRule mp_rule(const MpParams& params, int panels) {
    validate(params);
    const double a = params.lower_edge();
    const double r = 0.5 * (params.upper_edge() - a);
    const double s2 = params.variance;
    QuadratureRule theta = composite_gauss_legendre(0.0, std::numbers::pi, panels);
    QuadratureRule rule;
    rule.nodes.resize(theta.size());
    rule.weights.resize(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double sh = std::sin(0.5 * theta.nodes[j]);
        const double ch = std::cos(0.5 * theta.nodes[j]);
        // 1 - cos(theta) = 2 sin^2(theta/2); sin^2(theta) = 4 sin^2 cos^2.
        const double t = a + 2.0 * r * sh * sh;
        const double density_jacobian =
            r * r * 4.0 * sh * sh * ch * ch / (2.0 * std::numbers::pi * params.ratio * s2 * t);
        rule.nodes[j] = t;
        rule.weights[j] = theta.weights[j] * density_jacobian;
    }
    return rule;
}

}  // namespace freespec
