#pragma once

// Grid sweep kernels: evaluate a scalar transform at many independent points.
// The OpenMP kernel and the serial reference produce identical output (each
// point is computed in isolation), which the tests check bit for bit.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "freespec/linalg.hpp"

namespace freespec {

enum class PointStatus { Ok, IllConditioned };

struct PointValue {
    Complex value{};
    PointStatus status = PointStatus::Ok;
};

using PointFunction = std::function<Complex(Complex)>;

/// Conditioning failures mark the point; any other exception is rethrown
/// after the sweep (the one at the lowest index wins).
std::vector<PointValue> sweep_parallel(std::span<const Complex> points, const PointFunction& fn);
std::vector<PointValue> sweep_serial(std::span<const Complex> points, const PointFunction& fn);

}  // namespace freespec
