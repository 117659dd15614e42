#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace freespec {

using Engine = std::mt19937_64;

// Independent engine for (seed, stream). Every randomized operation derives
// its engines this way so that results do not depend on loop scheduling.
Engine substream(std::uint64_t seed, std::uint64_t stream);

// Fill with i.i.d. N(0, 1) draws in column-major order.
void fill_gaussian(Eigen::MatrixXd& m, Engine& engine);

}  // namespace freespec
