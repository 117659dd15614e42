#include "freespec/rng.hpp"

namespace freespec {

Engine substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    return Engine(seq);
}

void fill_gaussian(Eigen::MatrixXd& m, Engine& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double* p = m.data();
    const auto n = m.size();
    for (Eigen::Index i = 0; i < n; ++i) p[i] = normal(engine);
}

}  // namespace freespec
