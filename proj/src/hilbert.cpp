#include "waveforge/hilbert.hpp"

namespace waveforge {

StateFunction actuation_a(const Grid& grid, double alpha) {
    const double c = 1.0 / (alpha * grid.length());
    const Eigen::Index n = grid.size();
    return {c * grid.x(), Eigen::VectorXd::Constant(n, c), Eigen::VectorXd::Zero(n)};
}

StateFunction actuation_b(const Grid& grid, double alpha) {
    const double c = 1.0 / (alpha * grid.length());
    const Eigen::Index n = grid.size();
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), -c * grid.x()};
}

}  // namespace waveforge
