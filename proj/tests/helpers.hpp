#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "cute/vibsolver.hpp"

namespace testing {

/// Vibrational basis with ascending energies and an overlap matrix with
/// orthonormal columns (rows if m_e < m_g), drawn from a fixed seed.
inline std::shared_ptr<const cute::VibrationalBasis> random_vib(std::size_t m_g, std::size_t m_e,
                                                                std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd eg(static_cast<Eigen::Index>(m_g)), ee(static_cast<Eigen::Index>(m_e));
    for (Eigen::Index k = 0; k < eg.size(); ++k) eg[k] = 0.11 + 0.2 * k + 0.02 * u(rng);
    for (Eigen::Index l = 0; l < ee.size(); ++l) ee[l] = 2.1 + 0.18 * l + 0.02 * u(rng);
    const auto n = static_cast<Eigen::Index>(std::max(m_g, m_e));
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd fc = q.topLeftCorner(static_cast<Eigen::Index>(m_e), static_cast<Eigen::Index>(m_g));
    return std::make_shared<cute::VibrationalBasis>(cute::VibrationalBasis::from_matrices(eg, ee, fc));
}

/// Displaced harmonic species in natural units (ground ω, excited ω shifted
/// by `d` and raised by `offset`).
inline std::shared_ptr<const cute::VibrationalBasis> displaced_vib(double omega, double d, double offset,
                                                                   std::size_t m_g, std::size_t m_e,
                                                                   std::size_t n_points = 200) {
    const double width = 8.0 / std::sqrt(omega);
    const auto grid = cute::Grid::make(n_points, -width, width + std::abs(d));
    return std::make_shared<cute::VibrationalBasis>(
        cute::solve_species(grid, cute::potential::Harmonic{omega},
                            cute::potential::DisplacedHarmonic{omega, d, offset}, cute::UnitMode::natural(), m_g,
                            m_e));
}

} // namespace testing
