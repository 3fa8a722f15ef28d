#pragma once

// Brute-force reference over the full tensor-product basis of N molecules,
// used to check the symmetric engine.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "cute/dynamics.hpp"

namespace cute {

inline constexpr std::size_t kOracleMaxMolecules = 6;
inline constexpr double kOracleDimensionCap = 1e5;

/// Photon sector (m_g^N configurations) followed by one sector per excited
/// molecule i (m_e · m_g^{N-1}); configurations lexicographic with molecule 0
/// most significant.
class OracleBasis {
public:
    static std::shared_ptr<const OracleBasis> make(std::size_t n, std::size_t m_g, std::size_t m_e,
                                                   double cap = kOracleDimensionCap);

    std::size_t n() const { return n_; }
    std::size_t m_g() const { return m_g_; }
    std::size_t m_e() const { return m_e_; }
    std::size_t dimension() const { return photon_size_ + n_ * exciton_size_; }

    /// excited = -1 for the photon sector; levels[excited] is an excited level.
    std::size_t index(int excited, const std::vector<std::uint32_t>& levels) const;
    void decode(std::size_t idx, int& excited, std::vector<std::uint32_t>& levels) const;

private:
    OracleBasis(std::size_t n, std::size_t m_g, std::size_t m_e);
    std::size_t n_, m_g_, m_e_;
    std::size_t photon_size_, exciton_size_;
};

HamiltonianMatrix build_oracle(const std::shared_ptr<const OracleBasis>& basis, const VibrationalBasis& vib,
                               double g, double omega_c);

/// Exchanges molecules a and b.
Eigen::SparseMatrix<double> permutation_matrix(const OracleBasis& basis, std::size_t a, std::size_t b);

/// max over transpositions of ‖P v - v‖.
double symmetry_defect(const OracleBasis& basis, const Eigen::VectorXcd& v);

/// Oracle vector → renormalised amplitudes on a κ = N symmetric basis of the
/// same single species. Throws NotSymmetric if any transposition changes v by
/// more than 1e-8.
StateVector symmetrize(const OracleBasis& basis, const Eigen::VectorXcd& v,
                       const std::shared_ptr<const CuteBasis>& target);
/// Inverse map: spreads each Ã over its configurations as Ã/√multiplicity.
Eigen::VectorXcd unsymmetrize(const OracleBasis& basis, const StateVector& v);

StateVector oracle_photonic_state(const std::shared_ptr<const OracleBasis>& basis);

struct ComparisonReport {
    std::size_t n = 0;
    std::size_t kappa = 0;
    std::vector<double> times;
    std::vector<double> distance; // ‖sym(oracle) - CUT-E(κ)‖ per time
    std::vector<double> leakage;  // oracle population beyond κ carriers
    double max_distance = 0.0;
    double max_leakage = 0.0;

    std::string to_json() const;
};

ComparisonReport compare_dynamics(std::size_t n, const std::shared_ptr<const VibrationalBasis>& vib, double g,
                                  double omega_c, std::size_t kappa, const std::vector<double>& times);

/// Population outside the ≤ κ carrier blocks at time t, computed with the
/// exact (κ = N) symmetric engine for a single species at collective coupling G.
double truncation_leakage(std::size_t n, const std::shared_ptr<const VibrationalBasis>& vib, double G,
                          double omega_c, std::size_t kappa, double t_fs);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace cute
