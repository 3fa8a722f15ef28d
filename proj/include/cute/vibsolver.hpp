#pragma once

// One-dimensional vibrational eigenproblems on a uniform grid (Colbert-Miller
// DVR) and the Franck-Condon overlaps between ground and excited surfaces.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cute {

struct Grid {
    std::size_t n_points = 0;
    double q_min = 0.0;
    double q_max = 0.0;

    /// Validating constructor: n_points >= 16, q_max > q_min.
    static Grid make(std::size_t n_points, double q_min, double q_max);

    double spacing() const { return (q_max - q_min) / static_cast<double>(n_points - 1); }
    double point(std::size_t i) const { return q_min + spacing() * static_cast<double>(i); }
    std::vector<double> points() const;

    bool operator==(const Grid&) const = default;
};

/// Natural: μ = 1 mass-weighted coordinates, kinetic term -(1/2)∂². Physical:
/// coordinates in Å, nuclear mass in amu, kinetic constant from CODATA.
class UnitMode {
public:
    enum class Kind { Natural, Physical };

    static UnitMode natural() { return UnitMode(Kind::Natural, 1.0); }
    static UnitMode physical(double mass_amu);

    Kind kind() const { return kind_; }
    double mass_amu() const { return mass_; }

    /// ħ²/(2μ) in energy × coordinate² units of the active mode.
    double kinetic_prefactor() const;
    /// μ/ħ² in the active mode; a harmonic well of frequency ω is ½·factor·ω²·q².
    double mass_factor() const { return 1.0 / (2.0 * kinetic_prefactor()); }

    bool operator==(const UnitMode&) const = default;

private:
    UnitMode(Kind kind, double mass) : kind_(kind), mass_(mass) {}
    Kind kind_;
    double mass_;
};

namespace potential {

struct Harmonic {
    double omega;
};
struct DisplacedHarmonic {
    double omega;
    double d;
    double offset = 0.0;
};
/// Displaced harmonic well whose displacement is fixed by the dimensionless
/// Huang-Rhys factor S = ½·(μ/ħ²)·ω·d².
struct HuangRhysHarmonic {
    double omega;
    double S;
    double offset = 0.0;
};
/// exp(-a (q - d)) + offset
struct Exponential {
    double a;
    double d;
    double offset = 0.0;
};
/// exp(-a (q - d1)) + c exp(-b (q - d2)²) + offset
struct ExponentialWithBump {
    double a;
    double d1;
    double b;
    double c;
    double d2;
    double offset = 0.0;
};
struct Tabulated {
    std::vector<double> values;
};

} // namespace potential

using PotentialSpec =
    std::variant<potential::Harmonic, potential::DisplacedHarmonic, potential::HuangRhysHarmonic,
                 potential::Exponential, potential::ExponentialWithBump, potential::Tabulated>;

/// Displacement implied by a HuangRhysHarmonic spec in the given unit mode.
double huang_rhys_displacement(const potential::HuangRhysHarmonic& spec, const UnitMode& units);

/// Potential values on the grid; throws InvalidArgument for non-finite values.
std::vector<double> evaluate_potential(const PotentialSpec& spec, const Grid& grid,
                                       const UnitMode& units);

/// Eigenpairs on a grid. Columns of `functions` are normalised so that
/// spacing · Σ ψ(q_i)² = 1, with the largest-magnitude component positive.
struct EigenSet {
    Grid grid;
    Eigen::VectorXd energies;
    Eigen::MatrixXd functions;
};

EigenSet solve_dvr(const Grid& grid, const PotentialSpec& potential, const UnitMode& units,
                   std::size_t m);
EigenSet solve_dvr(const Grid& grid, const std::vector<double>& potential_values,
                   const UnitMode& units, std::size_t m);

/// F(l, k) = ⟨ϕ_l|φ_k⟩ by grid quadrature (rows: excited, columns: ground).
Eigen::MatrixXd franck_condon_matrix(const EigenSet& ground, const EigenSet& excited);

/// 1 - Σ_l F(l,k)² for each ground level k (Bessel leakage of the truncation).
Eigen::VectorXd franck_condon_leakage(const Eigen::MatrixXd& fc);

/// Ground/excited vibrational eigenpairs of one species plus their overlaps.
/// Grid data are optional so that bases can also be specified directly by
/// energies and an overlap matrix.
struct VibrationalBasis {
    Eigen::VectorXd ground_energies;
    Eigen::VectorXd excited_energies;
    Eigen::MatrixXd fc; // m_e × m_g
    std::optional<EigenSet> ground;
    std::optional<EigenSet> excited;

    std::size_t m_g() const { return static_cast<std::size_t>(ground_energies.size()); }
    std::size_t m_e() const { return static_cast<std::size_t>(excited_energies.size()); }

    /// ω_{g,k} = E_{g,k} - E_{g,1}
    double ground_gap(std::size_t k) const { return ground_energies[k] - ground_energies[0]; }
    /// ω_{eg,l} = E_{e,l} - E_{g,1}
    double transition(std::size_t l) const { return excited_energies[l] - ground_energies[0]; }

    /// ⟨ϕ_l|q|ϕ_l'⟩ over the excited eigenfunctions; requires grid data.
    Eigen::MatrixXd excited_position_matrix() const;

    static VibrationalBasis from_matrices(Eigen::VectorXd ground_energies,
                                          Eigen::VectorXd excited_energies, Eigen::MatrixXd fc);
};

VibrationalBasis solve_species(const Grid& grid, const PotentialSpec& ground,
                               const PotentialSpec& excited, const UnitMode& units,
                               std::size_t m_g, std::size_t m_e);

/// CSV with q in column 1 and one eigenfunction per following column.
void write_eigenfunctions_csv(const std::string& path, const EigenSet& set);

} // namespace cute
