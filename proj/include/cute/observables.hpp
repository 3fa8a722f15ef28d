#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cute/dynamics.hpp"

namespace cute {

/// Σ |amplitude|² over all photonic states.
double photon_population(const CuteBasis& basis, const Eigen::VectorXcd& v);
/// Σ |amplitude|² over all excitonic states.
double excited_population(const CuteBasis& basis, const Eigen::VectorXcd& v);
double species_excited_population(const CuteBasis& basis, const Eigen::VectorXcd& v, const std::string& species);

/// ⟨Ψ̃_FC|Ψ̃⟩ with Ψ̃_FC = φ_1|e⟩ of one species, expanded over the retained
/// excited levels and normalised there.
cplx fc_overlap(const CuteBasis& basis, const Eigen::VectorXcd& v, std::size_t species);
/// Σ over species of |⟨Ψ̃_FC|Ψ̃⟩|².
double fc_population(const CuteBasis& basis, const Eigen::VectorXcd& v);

/// ⟨Ψ̃|e⟩(1 - |φ_1⟩⟨φ_1|)⟨e|Ψ̃⟩: excited weight outside the Franck-Condon
/// state. Zeroth order only (OrderMismatch otherwise).
double dark_manifold_population(const CuteBasis& basis, const Eigen::VectorXcd& v);

/// |P⟩ = c0|1⟩ + c1|B⟩; in the effective picture |B⟩ ↦ Ψ̃_FC.
struct PolaritonProjector {
    cplx c0;
    cplx c1;
    static PolaritonProjector make(cplx c0, cplx c1);
};

/// |⟨P|Ψ̃⟩|² expanded as in the zeroth-order theory. Zeroth order only.
double polariton_population(const CuteBasis& basis, const Eigen::VectorXcd& v, const PolaritonProjector& p,
                            std::size_t species = 0);

/// ⟨Ψ̃|q̂|e⟩⟨e|Ψ̃⟩ for one species (no 1/N dilution applied).
double excited_position_expectation(const CuteBasis& basis, const Eigen::VectorXcd& v, const std::string& species);
std::vector<double> excited_position_series(const CuteBasis& basis, const TrajectoryRecord& traj,
                                            const std::string& species);

/// p_s = Σ_n |⟨n|e_j⟩|² |⟨n|1⟩|² from the full eigendecomposition.
double statistical_yield(const HamiltonianMatrix& h, const std::string& species);

/// The same yields from the (1 + J)-dimensional Franck-Condon polariton
/// problem: each species collapsed to one state with energy Σ_l F_l1² ω_eg,l /
/// Σ_l F_l1² and coupling G Σ_l F_l1²^{1/2}. One entry per species.
std::vector<double> fc_statistical_yields(const std::vector<SpeciesSpec>& species, const CavitySpec& cavity);

struct PopulationRecord {
    std::vector<double> times;
    std::vector<double> photon;
    std::vector<double> fc;
    std::vector<double> dark; // empty when κ > 0
    std::vector<std::string> species;
    std::vector<std::vector<double>> species_excited;
};

PopulationRecord populations(const CuteBasis& basis, const TrajectoryRecord& traj);
void write_populations_csv(const std::string& path, const PopulationRecord& rec);

/// One configuration of the explicit N-molecule wavefunction. `excited` is
/// the index of the excited molecule (-1 for the photon sector); `levels`
/// lists every molecule's vibrational level (the excited molecule's entry
/// refers to the excited surface).
struct ManybodyTerm {
    int excited = -1;
    std::vector<std::uint32_t> levels;
    cplx amplitude;
};

/// Undo the renormalisation for κ ≤ 1 (OrderTooHigh otherwise): every
/// configuration reachable from the basis, with amplitude Ã / √multiplicity.
/// Single finite species with N ≤ max_molecules.
std::vector<ManybodyTerm> reconstruct_manybody(const CuteBasis& basis, const Eigen::VectorXcd& v,
                                               std::size_t max_molecules = 8);

} // namespace cute
