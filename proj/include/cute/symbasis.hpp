#pragma once

// Permutation-symmetric basis of the first excitation manifold, truncated at
// κ phonon carriers (ground-electronic molecules outside their lowest
// vibrational level).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cute/vibsolver.hpp"

namespace cute {

struct SpeciesSpec {
    std::string label;
    /// Number of molecules; nullopt means the thermodynamic limit N → ∞.
    std::optional<std::size_t> n_molecules;
    /// Single-molecule coupling g (0 for infinite species).
    double g = 0.0;
    /// Collective coupling G = g√N.
    double G = 0.0;
    std::shared_ptr<const VibrationalBasis> vib;

    bool infinite() const { return !n_molecules.has_value(); }

    static SpeciesSpec with_g(std::string label, std::size_t n, double g,
                              std::shared_ptr<const VibrationalBasis> vib);
    static SpeciesSpec with_G(std::string label, std::optional<std::size_t> n, double G,
                              std::shared_ptr<const VibrationalBasis> vib);
};

/// Sparse {level → count} for levels ≥ 1 (0-based; level 0 is the implicit
/// remainder). Kept sorted by level.
using Occupation = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

struct SymmetricState {
    bool excitonic = false;
    std::uint32_t species = 0; // excitonic only
    std::uint32_t level = 0;   // excited vibrational level l, excitonic only
    std::vector<Occupation> occ; // one record per species

    std::size_t carriers() const;
    std::uint32_t count(std::size_t species, std::uint32_t level) const;

    bool operator==(const SymmetricState&) const = default;
};

/// Canonical order: carrier count, then photonic before excitonic, species,
/// excited level, occupation records lexicographically. Restricting the κ
/// basis to its first entries gives the κ-1 basis.
bool canonical_less(const SymmetricState& a, const SymmetricState& b);

inline constexpr double kDefaultBasisCap = 2e6;

class CuteBasis {
public:
    CuteBasis(std::vector<SpeciesSpec> species, std::size_t kappa, std::vector<SymmetricState> states);

    std::size_t dimension() const { return states_.size(); }
    std::size_t kappa() const { return kappa_; }
    const std::vector<SpeciesSpec>& species() const { return species_; }
    const std::vector<SymmetricState>& states() const { return states_; }
    const SymmetricState& state(std::size_t i) const { return states_[i]; }

    std::optional<std::size_t> index_of(const SymmetricState& s) const;
    std::size_t species_index(const std::string& label) const; // throws UnknownSpecies

    /// Index of the photonic state with every molecule in level 0.
    std::size_t vacuum_photonic_index() const { return 0; }
    /// Number of leading states with at most `k` carriers.
    std::size_t prefix_dimension(std::size_t k) const;

    /// √multiplicity of the state (finite-N species only).
    double renorm_factor(const SymmetricState& s) const;

private:
    std::vector<SpeciesSpec> species_;
    std::size_t kappa_;
    std::vector<SymmetricState> states_;
};

/// Exact dimension of the κ basis without enumerating it (returned as double
/// so that oversize requests can be reported).
double count_dimension(const std::vector<SpeciesSpec>& species, std::size_t kappa);

std::shared_ptr<const CuteBasis> enumerate_basis(const std::vector<SpeciesSpec>& species,
                                                 std::size_t kappa, double cap = kDefaultBasisCap);

/// One JSON object per line: index, variant, species, level, occupation, renorm.
void write_basis_jsonl(const std::string& path, const CuteBasis& basis);

} // namespace cute
