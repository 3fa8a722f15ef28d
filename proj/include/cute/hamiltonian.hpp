#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cute/symbasis.hpp"

namespace cute {

struct CavitySpec {
    double omega_c = 0.0;

    static CavitySpec make(double omega_c);
};

struct Eigensystem {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns
};

inline constexpr std::size_t kSparseThreshold = 2000;
inline constexpr std::size_t kDenseSolverCap = 8000;

/// Real symmetric Hamiltonian, dense or sparse, with a lazily computed and
/// cached eigendecomposition. The basis handle is type-erased so that the
/// oracle and the symmetric engine share the same container.
class HamiltonianMatrix {
public:
    HamiltonianMatrix() = default;
    HamiltonianMatrix(Eigen::MatrixXd dense, std::shared_ptr<const void> basis = {});
    HamiltonianMatrix(Eigen::SparseMatrix<double> sparse, std::shared_ptr<const void> basis = {});

    /// Picks dense storage up to kSparseThreshold, sparse above.
    static HamiltonianMatrix from_triplets(std::size_t dim,
                                           const std::vector<Eigen::Triplet<double>>& triplets,
                                           std::shared_ptr<const void> basis = {});

    std::size_t dimension() const { return dim_; }
    bool is_sparse() const { return sparse_.has_value(); }
    Eigen::MatrixXd to_dense() const;
    Eigen::SparseMatrix<double> to_sparse() const;
    double operator()(std::size_t i, std::size_t j) const;
    double max_abs() const;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    const void* basis_tag() const { return basis_.get(); }
    const std::shared_ptr<const void>& basis_handle() const { return basis_; }
    /// Non-null when the matrix was assembled over a CuteBasis.
    const CuteBasis* cute_basis() const { return cute_; }

    /// Full eigendecomposition, computed once and shared by copies.
    const Eigensystem& eigensystem() const;

private:
    struct Cache {
        std::once_flag once;
        Eigensystem eig;
    };

    std::size_t dim_ = 0;
    std::optional<Eigen::MatrixXd> dense_;
    std::optional<Eigen::SparseMatrix<double>> sparse_;
    std::shared_ptr<const void> basis_;
    const CuteBasis* cute_ = nullptr;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

    friend HamiltonianMatrix build_hamiltonian(std::shared_ptr<const CuteBasis>, const CavitySpec&);
};

HamiltonianMatrix build_hamiltonian(std::shared_ptr<const CuteBasis> basis, const CavitySpec& cavity);

/// Full spectrum. Throws DimensionCap above `cap`, NonConverged on solver failure.
Eigensystem diagonalize(const HamiltonianMatrix& h, std::size_t cap = kDenseSolverCap);

/// The k lowest eigenpairs by Lanczos with full reorthogonalisation.
Eigensystem lowest_eigenpairs(const HamiltonianMatrix& h, std::size_t k, double tol = 1e-10,
                              std::size_t max_krylov = 0);

void write_matrix_market(const std::string& path, const HamiltonianMatrix& h);

// ---------------------------------------------------------------------------
// Linear vibronic bath model for golden-rule benchmarks.

struct VibronicBathSpec {
    std::vector<double> omega; // mode frequencies, ascending
    std::vector<double> s;     // Huang-Rhys factors
    /// Bath quanta allowed on one effective molecule.
    std::size_t max_occupation = 1;
    /// Quanta allowed over both effective molecules (first order); defaults to
    /// max_occupation.
    std::optional<std::size_t> max_total;
    /// When set, configurations with two or more quanta must contain this mode
    /// on the phonon-carrying molecule. Keeps targeted runs tractable.
    std::optional<std::size_t> anchor;
};

enum class FgrOrder { Zeroth, First };

/// Electronic sector of a bath-model state. Photon: cavity excited, tagged
/// molecule (if any) carries `carrier` quanta. Bright: no phonon carrier, the
/// excited molecule holds `carrier` quanta. Other: tagged molecule is a ground
/// carrier with `carrier` quanta, the excitation sits on one of the other N-1
/// molecules holding `excited` quanta.
enum class FgrSector { Photon, Bright, Other };

using ModeConfig = std::vector<std::size_t>; // sorted multiset of mode indices

struct FgrState {
    FgrSector sector;
    ModeConfig carrier;
    ModeConfig excited;
    std::string label() const;
};

struct VibronicModel {
    HamiltonianMatrix H0;
    HamiltonianMatrix H1;
    std::vector<FgrState> states;
    std::optional<std::size_t> find(FgrSector sector, const ModeConfig& carrier,
                                    const ModeConfig& excited = {}) const;
};

inline constexpr std::size_t kBathDimensionCap = 6000;

VibronicModel build_vibronic_fgr_model(FgrOrder order, std::size_t n_molecules, double g, double omega,
                                       const VibronicBathSpec& bath);

} // namespace cute
