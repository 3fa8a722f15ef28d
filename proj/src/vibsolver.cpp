#include "cute/vibsolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/units.hpp"

namespace cute {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kEdgeFraction = 0.05;
constexpr double kEdgeNormLimit = 0.01;

// Fraction of the squared norm of `psi` that lives in the first/last 5% of
// the grid points.
std::pair<double, double> edge_weights(const Eigen::VectorXd& psi) {
    const auto n = psi.size();
    const auto width = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(kEdgeFraction * n));
    const double total = psi.squaredNorm();
    return {psi.head(width).squaredNorm() / total, psi.tail(width).squaredNorm() / total};
}

} // namespace

Grid Grid::make(std::size_t n_points, double q_min, double q_max) {
    if (n_points < 16)
        throw Error(ErrorKind::InvalidArgument, "grid needs at least 16 points");
    if (!(q_max > q_min))
        throw Error(ErrorKind::InvalidArgument, "grid requires q_max > q_min");
    return Grid{n_points, q_min, q_max};
}

std::vector<double> Grid::points() const {
    std::vector<double> q(n_points);
    for (std::size_t i = 0; i < n_points; ++i) q[i] = point(i);
    return q;
}

UnitMode UnitMode::physical(double mass_amu) {
    if (!(mass_amu > 0.0))
        throw Error(ErrorKind::InvalidArgument, "physical unit mode requires mass > 0");
    return UnitMode(Kind::Physical, mass_amu);
}

double UnitMode::kinetic_prefactor() const {
    if (kind_ == Kind::Natural) return 0.5;
    return units::kinetic_constant_eV / (2.0 * mass_);
}

double huang_rhys_displacement(const potential::HuangRhysHarmonic& spec, const UnitMode& units) {
    if (!(spec.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "harmonic ω must be > 0");
    if (spec.S < 0.0) throw Error(ErrorKind::InvalidArgument, "Huang-Rhys factor must be >= 0");
    return std::sqrt(2.0 * spec.S / (units.mass_factor() * spec.omega));
}

std::vector<double> evaluate_potential(const PotentialSpec& spec, const Grid& grid,
                                       const UnitMode& units) {
    const double k = units.mass_factor();
    auto harmonic = [&](double omega, double d, double offset) {
        if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "harmonic ω must be > 0");
        std::vector<double> v(grid.n_points);
        for (std::size_t i = 0; i < grid.n_points; ++i) {
            const double x = grid.point(i) - d;
            v[i] = 0.5 * k * omega * omega * x * x + offset;
        }
        return v;
    };

    std::vector<double> values = std::visit(
        overloaded{
            [&](const potential::Harmonic& p) { return harmonic(p.omega, 0.0, 0.0); },
            [&](const potential::DisplacedHarmonic& p) { return harmonic(p.omega, p.d, p.offset); },
            [&](const potential::HuangRhysHarmonic& p) {
                return harmonic(p.omega, huang_rhys_displacement(p, units), p.offset);
            },
            [&](const potential::Exponential& p) {
                std::vector<double> v(grid.n_points);
                for (std::size_t i = 0; i < grid.n_points; ++i)
                    v[i] = std::exp(-p.a * (grid.point(i) - p.d)) + p.offset;
                return v;
            },
            [&](const potential::ExponentialWithBump& p) {
                std::vector<double> v(grid.n_points);
                for (std::size_t i = 0; i < grid.n_points; ++i) {
                    const double q = grid.point(i);
                    v[i] = std::exp(-p.a * (q - p.d1)) + p.c * std::exp(-p.b * (q - p.d2) * (q - p.d2)) +
                           p.offset;
                }
                return v;
            },
            [&](const potential::Tabulated& p) {
                if (p.values.size() != grid.n_points)
                    throw Error(ErrorKind::InvalidArgument,
                                "tabulated potential length does not match grid");
                return p.values;
            },
        },
        spec);

    for (double v : values)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidArgument, "potential is not finite on the grid");
    return values;
}

EigenSet solve_dvr(const Grid& grid, const PotentialSpec& potential, const UnitMode& units,
                   std::size_t m) {
    return solve_dvr(grid, evaluate_potential(potential, grid, units), units, m);
}

EigenSet solve_dvr(const Grid& grid, const std::vector<double>& potential_values,
                   const UnitMode& units, std::size_t m) {
    const auto n = static_cast<Eigen::Index>(grid.n_points);
    if (m == 0 || m > grid.n_points)
        throw Error(ErrorKind::InvalidArgument, "requested eigenpair count must be in [1, n_points]");
    if (potential_values.size() != grid.n_points)
        throw Error(ErrorKind::InvalidArgument, "potential length does not match grid");

    const double dq = grid.spacing();
    const double kappa = units.kinetic_prefactor() / (dq * dq);
    const double pi2 = units::pi * units::pi;

    // Colbert-Miller kinetic matrix for the (-∞, ∞) uniform grid.
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = kappa * pi2 / 3.0 + potential_values[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto diff = static_cast<double>(i - j);
            const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            h(i, j) = h(j, i) = kappa * 2.0 * sign / (diff * diff);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergedEigensolve, "DVR eigensolver failed");

    const auto mm = static_cast<Eigen::Index>(m);
    EigenSet out{grid, solver.eigenvalues().head(mm), solver.eigenvectors().leftCols(mm) / std::sqrt(dq)};

    for (Eigen::Index c = 0; c < mm; ++c) {
        // Mirror-symmetric wells give two lobes of equal size; the leftmost
        // near-maximal component breaks the tie reproducibly.
        const double peak = out.functions.col(c).cwiseAbs().maxCoeff();
        Eigen::Index imax = 0;
        while (std::abs(out.functions(imax, c)) < peak * (1.0 - 1e-6)) ++imax;
        if (out.functions(imax, c) < 0.0) out.functions.col(c) *= -1.0;
    }

    // A bound state that still carries weight at a classically forbidden edge
    // means the box is too small. Edges where the potential lies below the
    // eigenvalue are open (continuum discretised by the box) and not checked.
    const double e_top = out.energies[mm - 1];
    const auto [left, right] = edge_weights(out.functions.col(mm - 1));
    const bool left_closed = potential_values.front() > e_top;
    const bool right_closed = potential_values.back() > e_top;
    if ((left_closed && left > kEdgeNormLimit) || (right_closed && right > kEdgeNormLimit))
        throw Error(ErrorKind::GridTooCoarse,
                    "eigenfunction " + std::to_string(m) + " has " +
                        std::to_string(100.0 * std::max(left_closed ? left : 0.0,
                                                        right_closed ? right : 0.0)) +
                        "% of its norm in the outer 5% of the grid");
    return out;
}

Eigen::MatrixXd franck_condon_matrix(const EigenSet& ground, const EigenSet& excited) {
    if (!(ground.grid == excited.grid))
        throw Error(ErrorKind::GridMismatch, "ground and excited eigenfunctions use different grids");
    return ground.grid.spacing() * (excited.functions.transpose() * ground.functions);
}

Eigen::VectorXd franck_condon_leakage(const Eigen::MatrixXd& fc) {
    return Eigen::VectorXd::Ones(fc.cols()) - fc.colwise().squaredNorm().transpose();
}

Eigen::MatrixXd VibrationalBasis::excited_position_matrix() const {
    if (!excited)
        throw Error(ErrorKind::InvalidArgument, "position matrix requires grid eigenfunctions");
    const auto& set = *excited;
    Eigen::VectorXd q(static_cast<Eigen::Index>(set.grid.n_points));
    for (std::size_t i = 0; i < set.grid.n_points; ++i) q[static_cast<Eigen::Index>(i)] = set.grid.point(i);
    return set.grid.spacing() * (set.functions.transpose() * q.asDiagonal() * set.functions);
}

VibrationalBasis VibrationalBasis::from_matrices(Eigen::VectorXd ground_energies,
                                                 Eigen::VectorXd excited_energies,
                                                 Eigen::MatrixXd fc) {
    if (ground_energies.size() == 0 || excited_energies.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "vibrational basis needs m_g, m_e >= 1");
    if (fc.rows() != excited_energies.size() || fc.cols() != ground_energies.size())
        throw Error(ErrorKind::MissingOverlap, "overlap matrix must be m_e × m_g");
    VibrationalBasis b;
    b.ground_energies = std::move(ground_energies);
    b.excited_energies = std::move(excited_energies);
    b.fc = std::move(fc);
    return b;
}

VibrationalBasis solve_species(const Grid& grid, const PotentialSpec& ground,
                               const PotentialSpec& excited, const UnitMode& units,
                               std::size_t m_g, std::size_t m_e) {
    EigenSet g = solve_dvr(grid, ground, units, m_g);
    EigenSet e = solve_dvr(grid, excited, units, m_e);
    VibrationalBasis b;
    b.fc = franck_condon_matrix(g, e);
    b.ground_energies = g.energies;
    b.excited_energies = e.energies;
    b.ground = std::move(g);
    b.excited = std::move(e);
    return b;
}

void write_eigenfunctions_csv(const std::string& path, const EigenSet& set) {
    io::CsvWriter csv(path);
    std::vector<std::string> cols{"q"};
    for (Eigen::Index c = 0; c < set.functions.cols(); ++c) cols.push_back("psi" + std::to_string(c));
    csv.header(cols);
    std::vector<double> row(static_cast<std::size_t>(set.functions.cols()) + 1);
    for (std::size_t i = 0; i < set.grid.n_points; ++i) {
        row[0] = set.grid.point(i);
        for (Eigen::Index c = 0; c < set.functions.cols(); ++c)
            row[static_cast<std::size_t>(c) + 1] = set.functions(static_cast<Eigen::Index>(i), c);
        csv.row(row);
    }
}

} // namespace cute
