#include "cute/observables.hpp"

#include <cmath>

#include "cute/error.hpp"
#include "cute/io.hpp"

namespace cute {

namespace {

void require_zeroth(const CuteBasis& basis, const char* what) {
    if (basis.kappa() != 0)
        throw Error(ErrorKind::OrderMismatch, std::string(what) + " is defined for κ = 0 bases only");
}

/// Normalised FC column of a species over its retained excited levels.
Eigen::VectorXd fc_column(const SpeciesSpec& sp) {
    Eigen::VectorXd f = sp.vib->fc.col(0);
    const double n = f.norm();
    if (n > 0.0) f /= n;
    return f;
}

std::optional<std::size_t> zero_carrier_exciton(const CuteBasis& basis, std::size_t species, std::size_t l) {
    SymmetricState s;
    s.excitonic = true;
    s.species = static_cast<std::uint32_t>(species);
    s.level = static_cast<std::uint32_t>(l);
    s.occ.resize(basis.species().size());
    return basis.index_of(s);
}

Eigen::MatrixXd position_matrix(const CuteBasis& basis, std::size_t j) {
    return basis.species()[j].vib->excited_position_matrix();
}

double position_expectation(const CuteBasis& basis, const Eigen::VectorXcd& v, std::size_t j,
                            const Eigen::MatrixXd& X) {
    // Group excitonic amplitudes of species j by their ground occupation; q̂
    // acts only on the excited level.
    double total = 0.0;
    const auto m_e = static_cast<Eigen::Index>(basis.species()[j].vib->m_e());
    Eigen::VectorXcd block(m_e);
    const Eigen::MatrixXcd Xc = X.cast<cplx>();
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const auto& s = basis.state(i);
        if (!s.excitonic || s.species != j || s.level != 0) continue;
        SymmetricState t = s;
        for (Eigen::Index l = 0; l < m_e; ++l) {
            t.level = static_cast<std::uint32_t>(l);
            auto idx = basis.index_of(t);
            block[l] = idx ? v[static_cast<Eigen::Index>(*idx)] : cplx(0.0);
        }
        total += block.dot(Xc * block).real();
    }
    return total;
}

} // namespace

double photon_population(const CuteBasis& basis, const Eigen::VectorXcd& v) {
    double p = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        if (!basis.state(i).excitonic) p += std::norm(v[static_cast<Eigen::Index>(i)]);
    return p;
}

double excited_population(const CuteBasis& basis, const Eigen::VectorXcd& v) {
    double p = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        if (basis.state(i).excitonic) p += std::norm(v[static_cast<Eigen::Index>(i)]);
    return p;
}

double species_excited_population(const CuteBasis& basis, const Eigen::VectorXcd& v, const std::string& species) {
    const auto j = basis.species_index(species);
    double p = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const auto& s = basis.state(i);
        if (s.excitonic && s.species == j) p += std::norm(v[static_cast<Eigen::Index>(i)]);
    }
    return p;
}

cplx fc_overlap(const CuteBasis& basis, const Eigen::VectorXcd& v, std::size_t species) {
    const auto& sp = basis.species().at(species);
    const Eigen::VectorXd f = fc_column(sp);
    cplx acc = 0.0;
    for (std::size_t l = 0; l < sp.vib->m_e(); ++l)
        if (auto idx = zero_carrier_exciton(basis, species, l))
            acc += f[static_cast<Eigen::Index>(l)] * v[static_cast<Eigen::Index>(*idx)];
    return acc;
}

double fc_population(const CuteBasis& basis, const Eigen::VectorXcd& v) {
    double p = 0.0;
    for (std::size_t j = 0; j < basis.species().size(); ++j) p += std::norm(fc_overlap(basis, v, j));
    return p;
}

double dark_manifold_population(const CuteBasis& basis, const Eigen::VectorXcd& v) {
    require_zeroth(basis, "dark-manifold population");
    return excited_population(basis, v) - fc_population(basis, v);
}

PolaritonProjector PolaritonProjector::make(cplx c0, cplx c1) {
    const double n = std::norm(c0) + std::norm(c1);
    if (std::abs(n - 1.0) > 1e-10)
        throw Error(ErrorKind::InvalidArgument, "polariton projector must satisfy |c0|² + |c1|² = 1");
    return PolaritonProjector{c0, c1};
}

double polariton_population(const CuteBasis& basis, const Eigen::VectorXcd& v, const PolaritonProjector& p,
                            std::size_t species) {
    require_zeroth(basis, "polariton population");
    const cplx a1 = v[static_cast<Eigen::Index>(basis.vacuum_photonic_index())];
    const cplx afc = fc_overlap(basis, v, species);
    // |c0|²ρ11 + c0* c1 ρ1e + c1* c0 ρe1 + |c1|² |⟨FC|Ψ⟩|²
    const cplx rho_1e = a1 * std::conj(afc);
    const double pop = std::norm(p.c0) * std::norm(a1) + 2.0 * (std::conj(p.c0) * p.c1 * rho_1e).real() +
                       std::norm(p.c1) * std::norm(afc);
    return pop;
}

double excited_position_expectation(const CuteBasis& basis, const Eigen::VectorXcd& v, const std::string& species) {
    const auto j = basis.species_index(species);
    return position_expectation(basis, v, j, position_matrix(basis, j));
}

std::vector<double> excited_position_series(const CuteBasis& basis, const TrajectoryRecord& traj,
                                            const std::string& species) {
    const auto j = basis.species_index(species);
    const Eigen::MatrixXd X = position_matrix(basis, j);
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& v : traj.states) out.push_back(position_expectation(basis, v, j, X));
    return out;
}

double statistical_yield(const HamiltonianMatrix& h, const std::string& species) {
    const CuteBasis* basis = h.cute_basis();
    if (!basis) throw Error(ErrorKind::BasisMismatch, "statistical yield needs a symmetric-basis Hamiltonian");
    const auto j = basis->species_index(species);
    const auto& eig = h.eigensystem();
    const auto photon = static_cast<Eigen::Index>(basis->vacuum_photonic_index());
    double p = 0.0;
    for (Eigen::Index n = 0; n < eig.vectors.cols(); ++n) {
        double w = 0.0;
        for (std::size_t i = 0; i < basis->dimension(); ++i) {
            const auto& s = basis->state(i);
            if (s.excitonic && s.species == j) w += std::pow(eig.vectors(static_cast<Eigen::Index>(i), n), 2);
        }
        p += w * std::pow(eig.vectors(photon, n), 2);
    }
    return p;
}

std::vector<double> fc_statistical_yields(const std::vector<SpeciesSpec>& species, const CavitySpec& cavity) {
    const auto J = static_cast<Eigen::Index>(species.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(J + 1, J + 1);
    h(0, 0) = cavity.omega_c;
    for (Eigen::Index j = 0; j < J; ++j) {
        const auto& vib = *species[static_cast<std::size_t>(j)].vib;
        const Eigen::VectorXd f2 = vib.fc.col(0).cwiseAbs2();
        double e = 0.0;
        for (std::size_t l = 0; l < vib.m_e(); ++l) e += f2[static_cast<Eigen::Index>(l)] * vib.transition(l);
        h(j + 1, j + 1) = e / f2.sum();
        h(0, j + 1) = h(j + 1, 0) = species[static_cast<std::size_t>(j)].G * std::sqrt(f2.sum());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConverged, "FC polariton eigensolver failed");
    std::vector<double> p(species.size(), 0.0);
    for (Eigen::Index n = 0; n <= J; ++n)
        for (Eigen::Index j = 0; j < J; ++j)
            p[static_cast<std::size_t>(j)] += std::pow(es.eigenvectors()(j + 1, n), 2) * std::pow(es.eigenvectors()(0, n), 2);
    return p;
}

PopulationRecord populations(const CuteBasis& basis, const TrajectoryRecord& traj) {
    PopulationRecord rec;
    rec.times = traj.times;
    for (const auto& sp : basis.species()) rec.species.push_back(sp.label);
    rec.species_excited.resize(basis.species().size());
    for (const auto& v : traj.states) {
        rec.photon.push_back(photon_population(basis, v));
        rec.fc.push_back(fc_population(basis, v));
        if (basis.kappa() == 0) rec.dark.push_back(dark_manifold_population(basis, v));
        for (std::size_t j = 0; j < basis.species().size(); ++j)
            rec.species_excited[j].push_back(species_excited_population(basis, v, rec.species[j]));
    }
    return rec;
}

void write_populations_csv(const std::string& path, const PopulationRecord& rec) {
    io::CsvWriter csv(path);
    std::vector<std::string> header{"time_fs", "photon", "fc"};
    if (!rec.dark.empty()) header.push_back("dark");
    for (const auto& s : rec.species) header.push_back("excited_" + s);
    csv.header(header);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        std::vector<double> row{rec.times[i], rec.photon[i], rec.fc[i]};
        if (!rec.dark.empty()) row.push_back(rec.dark[i]);
        for (const auto& s : rec.species_excited) row.push_back(s[i]);
        csv.row(row);
    }
}

std::vector<ManybodyTerm> reconstruct_manybody(const CuteBasis& basis, const Eigen::VectorXcd& v,
                                               std::size_t max_molecules) {
    if (basis.kappa() > 1) throw Error(ErrorKind::OrderTooHigh, "reconstruction is implemented for κ ≤ 1");
    if (basis.species().size() != 1 || basis.species()[0].infinite())
        throw Error(ErrorKind::InvalidArgument, "reconstruction needs a single species with finite N");
    const auto& sp = basis.species()[0];
    const std::size_t N = *sp.n_molecules;
    if (N > max_molecules)
        throw Error(ErrorKind::DimensionCap, "reconstruction limited to " + std::to_string(max_molecules) + " molecules");
    const auto m_g = static_cast<std::uint32_t>(sp.vib->m_g());
    const auto m_e = static_cast<std::uint32_t>(sp.vib->m_e());

    std::vector<ManybodyTerm> out;
    auto emit = [&](int excited, std::uint32_t l, int carrier, std::uint32_t k) {
        SymmetricState s;
        s.excitonic = excited >= 0;
        s.level = s.excitonic ? l : 0;
        s.occ.resize(1);
        if (carrier >= 0) s.occ[0].emplace_back(k, 1);
        auto idx = basis.index_of(s);
        if (!idx) return;
        ManybodyTerm t;
        t.excited = excited;
        t.levels.assign(N, 0);
        if (excited >= 0) t.levels[static_cast<std::size_t>(excited)] = l;
        if (carrier >= 0) t.levels[static_cast<std::size_t>(carrier)] = k;
        t.amplitude = v[static_cast<Eigen::Index>(*idx)] / basis.renorm_factor(s);
        out.push_back(std::move(t));
    };

    emit(-1, 0, -1, 0);
    for (std::size_t c = 0; c < N; ++c)
        for (std::uint32_t k = 1; k < m_g; ++k) emit(-1, 0, static_cast<int>(c), k);
    for (std::size_t i = 0; i < N; ++i)
        for (std::uint32_t l = 0; l < m_e; ++l) {
            emit(static_cast<int>(i), l, -1, 0);
            for (std::size_t c = 0; c < N; ++c) {
                if (c == i) continue;
                for (std::uint32_t k = 1; k < m_g; ++k) emit(static_cast<int>(i), l, static_cast<int>(c), k);
            }
        }
    return out;
}

} // namespace cute
