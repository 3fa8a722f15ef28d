#include "cute/oracle.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "cute/error.hpp"

namespace cute {

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
}

} // namespace

OracleBasis::OracleBasis(std::size_t n, std::size_t m_g, std::size_t m_e)
    : n_(n), m_g_(m_g), m_e_(m_e), photon_size_(ipow(m_g, n)), exciton_size_(m_e * ipow(m_g, n - 1)) {}

std::shared_ptr<const OracleBasis> OracleBasis::make(std::size_t n, std::size_t m_g, std::size_t m_e, double cap) {
    if (n == 0 || m_g == 0 || m_e == 0) throw Error(ErrorKind::InvalidArgument, "oracle needs N, m_g, m_e >= 1");
    if (n > kOracleMaxMolecules)
        throw Error(ErrorKind::DimensionCap, "oracle limited to N <= " + std::to_string(kOracleMaxMolecules));
    const double dim = std::pow(static_cast<double>(m_g), static_cast<double>(n)) +
                       static_cast<double>(n) * static_cast<double>(m_e) *
                           std::pow(static_cast<double>(m_g), static_cast<double>(n - 1));
    if (dim > cap)
        throw Error(ErrorKind::DimensionCap, "oracle dimension " + std::to_string(static_cast<long long>(dim)) +
                                                 " exceeds cap");
    return std::shared_ptr<const OracleBasis>(new OracleBasis(n, m_g, m_e));
}

std::size_t OracleBasis::index(int excited, const std::vector<std::uint32_t>& levels) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t radix = static_cast<int>(i) == excited ? m_e_ : m_g_;
        idx = idx * radix + levels[i];
    }
    if (excited < 0) return idx;
    return photon_size_ + static_cast<std::size_t>(excited) * exciton_size_ + idx;
}

void OracleBasis::decode(std::size_t idx, int& excited, std::vector<std::uint32_t>& levels) const {
    levels.assign(n_, 0);
    if (idx < photon_size_) {
        excited = -1;
    } else {
        idx -= photon_size_;
        excited = static_cast<int>(idx / exciton_size_);
        idx %= exciton_size_;
    }
    for (std::size_t i = n_; i-- > 0;) {
        const std::size_t radix = static_cast<int>(i) == excited ? m_e_ : m_g_;
        levels[i] = static_cast<std::uint32_t>(idx % radix);
        idx /= radix;
    }
}

HamiltonianMatrix build_oracle(const std::shared_ptr<const OracleBasis>& basis, const VibrationalBasis& vib,
                               double g, double omega_c) {
    if (vib.m_g() != basis->m_g() || vib.m_e() != basis->m_e())
        throw Error(ErrorKind::BasisMismatch, "vibrational basis sizes differ from the oracle basis");
    std::vector<Eigen::Triplet<double>> trip;
    int excited;
    std::vector<std::uint32_t> levels;
    for (std::size_t idx = 0; idx < basis->dimension(); ++idx) {
        basis->decode(idx, excited, levels);
        double e = excited < 0 ? omega_c : 0.0;
        for (std::size_t i = 0; i < basis->n(); ++i)
            e += static_cast<int>(i) == excited ? vib.transition(levels[i]) : vib.ground_gap(levels[i]);
        trip.emplace_back(static_cast<int>(idx), static_cast<int>(idx), e);
        if (excited >= 0) continue;
        for (std::size_t i = 0; i < basis->n(); ++i) {
            auto lv = levels;
            const auto k = levels[i];
            for (std::uint32_t l = 0; l < basis->m_e(); ++l) {
                lv[i] = l;
                const double h = g * vib.fc(l, k);
                if (h == 0.0) continue;
                const auto t = basis->index(static_cast<int>(i), lv);
                trip.emplace_back(static_cast<int>(idx), static_cast<int>(t), h);
                trip.emplace_back(static_cast<int>(t), static_cast<int>(idx), h);
            }
        }
    }
    return HamiltonianMatrix::from_triplets(basis->dimension(), trip, basis);
}

Eigen::SparseMatrix<double> permutation_matrix(const OracleBasis& basis, std::size_t a, std::size_t b) {
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(basis.dimension());
    int excited;
    std::vector<std::uint32_t> levels;
    for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
        basis.decode(idx, excited, levels);
        std::swap(levels[a], levels[b]);
        int ex = excited;
        if (ex == static_cast<int>(a)) ex = static_cast<int>(b);
        else if (ex == static_cast<int>(b)) ex = static_cast<int>(a);
        trip.emplace_back(static_cast<int>(basis.index(ex, levels)), static_cast<int>(idx), 1.0);
    }
    Eigen::SparseMatrix<double> p(n, n);
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

double symmetry_defect(const OracleBasis& basis, const Eigen::VectorXcd& v) {
    double worst = 0.0;
    for (std::size_t a = 0; a < basis.n(); ++a)
        for (std::size_t b = a + 1; b < basis.n(); ++b) {
            const Eigen::VectorXcd pv = permutation_matrix(basis, a, b).cast<cplx>() * v;
            worst = std::max(worst, (pv - v).norm());
        }
    return worst;
}

namespace {

SymmetricState to_symmetric(int excited, const std::vector<std::uint32_t>& levels) {
    SymmetricState s;
    s.excitonic = excited >= 0;
    s.level = s.excitonic ? levels[static_cast<std::size_t>(excited)] : 0;
    std::map<std::uint32_t, std::uint32_t> counts;
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (static_cast<int>(i) != excited && levels[i] > 0) ++counts[levels[i]];
    s.occ.resize(1);
    for (const auto& [lv, c] : counts) s.occ[0].emplace_back(lv, c);
    return s;
}

void check_target(const OracleBasis& basis, const CuteBasis& target) {
    if (target.species().size() != 1 || target.species()[0].n_molecules != basis.n() || target.kappa() < basis.n() ||
        target.species()[0].vib->m_g() != basis.m_g() || target.species()[0].vib->m_e() != basis.m_e())
        throw Error(ErrorKind::BasisMismatch, "target must be a κ = N basis of the same single species");
}

} // namespace

StateVector symmetrize(const OracleBasis& basis, const Eigen::VectorXcd& v,
                       const std::shared_ptr<const CuteBasis>& target) {
    check_target(basis, *target);
    if (static_cast<std::size_t>(v.size()) != basis.dimension())
        throw Error(ErrorKind::BasisMismatch, "vector does not live on the oracle basis");
    const double defect = symmetry_defect(basis, v);
    if (defect > 1e-8) throw Error(ErrorKind::NotSymmetric, "permutation defect " + std::to_string(defect));

    // Ã = √mult · A and every configuration in the group carries the same A,
    // so Ã = Σ_group A / √mult.
    StateVector out{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target->dimension())), target};
    int excited;
    std::vector<std::uint32_t> levels;
    for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
        basis.decode(idx, excited, levels);
        const auto s = to_symmetric(excited, levels);
        const auto t = target->index_of(s);
        if (!t) throw Error(ErrorKind::BasisMismatch, "configuration missing from the symmetric basis");
        out.amplitudes[static_cast<Eigen::Index>(*t)] += v[static_cast<Eigen::Index>(idx)] / target->renorm_factor(s);
    }
    return out;
}

Eigen::VectorXcd unsymmetrize(const OracleBasis& basis, const StateVector& v) {
    auto target = std::static_pointer_cast<const CuteBasis>(v.basis);
    if (!target) throw Error(ErrorKind::BasisMismatch, "state has no symmetric basis");
    check_target(basis, *target);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(basis.dimension()));
    int excited;
    std::vector<std::uint32_t> levels;
    for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
        basis.decode(idx, excited, levels);
        const auto s = to_symmetric(excited, levels);
        const auto t = target->index_of(s);
        out[static_cast<Eigen::Index>(idx)] = v.amplitudes[static_cast<Eigen::Index>(*t)] / target->renorm_factor(s);
    }
    return out;
}

StateVector oracle_photonic_state(const std::shared_ptr<const OracleBasis>& basis) {
    StateVector v{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dimension())), basis};
    v.amplitudes[0] = 1.0;
    return v;
}

std::string ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["kappa"] = kappa;
    j["max_distance"] = max_distance;
    j["max_leakage"] = max_leakage;
    j["times_fs"] = times;
    j["distance"] = distance;
    j["leakage"] = leakage;
    return j.dump(2);
}

ComparisonReport compare_dynamics(std::size_t n, const std::shared_ptr<const VibrationalBasis>& vib, double g,
                                  double omega_c, std::size_t kappa, const std::vector<double>& times) {
    if (kappa > n) throw Error(ErrorKind::InvalidArgument, "κ cannot exceed N");
    auto obasis = OracleBasis::make(n, vib->m_g(), vib->m_e());
    const auto ho = build_oracle(obasis, *vib, g, omega_c);
    const auto species = std::vector<SpeciesSpec>{SpeciesSpec::with_g("M", n, g, vib)};
    auto exact = enumerate_basis(species, n);
    auto truncated = enumerate_basis(species, kappa);
    const auto hk = build_hamiltonian(truncated, CavitySpec::make(omega_c));

    const auto traj_o = propagate(ho, oracle_photonic_state(obasis), times);
    const auto traj_k = propagate(hk, initial_photonic_state(truncated), times);

    // The κ basis is the leading block of the κ = N basis.
    const auto prefix = static_cast<Eigen::Index>(truncated->dimension());
    ComparisonReport rep;
    rep.n = n;
    rep.kappa = kappa;
    rep.times = times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto sym = symmetrize(*obasis, traj_o.states[i], exact).amplitudes;
        Eigen::VectorXcd embedded = Eigen::VectorXcd::Zero(sym.size());
        embedded.head(prefix) = traj_k.states[i];
        rep.distance.push_back((sym - embedded).norm());
        rep.leakage.push_back(sym.tail(sym.size() - prefix).squaredNorm());
        rep.max_distance = std::max(rep.max_distance, rep.distance.back());
        rep.max_leakage = std::max(rep.max_leakage, rep.leakage.back());
    }
    return rep;
}

double truncation_leakage(std::size_t n, const std::shared_ptr<const VibrationalBasis>& vib, double G,
                          double omega_c, std::size_t kappa, double t_fs) {
    auto basis = enumerate_basis({SpeciesSpec::with_G("M", n, G, vib)}, n);
    const auto h = build_hamiltonian(basis, CavitySpec::make(omega_c));
    const auto v = evolve(h, initial_photonic_state(basis), t_fs);
    const auto prefix = static_cast<Eigen::Index>(basis->prefix_dimension(kappa));
    return v.tail(v.size() - prefix).squaredNorm();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope fit needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace cute
