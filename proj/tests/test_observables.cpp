#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include "cute/error.hpp"
#include "cute/observables.hpp"
#include "cute/oracle.hpp"
#include "cute/units.hpp"
#include "helpers.hpp"

using namespace cute;

namespace {

const double hbar = units::hbar_eV_fs;

std::shared_ptr<const VibrationalBasis> two_level(double w_eg) {
    Eigen::VectorXd eg(1), ee(1);
    eg << 0.0;
    ee << w_eg;
    return std::make_shared<VibrationalBasis>(
        VibrationalBasis::from_matrices(eg, ee, Eigen::MatrixXd::Identity(1, 1)));
}

std::shared_ptr<const CuteBasis> rabi_basis() {
    return enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.1, two_level(2.0))}, 0);
}

} // namespace

TEST_CASE("excited-state position vanishes by parity and for the photon") {
    const auto vib = testing::displaced_vib(0.22, 0.0, 2.0, 3, 6);
    const auto basis = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.1, vib)}, 0);
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.11));
    const auto p = initial_photonic_state(basis);
    CHECK(std::abs(excited_position_expectation(*basis, p.amplitudes, "A")) < 1e-15);
    const auto traj = propagate(H, p, TimeGrid::make(200.0, 40));
    for (double q : excited_position_series(*basis, traj, "A")) CHECK(std::abs(q) < 1e-10);
}

TEST_CASE("excited-state position relaxes to the displaced minimum on average") {
    const double w = 0.22, d = 2.0;
    const auto vib = testing::displaced_vib(w, d, 2.0, 2, 12);
    const auto basis = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.0, vib)}, 0);
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.0));
    // Fifty periods of the excited-state oscillation d(1 - cos ωt).
    const double period = 2.0 * units::pi * hbar / w;
    const auto traj = propagate(H, initial_fc_state(basis, "A"), TimeGrid::make(50.0 * period, 5000));
    const auto q = excited_position_series(*basis, traj, "A");
    CHECK(std::abs(q.front()) < 1e-3);
    const double avg = std::accumulate(q.begin(), q.end() - 1, 0.0) / static_cast<double>(q.size() - 1);
    CHECK(std::abs(avg / d - 1.0) < 1e-2);
    const double half = d * (1.0 - std::cos(w * traj.times[37] / hbar));
    CHECK(std::abs(q[37] - half) < 1e-3);
}

TEST_CASE("polariton projections of the Rabi problem") {
    const auto basis = rabi_basis();
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.0));
    const auto up = PolaritonProjector::make(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    const auto lo = PolaritonProjector::make(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
    const auto photon = initial_photonic_state(basis);
    CHECK(std::abs(polariton_population(*basis, photon.amplitudes, up) - 0.5) < 1e-15);

    StateVector plus{Eigen::VectorXcd::Zero(2), basis};
    plus.amplitudes << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto traj = propagate(H, plus, TimeGrid::make(300.0, 30));
    for (const auto& v : traj.states) {
        CHECK(std::abs(polariton_population(*basis, v, up) - 1.0) < 1e-12);
        CHECK(std::abs(polariton_population(*basis, v, lo)) < 1e-12);
    }
    const auto traj2 = propagate(H, photon, TimeGrid::make(300.0, 30));
    for (const auto& v : traj2.states)
        CHECK(std::abs(polariton_population(*basis, v, up) + polariton_population(*basis, v, lo) - 1.0) < 1e-12);
    CHECK_THROWS_AS(PolaritonProjector::make(1.0, 1.0), Error);
}

TEST_CASE("dark-manifold population") {
    const auto basis = rabi_basis();
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.0));
    for (const auto& v : propagate(H, initial_photonic_state(basis), TimeGrid::make(100.0, 20)).states)
        CHECK(std::abs(dark_manifold_population(*basis, v)) < 1e-14);

    // A pure excited level l = 0 of a displaced species: only F̃₀² of it is FC.
    const auto vib = testing::displaced_vib(0.22, 2.0, 2.0, 2, 8);
    const auto b = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.1, vib)}, 0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b->dimension()));
    v[1] = 1.0;
    const double f0 = vib->fc(0, 0) / vib->fc.col(0).norm();
    CHECK(std::abs(dark_manifold_population(*b, v) - (1.0 - f0 * f0)) < 1e-14);
    CHECK(std::abs(dark_manifold_population(*b, initial_fc_state(b, "A").amplitudes)) < 1e-14);

    const auto b1 = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.1, vib)}, 1);
    try {
        dark_manifold_population(*b1, initial_photonic_state(b1).amplitudes);
        FAIL("expected OrderMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrderMismatch);
    }
    CHECK_THROWS_AS(polariton_population(*b1, initial_photonic_state(b1).amplitudes,
                                         PolaritonProjector::make(1.0, 0.0)),
                    Error);
}

TEST_CASE("populations obey the sum rule and split by species") {
    const auto a = testing::random_vib(3, 3, 1), c = testing::random_vib(2, 4, 2);
    const auto basis =
        enumerate_basis({SpeciesSpec::with_g("A", 6, 0.03, a), SpeciesSpec::with_g("B", 5, 0.02, c)}, 2);
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.2));
    const auto traj = propagate(H, initial_photonic_state(basis), TimeGrid::make(200.0, 50));
    const auto rec = populations(*basis, traj);
    CHECK(rec.dark.empty());
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double ex = rec.species_excited[0][i] + rec.species_excited[1][i];
        CHECK(std::abs(rec.photon[i] + ex - 1.0) < 1e-12);
        CHECK(std::abs(ex - excited_population(*basis, traj.states[i])) < 1e-14);
        CHECK(rec.fc[i] <= ex + 1e-14);
    }
    const auto path = (std::filesystem::temp_directory_path() / "cute_pop_test.csv").string();
    write_populations_csv(path, rec);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "time_fs,photon,fc,excited_A,excited_B");
    std::filesystem::remove(path);
}

TEST_CASE("statistical yields") {
    const auto basis = rabi_basis();
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.0));
    CHECK(std::abs(statistical_yield(H, "A") - 0.5) < 1e-14);
    const auto fc = fc_statistical_yields(basis->species(), CavitySpec::make(2.0));
    CHECK(std::abs(fc[0] - 0.5) < 1e-14);

    // Yields plus the photon's own return probability exhaust the weight.
    const auto a = testing::random_vib(2, 3, 4), b = testing::random_vib(2, 2, 5);
    const auto two = enumerate_basis(
        {SpeciesSpec::with_G("A", std::nullopt, 0.1, a), SpeciesSpec::with_G("B", std::nullopt, 0.15, b)}, 0);
    const auto H2 = build_hamiltonian(two, CavitySpec::make(2.2));
    double back = 0.0;
    const auto& es = H2.eigensystem();
    for (Eigen::Index n = 0; n < es.vectors.cols(); ++n) back += std::pow(es.vectors(0, n), 4);
    CHECK(std::abs(statistical_yield(H2, "A") + statistical_yield(H2, "B") + back - 1.0) < 1e-12);

    // With one excited level per species both definitions coincide.
    const auto one = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.1, two_level(2.1)),
                                      SpeciesSpec::with_G("B", std::nullopt, 0.2, two_level(2.3))},
                                     0);
    const auto H3 = build_hamiltonian(one, CavitySpec::make(2.2));
    const auto y = fc_statistical_yields(one->species(), CavitySpec::make(2.2));
    CHECK(std::abs(y[0] - statistical_yield(H3, "A")) < 1e-12);
    CHECK(std::abs(y[1] - statistical_yield(H3, "B")) < 1e-12);
}

TEST_CASE("many-body reconstruction undoes the renormalisation") {
    const auto vib = testing::random_vib(3, 2, 6);
    const std::size_t N = 4;
    const auto basis = enumerate_basis({SpeciesSpec::with_g("A", N, 0.05, vib)}, 1);
    const auto H = build_hamiltonian(basis, CavitySpec::make(2.2));
    const auto v = evolve(H, initial_photonic_state(basis), 37.0);
    const auto terms = reconstruct_manybody(*basis, v);
    double norm = 0.0;
    std::map<std::pair<int, std::vector<std::uint32_t>>, cplx> amp;
    for (const auto& t : terms) {
        norm += std::norm(t.amplitude);
        amp[{t.excited, t.levels}] = t.amplitude;
    }
    CHECK(std::abs(norm - 1.0) < 1e-12);
    // Permuting molecules maps configurations onto equal amplitudes.
    for (const auto& [key, a] : amp) {
        auto levels = key.second;
        std::swap(levels[0], levels[N - 1]);
        int ex = key.first;
        if (ex == 0) ex = static_cast<int>(N - 1);
        else if (ex == static_cast<int>(N - 1)) ex = 0;
        REQUIRE(amp.count({ex, levels}) == 1);
        CHECK(std::abs(amp[{ex, levels}] - a) < 1e-14);
    }
    const auto b2 = enumerate_basis({SpeciesSpec::with_g("A", N, 0.05, vib)}, 2);
    try {
        reconstruct_manybody(*b2, initial_photonic_state(b2).amplitudes);
        FAIL("expected OrderTooHigh");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrderTooHigh);
    }
}

TEST_CASE("per-molecule position equals the collective value diluted by N") {
    // Brute-force ⟨q̂_0 |e_0⟩⟨e_0|⟩ on the explicit N-molecule vector.
    const auto vib = testing::displaced_vib(0.22, 1.5, 2.2, 2, 3);
    const Eigen::MatrixXd X = vib->excited_position_matrix();
    for (std::size_t N : {3u, 4u}) {
        const auto basis = enumerate_basis({SpeciesSpec::with_G("A", N, 0.15, vib)}, N);
        const auto H = build_hamiltonian(basis, CavitySpec::make(2.4));
        const StateVector v{evolve(H, initial_photonic_state(basis), 60.0), basis};
        const auto ob = OracleBasis::make(N, vib->m_g(), vib->m_e());
        const auto psi = unsymmetrize(*ob, v);
        double q0 = 0.0;
        std::vector<std::uint32_t> lv;
        for (std::size_t i = 0; i < ob->dimension(); ++i) {
            int ex;
            ob->decode(i, ex, lv);
            if (ex != 0) continue;
            for (std::uint32_t l2 = 0; l2 < vib->m_e(); ++l2) {
                auto lv2 = lv;
                lv2[0] = l2;
                const auto j = ob->index(0, lv2);
                q0 += (std::conj(psi[static_cast<Eigen::Index>(i)]) * X(lv[0], l2) *
                       psi[static_cast<Eigen::Index>(j)])
                          .real();
            }
        }
        const double collective = excited_position_expectation(*basis, v.amplitudes, "A");
        CHECK(std::abs(collective) > 1e-4);
        CHECK(std::abs(q0 - collective / static_cast<double>(N)) < 1e-12);
    }
}
