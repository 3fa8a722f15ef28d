#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "cute/error.hpp"
#include "cute/symbasis.hpp"
#include "helpers.hpp"

using namespace cute;

namespace {

SpeciesSpec finite(const std::string& label, std::size_t n, std::size_t m_g, std::size_t m_e) {
    return SpeciesSpec::with_g(label, n, 0.01, testing::random_vib(m_g, m_e, 7));
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Exhaustive orbit count over the tensor-product configurations: sort every
// configuration of the unexcited molecules and keep those with at most κ
// molecules outside level 0.
std::size_t brute_force_dimension(std::size_t n, std::size_t m_g, std::size_t m_e, std::size_t kappa) {
    std::set<std::vector<std::size_t>> photonic, excitonic;
    auto sweep = [&](std::size_t slots, auto&& sink) {
        std::vector<std::size_t> cfg(slots, 0);
        while (true) {
            auto sorted = cfg;
            std::sort(sorted.begin(), sorted.end());
            const auto carriers = static_cast<std::size_t>(std::count_if(sorted.begin(), sorted.end(),
                                                                         [](std::size_t v) { return v > 0; }));
            if (carriers <= kappa) sink(sorted);
            std::size_t i = 0;
            while (i < slots && ++cfg[i] == m_g) cfg[i++] = 0;
            if (i == slots) break;
        }
    };
    sweep(n, [&](const std::vector<std::size_t>& s) { photonic.insert(s); });
    sweep(n - 1, [&](const std::vector<std::size_t>& s) { excitonic.insert(s); });
    return photonic.size() + m_e * excitonic.size();
}

} // namespace

TEST_CASE("zeroth order holds one photonic and m excitonic states") {
    for (std::size_t m : {1u, 4u, 9u}) {
        const auto b = enumerate_basis({finite("A", 50, 3, m)}, 0);
        CHECK(b->dimension() == 1 + m);
        CHECK(!b->state(0).excitonic);
        for (std::size_t i = 1; i <= m; ++i) {
            CHECK(b->state(i).excitonic);
            CHECK(b->state(i).level == i - 1);
        }
    }
}

TEST_CASE("first order with two ground levels and one excited level has four states") {
    const auto b = enumerate_basis({finite("A", 10, 2, 1)}, 1);
    REQUIRE(b->dimension() == 4);
    const Occupation one{{1u, 1u}};
    CHECK((!b->state(0).excitonic && b->state(0).occ[0].empty()));
    CHECK((b->state(1).excitonic && b->state(1).occ[0].empty()));
    CHECK((!b->state(2).excitonic && b->state(2).occ[0] == one));
    CHECK((b->state(3).excitonic && b->state(3).occ[0] == one));
}

TEST_CASE("dimension matches exhaustive enumeration of occupation multisets") {
    CHECK(enumerate_basis({finite("A", 8, 3, 3)}, 2)->dimension() == brute_force_dimension(8, 3, 3, 2));
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t m = 1; m <= 4; ++m) {
            const auto b = enumerate_basis({finite("A", n, m, m)}, n);
            const double formula = binom(static_cast<int>(n + m - 1), static_cast<int>(n)) +
                                   m * binom(static_cast<int>(n + m - 2), static_cast<int>(n - 1));
            CHECK(b->dimension() == brute_force_dimension(n, m, m, n));
            CHECK(static_cast<double>(b->dimension()) == formula);
            CHECK(count_dimension(b->species(), n) == formula);
        }
}

TEST_CASE("renormalisation factors are square roots of the multiplicities") {
    const std::size_t N = 7;
    const auto b = enumerate_basis({finite("A", N, 4, 2)}, 2);
    SymmetricState s;
    s.occ.resize(1);
    CHECK(b->renorm_factor(s) == doctest::Approx(1.0).epsilon(1e-14));
    s.occ[0] = {{1u, 1u}, {2u, 1u}};
    CHECK(b->renorm_factor(s) == doctest::Approx(std::sqrt(N * (N - 1.0))).epsilon(1e-13));
    s.occ[0] = {{2u, 2u}};
    CHECK(b->renorm_factor(s) == doctest::Approx(std::sqrt(N * (N - 1.0) / 2.0)).epsilon(1e-13));

    // Excitonic: N choices of the excited molecule times the ground arrangements.
    s.excitonic = true;
    s.occ[0] = {};
    CHECK(b->renorm_factor(s) == doctest::Approx(std::sqrt(double(N))).epsilon(1e-13));
    s.occ[0] = {{3u, 1u}};
    CHECK(b->renorm_factor(s) == doctest::Approx(std::sqrt(N * (N - 1.0))).epsilon(1e-13));
}

TEST_CASE("multiplicities of photonic states sum to m^N at full order") {
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t m = 1; m <= 3; ++m) {
            const auto b = enumerate_basis({finite("A", n, m, m)}, n);
            double photonic = 0.0, excitonic = 0.0;
            for (const auto& s : b->states()) {
                const double r = b->renorm_factor(s);
                (s.excitonic ? excitonic : photonic) += r * r;
            }
            CHECK(photonic == doctest::Approx(std::pow(double(m), double(n))).epsilon(1e-12));
            CHECK(excitonic == doctest::Approx(n * m * std::pow(double(m), n - 1.0)).epsilon(1e-12));
        }
}

TEST_CASE("lower orders are prefixes of higher orders") {
    const std::vector<SpeciesSpec> sp{finite("A", 6, 3, 2), finite("B", 5, 2, 3)};
    const auto top = enumerate_basis(sp, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto low = enumerate_basis(sp, k);
        REQUIRE(low->dimension() == top->prefix_dimension(k));
        for (std::size_t i = 0; i < low->dimension(); ++i) CHECK(low->state(i) == top->state(i));
    }
}

TEST_CASE("index maps invert the ordering and states are unique") {
    const auto b = enumerate_basis({finite("A", 5, 3, 3), finite("B", 4, 2, 2)}, 2);
    for (std::size_t i = 0; i < b->dimension(); ++i) {
        CHECK(b->index_of(b->state(i)) == i);
        if (i > 0) CHECK(canonical_less(b->state(i - 1), b->state(i)));
    }
    CHECK(count_dimension(b->species(), 2) == static_cast<double>(b->dimension()));
    CHECK(b->species_index("B") == 1);
    try {
        b->species_index("C");
        FAIL("expected UnknownSpecies");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownSpecies);
    }
}

TEST_CASE("carrier caps follow the molecule count") {
    // N = 1: the excited molecule leaves no ground molecule to carry phonons.
    const auto b = enumerate_basis({finite("A", 1, 3, 2)}, 2);
    for (const auto& s : b->states())
        if (s.excitonic) CHECK(s.carriers() == 0);
    CHECK(b->dimension() == 3 + 2);
}

TEST_CASE("infinite species have no molecule cap") {
    auto vib = testing::random_vib(3, 2, 3);
    const auto inf = enumerate_basis({SpeciesSpec::with_G("A", std::nullopt, 0.2, vib)}, 2);
    const auto big = enumerate_basis({SpeciesSpec::with_G("A", 1000, 0.2, vib)}, 2);
    CHECK(inf->dimension() == big->dimension());
}

TEST_CASE("oversize requests raise BasisTooLarge") {
    try {
        enumerate_basis({finite("A", 100, 30, 30)}, 6, 1e5);
        FAIL("expected BasisTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BasisTooLarge);
    }
}

TEST_CASE("basis dump writes one JSON object per state") {
    const auto b = enumerate_basis({finite("A", 4, 2, 2)}, 1);
    const auto path = (std::filesystem::temp_directory_path() / "cute_basis_test.jsonl").string();
    write_basis_jsonl(path, *b);
    std::ifstream in(path);
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) {
        CHECK(l.front() == '{');
        CHECK(l.find("\"renorm\"") != std::string::npos);
        ++lines;
    }
    CHECK(lines == b->dimension());
    std::filesystem::remove(path);
}
