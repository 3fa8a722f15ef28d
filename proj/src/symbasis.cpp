#include "cute/symbasis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "cute/error.hpp"

namespace cute {

namespace {

void check_vib(const SpeciesSpec& s) {
    if (!s.vib) throw Error(ErrorKind::MissingOverlap, "species '" + s.label + "' has no vibrational basis");
    if (s.vib->m_g() == 0 || s.vib->m_e() == 0)
        throw Error(ErrorKind::InvalidArgument, "species '" + s.label + "' needs m_g, m_e >= 1");
}

double binomial(double n, double k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

/// counts[c] = number of occupation records with exactly c carriers.
std::vector<double> carrier_counts(std::size_t m_g, std::size_t kappa, std::optional<std::size_t> cap) {
    std::vector<double> counts(kappa + 1, 0.0);
    const double levels = static_cast<double>(m_g) - 1.0;
    for (std::size_t c = 0; c <= kappa; ++c) {
        if (cap && c > *cap) break;
        if (levels == 0.0) {
            counts[c] = c == 0 ? 1.0 : 0.0;
            continue;
        }
        counts[c] = binomial(levels + static_cast<double>(c) - 1.0, static_cast<double>(c));
    }
    return counts;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Multisets of exactly `c` levels drawn from 1..levels, as sparse records.
void multisets(std::uint32_t levels, std::size_t c, std::vector<Occupation>& out) {
    std::vector<std::uint32_t> seq;
    auto rec = [&](auto&& self, std::uint32_t from) -> void {
        if (seq.size() == c) {
            Occupation o;
            for (auto lv : seq) {
                if (!o.empty() && o.back().first == lv) ++o.back().second;
                else o.emplace_back(lv, 1);
            }
            out.push_back(std::move(o));
            return;
        }
        for (std::uint32_t lv = from; lv <= levels; ++lv) {
            seq.push_back(lv);
            self(self, lv);
            seq.pop_back();
        }
    };
    rec(rec, 1);
}

std::size_t occ_total(const Occupation& o) {
    std::size_t n = 0;
    for (const auto& [lv, cnt] : o) n += cnt;
    return n;
}

} // namespace

SpeciesSpec SpeciesSpec::with_g(std::string label, std::size_t n, double g,
                                std::shared_ptr<const VibrationalBasis> vib) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "species needs at least one molecule");
    SpeciesSpec s;
    s.label = std::move(label);
    s.n_molecules = n;
    s.g = g;
    s.G = g * std::sqrt(static_cast<double>(n));
    s.vib = std::move(vib);
    return s;
}

SpeciesSpec SpeciesSpec::with_G(std::string label, std::optional<std::size_t> n, double G,
                                std::shared_ptr<const VibrationalBasis> vib) {
    if (n && *n == 0) throw Error(ErrorKind::InvalidArgument, "species needs at least one molecule");
    SpeciesSpec s;
    s.label = std::move(label);
    s.n_molecules = n;
    s.G = G;
    s.g = n ? G / std::sqrt(static_cast<double>(*n)) : 0.0;
    s.vib = std::move(vib);
    return s;
}

std::size_t SymmetricState::carriers() const {
    std::size_t n = 0;
    for (const auto& o : occ) n += occ_total(o);
    return n;
}

std::uint32_t SymmetricState::count(std::size_t sp, std::uint32_t lv) const {
    for (const auto& [l, c] : occ[sp])
        if (l == lv) return c;
    return 0;
}

bool canonical_less(const SymmetricState& a, const SymmetricState& b) {
    const auto ca = a.carriers(), cb = b.carriers();
    if (ca != cb) return ca < cb;
    if (a.excitonic != b.excitonic) return !a.excitonic;
    if (a.excitonic) {
        if (a.species != b.species) return a.species < b.species;
        if (a.level != b.level) return a.level < b.level;
    }
    return a.occ < b.occ;
}

CuteBasis::CuteBasis(std::vector<SpeciesSpec> species, std::size_t kappa,
                     std::vector<SymmetricState> states)
    : species_(std::move(species)), kappa_(kappa), states_(std::move(states)) {
    std::sort(states_.begin(), states_.end(), canonical_less);
}

std::optional<std::size_t> CuteBasis::index_of(const SymmetricState& s) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), s, canonical_less);
    if (it == states_.end() || !(*it == s)) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
}

std::size_t CuteBasis::species_index(const std::string& label) const {
    for (std::size_t j = 0; j < species_.size(); ++j)
        if (species_[j].label == label) return j;
    throw Error(ErrorKind::UnknownSpecies, "no species labelled '" + label + "'");
}

std::size_t CuteBasis::prefix_dimension(std::size_t k) const {
    auto it = std::partition_point(states_.begin(), states_.end(),
                                   [k](const SymmetricState& s) { return s.carriers() <= k; });
    return static_cast<std::size_t>(it - states_.begin());
}

double CuteBasis::renorm_factor(const SymmetricState& s) const {
    double log_mult = 0.0;
    for (std::size_t j = 0; j < species_.size(); ++j) {
        const auto& sp = species_[j];
        if (sp.infinite())
            throw Error(ErrorKind::InvalidArgument, "renormalisation factor needs finite N");
        double ground = static_cast<double>(*sp.n_molecules);
        if (s.excitonic && s.species == j) {
            log_mult += std::log(ground);
            ground -= 1.0;
        }
        double rest = ground;
        log_mult += std::lgamma(ground + 1.0);
        for (const auto& [lv, c] : s.occ[j]) {
            log_mult -= std::lgamma(static_cast<double>(c) + 1.0);
            rest -= c;
        }
        log_mult -= std::lgamma(rest + 1.0);
    }
    return std::exp(0.5 * log_mult);
}

double count_dimension(const std::vector<SpeciesSpec>& species, std::size_t kappa) {
    if (species.empty()) throw Error(ErrorKind::InvalidArgument, "at least one species is required");
    for (const auto& s : species) check_vib(s);

    auto total = [&](std::optional<std::size_t> excited) {
        std::vector<double> acc(kappa + 1, 0.0);
        acc[0] = 1.0;
        for (std::size_t j = 0; j < species.size(); ++j) {
            std::optional<std::size_t> cap = species[j].n_molecules;
            if (cap && excited == j) *cap -= 1;
            acc = convolve(acc, carrier_counts(species[j].vib->m_g(), kappa, cap));
        }
        double sum = 0.0;
        for (double v : acc) sum += v;
        return sum;
    };

    double dim = total(std::nullopt);
    for (std::size_t j = 0; j < species.size(); ++j)
        dim += static_cast<double>(species[j].vib->m_e()) * total(j);
    return dim;
}

std::shared_ptr<const CuteBasis> enumerate_basis(const std::vector<SpeciesSpec>& species,
                                                 std::size_t kappa, double cap) {
    const double dim = count_dimension(species, kappa);
    if (dim > cap)
        throw Error(ErrorKind::BasisTooLarge, "basis dimension " + std::to_string(static_cast<long long>(dim)) +
                                                  " exceeds cap " + std::to_string(static_cast<long long>(cap)));

    const std::size_t ns = species.size();
    // per_species[j][c] = records with exactly c carriers in species j
    std::vector<std::vector<std::vector<Occupation>>> per_species(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        per_species[j].resize(kappa + 1);
        const auto levels = static_cast<std::uint32_t>(species[j].vib->m_g() - 1);
        for (std::size_t c = 0; c <= kappa; ++c) {
            if (levels == 0 && c > 0) continue;
            if (species[j].n_molecules && c > *species[j].n_molecules) continue;
            multisets(levels, c, per_species[j][c]);
        }
    }

    std::vector<SymmetricState> states;
    states.reserve(static_cast<std::size_t>(dim));
    SymmetricState cur;
    cur.occ.resize(ns);

    // Distribute up to κ carriers over species; `emit` receives each record set.
    auto distribute = [&](auto&& self, std::size_t j, std::size_t left, auto&& emit) -> void {
        if (j == ns) {
            emit();
            return;
        }
        for (std::size_t c = 0; c <= left; ++c)
            for (const auto& o : per_species[j][c]) {
                cur.occ[j] = o;
                self(self, j + 1, left - c, emit);
            }
    };

    cur.excitonic = false;
    distribute(distribute, 0, kappa, [&] { states.push_back(cur); });

    for (std::size_t j = 0; j < ns; ++j) {
        const auto m_e = species[j].vib->m_e();
        auto emit = [&] {
            if (species[j].n_molecules && occ_total(cur.occ[j]) + 1 > *species[j].n_molecules) return;
            for (std::size_t l = 0; l < m_e; ++l) {
                cur.level = static_cast<std::uint32_t>(l);
                states.push_back(cur);
            }
        };
        cur.excitonic = true;
        cur.species = static_cast<std::uint32_t>(j);
        distribute(distribute, 0, kappa, emit);
    }

    return std::make_shared<const CuteBasis>(species, kappa, std::move(states));
}

void write_basis_jsonl(const std::string& path, const CuteBasis& basis) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    const bool finite = std::none_of(basis.species().begin(), basis.species().end(),
                                     [](const SpeciesSpec& s) { return s.infinite(); });
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const auto& s = basis.state(i);
        nlohmann::ordered_json j;
        j["index"] = i;
        j["variant"] = s.excitonic ? "excitonic" : "photonic";
        if (s.excitonic) {
            j["species"] = basis.species()[s.species].label;
            j["level"] = s.level;
        }
        nlohmann::ordered_json occ = nlohmann::ordered_json::object();
        for (std::size_t sp = 0; sp < s.occ.size(); ++sp) {
            nlohmann::ordered_json rec = nlohmann::ordered_json::object();
            for (const auto& [lv, c] : s.occ[sp]) rec[std::to_string(lv)] = c;
            occ[basis.species()[sp].label] = rec;
        }
        j["occupation"] = occ;
        if (finite) j["renorm"] = basis.renorm_factor(s);
        else j["renorm"] = nullptr;
        out << j.dump() << '\n';
    }
}

} // namespace cute
