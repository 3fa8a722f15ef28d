#include "cute/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "cute/error.hpp"
#include "cute/io.hpp"

namespace cute {

CavitySpec CavitySpec::make(double omega_c) {
    if (!(omega_c > 0.0)) throw Error(ErrorKind::InvalidArgument, "cavity ω_c must be > 0");
    return CavitySpec{omega_c};
}

HamiltonianMatrix::HamiltonianMatrix(Eigen::MatrixXd dense, std::shared_ptr<const void> basis)
    : dim_(static_cast<std::size_t>(dense.rows())), dense_(std::move(dense)), basis_(std::move(basis)) {
    if (dense_->rows() != dense_->cols())
        throw Error(ErrorKind::InvalidArgument, "Hamiltonian must be square");
}

HamiltonianMatrix::HamiltonianMatrix(Eigen::SparseMatrix<double> sparse, std::shared_ptr<const void> basis)
    : dim_(static_cast<std::size_t>(sparse.rows())), sparse_(std::move(sparse)), basis_(std::move(basis)) {
    if (sparse_->rows() != sparse_->cols())
        throw Error(ErrorKind::InvalidArgument, "Hamiltonian must be square");
    sparse_->makeCompressed();
}

HamiltonianMatrix HamiltonianMatrix::from_triplets(std::size_t dim,
                                                   const std::vector<Eigen::Triplet<double>>& triplets,
                                                   std::shared_ptr<const void> basis) {
    const auto n = static_cast<Eigen::Index>(dim);
    if (dim <= kSparseThreshold) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (const auto& t : triplets) m(t.row(), t.col()) += t.value();
        return HamiltonianMatrix(std::move(m), std::move(basis));
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return HamiltonianMatrix(std::move(s), std::move(basis));
}

Eigen::MatrixXd HamiltonianMatrix::to_dense() const {
    if (dense_) return *dense_;
    return Eigen::MatrixXd(*sparse_);
}

Eigen::SparseMatrix<double> HamiltonianMatrix::to_sparse() const {
    if (sparse_) return *sparse_;
    return dense_->sparseView();
}

double HamiltonianMatrix::operator()(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
    return dense_ ? (*dense_)(r, c) : sparse_->coeff(r, c);
}

double HamiltonianMatrix::max_abs() const {
    if (dense_) return dense_->cwiseAbs().maxCoeff();
    double m = 0.0;
    for (Eigen::Index k = 0; k < sparse_->outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(*sparse_, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

Eigen::VectorXd HamiltonianMatrix::apply(const Eigen::VectorXd& v) const {
    if (dense_) return (*dense_) * v;
    return (*sparse_) * v;
}

Eigen::VectorXcd HamiltonianMatrix::apply(const Eigen::VectorXcd& v) const {
    if (dense_) return dense_->cast<std::complex<double>>() * v;
    return sparse_->cast<std::complex<double>>() * v;
}

const Eigensystem& HamiltonianMatrix::eigensystem() const {
    std::call_once(cache_->once, [this] { cache_->eig = diagonalize(*this); });
    return cache_->eig;
}

HamiltonianMatrix build_hamiltonian(std::shared_ptr<const CuteBasis> basis, const CavitySpec& cavity) {
    if (!basis || basis->dimension() == 0) throw Error(ErrorKind::BasisMismatch, "empty basis");
    if (!(cavity.omega_c > 0.0)) throw Error(ErrorKind::InvalidArgument, "cavity ω_c must be > 0");
    const auto& species = basis->species();
    for (const auto& sp : species) {
        if (!sp.vib) throw Error(ErrorKind::MissingOverlap, "species '" + sp.label + "' has no overlaps");
        const auto& v = *sp.vib;
        if (static_cast<std::size_t>(v.fc.rows()) != v.m_e() || static_cast<std::size_t>(v.fc.cols()) != v.m_g())
            throw Error(ErrorKind::MissingOverlap, "overlap matrix of '" + sp.label + "' must be m_e × m_g");
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(basis->dimension() * 4);

    for (std::size_t i = 0; i < basis->dimension(); ++i) {
        const auto& s = basis->state(i);
        double diag = s.excitonic ? species[s.species].vib->transition(s.level) : cavity.omega_c;
        for (std::size_t j = 0; j < species.size(); ++j)
            for (const auto& [lv, c] : s.occ[j]) diag += c * species[j].vib->ground_gap(lv);
        const auto ii = static_cast<int>(i);
        trip.emplace_back(ii, ii, diag);
        if (s.excitonic) continue;

        // Photon absorbed by one molecule of species j sitting in level k.
        for (std::size_t j = 0; j < species.size(); ++j) {
            const auto& sp = species[j];
            const auto& F = sp.vib->fc;
            const auto explicit_total = [&] {
                std::size_t n = 0;
                for (const auto& [lv, c] : s.occ[j]) n += c;
                return n;
            }();

            auto couple = [&](std::uint32_t k, double amplitude, const Occupation& rest) {
                if (amplitude == 0.0) return;
                SymmetricState t;
                t.excitonic = true;
                t.species = static_cast<std::uint32_t>(j);
                t.occ = s.occ;
                t.occ[j] = rest;
                for (std::size_t l = 0; l < sp.vib->m_e(); ++l) {
                    t.level = static_cast<std::uint32_t>(l);
                    auto idx = basis->index_of(t);
                    if (!idx) continue;
                    const double h = amplitude * F(static_cast<Eigen::Index>(l), k);
                    if (h == 0.0) continue;
                    trip.emplace_back(ii, static_cast<int>(*idx), h);
                    trip.emplace_back(static_cast<int>(*idx), ii, h);
                }
            };

            if (sp.infinite()) {
                couple(0, sp.G, s.occ[j]);
                continue;
            }
            const auto n0 = *sp.n_molecules - explicit_total;
            if (n0 > 0) couple(0, sp.g * std::sqrt(static_cast<double>(n0)), s.occ[j]);
            for (std::size_t p = 0; p < s.occ[j].size(); ++p) {
                const auto [lv, c] = s.occ[j][p];
                Occupation rest = s.occ[j];
                if (c == 1) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
                else rest[p].second -= 1;
                couple(lv, sp.g * std::sqrt(static_cast<double>(c)), rest);
            }
        }
    }

    auto h = HamiltonianMatrix::from_triplets(basis->dimension(), trip, basis);
    h.cute_ = basis.get();
    return h;
}

Eigensystem diagonalize(const HamiltonianMatrix& h, std::size_t cap) {
    if (h.dimension() > cap)
        throw Error(ErrorKind::DimensionCap, "dimension " + std::to_string(h.dimension()) +
                                                 " exceeds the dense eigensolver cap " + std::to_string(cap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.to_dense());
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonConverged, "dense eigensolver failed");
    return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem lowest_eigenpairs(const HamiltonianMatrix& h, std::size_t k, double tol, std::size_t max_krylov) {
    const std::size_t n = h.dimension();
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "requested zero eigenpairs");
    if (n <= 64 || k * 2 >= n) {
        auto full = diagonalize(h);
        const auto kk = static_cast<Eigen::Index>(std::min(k, n));
        return Eigensystem{full.values.head(kk), full.vectors.leftCols(kk)};
    }

    const std::size_t m = std::min(n, max_krylov ? max_krylov : std::max<std::size_t>(4 * k + 60, 160));
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd Q(N, static_cast<Eigen::Index>(m));
    std::vector<double> alpha, beta;

    Eigen::VectorXd q(N);
    for (Eigen::Index i = 0; i < N; ++i) q[i] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    q.normalize();

    Eigen::VectorXd ritz;
    Eigen::MatrixXd S;
    for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        Q.col(jj) = q;
        Eigen::VectorXd w = h.apply(q);
        alpha.push_back(q.dot(w));
        // Two passes of classical Gram-Schmidt against the whole Krylov basis.
        for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(jj + 1) * (Q.leftCols(jj + 1).transpose() * w);
        const double b = w.norm();

        const bool check = (j + 1 >= k && (j + 1) % 10 == 0) || j + 1 == m || b < 1e-14;
        if (check) {
            const auto dim = jj + 1;
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            ritz = es.eigenvalues();
            S = es.eigenvectors();
            const double scale = std::max(ritz.cwiseAbs().maxCoeff(), 1e-300);
            bool converged = static_cast<std::size_t>(dim) >= k;
            for (std::size_t i = 0; converged && i < k; ++i)
                if (std::abs(b * S(dim - 1, static_cast<Eigen::Index>(i))) > tol * scale) converged = false;
            if (converged || b < 1e-14) {
                if (static_cast<std::size_t>(dim) < k)
                    throw Error(ErrorKind::NonConverged, "Krylov space exhausted before k eigenpairs");
                const auto kk = static_cast<Eigen::Index>(k);
                return Eigensystem{ritz.head(kk), Q.leftCols(dim) * S.leftCols(kk)};
            }
        }
        beta.push_back(b);
        q = w / b;
    }
    throw Error(ErrorKind::NonConverged, "Lanczos did not converge within " + std::to_string(m) + " steps");
}

void write_matrix_market(const std::string& path, const HamiltonianMatrix& h) {
    const auto s = h.to_sparse();
    std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
    for (Eigen::Index k = 0; k < s.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(s, k); it; ++it)
            if (it.row() >= it.col() && it.value() != 0.0) entries.emplace_back(it.row(), it.col(), it.value());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<1>(a), std::get<0>(a)) < std::tie(std::get<1>(b), std::get<0>(b));
    });
    std::ostringstream out;
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << h.dimension() << ' ' << h.dimension() << ' ' << entries.size() << '\n';
    for (const auto& [r, c, v] : entries) out << r + 1 << ' ' << c + 1 << ' ' << io::format_double(v) << '\n';
    io::write_text(path, out.str());
}

// ---------------------------------------------------------------------------

namespace {

std::string config_string(const ModeConfig& m) {
    std::string s = "{";
    for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
    return s + "}";
}

void mode_multisets(std::size_t modes, std::size_t max_size, std::vector<ModeConfig>& out) {
    ModeConfig cur;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        out.push_back(cur);
        if (cur.size() == max_size) return;
        for (std::size_t k = from; k < modes; ++k) {
            cur.push_back(k);
            self(self, k);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

ModeConfig with_mode(ModeConfig m, std::size_t k) {
    m.insert(std::upper_bound(m.begin(), m.end(), k), k);
    return m;
}

double occupancy(const ModeConfig& m, std::size_t k) {
    return static_cast<double>(std::count(m.begin(), m.end(), k));
}

} // namespace

std::string FgrState::label() const {
    switch (sector) {
    case FgrSector::Photon: return "|1," + config_string(carrier) + "⟩";
    case FgrSector::Bright: return "|e," + config_string(carrier) + "⟩";
    case FgrSector::Other: return "|e'," + config_string(carrier) + "," + config_string(excited) + "⟩";
    }
    return {};
}

std::optional<std::size_t> VibronicModel::find(FgrSector sector, const ModeConfig& carrier,
                                               const ModeConfig& excited) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].sector == sector && states[i].carrier == carrier && states[i].excited == excited) return i;
    return std::nullopt;
}

VibronicModel build_vibronic_fgr_model(FgrOrder order, std::size_t n_molecules, double g, double omega,
                                       const VibronicBathSpec& bath) {
    if (n_molecules == 0) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
    if (bath.omega.size() != bath.s.size())
        throw Error(ErrorKind::InvalidArgument, "bath frequencies and Huang-Rhys factors differ in length");
    for (std::size_t k = 0; k < bath.omega.size(); ++k) {
        if (!(bath.omega[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "bath frequencies must be > 0");
        if (bath.s[k] < 0.0) throw Error(ErrorKind::InvalidArgument, "Huang-Rhys factors must be >= 0");
        if (k > 0 && bath.omega[k] < bath.omega[k - 1])
            throw Error(ErrorKind::InvalidArgument, "bath frequencies must be ascending");
    }
    if (bath.anchor && *bath.anchor >= bath.omega.size())
        throw Error(ErrorKind::InvalidArgument, "anchor mode out of range");

    const std::size_t K = bath.omega.size();
    const std::size_t max_occ = bath.max_occupation;
    const std::size_t max_total = bath.max_total.value_or(max_occ);
    const double N = static_cast<double>(n_molecules);

    auto anchored = [&](const ModeConfig& m, std::size_t total) {
        if (total < 2 || !bath.anchor) return true;
        return std::find(m.begin(), m.end(), *bath.anchor) != m.end();
    };

    // Count the single-molecule configurations before generating them.
    double n_configs = 0.0;
    for (std::size_t q = 0; q <= max_occ; ++q) {
        double b = 1.0;
        for (std::size_t i = 1; i <= q; ++i) b = b * static_cast<double>(K + q - i) / static_cast<double>(i);
        n_configs += b;
    }
    if (n_configs > 1e6) throw Error(ErrorKind::BathTooLarge, "bath configuration space too large");

    std::vector<ModeConfig> configs;
    mode_multisets(K, max_occ, configs);
    std::stable_sort(configs.begin(), configs.end(),
                     [](const ModeConfig& a, const ModeConfig& b) { return a.size() < b.size(); });

    VibronicModel model;
    auto& st = model.states;
    auto push = [&](FgrState s) {
        st.push_back(std::move(s));
        if (st.size() > kBathDimensionCap)
            throw Error(ErrorKind::BathTooLarge, "bath model dimension exceeds cap " + std::to_string(kBathDimensionCap));
    };
    if (order == FgrOrder::Zeroth) {
        push({FgrSector::Photon, {}, {}});
        for (const auto& m : configs)
            if (anchored(m, m.size())) push({FgrSector::Bright, m, {}});
    } else {
        for (const auto& m : configs)
            if (m.size() <= max_total && anchored(m, m.size())) push({FgrSector::Photon, m, {}});
        for (const auto& m : configs)
            if (m.size() <= max_total && anchored(m, m.size())) push({FgrSector::Bright, m, {}});
        for (const auto& m : configs) {
            if (m.empty() || m.size() > max_total) continue;
            for (const auto& e : configs) {
                if (m.size() + e.size() > max_total) break;
                if (anchored(m, m.size() + e.size())) push({FgrSector::Other, m, e});
            }
        }
    }

    std::map<std::tuple<int, ModeConfig, ModeConfig>, std::size_t> index;
    for (std::size_t i = 0; i < st.size(); ++i)
        index[{static_cast<int>(st[i].sector), st[i].carrier, st[i].excited}] = i;
    auto lookup = [&](FgrSector sec, const ModeConfig& m, const ModeConfig& e) -> std::optional<std::size_t> {
        auto it = index.find({static_cast<int>(sec), m, e});
        if (it == index.end()) return std::nullopt;
        return it->second;
    };

    auto energy = [&](const ModeConfig& m) {
        double e = 0.0;
        for (auto k : m) e += bath.omega[k];
        return e;
    };

    std::vector<Eigen::Triplet<double>> t0, t1;
    auto add = [](std::vector<Eigen::Triplet<double>>& t, std::size_t i, std::size_t j, double v) {
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        if (i != j) t.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
    };

    for (std::size_t i = 0; i < st.size(); ++i) {
        const auto& s = st[i];
        add(t0, i, i, omega + energy(s.carrier) + energy(s.excited));

        if (s.sector == FgrSector::Photon) {
            if (s.carrier.empty()) {
                if (auto j = lookup(FgrSector::Bright, {}, {})) add(t0, i, *j, g * std::sqrt(N));
            } else {
                if (auto j = lookup(FgrSector::Bright, s.carrier, {})) add(t0, i, *j, g);
                if (auto j = lookup(FgrSector::Other, s.carrier, {})) add(t0, i, *j, g * std::sqrt(N - 1.0));
            }
            continue;
        }

        // Vibronic coupling creates one quantum on the excited molecule.
        const ModeConfig& vib = s.sector == FgrSector::Bright ? s.carrier : s.excited;
        for (std::size_t k = 0; k < K; ++k) {
            const double v = bath.omega[k] * std::sqrt(bath.s[k]);
            if (v == 0.0) continue;
            const ModeConfig up = with_mode(vib, k);
            const auto j = s.sector == FgrSector::Bright ? lookup(FgrSector::Bright, up, {})
                                                         : lookup(FgrSector::Other, s.carrier, up);
            if (j) add(t1, i, *j, v * std::sqrt(occupancy(vib, k) + 1.0));
        }
    }

    model.H0 = HamiltonianMatrix::from_triplets(st.size(), t0);
    model.H1 = HamiltonianMatrix::from_triplets(st.size(), t1);
    return model;
}

} // namespace cute
