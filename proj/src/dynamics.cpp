#include "cute/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/units.hpp"

namespace cute {

namespace {

void check_basis(const HamiltonianMatrix& h, const StateVector& v) {
    if (static_cast<std::size_t>(v.amplitudes.size()) != h.dimension())
        throw Error(ErrorKind::BasisMismatch, "state dimension " + std::to_string(v.amplitudes.size()) +
                                                  " does not match Hamiltonian dimension " +
                                                  std::to_string(h.dimension()));
    if (v.basis && h.basis_tag() && v.basis.get() != h.basis_tag())
        throw Error(ErrorKind::BasisMismatch, "state and Hamiltonian are defined on different bases");
}

Eigen::VectorXcd phases(const Eigen::VectorXd& energies, double t) {
    Eigen::VectorXcd p(energies.size());
    for (Eigen::Index n = 0; n < energies.size(); ++n)
        p[n] = std::polar(1.0, -energies[n] * t / units::hbar_eV_fs);
    return p;
}

} // namespace

TimeGrid TimeGrid::make(double t_max, std::size_t n_steps) {
    if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_max must be > 0");
    if (n_steps < 2) throw Error(ErrorKind::InvalidArgument, "time grid needs at least 2 steps");
    return TimeGrid{t_max, n_steps};
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
}

StateVector initial_photonic_state(const std::shared_ptr<const CuteBasis>& basis) {
    StateVector v{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dimension())), basis};
    v.amplitudes[static_cast<Eigen::Index>(basis->vacuum_photonic_index())] = 1.0;
    return v;
}

StateVector initial_fc_state(const std::shared_ptr<const CuteBasis>& basis, const std::string& species) {
    const std::size_t j = basis->species_index(species);
    const auto& vib = *basis->species()[j].vib;
    StateVector v{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dimension())), basis};
    SymmetricState s;
    s.excitonic = true;
    s.species = static_cast<std::uint32_t>(j);
    s.occ.resize(basis->species().size());
    for (std::size_t l = 0; l < vib.m_e(); ++l) {
        s.level = static_cast<std::uint32_t>(l);
        if (auto idx = basis->index_of(s))
            v.amplitudes[static_cast<Eigen::Index>(*idx)] = vib.fc(static_cast<Eigen::Index>(l), 0);
    }
    v.amplitudes.normalize();
    return v;
}

Eigen::VectorXcd evolve(const HamiltonianMatrix& h, const StateVector& v0, double t_fs) {
    check_basis(h, v0);
    const auto& eig = h.eigensystem();
    const Eigen::VectorXcd c = eig.vectors.transpose().cast<cplx>() * v0.amplitudes;
    return eig.vectors.cast<cplx>() * phases(eig.values, t_fs).cwiseProduct(c);
}

TrajectoryRecord propagate(const HamiltonianMatrix& h, const StateVector& v0, const std::vector<double>& times) {
    check_basis(h, v0);
    const auto& eig = h.eigensystem();
    const Eigen::MatrixXcd V = eig.vectors.cast<cplx>();
    const Eigen::VectorXcd c = V.transpose() * v0.amplitudes;
    TrajectoryRecord rec{times, {}, v0.basis ? v0.basis : h.basis_handle()};
    rec.states.reserve(times.size());
    for (double t : times) rec.states.push_back(V * phases(eig.values, t).cwiseProduct(c));
    return rec;
}

TrajectoryRecord propagate(const HamiltonianMatrix& h, const StateVector& v0, const TimeGrid& grid) {
    return propagate(h, v0, grid.times());
}

std::vector<cplx> autocorrelation(const TrajectoryRecord& traj) {
    std::vector<cplx> c;
    if (traj.states.empty()) return c;
    c.reserve(traj.states.size());
    const auto& v0 = traj.states.front();
    for (const auto& v : traj.states) c.push_back(v0.dot(v));
    return c;
}

std::vector<cplx> autocorrelation(const HamiltonianMatrix& h, const StateVector& v0,
                                  const std::vector<double>& times) {
    check_basis(h, v0);
    const auto& eig = h.eigensystem();
    const Eigen::VectorXcd c = eig.vectors.transpose().cast<cplx>() * v0.amplitudes;
    const Eigen::VectorXd w = c.cwiseAbs2();
    std::vector<cplx> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(w.cast<cplx>().dot(phases(eig.values, t)));
    return out;
}

SpectrumResult compute_spectrum(const std::vector<double>& times, const std::vector<cplx>& c, double gamma,
                                double omega_min, double omega_max, std::size_t n_omega) {
    if (times.size() != c.size() || times.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "spectrum needs matching time and signal arrays");
    if (gamma < 0.0) throw Error(ErrorKind::InvalidArgument, "linewidth must be >= 0");
    if (!(omega_max > omega_min) || n_omega < 2)
        throw Error(ErrorKind::InvalidArgument, "frequency window must be increasing with >= 2 points");
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw Error(ErrorKind::InvalidArgument, "spectrum requires uniformly sampled c(t)");
    const double nyquist = units::pi * units::hbar_eV_fs / dt;
    if (std::max(std::abs(omega_min), std::abs(omega_max)) > nyquist)
        throw Error(ErrorKind::WindowOutsideNyquist,
                    "window exceeds the Nyquist frequency " + io::format_double(nyquist) + " eV");

    const std::size_t nt = times.size();
    std::vector<cplx> damped(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double w = (i == 0 || i + 1 == nt) ? 0.5 : 1.0;
        damped[i] = w * dt * c[i] * std::exp(-gamma * times[i] / units::hbar_eV_fs);
    }

    SpectrumResult out;
    out.gamma = gamma;
    out.omega.resize(n_omega);
    out.intensity.resize(n_omega);
    for (std::size_t k = 0; k < n_omega; ++k) {
        const double om = omega_min + (omega_max - omega_min) * static_cast<double>(k) / static_cast<double>(n_omega - 1);
        // Rotate by a fixed phase step instead of calling exp per sample.
        const cplx step = std::polar(1.0, om * dt / units::hbar_eV_fs);
        cplx rot = std::polar(1.0, om * times[0] / units::hbar_eV_fs);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            acc += rot * damped[i];
            rot *= step;
            if ((i & 255) == 255) rot = std::polar(1.0, om * times[i + 1 < nt ? i + 1 : i] / units::hbar_eV_fs);
        }
        out.omega[k] = om;
        out.intensity[k] = acc.real();
    }
    return out;
}

std::vector<std::size_t> find_peaks(const std::vector<double>& y, double relative_threshold) {
    std::vector<std::size_t> peaks;
    if (y.size() < 3) return peaks;
    double mx = y[0];
    for (double v : y) mx = std::max(mx, v);
    const double thr = relative_threshold * mx;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > thr) peaks.push_back(i);
    return peaks;
}

double fourier_linewidth(double t_max_fs) { return 2.0 * units::pi * units::hbar_eV_fs / t_max_fs; }

void write_spectrum_csv(const std::string& path, const std::vector<std::string>& labels,
                        const std::vector<SpectrumResult>& spectra) {
    if (spectra.empty()) throw Error(ErrorKind::InvalidArgument, "no spectra to write");
    io::CsvWriter csv(path);
    std::vector<std::string> header{"omega_eV"};
    header.insert(header.end(), labels.begin(), labels.end());
    csv.header(header);
    for (std::size_t k = 0; k < spectra.front().omega.size(); ++k) {
        std::vector<double> row{spectra.front().omega[k]};
        for (const auto& s : spectra) row.push_back(s.intensity[k]);
        csv.row(row);
    }
}

void write_gnuplot_script(const std::string& path, const std::string& csv, const std::string& xlabel,
                          const std::vector<std::string>& columns) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set xlabel '" << xlabel << "'\n";
    gp << "plot ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) gp << ", \\\n     ";
        gp << "'" << csv << "' using 1:" << i + 2 << " with lines title '" << columns[i] << "'";
    }
    gp << "\npause -1\n";
    io::write_text(path, gp.str());
}

} // namespace cute
