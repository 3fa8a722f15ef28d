#include "cute/rates.hpp"

#include <cmath>
#include <limits>

#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/units.hpp"

namespace cute {

std::string to_string(Transition t) {
    switch (t) {
    case Transition::DarkFromUpper: return "D<-+";
    case Transition::LowerFromUpper: return "-<-+";
    case Transition::LowerFromDark: return "-<-D";
    }
    return {};
}

std::string to_string(FgrOrder o) { return o == FgrOrder::Zeroth ? "zeroth" : "first"; }

SpectralDensitySpec SpectralDensitySpec::discrete(std::vector<double> omega, std::vector<double> s) {
    if (omega.size() != s.size()) throw Error(ErrorKind::InvalidArgument, "mode and Huang-Rhys lists differ in length");
    SpectralDensitySpec b;
    b.omega = std::move(omega);
    b.s = std::move(s);
    return b;
}

SpectralDensitySpec SpectralDensitySpec::flat_band(double J0, double lo, double hi, std::size_t n_modes) {
    if (J0 < 0.0) throw Error(ErrorKind::InvalidArgument, "J0 must be >= 0");
    if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::InvalidArgument, "flat band needs 0 < lo < hi");
    if (n_modes < 2) throw Error(ErrorKind::InvalidArgument, "flat band needs at least 2 modes");
    SpectralDensitySpec b;
    b.flat = Flat{J0, lo, hi, n_modes};
    const double d = (hi - lo) / static_cast<double>(n_modes - 1);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = lo + d * static_cast<double>(k);
        b.omega.push_back(w);
        b.s.push_back(J0 * d / (w * w));
    }
    return b;
}

SpectralDensitySpec SpectralDensitySpec::default_flat(double J0, double G) {
    return flat_band(J0, 0.2 * G, 2.2 * G, 200);
}

double SpectralDensitySpec::spacing() const {
    if (flat) return (flat->hi - flat->lo) / static_cast<double>(flat->n_modes - 1);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < omega.size(); ++k) d = std::min(d, omega[k] - omega[k - 1]);
    return d;
}

VibronicBathSpec SpectralDensitySpec::to_bath() const {
    VibronicBathSpec b;
    b.omega = omega;
    b.s = s;
    return b;
}

namespace {

/// Σ_k ω_k² s_k δ(x - ω_k): exact J0 for a sharp flat band, Lorentzian sum otherwise.
double spectral_weight(const SpectralDensitySpec& bath, double x, double eta) {
    if (eta == 0.0) {
        if (!bath.flat) throw Error(ErrorKind::InvalidArgument, "η = 0 requires a flat band");
        if (x < bath.flat->lo || x > bath.flat->hi)
            throw Error(ErrorKind::BandMiss, "resonance " + io::format_double(x) + " eV lies outside the band");
        return bath.flat->J0;
    }
    bool hit = false;
    double sum = 0.0;
    for (std::size_t k = 0; k < bath.omega.size(); ++k) {
        const double d = x - bath.omega[k];
        if (std::abs(d) <= 5.0 * eta) hit = true;
        sum += bath.omega[k] * bath.omega[k] * bath.s[k] * (eta / units::pi) / (d * d + eta * eta);
    }
    if (!hit) throw Error(ErrorKind::BandMiss, "no bath mode within 5η of " + io::format_double(x) + " eV");
    return sum;
}

} // namespace

RateResult fgr_rate(FgrOrder order, Transition transition, std::size_t n, double g,
                    const SpectralDensitySpec& bath, double eta) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
    if (eta < 0.0) throw Error(ErrorKind::InvalidArgument, "η must be >= 0");
    const double N = static_cast<double>(n);
    const double G = g * std::sqrt(N);
    const double pi = units::pi;

    double gamma = 0.0; // eV
    if (order == FgrOrder::Zeroth) {
        if (transition == Transition::DarkFromUpper) gamma = pi * spectral_weight(bath, G, eta);
    } else {
        switch (transition) {
        case Transition::DarkFromUpper: gamma = (N - 1.0) / N * pi * spectral_weight(bath, G, eta); break;
        case Transition::LowerFromUpper: gamma = 1.0 / (4.0 * N) * 2.0 * pi * spectral_weight(bath, 2.0 * G, eta); break;
        case Transition::LowerFromDark: gamma = (N - 1.0) / (N * N) * pi * spectral_weight(bath, G, eta); break;
        }
    }
    RateResult r{transition, order, n, eta, gamma / units::hbar_eV_fs, std::nullopt, std::nullopt};
    return r;
}

DecayFit simulate_decay(FgrOrder order, std::size_t n, double g, const SpectralDensitySpec& bath,
                        InitialState initial, const DecayOptions& opt) {
    VibronicBathSpec spec = bath.to_bath();
    std::size_t anchor = 0;
    if (initial == InitialState::DarkFCFamily) {
        if (!opt.anchor) throw Error(ErrorKind::InvalidArgument, "dark-family start needs an anchor mode");
        anchor = *opt.anchor;
        if (anchor >= spec.omega.size()) throw Error(ErrorKind::InvalidArgument, "anchor mode out of range");
        // The lower-polariton final states carry the anchor quantum plus the
        // emitted one on the same molecule.
        if (order == FgrOrder::First) {
            spec.anchor = anchor;
            spec.max_occupation = 2;
            spec.max_total = 2;
        }
    }
    const auto model = build_vibronic_fgr_model(order, n, g, opt.omega, spec);

    Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.states.size()));
    if (initial == InitialState::UpperPolariton) {
        const auto p = *model.find(FgrSector::Photon, {});
        const auto e = *model.find(FgrSector::Bright, {});
        Eigen::Matrix2d h2;
        h2 << model.H0(p, p), model.H0(p, e), model.H0(e, p), model.H0(e, e);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h2);
        psi0[static_cast<Eigen::Index>(p)] = es.eigenvectors()(0, 1);
        psi0[static_cast<Eigen::Index>(e)] = es.eigenvectors()(1, 1);
    } else if (order == FgrOrder::Zeroth) {
        psi0[static_cast<Eigen::Index>(*model.find(FgrSector::Bright, {anchor}))] = 1.0;
    } else {
        // Null vector of the photon coupling within the {a} block.
        const double N = static_cast<double>(n);
        psi0[static_cast<Eigen::Index>(*model.find(FgrSector::Bright, {anchor}))] = std::sqrt((N - 1.0) / N);
        psi0[static_cast<Eigen::Index>(*model.find(FgrSector::Other, {anchor}, {}))] = -1.0 / std::sqrt(N);
    }

    double t0, t1;
    if (opt.window) {
        std::tie(t0, t1) = *opt.window;
    } else {
        if (!opt.expected || !(*opt.expected > 0.0))
            throw Error(ErrorKind::InvalidArgument, "decay fit needs an expected rate or an explicit window");
        t0 = 0.1 / *opt.expected;
        t1 = 1.0 / *opt.expected;
        const double recurrence = 2.0 * units::pi * units::hbar_eV_fs / bath.spacing();
        if (recurrence < 3.0 / *opt.expected)
            throw Error(ErrorKind::RecurrenceContamination,
                        "bath recurrence time " + io::format_double(recurrence) + " fs is shorter than 3/Γ");
    }
    if (!(t1 > t0) || t0 < 0.0) throw Error(ErrorKind::InvalidArgument, "invalid fit window");

    const Eigen::MatrixXd H = model.H0.to_dense() + model.H1.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConverged, "bath-model eigensolver failed");
    const Eigen::VectorXd c = es.eigenvectors().transpose() * psi0;
    const Eigen::VectorXd w = c.cwiseAbs2();

    DecayFit fit;
    const std::size_t ns = std::max<std::size_t>(opt.n_samples, 3);
    for (std::size_t i = 0; i < ns; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(ns - 1);
        std::complex<double> amp = 0.0;
        for (Eigen::Index k = 0; k < w.size(); ++k)
            amp += w[k] * std::polar(1.0, -es.eigenvalues()[k] * t / units::hbar_eV_fs);
        fit.times.push_back(t);
        fit.survival.push_back(std::norm(amp));
    }

    const double inv_e = std::exp(-1.0);
    bool below = false;
    for (double s : fit.survival) {
        if (s < inv_e) below = true;
        if (below && s > 1.2 * inv_e)
            throw Error(ErrorKind::RecurrenceContamination, "survival rebounds inside the fit window");
    }

    double st = 0, sy = 0, stt = 0, sty = 0;
    const double m = static_cast<double>(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const double y = std::log(std::max(fit.survival[i], 1e-300));
        st += fit.times[i];
        sy += y;
        stt += fit.times[i] * fit.times[i];
        sty += fit.times[i] * y;
    }
    const double slope = (m * sty - st * sy) / (m * stt - st * st);
    const double intercept = (sy - slope * st) / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        const double r = std::log(std::max(fit.survival[i], 1e-300)) - (intercept + slope * fit.times[i]);
        rss += r * r;
    }
    fit.rate = -slope;
    fit.residual = std::sqrt(rss / m);
    return fit;
}

void write_rates_csv(const std::string& path, const std::vector<RateResult>& rates) {
    io::CsvWriter csv(path);
    csv.header({"transition", "order", "N", "eta_eV", "analytic_per_fs", "fitted_per_fs", "residual"});
    for (const auto& r : rates) {
        auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("nan"); };
        csv.raw_row({to_string(r.transition), to_string(r.order), std::to_string(r.n), io::format_double(r.eta),
                     io::format_double(r.analytic), opt(r.fitted), opt(r.residual)});
    }
}

} // namespace cute
