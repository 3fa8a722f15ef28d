#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cute/hamiltonian.hpp"

namespace cute {

enum class Transition { DarkFromUpper, LowerFromUpper, LowerFromDark };
std::string to_string(Transition t);
std::string to_string(FgrOrder o);

/// Either explicit modes or a flat J(ω) = J0 on [lo, hi], discretised into
/// n_modes equally spaced modes with ω_k² s_k = J0 Δω.
struct SpectralDensitySpec {
    struct Flat {
        double J0;
        double lo;
        double hi;
        std::size_t n_modes;
    };

    std::vector<double> omega;
    std::vector<double> s;
    std::optional<Flat> flat;

    static SpectralDensitySpec discrete(std::vector<double> omega, std::vector<double> s);
    static SpectralDensitySpec flat_band(double J0, double lo, double hi, std::size_t n_modes);
    /// 200 modes spanning [0.2, 2.2]·G.
    static SpectralDensitySpec default_flat(double J0, double G);

    double spacing() const;
    VibronicBathSpec to_bath() const;
};

struct RateResult {
    Transition transition;
    FgrOrder order;
    std::size_t n = 0;
    double eta = 0.0;      // eV; 0 = sharp delta on a flat band
    double analytic = 0.0; // 1/fs
    std::optional<double> fitted;   // 1/fs
    std::optional<double> residual; // rms of the log-survival fit
};

/// Golden-rule rate of the summary table. η > 0 replaces δ(x) by a unit-area
/// Lorentzian of half-width η summed over the discrete modes; η = 0 is only
/// allowed for flat bands and uses J(ω) = J0 exactly. Throws BandMiss when no
/// mode lies within 5η of the resonance (or the resonance is outside a flat
/// band for η = 0).
RateResult fgr_rate(FgrOrder order, Transition transition, std::size_t n, double g,
                    const SpectralDensitySpec& bath, double eta);

enum class InitialState { UpperPolariton, DarkFCFamily };

struct DecayOptions {
    double omega = 2.0; // electronic / cavity energy (eV)
    /// Fit window in fs; defaults to [0.1, 1]/Γ_expected.
    std::optional<std::pair<double, double>> window;
    /// Expected rate (1/fs) used for the default window.
    std::optional<double> expected;
    std::size_t n_samples = 60;
    /// Bath mode carried by the dark-family initial state (|D,a,0⟩).
    std::optional<std::size_t> anchor;
};

struct DecayFit {
    double rate = 0.0; // 1/fs
    double residual = 0.0;
    std::vector<double> times;
    std::vector<double> survival;
};

/// Propagates the named H0 eigenstate under H0 + H1 and fits log-survival.
/// Throws RecurrenceContamination if the bath recurrence time is shorter than
/// three decay times or the survival rebounds above 1.2/e inside the window.
DecayFit simulate_decay(FgrOrder order, std::size_t n, double g, const SpectralDensitySpec& bath,
                        InitialState initial, const DecayOptions& options);

void write_rates_csv(const std::string& path, const std::vector<RateResult>& rates);

} // namespace cute
