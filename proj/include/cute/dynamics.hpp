#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cute/hamiltonian.hpp"

namespace cute {

using cplx = std::complex<double>;

struct StateVector {
    Eigen::VectorXcd amplitudes;
    std::shared_ptr<const void> basis;

    double norm() const { return amplitudes.norm(); }
};

/// Uniform times 0, dt, ..., t_max in fs (n_steps intervals, n_steps + 1 points).
struct TimeGrid {
    double t_max = 0.0;
    std::size_t n_steps = 0;

    static TimeGrid make(double t_max, std::size_t n_steps);
    double dt() const { return t_max / static_cast<double>(n_steps); }
    double time(std::size_t i) const { return dt() * static_cast<double>(i); }
    std::size_t size() const { return n_steps + 1; }
    std::vector<double> times() const;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    std::shared_ptr<const void> basis;
};

StateVector initial_photonic_state(const std::shared_ptr<const CuteBasis>& basis);
/// φ_1 of the ground surface placed on the excited surface of one species,
/// normalised within the retained excited levels.
StateVector initial_fc_state(const std::shared_ptr<const CuteBasis>& basis, const std::string& species);

/// v(t) = Σ_n e^{-iE_n t/ħ} ⟨n|v0⟩ |n⟩ at one time (t may be negative).
Eigen::VectorXcd evolve(const HamiltonianMatrix& h, const StateVector& v0, double t_fs);
TrajectoryRecord propagate(const HamiltonianMatrix& h, const StateVector& v0, const std::vector<double>& times);
TrajectoryRecord propagate(const HamiltonianMatrix& h, const StateVector& v0, const TimeGrid& grid);

/// c(t) = ⟨v(0)|v(t)⟩ from a stored trajectory.
std::vector<cplx> autocorrelation(const TrajectoryRecord& traj);
/// Same quantity straight from the eigendecomposition, without storing states.
std::vector<cplx> autocorrelation(const HamiltonianMatrix& h, const StateVector& v0,
                                  const std::vector<double>& times);

struct SpectrumResult {
    std::vector<double> omega; // eV, ascending
    std::vector<double> intensity;
    double gamma = 0.0;
};

/// σ(ω) = Re ∫_0^T dt e^{iωt/ħ} c(t) e^{-γt/ħ}, trapezoid rule on the uniform
/// samples. Throws WindowOutsideNyquist if the window exceeds πħ/dt.
SpectrumResult compute_spectrum(const std::vector<double>& times, const std::vector<cplx>& c, double gamma,
                                double omega_min, double omega_max, std::size_t n_omega);

/// Indices of local maxima above `relative_threshold` × global maximum.
std::vector<std::size_t> find_peaks(const std::vector<double>& y, double relative_threshold);

/// Resolution 2πħ/T (eV) of a record of length T (fs).
double fourier_linewidth(double t_max_fs);

void write_spectrum_csv(const std::string& path, const std::vector<std::string>& labels,
                        const std::vector<SpectrumResult>& spectra);
void write_gnuplot_script(const std::string& path, const std::string& csv, const std::string& xlabel,
                          const std::vector<std::string>& columns);

} // namespace cute
