#pragma once

// Run descriptions: a versioned TOML (or JSON) schema resolved into typed
// settings before any numerical work starts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cute/dynamics.hpp"
#include "cute/hamiltonian.hpp"
#include "cute/rates.hpp"
#include "cute/symbasis.hpp"
#include "cute/vibsolver.hpp"

namespace cute {

inline constexpr int kSchemaVersion = 1;

struct SpeciesConfig {
    std::string label;
    std::optional<std::size_t> n_molecules; // nullopt = infinite
    std::optional<double> g;
    std::optional<double> G;
    std::size_t m_g = 1;
    std::size_t m_e = 1;
    Grid grid;
    PotentialSpec ground;
    PotentialSpec excited;
};

struct SpectrumConfig {
    double gamma = 0.002;
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t n_omega = 2001;
    /// Species whose uncoupled absorption spectrum is reported alongside.
    std::vector<std::string> bare_species;
    double peak_threshold = 0.05;
};

struct RateBandConfig {
    Transition transition;
    double J0 = 0.0;
    double lo = 0.2; // multiples of G
    double hi = 2.2;
    std::size_t n_modes = 200;
};

struct RatesConfig {
    std::vector<FgrOrder> orders{FgrOrder::Zeroth, FgrOrder::First};
    std::vector<Transition> transitions{Transition::DarkFromUpper, Transition::LowerFromUpper,
                                        Transition::LowerFromDark};
    std::vector<std::size_t> n_values;
    double G = 0.1;
    double omega = 2.0;
    std::vector<double> eta{0.0};
    bool simulate = true;
    std::vector<RateBandConfig> bands; // per transition; missing ones use the default flat band
    double default_J0 = 0.001;
    double anchor = 0.5; // dark-family mode, multiples of G
    std::size_t n_samples = 60;

    SpectralDensitySpec bath_for(Transition t) const;
};

struct OracleConfig {
    std::size_t n = 2;
    std::size_t kappa = 2;
    double t_max = 500.0;
    std::size_t n_steps = 500;
    /// Truncation-leakage sweep (symmetric-exact engine).
    std::vector<std::size_t> leakage_n;
    double leakage_time = 25.0;
};

struct OutputConfig {
    bool basis_jsonl = true;
    bool matrix_market = false;
    bool plot = true;
    bool eigenfunctions = false;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string name = "run";
    UnitMode units = UnitMode::natural();
    std::optional<CavitySpec> cavity;
    std::vector<SpeciesConfig> species;
    std::size_t kappa = 0;
    std::optional<TimeGrid> time;
    std::string initial = "photon"; // "photon" or "fc:<label>"
    std::vector<std::string> observables;
    double average_from = 1000.0; // fs, start of the long-time window
    std::optional<SpectrumConfig> spectrum;
    std::optional<RatesConfig> rates;
    std::optional<OracleConfig> oracle;
    OutputConfig outputs;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    /// Canonical JSON of the resolved settings, copied into the manifest.
    std::string resolved;

    bool wants(const std::string& observable) const;
};

enum class ConfigFormat { Toml, Json };

/// Throws ParseError (with line:column) for syntax errors and ConfigInvalid
/// listing every violation with its field path.
RunConfig parse_config(const std::string& text, ConfigFormat format, const std::string& source = "<config>");
/// Format chosen by extension: .json is JSON, anything else TOML.
RunConfig load_config(const std::string& path);

/// Path of an in-repo preset; throws ConfigInvalid if it does not exist.
std::string preset_path(const std::string& name);
std::vector<std::string> preset_names();

struct Preflight {
    double dimension = 0.0; // CUT-E basis dimension (0 without species)
    double memory_bytes = 0.0;
    std::size_t n_times = 0;
    std::vector<std::string> notes;
};

/// Dimension and memory estimate without solving anything. Throws
/// BasisTooLarge when the enumeration would exceed the cap.
Preflight preflight(const RunConfig& config, double cap = kDefaultBasisCap);

} // namespace cute
