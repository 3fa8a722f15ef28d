#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cute/config.hpp"
#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
    std::string config;
    std::string preset;
    std::string output;
    std::size_t jobs = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_output = true) {
    sub->add_option("config", c.config, "Run description (.toml or .json)");
    sub->add_option("--preset", c.preset, "Use an in-repo preset instead of a config file");
    if (with_output) {
        sub->add_option("-o,--output", c.output, "Output directory (overrides output_dir)");
        sub->add_option("-j,--jobs", c.jobs, "Worker threads for independent sweep points")
            ->check(CLI::PositiveNumber);
    }
}

std::string resolve_path(const Common& c) {
    if (!c.preset.empty() && !c.config.empty())
        throw cute::Error(cute::ErrorKind::ConfigInvalid, "give either a config file or --preset, not both");
    if (!c.preset.empty()) return cute::preset_path(c.preset);
    if (c.config.empty()) throw cute::Error(cute::ErrorKind::ConfigInvalid, "no config file given");
    return c.config;
}

int run_stage(const Common& c, cute::Stage stage) {
    const auto cfg = cute::load_config(resolve_path(c));
    cute::preflight(cfg);
    cute::RunOptions opt;
    opt.output_dir = c.output;
    opt.jobs = c.jobs;
    const auto res = cute::run(cfg, stage, opt);
    std::cout << cute::to_string(stage) << ": wrote " << res.files.size() << " file(s) to " << res.output_dir
              << "\n";
    for (const auto& f : res.files) std::cout << "  " << f << "\n";
    return kExitOk;
}

int validate(const Common& c) {
    const auto path = resolve_path(c);
    const auto cfg = cute::load_config(path);
    const auto p = cute::preflight(cfg);
    std::cout << "valid: " << path << "\n";
    std::cout << "  name: " << cfg.name << "\n";
    if (!cfg.species.empty()) {
        std::cout << "  species: " << cfg.species.size() << ", kappa " << cfg.kappa << "\n";
        std::cout << "  basis dimension: " << cute::io::format_double(p.dimension) << "\n";
    }
    if (p.n_times) std::cout << "  time points: " << p.n_times << "\n";
    std::cout << "  estimated memory: " << cute::io::format_double(p.memory_bytes / (1024.0 * 1024.0)) << " MiB\n";
    for (const auto& n : p.notes) std::cout << "  note: " << n << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective polariton dynamics with the permutation-symmetric truncation hierarchy", "cute"};
    app.set_version_flag("--version", std::string(CUTE_VERSION));
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        cute::Stage stage;
        Common opts;
        CLI::App* sub = nullptr;
    };
    Entry entries[] = {
        {"solve-vib", "Solve the vibrational problems and export eigenfunctions", cute::Stage::SolveVib, {}},
        {"build", "Enumerate the basis and export the Hamiltonian", cute::Stage::Build, {}},
        {"propagate", "Propagate the initial state and export c(t)", cute::Stage::Propagate, {}},
        {"spectrum", "Photon spectrum (plus bare-molecule spectra)", cute::Stage::Spectrum, {}},
        {"populations", "Population time series", cute::Stage::Populations, {}},
        {"rates", "Golden-rule rate table with time-domain fits", cute::Stage::Rates, {}},
        {"oracle-compare", "Compare against the brute-force N-molecule oracle", cute::Stage::OracleCompare, {}},
        {"run", "Run everything the config requests", cute::Stage::All, {}},
    };
    for (auto& e : entries) {
        e.sub = app.add_subcommand(e.name, e.help);
        add_common(e.sub, e.opts);
    }

    Common vopts;
    auto* val = app.add_subcommand("validate", "Check a config and report the preflight estimate");
    add_common(val, vopts, false);

    auto* list = app.add_subcommand("presets", "List the in-repo presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (list->parsed()) {
            for (const auto& n : cute::preset_names()) std::cout << n << "\n";
            return kExitOk;
        }
        if (val->parsed()) return validate(vopts);
        for (auto& e : entries)
            if (e.sub->parsed()) return run_stage(e.opts, e.stage);
    } catch (const cute::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cute::is_config_error(e.kind()) ? kExitConfig : kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
