#include "cute/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <thread>

#include <json.hpp>

#include "cute/dynamics.hpp"
#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/observables.hpp"
#include "cute/oracle.hpp"
#include "cute/rates.hpp"

namespace cute {

using json = nlohmann::ordered_json;

std::string to_string(Stage s) {
    switch (s) {
    case Stage::SolveVib: return "solve-vib";
    case Stage::Build: return "build";
    case Stage::Propagate: return "propagate";
    case Stage::Spectrum: return "spectrum";
    case Stage::Populations: return "populations";
    case Stage::Rates: return "rates";
    case Stage::OracleCompare: return "oracle-compare";
    case Stage::All: return "run";
    }
    return {};
}

namespace {

// Runs f(0..n-1) on up to `jobs` threads. Results must go to per-index slots;
// the first exception (by index) is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& f) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nt = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string strip_kind(const Error& e) {
    const std::string what = e.what();
    const auto prefix = std::string(to_string(e.kind())) + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

json to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

class Session {
public:
    Session(const RunConfig& cfg, const RunOptions& opt)
        : cfg_(cfg), opt_(opt), dir_(opt.output_dir.empty() ? cfg.output_dir : opt.output_dir) {
        std::filesystem::create_directories(dir_);
    }

    RunResult execute(Stage stage) {
        const auto t0 = std::chrono::steady_clock::now();
        switch (stage) {
        case Stage::SolveVib:
            guarded("solve-vib", [&] { solve_vib(true); });
            break;
        case Stage::Build:
            guarded("build", [&] { build(true); });
            break;
        case Stage::Propagate:
            guarded("propagate", [&] { propagate(true); });
            break;
        case Stage::Spectrum:
            guarded("spectrum", [&] { spectrum(); });
            break;
        case Stage::Populations:
            guarded("populations", [&] { populations(); });
            break;
        case Stage::Rates:
            guarded("rates", [&] { rates(); });
            break;
        case Stage::OracleCompare:
            guarded("oracle-compare", [&] { oracle(); });
            break;
        case Stage::All:
            if (!cfg_.species.empty()) {
                guarded("build", [&] { build(false); });
                if (cfg_.wants("spectrum")) guarded("spectrum", [&] { spectrum(); });
                if (cfg_.wants("populations") || cfg_.wants("position"))
                    guarded("populations", [&] { populations(); });
                if (cfg_.wants("yields")) guarded("yields", [&] { yields(); });
            }
            if (cfg_.rates) guarded("rates", [&] { rates(); });
            if (cfg_.oracle) guarded("oracle-compare", [&] { oracle(); });
            break;
        }

        const std::string summary_text = summary_.dump(2) + "\n";
        io::write_text(path("summary.json"), summary_text);
        files_.push_back("summary.json");

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json manifest;
        manifest["tool"] = "cute";
        manifest["version"] = CUTE_VERSION;
        manifest["schema_version"] = cfg_.schema_version;
        manifest["stage"] = to_string(stage);
        manifest["config"] = json::parse(cfg_.resolved);
        manifest["outputs"] = files_;
        manifest["jobs"] = opt_.jobs;
        manifest["wall_time_s"] = wall;
        io::write_text(path("manifest.json"), manifest.dump(2) + "\n");
        files_.push_back("manifest.json");

        return RunResult{dir_, files_, summary_text};
    }

private:
    template <class F>
    void guarded(const std::string& stage, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            throw Error(e.kind(), "stage '" + stage + "': " + strip_kind(e));
        }
    }

    std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

    void wrote(const std::string& name) { files_.push_back(name); }

    void require_species() const {
        if (cfg_.species.empty()) throw Error(ErrorKind::ConfigInvalid, "species: at least one species is required");
        if (!cfg_.cavity) throw Error(ErrorKind::ConfigInvalid, "cavity.omega_c: missing required field");
    }

    void solve_vib(bool export_all) {
        if (!species_.empty()) return;
        require_species();
        json vib = json::object();
        for (const auto& s : cfg_.species) {
            auto basis = std::make_shared<VibrationalBasis>(
                solve_species(s.grid, s.ground, s.excited, cfg_.units, s.m_g, s.m_e));
            if (export_all || cfg_.outputs.eigenfunctions) {
                write_eigenfunctions_csv(path("eigen_" + s.label + "_ground.csv"), *basis->ground);
                write_eigenfunctions_csv(path("eigen_" + s.label + "_excited.csv"), *basis->excited);
                wrote("eigen_" + s.label + "_ground.csv");
                wrote("eigen_" + s.label + "_excited.csv");
            }
            const auto leak = franck_condon_leakage(basis->fc);
            json e;
            e["ground_energies"] = to_json(std::vector<double>(basis->ground_energies.begin(), basis->ground_energies.end()));
            e["excited_energies"] =
                to_json(std::vector<double>(basis->excited_energies.begin(), basis->excited_energies.end()));
            e["fc_00_squared"] = basis->fc(0, 0) * basis->fc(0, 0);
            e["fc_leakage_level0"] = leak[0];
            vib[s.label] = e;

            SpeciesSpec spec = s.g ? SpeciesSpec::with_g(s.label, *s.n_molecules, *s.g, basis)
                                   : SpeciesSpec::with_G(s.label, s.n_molecules, *s.G, basis);
            species_.push_back(spec);
        }
        summary_["vibrational"] = vib;
    }

    void build(bool export_matrix) {
        if (h_) return;
        solve_vib(false);
        basis_ = enumerate_basis(species_, cfg_.kappa);
        h_ = std::make_unique<HamiltonianMatrix>(build_hamiltonian(basis_, *cfg_.cavity));
        summary_["basis_dimension"] = basis_->dimension();
        summary_["kappa"] = cfg_.kappa;
        if (cfg_.outputs.basis_jsonl) {
            write_basis_jsonl(path("basis.jsonl"), *basis_);
            wrote("basis.jsonl");
        }
        if (export_matrix || cfg_.outputs.matrix_market) {
            write_matrix_market(path("hamiltonian.mtx"), *h_);
            wrote("hamiltonian.mtx");
        }
    }

    void require_time() const {
        if (!cfg_.time) throw Error(ErrorKind::ConfigInvalid, "time: required by this stage");
    }

    StateVector initial_state() const {
        if (cfg_.initial == "photon") return initial_photonic_state(basis_);
        return initial_fc_state(basis_, cfg_.initial.substr(3));
    }

    void propagate(bool export_csv) {
        if (traj_) return;
        require_time();
        build(false);
        traj_ = std::make_unique<TrajectoryRecord>(cute::propagate(*h_, initial_state(), *cfg_.time));
        if (export_csv) {
            const auto c = autocorrelation(*traj_);
            io::CsvWriter csv(path("autocorrelation.csv"));
            csv.header({"time_fs", "re", "im"});
            for (std::size_t i = 0; i < c.size(); ++i) csv.row({traj_->times[i], c[i].real(), c[i].imag()});
            wrote("autocorrelation.csv");
        }
    }

    void spectrum() {
        require_time();
        if (!cfg_.spectrum) throw Error(ErrorKind::ConfigInvalid, "spectrum: section required by this stage");
        build(false);
        const auto& sc = *cfg_.spectrum;
        const auto times = cfg_.time->times();

        std::vector<std::string> labels{"photon"};
        std::vector<SpectrumResult> spectra(1 + sc.bare_species.size());
        const auto c = autocorrelation(*h_, initial_state(), times);
        spectra[0] = compute_spectrum(times, c, sc.gamma, sc.omega_min, sc.omega_max, sc.n_omega);

        // Uncoupled molecule: FC wavepacket on its own excited surface.
        parallel_for(sc.bare_species.size(), opt_.jobs, [&](std::size_t i) {
            const auto j = basis_->species_index(sc.bare_species[i]);
            auto bare = species_[j];
            bare.g = 0.0;
            bare.G = 0.0;
            auto b = enumerate_basis({bare}, 0);
            const auto h = build_hamiltonian(b, *cfg_.cavity);
            const auto cb = autocorrelation(h, initial_fc_state(b, bare.label), times);
            spectra[i + 1] = compute_spectrum(times, cb, sc.gamma, sc.omega_min, sc.omega_max, sc.n_omega);
        });
        for (const auto& l : sc.bare_species) labels.push_back("bare_" + l);

        write_spectrum_csv(path("spectrum.csv"), labels, spectra);
        wrote("spectrum.csv");

        json peaks = json::object();
        for (std::size_t i = 0; i < spectra.size(); ++i) {
            std::vector<double> at;
            for (auto k : find_peaks(spectra[i].intensity, sc.peak_threshold)) at.push_back(spectra[i].omega[k]);
            peaks[labels[i]] = to_json(at);
        }
        json s;
        s["gamma_eV"] = sc.gamma;
        s["bin_eV"] = (sc.omega_max - sc.omega_min) / static_cast<double>(sc.n_omega - 1);
        s["fourier_linewidth_eV"] = fourier_linewidth(cfg_.time->t_max);
        s["peak_threshold"] = sc.peak_threshold;
        s["peaks_eV"] = peaks;
        summary_["spectrum"] = s;

        if (cfg_.outputs.plot) {
            const bool pops = cfg_.wants("populations");
            const std::string gp = pops ? "plot_spectrum.gp" : "plot.gp";
            write_gnuplot_script(path(gp), "spectrum.csv", "omega (eV)", labels);
            wrote(gp);
        }
    }

    void populations() {
        propagate(false);
        const auto rec = cute::populations(*basis_, *traj_);
        write_populations_csv(path("populations.csv"), rec);
        wrote("populations.csv");

        json avg = json::object();
        std::size_t count = 0;
        std::vector<double> sums(rec.species.size(), 0.0);
        double photon = 0.0;
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            if (rec.times[i] < cfg_.average_from) continue;
            ++count;
            photon += rec.photon[i];
            for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += rec.species_excited[j][i];
        }
        if (count > 0) {
            avg["from_fs"] = cfg_.average_from;
            avg["photon"] = photon / static_cast<double>(count);
            for (std::size_t j = 0; j < sums.size(); ++j)
                avg["excited_" + rec.species[j]] = sums[j] / static_cast<double>(count);
            summary_["long_time_average"] = avg;
        }
        if (!rec.dark.empty()) {
            double worst = 0.0;
            for (std::size_t i = 0; i < rec.times.size(); ++i)
                worst = std::max(worst, std::abs(rec.photon[i] + rec.fc[i] + rec.dark[i] - 1.0));
            summary_["sum_rule_max_deviation"] = worst;
        }

        if (cfg_.wants("position")) {
            std::vector<std::vector<double>> series;
            std::vector<std::string> header{"time_fs"};
            for (const auto& sp : species_) {
                if (!sp.vib->excited) continue;
                series.push_back(excited_position_series(*basis_, *traj_, sp.label));
                header.push_back("q_" + sp.label);
            }
            io::CsvWriter csv(path("positions.csv"));
            csv.header(header);
            for (std::size_t i = 0; i < traj_->times.size(); ++i) {
                std::vector<double> row{traj_->times[i]};
                for (const auto& s : series) row.push_back(s[i]);
                csv.row(row);
            }
            wrote("positions.csv");
        }

        if (cfg_.outputs.plot) {
            std::vector<std::string> cols{"photon", "fc"};
            if (!rec.dark.empty()) cols.push_back("dark");
            for (const auto& l : rec.species) cols.push_back("excited_" + l);
            write_gnuplot_script(path("plot.gp"), "populations.csv", "time (fs)", cols);
            wrote("plot.gp");
        }
    }

    void yields() {
        build(false);
        json y = json::object();
        const auto fc = fc_statistical_yields(species_, *cfg_.cavity);
        for (std::size_t j = 0; j < species_.size(); ++j) {
            json e;
            e["p_s"] = statistical_yield(*h_, species_[j].label);
            e["p_fc"] = fc[j];
            y[species_[j].label] = e;
        }
        summary_["yields"] = y;
    }

    void rates() {
        if (!cfg_.rates) throw Error(ErrorKind::ConfigInvalid, "rates: section required by this stage");
        const auto& rc = *cfg_.rates;

        struct Point {
            FgrOrder order;
            std::size_t n;
            Transition t;
        };
        std::vector<Point> points;
        for (auto o : rc.orders)
            for (auto n : rc.n_values)
                for (auto t : rc.transitions) points.push_back({o, n, t});

        std::vector<std::vector<RateResult>> rows(points.size());
        parallel_for(points.size(), opt_.jobs, [&](std::size_t i) {
            const auto& p = points[i];
            const double g = rc.G / std::sqrt(static_cast<double>(p.n));
            const auto bath = rc.bath_for(p.t);
            for (double eta : rc.eta) rows[i].push_back(fgr_rate(p.order, p.t, p.n, g, bath, eta));

            const double expected = rows[i].front().analytic;
            if (!rc.simulate || !(expected > 0.0)) return;
            DecayOptions o;
            o.omega = rc.omega;
            o.expected = expected;
            o.n_samples = rc.n_samples;
            InitialState init = InitialState::UpperPolariton;
            if (p.t == Transition::LowerFromDark) {
                init = InitialState::DarkFCFamily;
                std::size_t best = 0;
                for (std::size_t k = 1; k < bath.omega.size(); ++k)
                    if (std::abs(bath.omega[k] - rc.anchor * rc.G) < std::abs(bath.omega[best] - rc.anchor * rc.G))
                        best = k;
                o.anchor = best;
            }
            const auto fit = simulate_decay(p.order, p.n, g, bath, init, o);
            for (auto& r : rows[i]) {
                r.fitted = fit.rate;
                r.residual = fit.residual;
            }
        });

        std::vector<RateResult> all;
        json table = json::array();
        for (const auto& rs : rows)
            for (const auto& r : rs) {
                all.push_back(r);
                json e;
                e["transition"] = to_string(r.transition);
                e["order"] = to_string(r.order);
                e["N"] = r.n;
                e["eta_eV"] = r.eta;
                e["analytic_per_fs"] = r.analytic;
                e["fitted_per_fs"] = r.fitted ? json(*r.fitted) : json(nullptr);
                table.push_back(e);
            }
        write_rates_csv(path("rates.csv"), all);
        wrote("rates.csv");
        summary_["rates"] = table;
    }

    void oracle() {
        if (!cfg_.oracle) throw Error(ErrorKind::ConfigInvalid, "oracle: section required by this stage");
        solve_vib(false);
        const auto& oc = *cfg_.oracle;
        const auto& sp = species_.front();
        const double G = sp.G;
        const double g = cfg_.species.front().g ? *cfg_.species.front().g : G / std::sqrt(static_cast<double>(oc.n));
        const auto times = TimeGrid::make(oc.t_max, oc.n_steps).times();
        const auto report = compare_dynamics(oc.n, sp.vib, g, cfg_.cavity->omega_c, oc.kappa, times);

        json out = json::parse(report.to_json());
        if (!oc.leakage_n.empty()) {
            std::vector<double> ns, ls;
            ls.resize(oc.leakage_n.size());
            parallel_for(oc.leakage_n.size(), opt_.jobs, [&](std::size_t i) {
                ls[i] = truncation_leakage(oc.leakage_n[i], sp.vib, G, cfg_.cavity->omega_c, cfg_.kappa,
                                           oc.leakage_time);
            });
            for (auto n : oc.leakage_n) ns.push_back(static_cast<double>(n));
            json lk;
            lk["time_fs"] = oc.leakage_time;
            lk["kappa"] = cfg_.kappa;
            lk["N"] = to_json(ns);
            lk["leakage"] = to_json(ls);
            lk["loglog_slope"] = ns.size() >= 2 ? json(loglog_slope(ns, ls)) : json(nullptr);
            out["leakage_scaling"] = lk;
        }
        io::write_text(path("oracle.json"), out.dump(2) + "\n");
        wrote("oracle.json");
        json s;
        s["max_distance"] = report.max_distance;
        s["max_leakage"] = report.max_leakage;
        if (out.contains("leakage_scaling")) s["loglog_slope"] = out["leakage_scaling"]["loglog_slope"];
        summary_["oracle"] = s;
    }

    const RunConfig& cfg_;
    RunOptions opt_;
    std::string dir_;
    std::vector<std::string> files_;
    json summary_ = json::object();

    std::vector<SpeciesSpec> species_;
    std::shared_ptr<const CuteBasis> basis_;
    std::unique_ptr<HamiltonianMatrix> h_;
    std::unique_ptr<TrajectoryRecord> traj_;
};

} // namespace

RunResult run(const RunConfig& config, Stage stage, const RunOptions& options) {
    Session s(config, options);
    return s.execute(stage);
}

} // namespace cute
