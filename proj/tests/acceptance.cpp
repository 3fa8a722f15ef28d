// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cute/config.hpp"
#include "cute/oracle.hpp"
#include "cute/rates.hpp"
#include "cute/runner.hpp"
#include "cute/units.hpp"
#include "helpers.hpp"

using namespace cute;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Tolerances, fixed here rather than in configuration.
constexpr double kOracleTol = 1e-9;
constexpr double kStructureTol = 1e-12;
constexpr double kRabiPopTol = 1e-6;
constexpr double kSpacing = 0.22;
constexpr std::size_t kExpectedCoupledPeaks = 7;
constexpr double kFunnelRatio = 1.5;
constexpr double kYieldTol = 0.05;
constexpr double kFcYieldTol = 0.01;
constexpr double kRateFitTol = 0.20;
constexpr double kRateScalingTol = 0.30;
constexpr double kAnalyticTol = 1e-12;
constexpr double kSumRuleTol = 1e-10;
constexpr double kLeakSlope = -1.0;
constexpr double kLeakSlopeTol = 0.3;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kRoot = fs::path(CUTE_TEST_TMP) / "acceptance";

/// First pass over every preset; criteria 3-9 read from these bundles.
std::map<std::string, json> g_summary;

json run_preset(const std::string& name, const fs::path& dir) {
    const auto cfg = load_config(preset_path(name));
    fs::remove_all(dir);
    RunOptions opt;
    opt.output_dir = dir.string();
    opt.jobs = 4;
    return json::parse(run(cfg, Stage::All, opt).summary);
}

const json& summary(const std::string& name) {
    auto it = g_summary.find(name);
    if (it == g_summary.end()) it = g_summary.emplace(name, run_preset(name, kRoot / "a" / name)).first;
    return it->second;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) r.push_back(std::stod(cell));
        rows.push_back(std::move(r));
    }
    return rows;
}

Outcome oracle_exactness() {
    std::vector<double> times;
    for (int i = 0; i <= 500; ++i) times.push_back(static_cast<double>(i));
    double worst = 0.0;
    std::uint32_t seed = 100;
    for (std::size_t n : {2u, 3u})
        for (std::size_t m : {2u, 3u}) {
            const auto vib = testing::random_vib(m, m, seed++);
            const auto rep = compare_dynamics(n, vib, 0.1 / std::sqrt(double(n)), 2.2, n, times);
            worst = std::max(worst, rep.max_distance);
        }
    return {worst < kOracleTol, "max distance " + fmt(worst) + " over 500 fs (tol " + fmt(kOracleTol) + ")"};
}

Outcome matrix_structure() {
    // κ = 0: arrowhead with g√N F(l,0). κ = 1, m_g = 2, m_e = 1: the 4×4
    // pattern with g√N, g F(0,1) and g√(N-1).
    const auto vib = testing::random_vib(2, 3, 7);
    const std::size_t N = 12;
    const double g = 0.015, wc = 2.1;
    const auto sp = SpeciesSpec::with_g("A", N, g, vib);
    const auto H0 = build_hamiltonian(enumerate_basis({sp}, 0), CavitySpec::make(wc)).to_dense();
    Eigen::MatrixXd ref0 = Eigen::MatrixXd::Zero(4, 4);
    ref0(0, 0) = wc;
    for (int l = 0; l < 3; ++l) {
        ref0(l + 1, l + 1) = vib->transition(l);
        ref0(0, l + 1) = ref0(l + 1, 0) = g * std::sqrt(double(N)) * vib->fc(l, 0);
    }
    double err = H0.rows() == 4 ? (H0 - ref0).cwiseAbs().maxCoeff() : 1.0;

    const auto v1 = testing::random_vib(2, 1, 8);
    const auto H1 = build_hamiltonian(enumerate_basis({SpeciesSpec::with_g("A", N, g, v1)}, 1), CavitySpec::make(wc))
                        .to_dense();
    Eigen::MatrixXd ref1 = Eigen::MatrixXd::Zero(4, 4);
    const double w01 = v1->ground_gap(1), weg = v1->transition(0);
    ref1(0, 0) = wc;
    ref1(1, 1) = weg;
    ref1(2, 2) = wc + w01;
    ref1(3, 3) = weg + w01;
    ref1(0, 1) = ref1(1, 0) = g * std::sqrt(double(N)) * v1->fc(0, 0);
    ref1(1, 2) = ref1(2, 1) = g * v1->fc(0, 1);
    ref1(2, 3) = ref1(3, 2) = g * std::sqrt(N - 1.0) * v1->fc(0, 0);
    err = std::max(err, H1.rows() == 4 ? (H1 - ref1).cwiseAbs().maxCoeff() : 1.0);
    return {err < kStructureTol, "max element error " + fmt(err) + " (tol " + fmt(kStructureTol) + ")"};
}

Outcome rabi() {
    const auto cfg = load_config(preset_path("rabi"));
    const auto& s = summary("rabi");
    const double G = *cfg.species[0].G, wc = cfg.cavity->omega_c;
    const double bin = s["spectrum"]["bin_eV"];
    const auto peaks = s["spectrum"]["peaks_eV"]["photon"].get<std::vector<double>>();
    bool ok = peaks.size() == 2 && std::abs(peaks[0] - (wc - G)) <= bin && std::abs(peaks[1] - (wc + G)) <= bin;

    double worst = 0.0;
    for (const auto& r : read_csv(kRoot / "a" / "rabi" / "populations.csv")) {
        const double c = std::cos(G * r[0] / units::hbar_eV_fs);
        worst = std::max(worst, std::abs(r[1] - c * c));
    }
    ok = ok && worst < kRabiPopTol;
    std::string at;
    for (double p : peaks) at += (at.empty() ? "" : ", ") + fmt(p);
    return {ok, "peaks [" + at + "] eV vs " + fmt(wc - G) + ", " + fmt(wc + G) + " (bin " + fmt(bin) +
                    "); cos² deviation " + fmt(worst) + " (tol " + fmt(kRabiPopTol) + ")"};
}

Outcome example_spectra() {
    const auto& s = summary("example1")["spectrum"];
    const double bin = s["bin_eV"];
    const auto bare = s["peaks_eV"]["bare_A"].get<std::vector<double>>();
    const auto coupled = s["peaks_eV"]["photon"].get<std::vector<double>>();
    bool spacing_ok = bare.size() >= 2;
    double worst = 0.0;
    for (std::size_t i = 1; i < bare.size(); ++i) worst = std::max(worst, std::abs(bare[i] - bare[i - 1] - kSpacing));
    spacing_ok = spacing_ok && worst <= bin + 1e-12;
    const bool count_ok = coupled.size() == kExpectedCoupledPeaks;
    return {spacing_ok && count_ok, "bare A: " + std::to_string(bare.size()) + " peaks, spacing error " + fmt(worst) +
                                        " (bin " + fmt(bin) + "); coupled: " + std::to_string(coupled.size()) +
                                        " peaks (expected " + std::to_string(kExpectedCoupledPeaks) + ")"};
}

Outcome funneling() {
    bool ok = true;
    std::string detail;
    for (const std::string name : {"example1", "example2"}) {
        const auto& s = summary(name);
        const double a = s["long_time_average"]["excited_A"], b = s["long_time_average"]["excited_B"];
        const double psa = s["yields"]["A"]["p_s"], psb = s["yields"]["B"]["p_s"];
        const double pfa = s["yields"]["A"]["p_fc"], pfb = s["yields"]["B"]["p_fc"];
        const bool here = b > kFunnelRatio * a && std::abs(a - psa) < kYieldTol && std::abs(b - psb) < kYieldTol &&
                          std::abs(pfa - pfb) < kFcYieldTol;
        ok = ok && here;
        detail += (detail.empty() ? "" : "; ") + name + ": B/A " + fmt(b / a) + ", |A-p_sA| " + fmt(std::abs(a - psa)) +
                  ", |B-p_sB| " + fmt(std::abs(b - psb)) + ", |p_fcA-p_fcB| " + fmt(std::abs(pfa - pfb));
    }
    return {ok, detail};
}

Outcome rate_table() {
    const auto cfg = load_config(preset_path("rate-table"));
    const auto& rc = *cfg.rates;
    const auto& rows = summary("rate-table")["rates"];
    bool ok = true;
    double worst_analytic = 0.0, worst_fit = 0.0;
    std::map<std::size_t, double> lower_from_upper;
    for (const auto& r : rows) {
        const std::size_t n = r["N"];
        const double eta = r["eta_eV"];
        if (eta != 0.0) continue;
        const std::string t = r["transition"], order = r["order"];
        const double N = static_cast<double>(n);
        double J0 = rc.default_J0;
        for (const auto& b : rc.bands)
            if (to_string(b.transition) == t) J0 = b.J0;
        double formula = 0.0;
        if (order == "zeroth") formula = t == "D<-+" ? units::pi * J0 : 0.0;
        else if (t == "D<-+") formula = units::pi * J0 * (N - 1.0) / N;
        else if (t == "-<-+") formula = units::pi * J0 / (2.0 * N);
        else formula = units::pi * J0 * (N - 1.0) / (N * N);
        formula /= units::hbar_eV_fs;
        const double analytic = r["analytic_per_fs"];
        const double rel = formula == 0.0 ? std::abs(analytic) : std::abs(analytic / formula - 1.0);
        worst_analytic = std::max(worst_analytic, rel);

        if (formula > 0.0 && (n == 10 || n == 20)) {
            if (r["fitted_per_fs"].is_null()) {
                ok = false;
                continue;
            }
            const double fit = r["fitted_per_fs"];
            worst_fit = std::max(worst_fit, std::abs(fit / analytic - 1.0));
            if (order == "first" && t == "-<-+") lower_from_upper[n] = fit * N;
        }
    }
    double spread = 1.0;
    if (lower_from_upper.size() == 2) {
        const double a = lower_from_upper[10], b = lower_from_upper[20];
        spread = std::abs(a - b) / std::min(a, b);
    }
    ok = ok && worst_analytic < kAnalyticTol && worst_fit < kRateFitTol && spread < kRateScalingTol;
    return {ok, "analytic rel error " + fmt(worst_analytic) + "; worst fit deviation " + fmt(worst_fit) +
                    " (tol " + fmt(kRateFitTol) + "); Γ(-<-+)·N spread " + fmt(spread) + " (tol " +
                    fmt(kRateScalingTol) + ")"};
}

Outcome sum_rule() {
    double worst = 0.0;
    std::size_t runs = 0;
    for (const auto& name : preset_names()) {
        const auto cfg = load_config(preset_path(name));
        if (cfg.kappa != 0 || !cfg.wants("populations")) continue;
        const auto& s = summary(name);
        if (!s.contains("sum_rule_max_deviation")) return {false, name + " has no sum-rule record"};
        worst = std::max(worst, s["sum_rule_max_deviation"].get<double>());
        ++runs;
    }
    return {runs > 0 && worst < kSumRuleTol,
            std::to_string(runs) + " κ=0 runs, max deviation " + fmt(worst) + " (tol " + fmt(kSumRuleTol) + ")"};
}

Outcome leakage_scaling() {
    const auto& s = summary("oracle");
    const auto& o = s["oracle"];
    if (!o.contains("loglog_slope") || o["loglog_slope"].is_null()) return {false, "no leakage sweep"};
    const double slope = o["loglog_slope"];
    return {std::abs(slope - kLeakSlope) <= kLeakSlopeTol,
            "log-log slope " + fmt(slope) + " (target " + fmt(kLeakSlope) + " ± " + fmt(kLeakSlopeTol) + ")"};
}

Outcome determinism() {
    std::size_t files = 0;
    for (const auto& name : preset_names()) {
        summary(name);
        const fs::path a = kRoot / "a" / name, b = kRoot / "b" / name;
        run_preset(name, b);
        for (const auto& e : fs::directory_iterator(a)) {
            const auto f = e.path().filename();
            if (f == "manifest.json") continue;
            if (!fs::exists(b / f) || slurp(e.path()) != slurp(b / f))
                return {false, name + "/" + f.string() + " differs between runs"};
            ++files;
        }
    }
    return {true, std::to_string(files) + " files identical across two runs of every preset"};
}

} // namespace

int main() {
    fs::create_directories(kRoot);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle exactness", oracle_exactness},
        {"matrix structure at κ=0 and κ=1", matrix_structure},
        {"Rabi splitting", rabi},
        {"example 1 spectra", example_spectra},
        {"energy funneling", funneling},
        {"rate table", rate_table},
        {"sum rule", sum_rule},
        {"truncation-leakage scaling", leakage_scaling},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu %s: %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
