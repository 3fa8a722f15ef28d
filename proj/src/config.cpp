#include "cute/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml++/toml.hpp>

#include "cute/error.hpp"
#include "cute/io.hpp"
#include "cute/oracle.hpp"

namespace cute {

using json = nlohmann::ordered_json;

namespace {

json toml_to_json(const toml::node& n) {
    if (const auto* t = n.as_table()) {
        json j = json::object();
        for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (const auto* a = n.as_array()) {
        json j = json::array();
        for (auto&& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (const auto* s = n.as_string()) return s->get();
    if (const auto* i = n.as_integer()) return i->get();
    if (const auto* f = n.as_floating_point()) return f->get();
    if (const auto* b = n.as_boolean()) return b->get();
    return n.visit([](auto&& v) {
        std::ostringstream os;
        os << v;
        return os.str();
    });
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Walks the input document, collecting every violation with its field path
// and recording each resolved value (defaults included) for the manifest.
struct Ctx {
    std::vector<std::string> errors;
    json resolved = json::object();

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }
};

struct Node {
    const json* j;
    std::string path; // species[0].G
    std::string ptr;  // /species/0/G

    Node child(const std::string& key) const {
        const json* c = (j && j->is_object() && j->contains(key)) ? &(*j)[key] : nullptr;
        return {c, path.empty() ? key : path + "." + key, ptr + "/" + key};
    }
    Node at(std::size_t i) const {
        return {&(*j)[i], path + "[" + std::to_string(i) + "]", ptr + "/" + std::to_string(i)};
    }
    bool present() const { return j != nullptr && !j->is_null(); }
};

void check_keys(Ctx& ctx, const Node& n, std::initializer_list<const char*> allowed) {
    if (!n.present()) return;
    if (!n.j->is_object()) {
        ctx.fail(n.path.empty() ? "<root>" : n.path, "expected a table");
        return;
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = n.j->begin(); it != n.j->end(); ++it)
        if (!ok.count(it.key())) ctx.fail(n.child(it.key()).path, "unknown field");
}

template <class T>
void record(Ctx& ctx, const Node& n, const T& v) {
    ctx.resolved[json::json_pointer(n.ptr)] = v;
}

std::optional<double> opt_number(Ctx& ctx, const Node& n) {
    if (!n.present()) return std::nullopt;
    if (!n.j->is_number()) {
        ctx.fail(n.path, "expected a number");
        return std::nullopt;
    }
    const double v = n.j->get<double>();
    if (!std::isfinite(v)) {
        ctx.fail(n.path, "must be finite");
        return std::nullopt;
    }
    record(ctx, n, v);
    return v;
}

enum class Bound { Any, Positive, NonNegative };

double number(Ctx& ctx, const Node& n, std::optional<double> def, Bound bound = Bound::Any) {
    auto v = opt_number(ctx, n);
    if (!v) {
        if (n.present()) return def.value_or(0.0);
        if (!def) {
            ctx.fail(n.path, "missing required field");
            return 0.0;
        }
        record(ctx, n, *def);
        return *def;
    }
    if (bound == Bound::Positive && !(*v > 0.0)) ctx.fail(n.path, "must be > 0");
    if (bound == Bound::NonNegative && *v < 0.0) ctx.fail(n.path, "must be >= 0");
    return *v;
}

std::size_t integer(Ctx& ctx, const Node& n, std::optional<std::size_t> def, std::size_t min = 0) {
    if (!n.present()) {
        if (!def) {
            ctx.fail(n.path, "missing required field");
            return min;
        }
        record(ctx, n, *def);
        return *def;
    }
    if (!n.j->is_number_integer() || n.j->get<long long>() < 0) {
        ctx.fail(n.path, "expected a non-negative integer");
        return def.value_or(min);
    }
    const auto v = n.j->get<std::size_t>();
    if (v < min) ctx.fail(n.path, "must be >= " + std::to_string(min));
    record(ctx, n, v);
    return v;
}

bool boolean(Ctx& ctx, const Node& n, bool def) {
    if (!n.present()) {
        record(ctx, n, def);
        return def;
    }
    if (!n.j->is_boolean()) {
        ctx.fail(n.path, "expected true or false");
        return def;
    }
    record(ctx, n, n.j->get<bool>());
    return n.j->get<bool>();
}

std::string string(Ctx& ctx, const Node& n, std::optional<std::string> def) {
    if (!n.present()) {
        if (!def) {
            ctx.fail(n.path, "missing required field");
            return {};
        }
        record(ctx, n, *def);
        return *def;
    }
    if (!n.j->is_string()) {
        ctx.fail(n.path, "expected a string");
        return def.value_or("");
    }
    record(ctx, n, n.j->get<std::string>());
    return n.j->get<std::string>();
}

template <class F>
void for_each(Ctx& ctx, const Node& n, F&& f) {
    if (!n.present()) return;
    if (!n.j->is_array()) {
        ctx.fail(n.path, "expected an array");
        return;
    }
    for (std::size_t i = 0; i < n.j->size(); ++i) f(n.at(i));
}

Grid read_grid(Ctx& ctx, const Node& n) {
    check_keys(ctx, n, {"n_points", "q_min", "q_max"});
    const auto np = integer(ctx, n.child("n_points"), std::nullopt, 16);
    const double lo = number(ctx, n.child("q_min"), std::nullopt);
    const double hi = number(ctx, n.child("q_max"), std::nullopt);
    if (!(hi > lo)) {
        ctx.fail(n.child("q_max").path, "must exceed q_min");
        return Grid{16, 0.0, 1.0};
    }
    return Grid{std::max<std::size_t>(np, 16), lo, hi};
}

PotentialSpec read_potential(Ctx& ctx, const Node& n, const Grid& grid) {
    if (!n.present()) {
        ctx.fail(n.path, "missing required field");
        return potential::Harmonic{1.0};
    }
    const std::string type = string(ctx, n.child("type"), std::nullopt);
    auto num = [&](const char* key, std::optional<double> def = std::nullopt, Bound b = Bound::Any) {
        return number(ctx, n.child(key), def, b);
    };
    if (type == "harmonic") {
        check_keys(ctx, n, {"type", "omega"});
        return potential::Harmonic{num("omega", std::nullopt, Bound::Positive)};
    }
    if (type == "displaced_harmonic") {
        check_keys(ctx, n, {"type", "omega", "d", "offset"});
        return potential::DisplacedHarmonic{num("omega", std::nullopt, Bound::Positive), num("d", 0.0),
                                            num("offset", 0.0)};
    }
    if (type == "huang_rhys") {
        check_keys(ctx, n, {"type", "omega", "S", "offset"});
        return potential::HuangRhysHarmonic{num("omega", std::nullopt, Bound::Positive),
                                            num("S", std::nullopt, Bound::NonNegative), num("offset", 0.0)};
    }
    if (type == "exponential") {
        check_keys(ctx, n, {"type", "a", "d", "offset"});
        return potential::Exponential{num("a", std::nullopt, Bound::Positive), num("d", 0.0), num("offset", 0.0)};
    }
    if (type == "exponential_bump") {
        check_keys(ctx, n, {"type", "a", "d1", "b", "c", "d2", "offset"});
        return potential::ExponentialWithBump{num("a", std::nullopt, Bound::Positive), num("d1", 0.0),
                                              num("b", std::nullopt, Bound::Positive), num("c", 0.0), num("d2", 0.0),
                                              num("offset", 0.0)};
    }
    if (type == "tabulated") {
        check_keys(ctx, n, {"type", "values"});
        potential::Tabulated t;
        for_each(ctx, n.child("values"), [&](const Node& v) { t.values.push_back(number(ctx, v, std::nullopt)); });
        if (t.values.size() != grid.n_points)
            ctx.fail(n.child("values").path, "needs " + std::to_string(grid.n_points) + " values (grid n_points)");
        return t;
    }
    if (!type.empty())
        ctx.fail(n.child("type").path, "unknown potential '" + type +
                                           "' (harmonic, displaced_harmonic, huang_rhys, exponential, "
                                           "exponential_bump, tabulated)");
    return potential::Harmonic{1.0};
}

SpeciesConfig read_species(Ctx& ctx, const Node& n, const std::optional<Grid>& default_grid) {
    check_keys(ctx, n, {"label", "N", "g", "G", "m_g", "m_e", "grid", "ground", "excited"});
    SpeciesConfig s;
    s.label = string(ctx, n.child("label"), std::nullopt);

    const Node nn = n.child("N");
    if (!nn.present()) {
        ctx.fail(nn.path, "missing required field (integer or \"inf\")");
    } else if (nn.j->is_string()) {
        const auto v = nn.j->get<std::string>();
        if (v != "inf" && v != "infinite") ctx.fail(nn.path, "expected a positive integer or \"inf\"");
        record(ctx, nn, std::string("inf"));
    } else {
        s.n_molecules = integer(ctx, nn, std::nullopt, 1);
    }

    const Node ng = n.child("g"), nG = n.child("G");
    if (ng.present() == nG.present()) {
        ctx.fail(n.path + ".G", "missing species coupling: give exactly one of g or G");
    } else if (ng.present()) {
        s.g = number(ctx, ng, std::nullopt, Bound::NonNegative);
        if (!s.n_molecules) ctx.fail(ng.path, "an infinite species needs the collective coupling G");
    } else {
        s.G = number(ctx, nG, std::nullopt, Bound::NonNegative);
    }

    s.m_g = integer(ctx, n.child("m_g"), std::nullopt, 1);
    s.m_e = integer(ctx, n.child("m_e"), std::nullopt, 1);
    if (n.child("grid").present()) {
        s.grid = read_grid(ctx, n.child("grid"));
    } else if (default_grid) {
        s.grid = *default_grid;
    } else {
        ctx.fail(n.child("grid").path, "missing (no top-level [grid] either)");
        s.grid = Grid{16, 0.0, 1.0};
    }
    if (s.m_g > s.grid.n_points) ctx.fail(n.child("m_g").path, "exceeds grid n_points");
    if (s.m_e > s.grid.n_points) ctx.fail(n.child("m_e").path, "exceeds grid n_points");
    s.ground = read_potential(ctx, n.child("ground"), s.grid);
    s.excited = read_potential(ctx, n.child("excited"), s.grid);
    return s;
}

std::optional<Transition> parse_transition(const std::string& s) {
    for (auto t : {Transition::DarkFromUpper, Transition::LowerFromUpper, Transition::LowerFromDark})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

RatesConfig read_rates(Ctx& ctx, const Node& n) {
    check_keys(ctx, n, {"orders", "transitions", "N", "G", "omega", "eta", "simulate", "band", "J0", "anchor",
                        "n_samples"});
    RatesConfig r;
    if (n.child("orders").present()) {
        r.orders.clear();
        for_each(ctx, n.child("orders"), [&](const Node& v) {
            const auto s = string(ctx, v, std::nullopt);
            if (s == "zeroth") r.orders.push_back(FgrOrder::Zeroth);
            else if (s == "first") r.orders.push_back(FgrOrder::First);
            else ctx.fail(v.path, "expected \"zeroth\" or \"first\"");
        });
    }
    if (n.child("transitions").present()) {
        r.transitions.clear();
        for_each(ctx, n.child("transitions"), [&](const Node& v) {
            const auto s = string(ctx, v, std::nullopt);
            if (auto t = parse_transition(s)) r.transitions.push_back(*t);
            else ctx.fail(v.path, "expected one of \"D<-+\", \"-<-+\", \"-<-D\"");
        });
    }
    if (!n.child("N").present()) ctx.fail(n.child("N").path, "missing required field");
    for_each(ctx, n.child("N"), [&](const Node& v) { r.n_values.push_back(integer(ctx, v, std::nullopt, 2)); });
    r.G = number(ctx, n.child("G"), 0.1, Bound::Positive);
    r.omega = number(ctx, n.child("omega"), 2.0, Bound::Positive);
    if (n.child("eta").present()) {
        r.eta.clear();
        for_each(ctx, n.child("eta"),
                 [&](const Node& v) { r.eta.push_back(number(ctx, v, std::nullopt, Bound::NonNegative)); });
    } else {
        record(ctx, n.child("eta"), r.eta);
    }
    r.simulate = boolean(ctx, n.child("simulate"), true);
    r.default_J0 = number(ctx, n.child("J0"), 0.001, Bound::NonNegative);
    r.anchor = number(ctx, n.child("anchor"), 0.5, Bound::Positive);
    r.n_samples = integer(ctx, n.child("n_samples"), 60, 3);
    for_each(ctx, n.child("band"), [&](const Node& b) {
        check_keys(ctx, b, {"transition", "J0", "lo", "hi", "n_modes"});
        RateBandConfig band{Transition::DarkFromUpper};
        const auto s = string(ctx, b.child("transition"), std::nullopt);
        if (auto t = parse_transition(s)) band.transition = *t;
        else ctx.fail(b.child("transition").path, "unknown transition '" + s + "'");
        band.J0 = number(ctx, b.child("J0"), r.default_J0, Bound::NonNegative);
        band.lo = number(ctx, b.child("lo"), 0.2, Bound::Positive);
        band.hi = number(ctx, b.child("hi"), 2.2, Bound::Positive);
        if (!(band.hi > band.lo)) ctx.fail(b.child("hi").path, "must exceed lo");
        band.n_modes = integer(ctx, b.child("n_modes"), 200, 2);
        r.bands.push_back(band);
    });
    return r;
}

OracleConfig read_oracle(Ctx& ctx, const Node& n) {
    check_keys(ctx, n, {"N", "kappa", "t_max", "n_steps", "leakage_N", "leakage_time"});
    OracleConfig o;
    o.n = integer(ctx, n.child("N"), 2, 1);
    o.kappa = integer(ctx, n.child("kappa"), o.n);
    if (o.kappa > o.n) ctx.fail(n.child("kappa").path, "must not exceed N");
    o.t_max = number(ctx, n.child("t_max"), 500.0, Bound::Positive);
    o.n_steps = integer(ctx, n.child("n_steps"), 500, 2);
    for_each(ctx, n.child("leakage_N"), [&](const Node& v) { o.leakage_n.push_back(integer(ctx, v, std::nullopt, 2)); });
    o.leakage_time = number(ctx, n.child("leakage_time"), 25.0, Bound::Positive);
    return o;
}

RunConfig interpret(const json& doc) {
    Ctx ctx;
    RunConfig c;
    const Node root{&doc, "", ""};
    check_keys(ctx, root, {"schema_version", "name", "output_dir", "seed", "units", "cavity", "grid", "species",
                           "kappa", "time", "initial", "observables", "average_from", "spectrum", "rates", "oracle",
                           "outputs"});
    if (!doc.is_object()) throw Error(ErrorKind::ConfigInvalid, "<root>: expected a table");

    c.schema_version = static_cast<int>(integer(ctx, root.child("schema_version"), std::nullopt, 1));
    if (c.schema_version != kSchemaVersion)
        ctx.fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    c.name = string(ctx, root.child("name"), "run");
    c.output_dir = string(ctx, root.child("output_dir"), "out/" + c.name);
    c.seed = integer(ctx, root.child("seed"), 0);

    const Node u = root.child("units");
    check_keys(ctx, u, {"mode", "mass_amu"});
    const auto mode = string(ctx, u.child("mode"), "natural");
    if (mode == "physical") {
        const double mass = number(ctx, u.child("mass_amu"), std::nullopt, Bound::Positive);
        if (mass > 0.0) c.units = UnitMode::physical(mass);
    } else if (mode != "natural") {
        ctx.fail(u.child("mode").path, "expected \"natural\" or \"physical\"");
    }

    const Node cav = root.child("cavity");
    if (cav.present()) {
        check_keys(ctx, cav, {"omega_c"});
        const double w = number(ctx, cav.child("omega_c"), std::nullopt, Bound::Positive);
        if (w > 0.0) c.cavity = CavitySpec{w};
    }

    std::optional<Grid> default_grid;
    if (root.child("grid").present()) default_grid = read_grid(ctx, root.child("grid"));

    std::set<std::string> labels;
    for_each(ctx, root.child("species"), [&](const Node& s) {
        c.species.push_back(read_species(ctx, s, default_grid));
        if (!labels.insert(c.species.back().label).second)
            ctx.fail(s.child("label").path, "duplicate species label '" + c.species.back().label + "'");
    });
    c.kappa = integer(ctx, root.child("kappa"), 0);
    if (!c.species.empty() && !c.cavity) ctx.fail("cavity.omega_c", "missing required field");

    const Node t = root.child("time");
    if (t.present()) {
        check_keys(ctx, t, {"t_max", "n_steps"});
        const double tmax = number(ctx, t.child("t_max"), std::nullopt, Bound::Positive);
        const auto ns = integer(ctx, t.child("n_steps"), std::nullopt, 2);
        if (tmax > 0.0 && ns >= 2) c.time = TimeGrid{tmax, ns};
    }

    c.initial = string(ctx, root.child("initial"), "photon");
    if (c.initial.rfind("fc:", 0) == 0) {
        if (!labels.count(c.initial.substr(3)))
            ctx.fail("initial", "unknown species '" + c.initial.substr(3) + "'");
    } else if (c.initial != "photon") {
        ctx.fail("initial", "expected \"photon\" or \"fc:<label>\"");
    }

    static const std::set<std::string> known{"populations", "spectrum", "yields", "position"};
    for_each(ctx, root.child("observables"), [&](const Node& v) {
        const auto s = string(ctx, v, std::nullopt);
        if (!known.count(s)) ctx.fail(v.path, "unknown observable '" + s + "' (populations, spectrum, yields, position)");
        else c.observables.push_back(s);
    });
    c.average_from = number(ctx, root.child("average_from"), 1000.0, Bound::NonNegative);
    if ((c.wants("populations") || c.wants("spectrum") || c.wants("position")) && !c.time)
        ctx.fail("time", "required by the requested observables");
    if (!c.observables.empty() && c.species.empty()) ctx.fail("species", "required by the requested observables");

    const Node sp = root.child("spectrum");
    if (sp.present()) {
        check_keys(ctx, sp, {"gamma", "omega_min", "omega_max", "n_omega", "bare_species", "peak_threshold"});
        SpectrumConfig s;
        s.gamma = number(ctx, sp.child("gamma"), 0.002, Bound::NonNegative);
        s.omega_min = number(ctx, sp.child("omega_min"), std::nullopt, Bound::NonNegative);
        s.omega_max = number(ctx, sp.child("omega_max"), std::nullopt, Bound::Positive);
        if (!(s.omega_max > s.omega_min)) ctx.fail(sp.child("omega_max").path, "must exceed omega_min");
        s.n_omega = integer(ctx, sp.child("n_omega"), 2001, 2);
        for_each(ctx, sp.child("bare_species"), [&](const Node& v) {
            const auto l = string(ctx, v, std::nullopt);
            if (!labels.count(l)) ctx.fail(v.path, "unknown species '" + l + "'");
            s.bare_species.push_back(l);
        });
        s.peak_threshold = number(ctx, sp.child("peak_threshold"), 0.05, Bound::NonNegative);
        c.spectrum = s;
    } else if (c.wants("spectrum")) {
        ctx.fail("spectrum", "required when the spectrum observable is requested");
    }

    if (root.child("rates").present()) c.rates = read_rates(ctx, root.child("rates"));
    if (root.child("oracle").present()) {
        c.oracle = read_oracle(ctx, root.child("oracle"));
        if (c.species.empty()) ctx.fail("species", "the oracle comparison uses the first species");
    }

    const Node o = root.child("outputs");
    check_keys(ctx, o, {"basis_jsonl", "matrix_market", "plot", "eigenfunctions"});
    c.outputs.basis_jsonl = boolean(ctx, o.child("basis_jsonl"), true);
    c.outputs.matrix_market = boolean(ctx, o.child("matrix_market"), false);
    c.outputs.plot = boolean(ctx, o.child("plot"), true);
    c.outputs.eigenfunctions = boolean(ctx, o.child("eigenfunctions"), false);

    if (!ctx.errors.empty()) {
        std::string msg = std::to_string(ctx.errors.size()) + " violation(s)";
        for (const auto& e : ctx.errors) msg += "\n  " + e;
        throw Error(ErrorKind::ConfigInvalid, msg);
    }
    c.resolved = ctx.resolved.dump(2);
    return c;
}

} // namespace

bool RunConfig::wants(const std::string& observable) const {
    return std::find(observables.begin(), observables.end(), observable) != observables.end();
}

SpectralDensitySpec RatesConfig::bath_for(Transition t) const {
    for (const auto& b : bands)
        if (b.transition == t) return SpectralDensitySpec::flat_band(b.J0, b.lo * G, b.hi * G, b.n_modes);
    return SpectralDensitySpec::default_flat(default_J0, G);
}

RunConfig parse_config(const std::string& text, ConfigFormat format, const std::string& source) {
    json doc;
    if (format == ConfigFormat::Json) {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
            throw Error(ErrorKind::ParseError,
                        source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
        }
    } else {
        try {
            doc = toml_to_json(toml::parse(text, source));
        } catch (const toml::parse_error& e) {
            const auto& b = e.source().begin;
            throw Error(ErrorKind::ParseError, source + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) +
                                                   ": " + std::string(e.description()));
        }
    }
    return interpret(doc);
}

RunConfig load_config(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::ConfigInvalid, "config file not found: " + path);
    const auto ext = std::filesystem::path(path).extension().string();
    return parse_config(io::read_text(path), ext == ".json" ? ConfigFormat::Json : ConfigFormat::Toml, path);
}

namespace {

std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("CUTE_PRESET_DIR")) return env;
#ifdef CUTE_PRESET_DIR
    return CUTE_PRESET_DIR;
#else
    return "presets";
#endif
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec))
        if (e.path().extension() == ".toml") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string preset_path(const std::string& name) {
    const auto p = preset_dir() / (name + ".toml");
    if (!std::filesystem::exists(p)) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw Error(ErrorKind::ConfigInvalid, "unknown preset '" + name + "' (available: " + known + ")");
    }
    return p.string();
}

Preflight preflight(const RunConfig& config, double cap) {
    Preflight p;
    if (config.time) p.n_times = config.time->size();
    if (!config.species.empty()) {
        std::vector<SpeciesSpec> specs;
        for (const auto& s : config.species) {
            auto vib = std::make_shared<VibrationalBasis>(VibrationalBasis::from_matrices(
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.m_g)),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.m_e)),
                Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.m_e), static_cast<Eigen::Index>(s.m_g))));
            specs.push_back(SpeciesSpec::with_G(s.label, s.n_molecules, s.G.value_or(0.0), vib));
        }
        p.dimension = count_dimension(specs, config.kappa);
        if (p.dimension > cap)
            throw Error(ErrorKind::BasisTooLarge, "preflight: basis dimension " + io::format_double(p.dimension) +
                                                      " exceeds cap " + io::format_double(cap));
        const double d = p.dimension;
        // Dense matrix plus eigenvectors, then the stored trajectory.
        p.memory_bytes = (d <= static_cast<double>(kDenseSolverCap) ? 2.0 * d * d * 8.0 : 0.0) +
                         d * static_cast<double>(p.n_times) * 16.0;
        if (d > static_cast<double>(kDenseSolverCap))
            p.notes.push_back("dimension above the dense eigensolver cap; propagation will fail");
        for (const auto& s : config.species) {
            const double np = static_cast<double>(s.grid.n_points);
            p.memory_bytes += 2.0 * np * np * 8.0; // DVR matrix and eigenvectors
        }
    }
    if (config.oracle) {
        const double mg = static_cast<double>(config.species[0].m_g);
        const double me = static_cast<double>(config.species[0].m_e);
        const double n = static_cast<double>(config.oracle->n);
        const double od = std::pow(mg, n) + n * me * std::pow(mg, n - 1.0);
        if (config.oracle->n > kOracleMaxMolecules || od > kOracleDimensionCap)
            p.notes.push_back("oracle dimension " + io::format_double(od) + " exceeds the oracle cap");
    }
    return p;
}

} // namespace cute
