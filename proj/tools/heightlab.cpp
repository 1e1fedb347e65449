// heightlab: quasi-adelic measures and canonical heights for the
// Per1(lambda) family over Q. Single binary, one subcommand per report;
// JSON to stdout (or --out), point clouds to CSV.

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heightlab/heightlab.hpp"
#include "heightlab/json_io.hpp"

namespace hl = heightlab;

namespace {

struct SubArgs {
    std::string t = "0";
    std::vector<std::string> t_list;
    std::string sign = "+";
    std::string place = "inf";
    std::string method = "quasi";
    std::string levels = "1,2,3,4,5,6,7";
    std::string out_path;
    std::string csv_path;
    int n = 2;
    int budget = 64;
    int samples = 0;
    double delta = 0.0;
    double blowup_h0 = 8.0;
    int height_bound = 0;
};

hl::CriticalSign parse_sign(const std::string& s) {
    if (s == "+" || s == "plus") return hl::CriticalSign::plus;
    if (s == "-" || s == "minus") return hl::CriticalSign::minus;
    throw hl::ConfigError("sign must be '+' or '-'");
}

hl::Place parse_place(const std::string& s) {
    if (s == "inf" || s == "oo") return hl::Place::archimedean();
    return hl::Place::finite(hl::Int(s));
}

std::vector<int> parse_levels(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw hl::ConfigError("empty level list");
    return out;
}

void emit(const hl::Json& j, const SubArgs& args) {
    const std::string text = j.dump(2) + "\n";
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(args.out_path, std::ios::binary | std::ios::trunc);
        if (!os) throw hl::Error("cannot open output file '" + args.out_path + "'");
        os << text;
    }
}

template <class Real>
hl::PotentialLab<Real> make_lab(const hl::Config& cfg) {
    typename hl::PotentialLab<Real>::Options opt;
    opt.lift = cfg.lift;
    opt.escape = cfg.escape;
    opt.n_max = cfg.n_max;
    return hl::PotentialLab<Real>(hl::Lambda(cfg.lambda), opt);
}

template <class Real>
void attach_cached_sequences(hl::PotentialLab<Real>& lab, const hl::Config& cfg,
                             std::initializer_list<hl::CriticalSign> signs) {
    hl::FnCache cache(cfg.cache_dir);
    if (!cache.enabled()) return;
    const auto warn = [](const std::string& msg) { std::cerr << "heightlab: " << msg << "\n"; };
    for (hl::CriticalSign s : signs)
        lab.adopt_sequence(
            cache.load_or_build(hl::Lambda(cfg.lambda), s, cfg.n_max, cfg.lift, {}, warn));
}

hl::Json config_echo(const hl::Config& cfg) {
    hl::Json j;
    j["lambda"] = hl::to_string(cfg.lambda);
    j["lift"] = hl::lift_label(cfg.lift);
    j["escape"] = hl::escape_label(cfg.escape);
    j["P"] = cfg.prime_bound;
    j["n_max"] = cfg.n_max;
    j["precision_digits"] = cfg.precision_digits;
    j["seed"] = cfg.seed;
    return j;
}

template <class Real>
int run_gamma(const hl::Config& cfg, const SubArgs& args) {
    hl::Lambda lambda(cfg.lambda);
    hl::Json places = hl::Json::array();
    {
        hl::Json e;
        e["place"] = "inf";
        e.update(hl::to_json(hl::gamma_series<Real>(lambda, hl::Place::archimedean(), cfg.tol)));
        places.push_back(std::move(e));
    }
    for (int p = 2; p <= cfg.prime_bound; ++p) {
        if (!hl::is_prime_u64(static_cast<std::uint64_t>(p))) continue;
        hl::Json e;
        e["place"] = std::to_string(p);
        e.update(hl::to_json(hl::gamma_series<Real>(lambda, hl::Place::finite(hl::Int(p)), cfg.tol)));
        places.push_back(std::move(e));
    }
    hl::Json j = config_echo(cfg);
    j["report"] = "gamma";
    j["places"] = std::move(places);
    emit(j, args);
    return 0;
}

template <class Real>
int run_fn(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    const hl::CriticalSign s = parse_sign(args.sign);
    attach_cached_sequences(lab, cfg, {s});
    const hl::FnSequence& seq = lab.fn(s);
    if (args.n < 1 || args.n > cfg.n_max) throw hl::ConfigError("fn level outside [1, n_max]");
    const hl::FnEntry& entry = seq.entry(args.n);
    hl::Json j = config_echo(cfg);
    j["report"] = "fn";
    j["sign"] = hl::sign_label(s);
    j["n"] = args.n;
    j["degree"] = entry.degree;
    j["gcd_degree"] = entry.removed_gcd.degree();
    j["removed_content"] = entry.removed_content.str();
    hl::Json a = hl::Json::array(), b = hl::Json::array(), g = hl::Json::array();
    for (int k = 0; k <= entry.degree; ++k) {
        a.push_back(entry.pair.a.coeff(k).str());
        b.push_back(entry.pair.b.coeff(k).str());
    }
    for (int k = 0; k <= entry.removed_gcd.degree(); ++k) g.push_back(entry.removed_gcd.coeff(k).str());
    j["A"] = std::move(a);
    j["B"] = std::move(b);
    j["removed_gcd"] = std::move(g);
    j["bfp"] = hl::to_bfp(entry.pair);
    emit(j, args);
    return 0;
}

template <class Real>
int run_capacity(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    const hl::CriticalSign s = parse_sign(args.sign);
    attach_cached_sequences(lab, cfg, {s});
    const hl::Place v = parse_place(args.place);
    const auto vals = lab.capacity_values(s, v);
    hl::Json j = config_echo(cfg);
    j["report"] = "capacity";
    j["sign"] = hl::sign_label(s);
    j["place"] = v.label();
    j["c_n"] = std::vector<double>(vals.begin(), vals.end());
    j["estimate"] = hl::to_json(lab.capacity_estimate(s, v));
    emit(j, args);
    return 0;
}

template <class Real>
int run_radii(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    const hl::CriticalSign s = parse_sign(args.sign);
    attach_cached_sequences(lab, cfg, {s});
    hl::Json j = config_echo(cfg);
    j["report"] = "radii";
    j["sign"] = hl::sign_label(s);
    j["grid"] = cfg.grid;
    const hl::Place v = parse_place(args.place);
    if (v.is_archimedean()) {
        const auto scan = lab.radii_arch(s, cfg.grid);
        j["normalized"] = hl::to_json(scan.normalized);
        j["raw"] = hl::to_json(scan.raw);
    } else {
        j["raw"] = hl::to_json(lab.radii_finite(s, v));
    }
    emit(j, args);
    return 0;
}

template <class Real>
int run_height(const hl::Config& cfg, const SubArgs& args) {
    const hl::Rational t = hl::parse_rational(args.t);
    const hl::CriticalSign s = parse_sign(args.sign);
    hl::Lambda lambda(cfg.lambda);
    hl::Json j = config_echo(cfg);
    j["report"] = "height";
    if (args.method == "cs-direct") {
        const auto pv = hl::callsilverman_direct(lambda, t, s, std::max(16, cfg.n_max));
        j["t"] = hl::to_string(t);
        j["sign"] = hl::sign_label(s);
        j["method"] = "callsilverman-direct";
        j["value"] = hl::to_json(pv);
    } else if (args.method == "cs-local") {
        j.update(hl::to_json(hl::callsilverman_local(lambda, t, s)));
        j["sign"] = hl::sign_label(s);
    } else if (args.method == "quasi") {
        auto lab = make_lab<Real>(cfg);
        attach_cached_sequences(lab, cfg, {s});
        j.update(hl::to_json(hl::quasi_adelic_height(lab, t, s, cfg.prime_bound)));
        j["sign"] = hl::sign_label(s);
    } else if (args.method == "combined") {
        auto lab = make_lab<Real>(cfg);
        attach_cached_sequences(lab, cfg, {hl::CriticalSign::plus, hl::CriticalSign::minus});
        const auto proxy = hl::build_Sn(lab, hl::CriticalSign::plus, std::min(cfg.n_max, 6),
                                        cfg.tol, cfg.seed);
        const auto l_hat = lab.l_estimate(hl::MeasureSpec::average(), proxy, args.samples, cfg.seed);
        const auto pv = hl::combined_height(lab, t, hl::MeasureSpec::average(), cfg.prime_bound,
                                            l_hat.value);
        j["t"] = hl::to_string(t);
        j["method"] = "combined";
        j["L"] = hl::to_json(l_hat.value);
        j["value"] = hl::to_json(pv);
    } else {
        throw hl::ConfigError("method must be quasi|cs-direct|cs-local|combined");
    }
    emit(j, args);
    return 0;
}

template <class Real>
int run_pcf_scan(const hl::Config& cfg, const SubArgs& args) {
    hl::Lambda lambda(cfg.lambda);
    std::vector<hl::Rational> grid;
    for (const auto& ts : args.t_list) grid.push_back(hl::parse_rational(ts));
    if (args.height_bound > 0) {
        for (const auto& q : hl::rationals_by_height(args.height_bound)) grid.push_back(q);
    }
    if (grid.empty()) throw hl::ConfigError("pcf-scan needs --t entries or --height-bound");
    const auto results = hl::pcf_scan(lambda, grid, args.budget, args.blowup_h0);
    hl::Json j = config_echo(cfg);
    j["report"] = "pcf-scan";
    j["budget"] = args.budget;
    hl::Json rows = hl::Json::array();
    for (const auto& [t, st] : results) {
        hl::Json r;
        r["t"] = hl::to_string(t);
        r["status"] = hl::pcf_label(st);
        rows.push_back(std::move(r));
    }
    j["results"] = std::move(rows);
    emit(j, args);
    return 0;
}

template <class Real>
int run_equidist(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    const hl::CriticalSign s = parse_sign(args.sign);
    attach_cached_sequences(lab, cfg, {s});
    if (args.n < 1 || args.n > cfg.n_max) throw hl::ConfigError("equidist level outside [1, n_max]");
    const auto sn = hl::build_Sn(lab, s, args.n, cfg.tol, cfg.seed);
    if (!args.csv_path.empty()) hl::pointcloud_export(sn, args.csv_path);
    hl::Json j = config_echo(cfg);
    j["report"] = "equidist";
    j.update(hl::to_json(sn));
    emit(j, args);
    return 0;
}

template <class Real>
int run_energy(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    const hl::CriticalSign s = parse_sign(args.sign);
    attach_cached_sequences(lab, cfg, {s});
    const auto levels = parse_levels(args.levels);
    const auto trend = hl::energy_trend(lab, s, levels, cfg.tol, cfg.seed);
    hl::Json j = config_echo(cfg);
    j["report"] = "energy";
    j.update(hl::to_json(trend));
    emit(j, args);
    return 0;
}

template <class Real>
int run_lcheck(const hl::Config& cfg, const SubArgs& args) {
    auto lab = make_lab<Real>(cfg);
    attach_cached_sequences(lab, cfg, {hl::CriticalSign::plus, hl::CriticalSign::minus});
    if (args.n < 1 || args.n > cfg.n_max) throw hl::ConfigError("lcheck level outside [1, n_max]");
    const auto proxy = hl::build_Sn(lab, parse_sign(args.sign), args.n, cfg.tol, cfg.seed);
    const auto est = lab.l_estimate(hl::MeasureSpec::average(), proxy, args.samples, cfg.seed);
    hl::Json j = config_echo(cfg);
    j["report"] = "lcheck";
    j["proxy_sign"] = args.sign;
    j["proxy_n"] = args.n;
    j["points"] = est.points_used;
    j["L"] = hl::to_json(est.value);
    emit(j, args);
    return 0;
}

template <class Real>
int dispatch(const std::string& name, const hl::Config& cfg, const SubArgs& args) {
    if (name == "gamma") return run_gamma<Real>(cfg, args);
    if (name == "fn") return run_fn<Real>(cfg, args);
    if (name == "capacity") return run_capacity<Real>(cfg, args);
    if (name == "radii") return run_radii<Real>(cfg, args);
    if (name == "height") return run_height<Real>(cfg, args);
    if (name == "pcf-scan") return run_pcf_scan<Real>(cfg, args);
    if (name == "equidist") return run_equidist<Real>(cfg, args);
    if (name == "energy") return run_energy<Real>(cfg, args);
    if (name == "lcheck") return run_lcheck<Real>(cfg, args);
    throw hl::ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-adelic measures, escape rates and canonical heights for Per1(lambda) over Q"};
    app.require_subcommand(1);

    std::string config_path;
    std::string lambda_str, lift_str, escape_str, cache_dir_str;
    int prime_bound = 0, n_max = 0, grid = 0, precision_digits = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path, "config file of 'key = value' lines");
    auto* f_lambda = app.add_option("--lambda", lambda_str, "parameter lambda as a rational 'a' or 'a/b'");
    auto* f_lift = app.add_option("--lift", lift_str, "homogeneous lift: std | paper-literal");
    auto* f_escape = app.add_option("--escape", escape_str, "escape limit clamp: log-plain | log-plus");
    auto* f_p = app.add_option("--P", prime_bound, "prime bound for place-truncated sums");
    auto* f_nmax = app.add_option("--n-max", n_max, "symbolic depth (1..10)");
    auto* f_grid = app.add_option("--grid", grid, "radii scan grid size (>= 64)");
    auto* f_tol = app.add_option("--tol", tol, "series / root-residual tolerance");
    auto* f_seed = app.add_option("--seed", seed, "RNG seed");
    auto* f_prec = app.add_option("--precision-digits", precision_digits,
                                  "working decimal digits (15 = double, up to 18 = long double)");
    auto* f_cache = app.add_option("--cache-dir", cache_dir_str, "cache directory ('' disables)");

    SubArgs args;
    auto* sc_gamma = app.add_subcommand("gamma", "gamma_v(lambda) table over places up to P");
    auto* sc_fn = app.add_subcommand("fn", "critical-orbit lift F_n (cached)");
    auto* sc_capacity = app.add_subcommand("capacity", "capacity sequence via resultants");
    auto* sc_radii = app.add_subcommand("radii", "inner/outer radii report");
    auto* sc_height = app.add_subcommand("height", "canonical heights of a rational parameter");
    auto* sc_pcf = app.add_subcommand("pcf-scan", "PCF status over a parameter grid");
    auto* sc_equidist = app.add_subcommand("equidist", "small-height parameter set S_n + point cloud");
    auto* sc_energy = app.add_subcommand("energy", "discrete energy trend of S_n");
    auto* sc_lcheck = app.add_subcommand("lcheck", "L estimate for the averaged measure");

    for (auto* sc : {sc_fn, sc_capacity, sc_radii, sc_equidist, sc_energy}) {
        sc->add_option("--sign", args.sign, "critical sign: + | -");
    }
    sc_height->add_option("--sign", args.sign, "critical sign: + | -");
    sc_lcheck->add_option("--sign", args.sign, "proxy sign: + | -");
    for (auto* sc : {sc_fn, sc_equidist, sc_lcheck}) sc->add_option("--n", args.n, "level n");
    sc_capacity->add_option("--place", args.place, "place: inf | <prime>");
    sc_radii->add_option("--place", args.place, "place: inf | <prime>");
    sc_height->add_option("--t", args.t, "rational parameter t");
    sc_height->add_option("--method", args.method, "quasi | cs-direct | cs-local | combined");
    sc_pcf->add_option("--t", args.t_list, "rational parameter (repeatable)");
    sc_pcf->add_option("--height-bound", args.height_bound, "enumerate rationals up to this height level");
    sc_pcf->add_option("--budget", args.budget, "orbit iteration budget");
    sc_pcf->add_option("--blowup-h0", args.blowup_h0, "height filter offset H0");
    sc_equidist->add_option("--csv", args.csv_path, "write the point cloud CSV here");
    sc_energy->add_option("--levels", args.levels, "comma list of levels, e.g. 1,3,5,7");
    sc_lcheck->add_option("--samples", args.samples, "proxy subsample size (0 = all)");
    for (auto* sc : {sc_gamma, sc_fn, sc_capacity, sc_radii, sc_height, sc_pcf, sc_equidist,
                     sc_energy, sc_lcheck}) {
        sc->add_option("--out", args.out_path, "write the JSON report to this file");
    }

    try {
        app.parse(argc, argv);

        hl::Config cfg;
        if (!config_path.empty()) cfg = hl::parse_config_file(config_path, cfg);
        if (const char* env = std::getenv("HEIGHTLAB_CACHE")) cfg.cache_dir = env;
        if (f_lambda->count()) cfg.lambda = hl::parse_rational(lambda_str);
        if (f_lift->count()) hl::apply_config_entry(cfg, "lift", lift_str);
        if (f_escape->count()) hl::apply_config_entry(cfg, "escape", escape_str);
        if (f_p->count()) cfg.prime_bound = prime_bound;
        if (f_nmax->count()) cfg.n_max = n_max;
        if (f_grid->count()) cfg.grid = grid;
        if (f_tol->count()) cfg.tol = tol;
        if (f_seed->count()) cfg.seed = seed;
        if (f_prec->count()) cfg.precision_digits = precision_digits;
        if (f_cache->count()) cfg.cache_dir = cache_dir_str;
        cfg.validate();

        const std::string name = app.get_subcommands().front()->get_name();
        if (cfg.extended_precision()) return dispatch<long double>(name, cfg, args);
        return dispatch<double>(name, cfg, args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const hl::ConvergenceError& e) {
        std::cerr << "heightlab: numerical non-convergence: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "heightlab: " << e.what() << "\n";
        return 1;
    }
}
