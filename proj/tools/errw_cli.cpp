// errw_cli.cpp - command-line front end: reinforced-walk simulation, shell
// bounds, potential export, density evaluation, the gamma-grid variational
// sweep, environment sampling, and the full verification suite. Every output
// file starts with a header carrying the tool version, the resolved
// configuration and the seed, and floating-point values are printed with 17
// significant digits so re-runs reproduce files byte for byte.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <atomic>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "errw/acceptance.hpp"
#include "errw/graph.hpp"
#include "errw/graph_json.hpp"
#include "errw/lattice.hpp"
#include "errw/magic.hpp"
#include "errw/mcmc.hpp"
#include "errw/plot.hpp"
#include "errw/potential.hpp"
#include "errw/quadrature.hpp"
#include "errw/rng.hpp"
#include "errw/variational.hpp"
#include "errw/version.hpp"
#include "errw/walker.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDiagnostic = 2;
constexpr int kExitAcceptance = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ERRW_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

void write_header(std::ostream& out, const json& config, std::uint64_t seed) {
    out << "# " << errw::kVersion << "\n";
    out << "# config: " << config.dump() << "\n";
    out << "# seed: " << seed << "\n";
}

json meta(const json& config, std::uint64_t seed) {
    json m;
    m["tool"] = errw::kVersion;
    m["config"] = config;
    m["seed"] = seed;
    return m;
}

void fail_json(const std::string& what) {
    json err;
    err["error"] = what;
    std::cerr << err.dump() << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

errw::GraphFile load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    json j;
    in >> j;
    return errw::graph_from_json(j);
}

// "<k>r" means shell index k; a bare integer is |ell|_inf and must be a
// multiple of r
long long parse_shell(const std::string& text, int r) {
    if (!text.empty() && (text.back() == 'r' || text.back() == 'R')) {
        const long long k = std::stoll(text.substr(0, text.size() - 1));
        if (k < 1) throw std::runtime_error("shell index must be >= 1");
        return k;
    }
    const long long v = std::stoll(text);
    if (v % r != 0) throw std::runtime_error("|ell|_inf must be a multiple of r");
    return v / r;
}

// --- simulate -------------------------------------------------------------------

int run_simulate(int r, double a, long long boundary_level, long long walks,
                 long long max_steps, std::uint64_t seed, int threads, bool sweep,
                 const std::string& out_csv, const std::string& out_svg) {
    json config{{"subcommand", "simulate"}, {"r", r},       {"a", a},
                {"boundary_level", boundary_level},         {"walks", walks},
                {"max_steps", max_steps},                   {"threads", threads},
                {"sweep", sweep}};

    std::vector<long long> levels;
    if (sweep)
        for (long long l = 1; l <= boundary_level; ++l) levels.push_back(l);
    else
        levels.push_back(boundary_level);

    auto out = open_out(out_csv);
    write_header(out, config, seed);
    out << "target,estimate,ci_halfwidth,n_walks,censored_frac,seed\n";

    bool diagnostic_failure = false;
    errw::PlotSeries data{"estimate", {}};
    for (long long level : levels) {
        errw::LatticeTarget target;
        target.shell_level = level;
        errw::HittingOptions opts;
        opts.max_steps = max_steps;
        opts.n_walks = walks;
        opts.seed = seed;

        errw::HitCounts counts;
        if (threads <= 1) {
            errw::GrowableWindow window(r, std::max<long long>(2 * r, target.reach(r)));
            counts = errw::hitting_replicas_lattice(window, a, target, opts, 0, walks);
        } else {
            std::vector<errw::HitCounts> parts(static_cast<std::size_t>(threads));
            std::vector<std::thread> pool;
            const long long chunk = (walks + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t]() {
                    const long long lo = t * chunk;
                    const long long hi = std::min<long long>(walks, lo + chunk);
                    if (lo >= hi) return;
                    errw::GrowableWindow window(r, std::max<long long>(2 * r, target.reach(r)));
                    parts[static_cast<std::size_t>(t)] =
                        errw::hitting_replicas_lattice(window, a, target, opts, lo, hi);
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& p : parts) counts += p;  // ordered reduction
        }
        const errw::HittingEstimate est = errw::summarize_hits(counts, opts);
        if (est.error) {
            std::cerr << "# level " << level << ": " << *est.error << "\n";
            diagnostic_failure = true;
        }
        out << level << 'r' << ',' << errw::format_g17(est.estimate) << ','
            << errw::format_g17(est.ci_halfwidth) << ',' << est.n_walks << ','
            << errw::format_g17(est.censored_fraction) << ',' << est.seed << '\n';
        if (est.estimate > 0.0)
            data.points.emplace_back(static_cast<double>(level), est.estimate);
    }
    out.close();

    if (!out_svg.empty()) {
        std::vector<errw::PlotSeries> series;
        if (!data.points.empty()) series.push_back(data);
        // overlay the proved decay curve when the parameters admit one
        if (r >= 130 && a > 0.0 && a < (r - 129) / 256.0) {
            const errw::XiThreshold th = errw::xi_and_l0(r, a);
            errw::PlotSeries bound{"shell bound 8 l^{-xi}", {}};
            for (long long l = 1; l <= boundary_level; ++l)
                bound.points.emplace_back(static_cast<double>(l),
                                          errw::boundary_bound(th.xi, static_cast<double>(l)));
            series.push_back(std::move(bound));
        }
        const std::string svg = errw::render_loglog_svg(
            series, "hit shell before returning", "shell index", "probability");
        if (!svg.empty()) {
            auto sout = open_out(out_svg);
            sout << "<!-- " << errw::kVersion << " config " << config.dump() << " seed " << seed
                 << " -->\n"
                 << svg;
        }
    }
    return diagnostic_failure ? kExitDiagnostic : kExitOk;
}

// --- bound ----------------------------------------------------------------------

int run_bound(int r, double a, std::optional<double> c, const std::string& ell_text,
              std::optional<double> log_level, std::optional<int> box_i,
              const std::string& json_path, const std::string& csv_path) {
    errw::ShellSpec shell;
    if (log_level)
        shell.log_level = *log_level;
    else
        shell.level = parse_shell(ell_text, r);

    json config{{"subcommand", "bound"}, {"r", r}, {"a", a}};
    if (c) config["c"] = *c;
    if (shell.level) config["level"] = *shell.level;
    if (shell.log_level) config["log_level"] = *shell.log_level;

    const errw::BoundReport rep = errw::bound_chain(r, a, c, shell, box_i);

    json j;
    j["_meta"] = meta(config, 0);
    j["r"] = rep.r;
    j["a"] = rep.a;
    j["c"] = rep.c;
    j["alpha"] = rep.alpha;
    j["xi"] = rep.xi;
    j["log_level0"] = rep.log_level0;
    j["log_ell0"] = rep.log_ell0;
    if (rep.level0) j["level0"] = *rep.level0;
    if (rep.ell0) j["ell0"] = *rep.ell0;
    j["log_level"] = rep.log_level;
    j["log_ell_inf"] = rep.log_ell_inf;
    if (rep.level) j["level"] = *rep.level;
    j["admissible"] = rep.admissible;
    if (rep.s_phi_box) j["s_phi_box"] = *rep.s_phi_box;
    j["s_phi_shell_sum_lo"] = rep.s_phi_shell_sum.lo;
    j["s_phi_shell_sum_hi"] = rep.s_phi_shell_sum.hi;
    j["s_phi_closed_bound"] = rep.s_phi_closed_bound;
    j["s_phi_target"] = rep.s_phi_target;
    j["s_phi"] = rep.s_phi;
    j["log_moment_bound"] = rep.log_moment_bound;
    j["moment_bound"] = rep.moment_bound;
    j["log_hitting_bound"] = rep.log_hitting_bound;
    j["hitting_bound"] = rep.hitting_bound;
    j["log_boundary_bound"] = rep.log_boundary_bound;
    j["boundary_bound"] = rep.boundary_bound;
    j["chain_holds"] = rep.chain_holds;
    json links = json::array();
    for (const auto& l : rep.links)
        links.push_back({{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"holds", l.holds}});
    j["links"] = std::move(links);
    json warnings = json::array();
    for (const auto& n : rep.notes) warnings.push_back(n);
    if (!rep.admissible)
        warnings.push_back("|ell|_inf below the admissible threshold l0");
    j["warnings"] = std::move(warnings);

    if (json_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        open_out(json_path) << j.dump(2) << "\n";

    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        write_header(out, config, 0);
        out << "r,a,c,alpha,xi,log_level0,log_level,admissible,s_phi,s_phi_closed_bound,"
               "s_phi_target,log_moment_bound,log_hitting_bound,log_boundary_bound,chain_holds\n";
        out << rep.r << ',' << errw::format_g17(rep.a) << ',' << errw::format_g17(rep.c) << ','
            << errw::format_g17(rep.alpha) << ',' << errw::format_g17(rep.xi) << ','
            << errw::format_g17(rep.log_level0) << ',' << errw::format_g17(rep.log_level) << ','
            << (rep.admissible ? 1 : 0) << ',' << errw::format_g17(rep.s_phi) << ','
            << errw::format_g17(rep.s_phi_closed_bound) << ','
            << errw::format_g17(rep.s_phi_target) << ','
            << errw::format_g17(rep.log_moment_bound) << ','
            << errw::format_g17(rep.log_hitting_bound) << ','
            << errw::format_g17(rep.log_boundary_bound) << ',' << (rep.chain_holds ? 1 : 0)
            << '\n';
    }
    return kExitOk;
}

// --- phi ------------------------------------------------------------------------

int run_phi(int r, int i, const std::string& ell_text, const std::string& edges_csv,
            const std::string& vertices_csv) {
    const long long level = parse_shell(ell_text, r);
    const errw::LatticeVertex ell{r * level, 0};
    json config{{"subcommand", "phi"}, {"r", r}, {"i", i}, {"level", level}};

    const errw::LatticeGraph box = errw::build_periodic_box({r, i});
    const auto phi = errw::build_phi(ell, box);

    auto out = open_out(edges_csv);
    write_header(out, config, 0);
    out << "edge_id,D,phi\n";
    for (errw::EdgeId e = 0; e < box.graph.edge_count(); ++e) {
        double d = std::numeric_limits<double>::quiet_NaN();
        if (!box.graph.periodic_closing(e)) {
            const auto& ep = box.graph.endpoints(e);
            d = errw::approx_green_D(box.graph.coord(ep[0]), box.graph.coord(ep[1]), r);
        }
        out << e << ',' << errw::format_g17(d) << ','
            << errw::format_g17(phi[static_cast<std::size_t>(e)]) << '\n';
    }
    if (!vertices_csv.empty()) {
        auto vout = open_out(vertices_csv);
        write_header(vout, config, 0);
        errw::write_vertex_csv(vout, box.graph, &box.level);
    }
    return kExitOk;
}

// --- density --------------------------------------------------------------------

int run_density(const std::string& in_path) {
    json req;
    if (in_path.empty() || in_path == "-")
        std::cin >> req;
    else {
        std::ifstream in(in_path);
        if (!in) throw std::runtime_error("cannot open input: " + in_path);
        in >> req;
    }
    const errw::GraphFile gf = errw::graph_from_json(req.at("graph"));
    std::vector<double> logs;
    if (req.contains("log_x"))
        logs = req.at("log_x").get<std::vector<double>>();
    else
        for (double x : req.at("x").get<std::vector<double>>()) {
            if (!(x > 0.0)) throw std::runtime_error("weights must be positive");
            logs.push_back(std::log(x));
        }
    const std::string target = req.value("target", "Q");

    errw::Environment env = errw::Environment::from_logs(logs);
    json out;
    out["_meta"] = meta(json{{"subcommand", "density"}, {"target", target}}, 0);
    if (target == "phi") {
        out["log_density"] = errw::log_phi(gf.graph, gf.a, gf.v0, env);
    } else {
        env = errw::renormalize(env, gf.e0);
        if (target == "Q")
            out["log_density"] = errw::log_density_Q(gf.graph, gf.a, gf.v0, gf.e0, env);
        else if (target == "P") {
            if (!gf.v1) throw std::runtime_error("interpolated density needs v1");
            out["log_density"] =
                errw::log_density_P_interp(gf.graph, gf.a, gf.v0, *gf.v1, gf.e0, env);
        } else
            throw std::runtime_error("unknown target (use Q, P or phi)");
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// --- variational -----------------------------------------------------------------

int run_variational(const std::string& graph_path, int cycle_n, double cycle_a,
                    double gamma_min, double gamma_max, int gamma_steps, long long n_samples,
                    long long burn_in, long long thinning, std::uint64_t seed,
                    const std::string& out_csv) {
    errw::SymmetricInstance inst;
    json config{{"subcommand", "variational"}, {"gamma_min", gamma_min},
                {"gamma_max", gamma_max},      {"gamma_steps", gamma_steps},
                {"n_samples", n_samples},      {"burn_in", burn_in},
                {"thinning", thinning}};
    if (!graph_path.empty()) {
        inst = load_graph_file(graph_path).instance();
        config["graph"] = graph_path;
    } else {
        inst = errw::acceptance::cycle_instance(cycle_n, cycle_a);
        config["cycle"] = cycle_n;
        config["a"] = cycle_a;
    }
    inst.require_valid();
    const double s_phi = errw::dirichlet_form(inst.graph, inst.a, inst.phi);

    errw::ChainConfig cfg;
    cfg.n_samples = n_samples;
    cfg.burn_in = burn_in;
    cfg.thinning = thinning;
    cfg.seed = seed;
    cfg.target = errw::ChainTarget::interpolated;
    const errw::SampleSet chain =
        errw::mcmc_sample(inst.graph, inst.a, inst.v0, inst.v1, inst.e0, cfg);

    auto out = open_out(out_csv);
    write_header(out, config, seed);
    out << "gamma,EH,g_hat,g_bound,second_deriv_max\n";
    errw::Environment env;
    for (int k = 0; k < gamma_steps; ++k) {
        const double gamma =
            gamma_steps == 1 ? gamma_min
                             : gamma_min + (gamma_max - gamma_min) * k / (gamma_steps - 1);
        std::vector<double> h, f;
        double d2max = -std::numeric_limits<double>::infinity();
        h.reserve(chain.log_x.size());
        f.reserve(chain.log_x.size());
        for (const auto& lx : chain.log_x) {
            env.log_x = lx;
            const errw::Environment pushed = errw::deform(inst, gamma, env);
            h.push_back(errw::quarter_log_vertex_ratio(inst.graph, pushed, inst.v0, inst.v1));
            f.push_back(errw::log_f_gamma(inst, gamma, env));
            d2max = std::max(d2max, errw::f_gamma_derivatives(inst, gamma, env).second);
        }
        out << errw::format_g17(gamma) << ',' << errw::format_g17(errw::autocorr_mean(h).value)
            << ',' << errw::format_g17(errw::autocorr_mean(f).value) << ','
            << errw::format_g17(s_phi * gamma * gamma / 2.0) << ',' << errw::format_g17(d2max)
            << '\n';
    }
    if (!chain.diagnostics.ok) {
        for (const auto& w : chain.diagnostics.warnings) std::cerr << "# " << w << "\n";
        return kExitDiagnostic;
    }
    return kExitOk;
}

// --- mcmc -----------------------------------------------------------------------

int run_mcmc(const std::string& graph_path, int cycle_n, double cycle_a,
             const std::string& target, long long n_samples, long long burn_in,
             long long thinning, std::uint64_t seed, int n_chains, int threads,
             const std::string& samples_csv, const std::string& moments_json) {
    errw::GraphFile gf;
    json config{{"subcommand", "mcmc"},   {"target", target},   {"n_samples", n_samples},
                {"burn_in", burn_in},     {"thinning", thinning}, {"chains", n_chains}};
    if (!graph_path.empty()) {
        gf = load_graph_file(graph_path);
        config["graph"] = graph_path;
    } else {
        const errw::SymmetricInstance inst = errw::acceptance::cycle_instance(cycle_n, cycle_a);
        gf.graph = inst.graph;
        gf.a = inst.a;
        gf.v0 = inst.v0;
        gf.v1 = inst.v1;
        gf.e0 = inst.e0;
        gf.phi = inst.phi;
        gf.automorphism = inst.automorphism;
        config["cycle"] = cycle_n;
        config["a"] = cycle_a;
    }

    errw::ChainConfig cfg;
    cfg.n_samples = n_samples;
    cfg.burn_in = burn_in;
    cfg.thinning = thinning;
    cfg.seed = seed;
    cfg.target = target == "P" ? errw::ChainTarget::interpolated : errw::ChainTarget::environment;
    if (cfg.target == errw::ChainTarget::interpolated && !gf.v1)
        throw std::runtime_error("interpolated target needs v1 in the graph file");
    const auto v1_arg =
        cfg.target == errw::ChainTarget::interpolated ? gf.v1 : std::optional<errw::VertexId>{};

    // one stream per chain; the merge below is an ordered reduction, so the
    // result is independent of how chains are spread over workers
    std::vector<errw::SampleSet> chains(static_cast<std::size_t>(n_chains));
    {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(threads, n_chains);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (int c = next.fetch_add(1); c < n_chains; c = next.fetch_add(1)) {
                    errw::ChainConfig local = cfg;
                    local.chain_index = static_cast<std::uint64_t>(c);
                    chains[static_cast<std::size_t>(c)] =
                        errw::mcmc_sample(gf.graph, gf.a, gf.v0, v1_arg, gf.e0, local);
                }
            });
        for (auto& th : pool) th.join();
    }

    errw::SampleSet chain;  // pooled, chain-major order
    chain.diagnostics.ok = true;
    chain.diagnostics.min_acceptance = 1.0;
    chain.diagnostics.max_acceptance = 0.0;
    for (const auto& c : chains) {
        chain.log_x.insert(chain.log_x.end(), c.log_x.begin(), c.log_x.end());
        chain.diagnostics.ok = chain.diagnostics.ok && c.diagnostics.ok;
        chain.diagnostics.min_acceptance =
            std::min(chain.diagnostics.min_acceptance, c.diagnostics.min_acceptance);
        chain.diagnostics.max_acceptance =
            std::max(chain.diagnostics.max_acceptance, c.diagnostics.max_acceptance);
        chain.diagnostics.warnings.insert(chain.diagnostics.warnings.end(),
                                          c.diagnostics.warnings.begin(),
                                          c.diagnostics.warnings.end());
    }

    if (!samples_csv.empty()) {
        auto out = open_out(samples_csv);
        write_header(out, config, seed);
        out << "sample";
        for (errw::EdgeId e = 0; e < gf.graph.edge_count(); ++e) out << ",log_x" << e;
        out << "\n";
        for (std::size_t k = 0; k < chain.log_x.size(); ++k) {
            out << k;
            for (double v : chain.log_x[k]) out << ',' << errw::format_g17(v);
            out << "\n";
        }
    }

    json j;
    j["_meta"] = meta(config, seed);
    j["acceptance"] = {{"min", chain.diagnostics.min_acceptance},
                       {"max", chain.diagnostics.max_acceptance},
                       {"ok", chain.diagnostics.ok}};
    bool low_ess = false;
    if (gf.v1) {
        // per-chain estimates combined with independent-chain error propagation
        double value = 0.0, var = 0.0, ess = 0.0;
        bool warn = false;
        for (const auto& c : chains) {
            const errw::MomentEstimate qm = errw::quarter_moment(c, gf.graph, gf.v0, *gf.v1);
            value += qm.value / n_chains;
            var += qm.std_error * qm.std_error / (static_cast<double>(n_chains) * n_chains);
            ess += qm.ess;
            warn = warn || qm.low_ess_warning;
        }
        low_ess = warn;
        j["quarter_moment"] = {{"value", value},
                               {"std_error", std::sqrt(var)},
                               {"ess", ess},
                               {"low_ess_warning", warn}};
    }
    if (gf.phi) {
        const double s_phi = errw::dirichlet_form(gf.graph, gf.a, *gf.phi);
        j["dirichlet_form"] = s_phi;
        if (cfg.target == errw::ChainTarget::environment && s_phi > 0.0) {
            // the variational bound constrains the environment-law moment only
            j["quarter_moment_bound"] = errw::quarter_moment_bound(s_phi);
        }
    }
    if (cfg.target == errw::ChainTarget::interpolated && gf.phi && gf.automorphism) {
        const errw::SymmetryCheck sym = errw::symmetry_check(gf.instance(), chain);
        j["symmetry"] = {{"precondition_ok", sym.precondition_ok},
                         {"statistic", sym.statistic},
                         {"pass", sym.pass}};
    }
    if (moments_json.empty())
        std::cout << j.dump(2) << "\n";
    else
        open_out(moments_json) << j.dump(2) << "\n";

    const bool diag_fail = !chain.diagnostics.ok || low_ess;
    if (diag_fail)
        for (const auto& w : chain.diagnostics.warnings) std::cerr << "# " << w << "\n";
    return diag_fail ? kExitDiagnostic : kExitOk;
}

// --- walk -----------------------------------------------------------------------

int run_walk(const std::string& graph_path, int cycle_n, double cycle_a, long long steps,
             std::uint64_t seed, const std::string& out_csv) {
    json config{{"subcommand", "walk"}, {"steps", steps}};
    errw::FiniteGraph g;
    errw::InitialWeights a;
    errw::VertexId v0 = 0;
    if (!graph_path.empty()) {
        const errw::GraphFile gf = load_graph_file(graph_path);
        g = gf.graph;
        a = gf.a;
        v0 = gf.v0;
        config["graph"] = graph_path;
    } else {
        g = errw::acceptance::cycle_graph(cycle_n);
        a = errw::InitialWeights::constant(g, cycle_a);
        config["cycle"] = cycle_n;
        config["a"] = cycle_a;
    }
    auto out = open_out(out_csv);
    write_header(out, config, seed);
    errw::write_trajectory_csv(out, g, a, v0, steps, seed);
    return kExitOk;
}

// --- export ---------------------------------------------------------------------

int run_export(int r, int i, long long extent, const std::string& edges_csv,
               const std::string& vertices_csv) {
    const bool window = extent > 0;
    json config{{"subcommand", "export"}, {"r", r}};
    if (window)
        config["extent"] = extent;
    else
        config["i"] = i;
    const errw::LatticeGraph lat =
        window ? errw::build_window_graph(r, extent) : errw::build_periodic_box({r, i});
    if (!edges_csv.empty()) {
        auto out = open_out(edges_csv);
        write_header(out, config, 0);
        errw::write_edge_csv(out, lat.graph, &lat.r_edge_id);
    }
    if (!vertices_csv.empty()) {
        auto out = open_out(vertices_csv);
        write_header(out, config, 0);
        errw::write_vertex_csv(out, lat.graph, &lat.level);
    }
    return kExitOk;
}

// --- verify ---------------------------------------------------------------------

int run_verify(std::uint64_t seed, const std::string& fixture_dir) {
    errw::acceptance::Options opt;
    opt.seed = seed;
    opt.fixture_dir = fixture_dir;
    const auto results = errw::acceptance::run_all(opt, &std::cout);
    int passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return errw::acceptance::all_pass(results) ? kExitOk : kExitAcceptance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(errw::kVersion) +
                 " - linearly edge-reinforced random walk toolbox"};
    app.require_subcommand(1);

    std::uint64_t seed = default_seed();
    app.add_option("--seed", seed, "master seed (env ERRW_SEED overrides the default)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "hitting Monte Carlo on the diluted lattice");
    int sim_r = 4;
    double sim_a = 1.0;
    long long sim_level = 3, sim_walks = 10000, sim_max_steps = 1'000'000;
    int sim_threads = 1;
    bool sim_sweep = false;
    std::string sim_out = "hitting.csv", sim_svg;
    sim->add_option("--r", sim_r, "dilution factor")->check(CLI::Range(2, 1 << 20));
    sim->add_option("--a", sim_a, "constant initial weight")->check(CLI::PositiveNumber);
    sim->add_option("--boundary-level", sim_level, "target shell index")->check(CLI::PositiveNumber);
    sim->add_option("--walks", sim_walks, "replica count")->check(CLI::PositiveNumber);
    sim->add_option("--max-steps", sim_max_steps, "per-replica step cap")->check(CLI::PositiveNumber);
    sim->add_option("--threads", sim_threads, "worker threads (results independent of the count)")
        ->check(CLI::Range(1, 256));
    sim->add_flag("--sweep", sim_sweep, "measure every shell up to the boundary level");
    sim->add_option("--out", sim_out, "hitting CSV path");
    sim->add_option("--svg", sim_svg, "optional SVG plot path");
    sim->add_option("--seed", seed, "replica stream seed");

    // bound
    auto* bnd = app.add_subcommand("bound", "shell bound chain report");
    int bnd_r = 130;
    double bnd_a = 0.001;
    std::optional<double> bnd_c, bnd_log_level;
    std::optional<int> bnd_i;
    std::string bnd_ell = "10r", bnd_json, bnd_csv;
    bnd->add_option("--r", bnd_r, "dilution factor");
    bnd->add_option("--a", bnd_a, "constant initial weight");
    bnd->add_option("--c", bnd_c, "chain constant in (256 alpha/(r-1), 1); default midpoint");
    bnd->add_option("--ell", bnd_ell, "target: '<k>r' for shell k, or |ell|_inf");
    bnd->add_option("--log-level", bnd_log_level, "shell index in log form (overrides --ell)");
    bnd->add_option("--i", bnd_i, "box size override for the exact Dirichlet form");
    bnd->add_option("--json", bnd_json, "JSON output path (default stdout)");
    bnd->add_option("--csv", bnd_csv, "one-row CSV output path");

    // phi
    auto* phc = app.add_subcommand("phi", "export the edge potential of a periodic box");
    int phi_r = 4, phi_i = 8;
    std::string phi_ell = "2r", phi_edges = "phi.csv", phi_vertices;
    phc->add_option("--r", phi_r, "dilution factor");
    phc->add_option("--i", phi_i, "box size");
    phc->add_option("--ell", phi_ell, "crossing point: '<k>r' or |ell|_inf");
    phc->add_option("--out", phi_edges, "edge CSV path (edge_id,D,phi)");
    phc->add_option("--vertices", phi_vertices, "optional vertex CSV path");

    // density
    auto* den = app.add_subcommand("density", "evaluate log-densities (JSON in, JSON out)");
    std::string den_in = "-";
    den->add_option("--in", den_in, "request JSON path ('-' for stdin)");

    // variational
    auto* var = app.add_subcommand("variational", "gamma-grid sweep of the deformation");
    std::string var_graph, var_out = "variational.csv";
    int var_cycle = 4, var_steps = 11;
    double var_a = 1.0, var_gmin = -2.0, var_gmax = 2.0;
    long long var_n = 20000, var_burn = 4000, var_thin = 2;
    var->add_option("--graph", var_graph, "instance JSON (vertices/edges/a/v0/v1/e0/phi/automorphism)");
    var->add_option("--cycle", var_cycle, "built-in even cycle length")->check(CLI::Range(4, 1 << 20));
    var->add_option("--a", var_a, "constant initial weight for the built-in cycle");
    var->add_option("--gamma-min", var_gmin, "grid start");
    var->add_option("--gamma-max", var_gmax, "grid end");
    var->add_option("--gamma-steps", var_steps, "grid size")->check(CLI::PositiveNumber);
    var->add_option("--samples", var_n, "retained samples");
    var->add_option("--burn-in", var_burn, "adaptation sweeps");
    var->add_option("--thin", var_thin, "sweeps per retained sample");
    var->add_option("--out", var_out, "output CSV path");
    var->add_option("--seed", seed, "chain seed");

    // mcmc
    auto* mc = app.add_subcommand("mcmc", "sample the environment law and report moments");
    std::string mc_graph, mc_target = "Q", mc_samples, mc_moments;
    int mc_cycle = 4;
    double mc_a = 1.0;
    long long mc_n = 20000, mc_burn = 4000, mc_thin = 2;
    int mc_chains = 1, mc_threads = 1;
    mc->add_option("--graph", mc_graph, "instance JSON path");
    mc->add_option("--cycle", mc_cycle, "built-in even cycle length")->check(CLI::Range(4, 1 << 20));
    mc->add_option("--a", mc_a, "constant initial weight for the built-in cycle");
    mc->add_option("--target", mc_target, "Q (environment at v0) or P (interpolated)")
        ->check(CLI::IsMember({"Q", "P"}));
    mc->add_option("--samples-out", mc_samples, "retained-sample CSV path");
    mc->add_option("--moments-out", mc_moments, "moments JSON path (default stdout)");
    mc->add_option("-n,--samples", mc_n, "retained samples");
    mc->add_option("--burn-in", mc_burn, "adaptation sweeps");
    mc->add_option("--thin", mc_thin, "sweeps per retained sample");
    mc->add_option("--chains", mc_chains, "independent chains, streams (seed, 0..N-1)")
        ->check(CLI::Range(1, 1024));
    mc->add_option("--threads", mc_threads, "worker threads (results independent of the count)")
        ->check(CLI::Range(1, 256));
    mc->add_option("--seed", seed, "chain seed");

    // walk
    auto* wlk = app.add_subcommand("walk", "export one seeded reinforced trajectory as CSV");
    std::string wlk_graph, wlk_out = "trajectory.csv";
    int wlk_cycle = 6;
    double wlk_a = 1.0;
    long long wlk_steps = 1000;
    wlk->add_option("--graph", wlk_graph, "instance JSON path");
    wlk->add_option("--cycle", wlk_cycle, "built-in cycle length")->check(CLI::Range(3, 1 << 20));
    wlk->add_option("--a", wlk_a, "constant initial weight for the built-in cycle");
    wlk->add_option("--steps", wlk_steps, "trajectory length")->check(CLI::PositiveNumber);
    wlk->add_option("--out", wlk_out, "trajectory CSV path (t,vertex,edge_crossed)");
    wlk->add_option("--seed", seed, "trajectory seed");

    // export
    auto* exp = app.add_subcommand("export", "write a lattice graph as edge/vertex CSV");
    int exp_r = 4, exp_i = 4;
    long long exp_extent = 0;
    std::string exp_edges = "edges.csv", exp_vertices = "vertices.csv";
    exp->add_option("--r", exp_r, "dilution factor");
    exp->add_option("--i", exp_i, "periodic box size (used unless --extent is given)");
    exp->add_option("--extent", exp_extent, "window half-width; selects the window builder");
    exp->add_option("--edges", exp_edges, "edge CSV path");
    exp->add_option("--vertices", exp_vertices, "vertex CSV path");

    // verify
    auto* ver = app.add_subcommand("verify", "run the full acceptance suite");
    std::string ver_fixtures = "fixtures";
    ver->add_option("--fixtures", ver_fixtures, "directory for oracle fixture JSON dumps");
    ver->add_option("--seed", seed, "suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;  // keep --help at 0
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_r, sim_a, sim_level, sim_walks, sim_max_steps, seed,
                                sim_threads, sim_sweep, sim_out, sim_svg);
        if (bnd->parsed())
            return run_bound(bnd_r, bnd_a, bnd_c, bnd_ell, bnd_log_level, bnd_i, bnd_json,
                             bnd_csv);
        if (phc->parsed()) return run_phi(phi_r, phi_i, phi_ell, phi_edges, phi_vertices);
        if (den->parsed()) return run_density(den_in);
        if (var->parsed())
            return run_variational(var_graph, var_cycle, var_a, var_gmin, var_gmax, var_steps,
                                   var_n, var_burn, var_thin, seed, var_out);
        if (mc->parsed())
            return run_mcmc(mc_graph, mc_cycle, mc_a, mc_target, mc_n, mc_burn, mc_thin, seed,
                            mc_chains, mc_threads, mc_samples, mc_moments);
        if (wlk->parsed()) return run_walk(wlk_graph, wlk_cycle, wlk_a, wlk_steps, seed, wlk_out);
        if (exp->parsed()) return run_export(exp_r, exp_i, exp_extent, exp_edges, exp_vertices);
        if (ver->parsed()) return run_verify(seed, ver_fixtures);
    } catch (const std::exception& ex) {
        fail_json(ex.what());
        return kExitValidation;
    }
    return kExitValidation;
}
