// siftlab — simulator, analytic calculator and statistical verification
// harness for finite-size QKD sifting protocols.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "siftlab/analytic.hpp"
#include "siftlab/montecarlo.hpp"
#include "siftlab/protocols.hpp"
#include "siftlab/report.hpp"
#include "siftlab/verify.hpp"
#include "siftlab/version.hpp"

namespace {

using namespace siftlab;

constexpr int kExitBadFlags = 2;
constexpr int kExitStatistical = 3;  // AllTrialsAborted / SparseBins
constexpr int kExitIo = 4;

unsigned resolve_workers(unsigned flag_value) {
    // SIFTLAB_WORKERS overrides the flag
    if (const char* env = std::getenv("SIFTLAB_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    if (flag_value >= 1) return flag_value;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

int write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file: " << path << "\n";
        return kExitIo;
    }
    out << content;
    if (!out) {
        std::cerr << "error: write failed: " << path << "\n";
        return kExitIo;
    }
    return 0;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~Timer() {
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        std::cerr << "wall_time_s=" << dt.count() << "\n";
    }
};

EvePolicy parse_attack(const std::string& spec) {
    if (spec == "none") return EvePolicy::passive();
    if (spec == "fixed-x") return EvePolicy::fixed(Basis::X);
    if (spec == "fixed-z") return EvePolicy::fixed(Basis::Z);
    if (spec == "nonuniform") return EvePolicy::nonuniform();
    if (spec == "leak") return EvePolicy::leak();
    if (spec == "both") return EvePolicy::both();
    if (spec.rfind("schedule:", 0) == 0) {
        return EvePolicy::schedule(load_schedule_file(spec.substr(9)));
    }
    throw CLI::ValidationError("--attack", "unknown attack '" + spec + "'");
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
    std::string protocol;
    int64_t n = 0, k = 0;
    std::optional<int64_t> m;
    double px = 0.5;
    double qtol = 1.0;
    std::string attack = "none";
    uint64_t trials = 0;
    std::optional<uint64_t> seed;
    std::string pe = "none";
    std::string out;
    std::string format = "json";
    unsigned workers = 0;
};

int run_simulate(const SimulateArgs& a) {
    if (a.format == "json" && !a.seed) {
        std::cerr << "error: --seed is mandatory with --format json\n";
        return kExitBadFlags;
    }
    const uint64_t seed = a.seed.value_or(0);
    const bool lca = a.protocol == "lca";
    RawParams raw;
    raw.n = a.n;
    raw.k = a.k;
    raw.m = a.m;
    raw.p_x = a.px;
    raw.q_tol = a.qtol;
    SiftParams params = validate_params(raw, lca);
    EvePolicy eve = parse_attack(a.attack);
    PeKind pe = PeKind::None;
    if (a.pe == "sbpe") pe = PeKind::Sbpe;
    if (a.pe == "lca") pe = PeKind::LcaTwoRate;

    Timer timer;
    SimulateSummary sum =
        simulate_summary(lca ? Protocol::LCA : Protocol::Iterative, params, eve, pe, a.trials,
                         seed, resolve_workers(a.workers));

    RunReport rep;
    rep.command = "simulate";
    rep.version = kVersion;
    rep.seed = seed;
    rep.param("protocol", a.protocol);
    rep.param("n", std::to_string(params.n()));
    rep.param("k", std::to_string(params.k()));
    if (params.m()) rep.param("m", std::to_string(*params.m()));
    rep.param("px", format_double(params.p_x()));
    rep.param("qtol", format_double(params.q_tol()));
    rep.param("attack", a.attack);
    rep.param("trials", std::to_string(a.trials));
    rep.param("pe", a.pe);
    rep.metric("error_rate", sum.error_rate.mean, sum.error_rate.std_error);
    rep.metric("efficiency", sum.efficiency.mean, sum.efficiency.std_error);
    rep.metric("abort_fraction", sum.abort_fraction);
    rep.metric("kept_trials", static_cast<double>(sum.kept));
    if (sum.pe_pass_rate) rep.metric("pe_pass_rate", *sum.pe_pass_rate);

    return write_output(a.out, a.format == "json" ? rep.render_json() : rep.render_csv());
}

// -------------------------------------------------------------------- figure

int run_figure_error_curves(double px_min, double px_max, double step, uint64_t trials,
                            uint64_t seed, const std::string& out, unsigned workers) {
    Timer timer;
    SeriesConfig cfg;
    std::string csv = "p_x,attack,method,expected_error,std_error\n";
    auto mc_row = [&](double px, const char* attack, const EvePolicy& proto,
                      uint64_t run_seed) {
        SiftParams p = validate_params({1, 1, std::nullopt, px, 1.0});
        ErrorRateEstimate e =
            estimate_error_rate(Protocol::Iterative, p, proto, trials, run_seed, workers);
        csv += format_double(px);
        csv += ",";
        csv += attack;
        csv += ",montecarlo,";
        csv += format_double(e.error_rate.mean) + "," + format_double(e.error_rate.std_error) +
               "\n";
    };
    int i = 0;
    for (double px = px_min; px <= px_max + 1e-12; px = px_min + (++i) * step) {
        csv += format_double(px) + ",nonuniform,analytic," +
               format_double(attack1_error(px, cfg)) + ",\n";
        mc_row(px, "nonuniform", EvePolicy::nonuniform(), seed);
        if (std::fabs(px - 0.5) < 1e-12) {
            csv += format_double(px) + ",leak,analytic," +
                   format_double(attack2_error_symmetric()) + ",\n";
        }
        mc_row(px, "leak", EvePolicy::leak(), seed + 1);
        csv += format_double(px) + ",both,analytic," + format_double(attack3_error(px, cfg)) +
               ",\n";
        mc_row(px, "both", EvePolicy::both(), seed + 2);
    }
    return write_output(out, csv);
}

int run_figure_efficiency(int nk_max, double px, const std::string& out) {
    Timer timer;
    SeriesConfig cfg;
    std::string csv = "n,eta_iterative,eta_lca,m_opt\n";
    for (int n = 1; n <= nk_max; ++n) {
        double ei = eff_iterative(n, n, px, cfg);
        OptimizedM om = optimize_m(n, n, px);
        csv += std::to_string(n) + "," + format_double(ei) + "," + format_double(om.eta) +
               "," + std::to_string(om.m_opt) + "\n";
    }
    return write_output(out, csv);
}

// --------------------------------------------------------------------- audit

int run_audit(const std::string& protocol, int64_t n, int64_t k, std::optional<int64_t> m,
              double px, uint64_t trials, uint64_t seed, double alpha, const std::string& out,
              unsigned workers) {
    const bool lca = protocol == "lca";
    SiftParams params = validate_params({n, k, m, px, 1.0}, lca);
    Timer timer;
    ThetaHistogram hist = estimate_sampling_dist(lca ? Protocol::LCA : Protocol::Iterative,
                                                 params, trials, seed, workers);
    ChiSquareResult chi = chi_square_uniformity(hist, alpha);

    nlohmann::ordered_json j;
    j["command"] = "audit";
    j["seed"] = seed;
    j["parameters"] = {{"protocol", protocol},
                       {"n", params.n()},
                       {"k", params.k()},
                       {"px", params.p_x()},
                       {"trials", trials},
                       {"alpha", alpha}};
    if (params.m()) j["parameters"]["m"] = *params.m();
    nlohmann::ordered_json bins = nlohmann::ordered_json::object();
    for (const auto& [key, count] : hist.bins) bins[key] = count;
    j["histogram"] = {{"bins", bins},
                      {"abort_count", hist.abort_count},
                      {"trials", hist.trials}};
    j["chi_square"] = {{"statistic", chi.statistic},
                       {"p_value", chi.p_value},
                       {"dof", chi.dof},
                       {"reject", chi.reject}};
    if (!lca && params.n() == 1 && params.k() == 1) {
        // conditional first-agreement bias: which basis reaches agreement first
        AgreementLaw law = AgreementLaw::from_px(params.p_x());
        uint64_t tot = hist.first_x + hist.first_z;
        j["first_agreement"] = {
            {"empirical_x", tot ? static_cast<double>(hist.first_x) / tot : 0.0},
            {"empirical_z", tot ? static_cast<double>(hist.first_z) / tot : 0.0},
            {"analytic_g_x", law.g_x},
            {"analytic_g_z", law.g_z}};
    }
    j["version"] = kVersion;
    int rc = write_output(out, j.dump(2) + "\n");
    if (rc != 0) return rc;
    return chi.reject ? 1 : 0;
}

// ------------------------------------------------------------------ analytic

int run_analytic(const std::string& target, int64_t n, int64_t k, std::optional<int64_t> m,
                 double px, double mu, const std::string& theta, const std::string& attack,
                 double eps, std::optional<int64_t> sigma_tot, bool optimize) {
    SeriesConfig cfg;
    cfg.tail_epsilon = eps;
    nlohmann::ordered_json j;
    j["target"] = target;
    if (target == "pzstar") {
        j["k"] = k;
        j["gz_star"] = gz_star(static_cast<int>(k));
        j["pz_star"] = pz_star(static_cast<int>(k));
    } else if (target == "serfling") {
        j["n"] = n;
        j["k"] = k;
        j["mu"] = mu;
        j["bound"] = serfling_bound(static_cast<int>(n), static_cast<int>(k), mu);
        if (sigma_tot) {
            TailExperimentSpec spec{static_cast<int>(n + k), static_cast<int>(n),
                                    static_cast<int>(k), static_cast<int>(*sigma_tot), mu, 1.0};
            j["sigma_tot"] = *sigma_tot;
            j["d"] = spec.d();
            j["hypergeom_tail"] = hypergeom_tail(spec);
        }
    } else if (target == "abort") {
        SiftParams params = validate_params({n, k, m, px, 1.0}, true);
        j["n"] = n;
        j["k"] = k;
        j["m"] = *m;
        j["px"] = px;
        j["p_abort"] = lca_abort_prob(params);
    } else if (target == "sampling") {
        SiftParams params = validate_params({n, k, m, px, 1.0}, false);
        j["n"] = n;
        j["k"] = k;
        j["px"] = px;
        if (m) {
            j["m"] = *m;
            j["p_theta"] = lca_sampling_prob(params);
            j["p_abort"] = lca_abort_prob(params);
        } else {
            if (theta.empty()) {
                std::cerr << "error: iterative sampling needs --theta\n";
                return kExitBadFlags;
            }
            BitString th = bits_from_string(theta);
            j["theta"] = theta;
            j["p_theta"] = iter_sampling_enum(params, th, cfg);
            if (n == 1) j["p_theta_closed_form"] = iter_sampling_n1(static_cast<int>(k),
                                                                    params.p_z(), th);
        }
    } else if (target == "attack-error") {
        j["attack"] = attack;
        j["px"] = px;
        if (attack == "nonuniform") {
            j["expected_error"] = attack1_error(px, cfg);
        } else if (attack == "both") {
            j["expected_error"] = attack3_error(px, cfg);
        } else if (attack == "leak") {
            if (std::fabs(px - 0.5) > 1e-12) {
                std::cerr << "error: the leak attack has an analytic value only at px=0.5; "
                             "use `simulate --attack leak` elsewhere\n";
                return kExitBadFlags;
            }
            j["expected_error"] = attack2_error_symmetric();
        } else {
            std::cerr << "error: --attack must be nonuniform, leak or both\n";
            return kExitBadFlags;
        }
    } else if (target == "efficiency") {
        j["n"] = n;
        j["k"] = k;
        j["px"] = px;
        if (m) {
            j["m"] = *m;
            j["eta_lca"] = eff_lca(static_cast<int>(n), static_cast<int>(k),
                                   static_cast<int>(*m), px);
        } else if (optimize) {
            OptimizedM om = optimize_m(static_cast<int>(n), static_cast<int>(k), px);
            j["m_opt"] = om.m_opt;
            j["eta_lca"] = om.eta;
        } else {
            j["eta_iterative"] = eff_iterative(static_cast<int>(n), static_cast<int>(k), px,
                                               cfg);
        }
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-size QKD sifting: simulation, analytics, verification"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // simulate
    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run sifting (+ optional PE) trials");
    s->add_option("--protocol", sim.protocol, "iterative or lca")
        ->required()
        ->check(CLI::IsMember({"iterative", "lca"}));
    s->add_option("--n", sim.n, "X-quota (raw key length)")->required();
    s->add_option("--k", sim.k, "Z-quota (test sample size)")->required();
    s->add_option("--m", sim.m, "fixed round count (lca only)");
    s->add_option("--px", sim.px, "X-basis probability")->required();
    s->add_option("--qtol", sim.qtol, "error tolerance for PE (default 1.0)");
    s->add_option("--attack", sim.attack,
                  "none|fixed-x|fixed-z|nonuniform|leak|both|schedule:<path>");
    s->add_option("--trials", sim.trials, "number of Monte Carlo trials")->required();
    s->add_option("--seed", sim.seed, "master seed (mandatory with --format json)");
    s->add_option("--pe", sim.pe, "parameter estimation: sbpe or lca")
        ->check(CLI::IsMember({"none", "sbpe", "lca"}));
    s->add_option("--out", sim.out, "output path ('-' = stdout)");
    s->add_option("--format", sim.format, "csv or json (default json)")
        ->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--workers", sim.workers, "worker threads (SIFTLAB_WORKERS overrides)");

    // figure
    auto* f = app.add_subcommand("figure", "reproduce figure data as CSV");
    f->require_subcommand(1);
    double px_min = 0.51, px_max = 0.99, step = 0.01;
    uint64_t fig_trials = 0, fig_seed = 0;
    std::string fig_out;
    unsigned fig_workers = 0;
    auto* fe = f->add_subcommand("error-curves", "attack error rates vs p_x");
    fe->add_option("--px-min", px_min);
    fe->add_option("--px-max", px_max);
    fe->add_option("--step", step);
    fe->add_option("--trials", fig_trials, "Monte Carlo trials per point")->required();
    fe->add_option("--seed", fig_seed)->required();
    fe->add_option("--out", fig_out);
    fe->add_option("--workers", fig_workers);
    int nk_max = 50;
    double fig_px = 0.5;
    std::string fig_out2;
    auto* fx = f->add_subcommand("efficiency", "expected efficiencies vs n = k");
    fx->add_option("--nk-max", nk_max);
    fx->add_option("--px", fig_px);
    fx->add_option("--out", fig_out2);

    // audit
    std::string audit_protocol;
    int64_t audit_n = 0, audit_k = 0;
    std::optional<int64_t> audit_m;
    double audit_px = 0.5, audit_alpha = 0.01;
    uint64_t audit_trials = 0, audit_seed = 0;
    std::string audit_out;
    unsigned audit_workers = 0;
    auto* a = app.add_subcommand("audit", "empirical uniform-sampling certification");
    a->add_option("--protocol", audit_protocol)->required()->check(
        CLI::IsMember({"iterative", "lca"}));
    a->add_option("--n", audit_n)->required();
    a->add_option("--k", audit_k)->required();
    a->add_option("--m", audit_m);
    a->add_option("--px", audit_px)->required();
    a->add_option("--trials", audit_trials)->required();
    a->add_option("--seed", audit_seed)->required();
    a->add_option("--alpha", audit_alpha, "significance level (default 0.01)");
    a->add_option("--out", audit_out);
    a->add_option("--workers", audit_workers);

    // analytic
    std::string an_target, an_theta, an_attack = "nonuniform";
    int64_t an_n = 1, an_k = 1;
    std::optional<int64_t> an_m, an_sigma;
    double an_px = 0.5, an_mu = 0.1, an_eps = 1e-12;
    bool an_opt = false;
    auto* an = app.add_subcommand("analytic", "closed forms and series evaluators");
    an->add_option("target", an_target, "sampling|attack-error|abort|efficiency|serfling|pzstar")
        ->required()
        ->check(CLI::IsMember(
            {"sampling", "attack-error", "abort", "efficiency", "serfling", "pzstar"}));
    an->add_option("--n", an_n);
    an->add_option("--k", an_k);
    an->add_option("--m", an_m);
    an->add_option("--px", an_px);
    an->add_option("--mu", an_mu);
    an->add_option("--sigma-tot", an_sigma, "error count for the hypergeometric tail");
    an->add_option("--theta", an_theta, "bit string, e.g. 110");
    an->add_option("--attack", an_attack, "nonuniform|leak|both");
    an->add_option("--eps", an_eps, "series tail epsilon (default 1e-12)");
    an->add_flag("--optimize", an_opt, "optimize m for lca efficiency");

    // verify
    std::string level = "full";
    uint64_t verify_seed = 20240809;
    unsigned verify_workers = 0;
    auto* v = app.add_subcommand("verify", "run the acceptance suite");
    v->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));
    v->add_option("--seed", verify_seed);
    v->add_option("--workers", verify_workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadFlags;
    }

    try {
        if (*s) return run_simulate(sim);
        if (*fe) {
            return run_figure_error_curves(px_min, px_max, step, fig_trials, fig_seed, fig_out,
                                           resolve_workers(fig_workers));
        }
        if (*fx) return run_figure_efficiency(nk_max, fig_px, fig_out2);
        if (*a) {
            return run_audit(audit_protocol, audit_n, audit_k, audit_m, audit_px, audit_trials,
                             audit_seed, audit_alpha, audit_out, resolve_workers(audit_workers));
        }
        if (*an) {
            return run_analytic(an_target, an_n, an_k, an_m, an_px, an_mu, an_theta, an_attack,
                                an_eps, an_sigma, an_opt);
        }
        if (*v) {
            Timer timer;
            VerifyOptions opts;
            opts.quick = level == "quick";
            opts.seed = verify_seed;
            opts.workers = resolve_workers(verify_workers);
            std::vector<CheckLine> lines = run_acceptance(opts);
            std::string table;
            bool ok = render_acceptance(lines, table);
            std::cout << table;
            return ok ? 0 : 1;
        }
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFlags;
    } catch (const AllTrialsAborted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStatistical;
    } catch (const SparseBins& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStatistical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
