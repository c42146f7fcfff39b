#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gadgetforge/errors.hpp"
#include "recipes.hpp"

using namespace gadgetforge;
using namespace gadgetforge::cli;

namespace {

struct Raw {
    std::vector<std::string> sweeps;
    std::vector<double> alphas;
    double eps = 0.0, delta = 0.0, helse = 0.0;
    std::string target;
};

void add_common(CLI::App* app, Config& cfg, Raw& raw, bool gadget)
{
    if (gadget) app->add_option("--gadget", cfg.gadget, "subdivision, par-sub, 3to2, 3to2-ot06, 5th-zzz, yy, par-3to2");
    app->add_option("--alpha", raw.alphas, "interaction strength(s)")->delimiter(',');
    app->add_option("--eps", raw.eps, "spectral error target");
    app->add_option("--delta", raw.delta, "penalty gap");
    app->add_option("--helse-norm", raw.helse, "norm of the remaining Hamiltonian");
    app->add_option("--target", raw.target, "target JSON file");
    app->add_option("--sweep", raw.sweeps, "param:lo:hi:n[:log]");
    app->add_option("--order", cfg.order, "self-energy series order");
    app->add_option("--zgrid", cfg.zgrid, "points on the z grid");
    app->add_option("--tol-rel", cfg.tol_rel, "relative tolerance for the gap search");
    app->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    app->add_option("--out", cfg.out, "CSV output path; a .json sidecar is written next to it");
    app->add_flag("--no-v3", cfg.no_v3, "drop the third-order compensation");
    app->add_flag("--no-4local", cfg.no_4local, "skip 4-local sub-gadgets");
    app->add_flag("--s1-count", cfg.s1_count, "count anticommuting pairs instead of the indicator");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Perturbative gadget construction and gap optimization"};
    app.set_version_flag("--version", std::string("gadgetforge ") + version);
    app.require_subcommand(1);

    Config cfg;
    Raw raw;
    std::vector<std::pair<CLI::App*, std::string>> subs;
    auto sub = [&](const std::string& name, const std::string& help, bool gadget = false) {
        CLI::App* s = app.add_subcommand(name, help);
        add_common(s, cfg, raw, gadget);
        subs.emplace_back(s, name);
        return s;
    };

    sub("bound", "closed-form minimal gap", true)->add_flag("--ot06", cfg.ot06, "older subdivision bound");
    sub("optimize", "numerically minimal gap for an error target", true);
    sub("spectrum", "gadget spectrum against the target", true);
    sub("selfenergy", "self-energy deviation over z", true);
    CLI::App* red = sub("reduce", "reduce a k-body term to 3-body");
    red->add_option("--k", cfg.k, "body count of the default X...X target");
    red->add_flag("--optimized", cfg.optimized, "search the gap at every iteration");
    sub("fig2", "subdivision error versus alpha");
    sub("fig-sub-compare", "subdivision gap versus eps and alpha");
    CLI::App* ps = sub("fig-par-sub", "parallel subdivision of a k-body term");
    ps->add_option("--k", cfg.k, "body count");
    ps->add_flag("--skip-optimize", cfg.skip_optimize, "analytical gaps only");
    sub("fig-32-compare", "3-to-2 gap versus eps and alpha");
    sub("fig-5th", "fifth-order gadget scaling")->alias("fig6");
    sub("fig-par3-bound", "parallel 3-to-2 high-order terms and compensation");
    sub("fig-par3-scaling", "parallel 3-to-2 gap scaling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        for (const auto& [s, name] : subs) {
            if (!s->parsed()) continue;
            cfg.command = name;
            cfg.alphas = raw.alphas;
            if (s->count("--eps")) cfg.eps = raw.eps;
            if (s->count("--delta")) cfg.delta = raw.delta;
            if (s->count("--helse-norm")) cfg.helse_norm = raw.helse;
            if (s->count("--target")) cfg.target = raw.target;
            for (const auto& text : raw.sweeps) cfg.sweeps.push_back(parse_sweep(text));
            if (cfg.zgrid < 2) throw ValidationError("--zgrid must be at least 2");
            if (!(cfg.tol_rel > 0.0 && cfg.tol_rel < 1.0)) throw ValidationError("--tol-rel must lie in (0, 1)");
        }
        if (cfg.command == "bound") return run_bound(cfg);

        Output out(cfg);
        int rc = 0;
        const std::string& c = cfg.command;
        if (c == "optimize") rc = run_optimize(cfg, out);
        else if (c == "spectrum") rc = run_spectrum(cfg, out);
        else if (c == "selfenergy") rc = run_selfenergy(cfg, out);
        else if (c == "reduce") rc = run_reduce(cfg, out);
        else if (c == "fig2") rc = fig2(cfg, out);
        else if (c == "fig-sub-compare") rc = fig_sub_compare(cfg, out);
        else if (c == "fig-par-sub") rc = fig_par_sub(cfg, out);
        else if (c == "fig-32-compare") rc = fig_32_compare(cfg, out);
        else if (c == "fig-5th") rc = fig_5th(cfg, out);
        else if (c == "fig-par3-bound") rc = fig_par3_bound(cfg, out);
        else if (c == "fig-par3-scaling") rc = fig_par3_scaling(cfg, out);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.flush(secs);
        return rc;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
