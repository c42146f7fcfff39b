#include "recipes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gadgetforge/errors.hpp"
#include "gadgetforge/reduction.hpp"
#include "gadgetforge/spectral.hpp"
#include "gadgetforge/target_io.hpp"

namespace gadgetforge::cli {

using nlohmann::json;

// ---- plumbing -------------------------------------------------------------

Sweep parse_sweep(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 4 && parts.size() != 5) throw ValidationError("sweep must be param:lo:hi:n[:log], got " + text);
    Sweep s;
    s.param = parts[0];
    if (s.param != "alpha" && s.param != "eps" && s.param != "delta" && s.param != "z")
        throw ValidationError("unknown sweep parameter " + s.param);
    double lo = 0.0, hi = 0.0;
    long n = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("lo");
        hi = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("hi");
        n = std::stol(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("n");
    } catch (const std::exception&) {
        throw ValidationError("sweep bounds must be numbers: " + text);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || n < 1 || n > 100000) throw ValidationError("bad sweep " + text);
    const bool log = parts.size() == 5;
    if (log && parts[4] != "log") throw ValidationError("sweep spacing must be 'log': " + text);
    if (log) {
        s.values = log_grid(lo, hi, static_cast<int>(n));
    } else {
        for (long i = 0; i < n; ++i) s.values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return s;
}

const Sweep* Config::sweep(const std::string& param) const
{
    for (const auto& s : sweeps)
        if (s.param == param) return &s;
    return nullptr;
}

json Config::echo() const
{
    json j;
    j["command"] = command;
    if (!gadget.empty()) j["gadget"] = gadget;
    if (!alphas.empty()) j["alpha"] = alphas;
    if (eps) j["eps"] = *eps;
    if (delta) j["delta"] = *delta;
    if (helse_norm) j["helse_norm"] = *helse_norm;
    if (target) j["target"] = *target;
    for (const auto& s : sweeps) j["sweep"][s.param] = s.values;
    j["order"] = order;
    j["zgrid"] = zgrid;
    j["no_v3"] = no_v3;
    j["no_4local"] = no_4local;
    j["tol_rel"] = tol_rel;
    return j;
}

namespace {

std::string with_suffix(const std::string& path, const std::string& suffix)
{
    if (suffix.empty()) return path;
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + suffix;
    return path.substr(0, dot) + "_" + suffix + path.substr(dot);
}

} // namespace

void Output::add(const std::string& suffix, CsvTable table, json grid)
{
    if (!grid.is_null()) grids_[suffix.empty() ? "main" : suffix] = std::move(grid);
    tables_.emplace_back(suffix, std::move(table));
}

void Output::flush(double runtime_seconds) const
{
    json side;
    side["tool"] = "gadgetforge";
    side["version"] = version;
    side["config"] = cfg_.echo();
    side["grids"] = grids_;
    side["results"] = meta_;
    side["runtime_seconds"] = runtime_seconds;
    json files = json::array();
    for (const auto& [suffix, table] : tables_) {
        if (cfg_.out.empty()) {
            if (tables_.size() > 1) std::cout << "# " << (suffix.empty() ? "main" : suffix) << "\n";
            std::cout << table.render();
        } else {
            const std::string p = with_suffix(cfg_.out, suffix);
            write_csv(table, p);
            files.push_back(p);
        }
    }
    if (!cfg_.out.empty()) {
        side["files"] = files;
        write_file_atomic(cfg_.out + ".json", side.dump(2) + "\n");
    } else if (!meta_.empty()) {
        std::cerr << meta_.dump() << "\n";
    }
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f)
{
    unsigned hw = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (hw <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < hw; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

PauliString ps(const char* s) { return PauliString::parse(s); }

const std::vector<std::string> gadget_names = {"subdivision", "par-sub", "3to2", "3to2-ot06",
                                               "5th-zzz",     "yy",      "par-3to2"};

void require_gadget(const Config& cfg)
{
    if (cfg.gadget.empty()) throw ValidationError("--gadget is required");
    if (std::find(gadget_names.begin(), gadget_names.end(), cfg.gadget) == gadget_names.end())
        throw ValidationError("unknown gadget " + cfg.gadget);
}

double require_eps(const Config& cfg, double fallback = -1.0)
{
    const double e = cfg.eps.value_or(fallback);
    if (!(e > 0.0)) throw ValidationError("--eps must be positive");
    return e;
}

TargetSpec fig7_target()
{
    return make_target(3, {{0.1, {ps("X0"), ps("Z1"), ps("Z2")}}, {-0.2, {ps("X0"), ps("X1"), ps("Z2")}}});
}

TargetSpec fig8_target()
{
    return make_target(3, {{1.0, {ps("Z0"), ps("Z1"), ps("Z2")}}, {-1.0, {ps("X0"), ps("X1"), ps("X2")}}});
}

TargetSpec default_target(const std::string& gadget, const std::vector<double>& alphas)
{
    const double a = alphas.empty() ? 1.0 : alphas.front();
    if (gadget == "subdivision") return make_target(2, {{a, {ps("Z0"), ps("Z1")}}});
    if (gadget == "par-sub") {
        const std::vector<double> as = alphas.empty() ? std::vector<double>{1.0} : alphas;
        std::vector<Interaction> its;
        for (std::size_t i = 0; i < as.size(); ++i)
            its.push_back({as[i], {PauliString::single(2 * static_cast<int>(i), PauliAxis::Z),
                                   PauliString::single(2 * static_cast<int>(i) + 1, PauliAxis::Z)}});
        return make_target(2 * static_cast<int>(as.size()), its);
    }
    if (gadget == "3to2" || gadget == "3to2-ot06" || gadget == "5th-zzz")
        return make_target(3, {{a, {ps("Z0"), ps("Z1"), ps("Z2")}}});
    if (gadget == "yy") return make_target(2, {{a, {ps("Y0"), ps("Y1")}}});
    if (gadget == "par-3to2") {
        if (alphas.empty()) return fig7_target();
        std::vector<Interaction> its;
        for (double x : alphas) its.push_back({x, {ps("X0"), ps("Z1"), ps("Z2")}});
        if (its.size() > 1) throw ValidationError("par-3to2 with several alphas needs --target");
        return make_target(3, its);
    }
    throw ValidationError("unknown gadget " + gadget);
}

TargetSpec target_for(const Config& cfg, const std::vector<double>& alphas)
{
    if (cfg.target) return load_target(*cfg.target);
    return default_target(cfg.gadget, alphas);
}

TargetSpec target_for(const Config& cfg) { return target_for(cfg, cfg.alphas); }

ParallelThreeToTwoOptions par_options(const Config& cfg, ThreeToTwoVariant v = ThreeToTwoVariant::Improved)
{
    ParallelThreeToTwoOptions o;
    o.include_v3 = !cfg.no_v3;
    o.include_4local_gadgets = !cfg.no_4local;
    o.s1_mode = cfg.s1_count ? S1Mode::Count : S1Mode::Indicator;
    o.variant = v;
    return o;
}

GadgetBuilder builder_for(const std::string& gadget, const TargetSpec& t, const ParallelThreeToTwoOptions& po = {})
{
    if (gadget == "subdivision") return [t](double d) { return build_subdivision_gadget(t, d); };
    if (gadget == "par-sub") return [t](double d) { return build_parallel_subdivision_gadget(t, d); };
    if (gadget == "3to2") return [t](double d) { return build_three_to_two_gadget(t, d); };
    if (gadget == "3to2-ot06")
        return [t](double d) { return build_three_to_two_gadget(t, d, ThreeToTwoVariant::OT06); };
    if (gadget == "5th-zzz") return [t](double d) { return build_fifth_order_zzz_gadget(t, d); };
    if (gadget == "yy") return [t](double d) { return build_yy_gadget(t, d); };
    if (gadget == "par-3to2") return [t, po](double d) { return build_parallel_three_to_two_gadget(t, d, po); };
    throw ValidationError("unknown gadget " + gadget);
}

double h_norm(const TargetSpec& t) { return operator_norm(t.h_else); }

std::vector<double> target_alphas(const TargetSpec& t)
{
    std::vector<double> a;
    for (const auto& it : t.interactions) a.push_back(it.alpha);
    return a;
}

std::optional<double> analytic_delta(const std::string& gadget, const TargetSpec& t, double eps)
{
    if (t.interactions.empty()) return std::nullopt;
    const double h = h_norm(t);
    const double a = t.interactions.front().alpha;
    if (gadget == "subdivision") return subdivision_delta_bound(a, h, eps);
    if (gadget == "par-sub") return parallel_subdivision_delta_bound(target_alphas(t), h, eps);
    if (gadget == "3to2") return three_to_two_delta_bound(a, h, eps);
    return std::nullopt;
}

DeltaSearchOptions search_options(const TargetSpec& t, double eps, std::optional<double> hi, double tol)
{
    DeltaSearchOptions o;
    o.epsilon = eps;
    o.tol_rel = tol;
    o.delta_lo = delta_floor(h_norm(t), t.sum_abs_alpha(), eps);
    if (hi && *hi > o.delta_lo) o.delta_hi = hi;
    return o;
}

DeltaSearchResult optimize_one(const std::string& gadget, const TargetSpec& t, double eps, double tol,
                               const ParallelThreeToTwoOptions& po = {})
{
    if (t.sum_abs_alpha() == 0.0) {
        DeltaSearchResult r;
        r.delta_min = delta_floor(h_norm(t), 0.0, eps);
        r.bracket = {r.delta_min, r.delta_min};
        r.note = "no interaction strength; error is zero for every gap";
        return r;
    }
    return minimal_delta(builder_for(gadget, t, po), t.operator_sum(),
                         search_options(t, eps, analytic_delta(gadget, t, eps), tol));
}

// Usable point for a scaling fit: the search bisected to tolerance.
bool fit_ready(const DeltaSearchResult& r) { return r.converged && r.bisected; }

std::vector<double> grid_or(const Config& cfg, const std::string& param, std::vector<double> fallback)
{
    if (const Sweep* s = cfg.sweep(param)) return s->values;
    return fallback;
}

void require_search_ok(const DeltaSearchResult& r, double eps, const std::string& what)
{
    if (r.achieved_error > eps * (1.0 + 1e-3))
        throw NumericalError(what + ": no gap reached error " + format_number(eps) + " (" + r.note + ")");
}

json fit_json(const SlopeFit& f)
{
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points.size()}};
}

std::optional<SlopeFit> fit_converged(const std::vector<double>& eps, const std::vector<DeltaSearchResult>& rs)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (fit_ready(rs[i])) pts.emplace_back(std::log(1.0 / eps[i]), std::log(rs[i].delta_min));
    if (pts.size() < 4) return std::nullopt;
    return fit_slope(pts);
}

} // namespace

// ---- generic commands ------------------------------------------------------

int run_bound(const Config& cfg)
{
    require_gadget(cfg);
    const double eps = require_eps(cfg);
    const double h = cfg.helse_norm.value_or(0.0);
    if (!(h >= 0.0)) throw ValidationError("--helse-norm must be non-negative");
    if (cfg.alphas.empty()) throw ValidationError("--alpha is required");
    double v = 0.0;
    if (cfg.gadget == "subdivision") {
        v = cfg.ot06 ? ot06_subdivision_delta_bound(cfg.alphas.front(), h, eps)
                     : subdivision_delta_bound(cfg.alphas.front(), h, eps);
    } else if (cfg.gadget == "par-sub") {
        v = parallel_subdivision_delta_bound(cfg.alphas, h, eps);
    } else if (cfg.gadget == "3to2") {
        v = three_to_two_delta_bound(cfg.alphas.front(), h, eps);
    } else {
        throw ValidationError("no closed-form gap bound for " + cfg.gadget + "; use optimize");
    }
    std::printf("%s\n", format_number(v).c_str());
    return 0;
}

int run_optimize(const Config& cfg, Output& out)
{
    require_gadget(cfg);
    const std::vector<double> eps_grid = cfg.sweep("eps") ? cfg.sweep("eps")->values : std::vector<double>{require_eps(cfg)};
    const TargetSpec t = target_for(cfg);
    const auto po = par_options(cfg);
    std::vector<DeltaSearchResult> rs(eps_grid.size());
    parallel_for(eps_grid.size(), cfg.threads,
                 [&](std::size_t i) { rs[i] = optimize_one(cfg.gadget, t, eps_grid[i], cfg.tol_rel, po); });

    CsvTable tab({"eps", "delta_min", "achieved_error", "converged", "bisected", "fallback", "probes", "evaluations",
                  "bracket_lo", "bracket_hi", "delta_analytical", "note"});
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        const auto an = analytic_delta(cfg.gadget, t, eps_grid[i]);
        tab.add_row({eps_grid[i], r.delta_min, r.achieved_error, (long long)r.converged, (long long)r.bisected,
                     (long long)r.fallback_used, (long long)r.probes, (long long)r.evaluations, r.bracket.first,
                     r.bracket.second, an ? *an : std::nan(""), r.note});
    }
    out.add("", std::move(tab), json{{"eps", eps_grid}});
    out.meta()["target"] = t.operator_sum().str();
    if (eps_grid.size() >= 4)
        if (auto f = fit_converged(eps_grid, rs)) out.meta()["fit"] = fit_json(*f);
    int rc = 0;
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (rs[i].achieved_error > eps_grid[i] * (1.0 + 1e-3)) {
            std::fprintf(stderr, "error: no gap reached eps %s (%s)\n", format_number(eps_grid[i]).c_str(),
                         rs[i].note.c_str());
            rc = 2;
        }
    return rc;
}

int run_spectrum(const Config& cfg, Output& out)
{
    require_gadget(cfg);
    const TargetSpec t = target_for(cfg);
    const GadgetBuilder b = builder_for(cfg.gadget, t, par_options(cfg));
    if (const Sweep* s = cfg.sweep("delta")) {
        std::vector<double> errs(s->values.size());
        parallel_for(s->values.size(), cfg.threads,
                     [&](std::size_t i) { errs[i] = spectral_error(b(s->values[i])).max_error; });
        CsvTable tab({"delta", "max_error"});
        for (std::size_t i = 0; i < errs.size(); ++i) tab.add_row({s->values[i], errs[i]});
        out.add("", std::move(tab), json{{"delta", s->values}});
        return 0;
    }
    if (!cfg.delta) throw ValidationError("--delta or --sweep delta:... is required");
    const GadgetBuild g = b(*cfg.delta);
    const SpectralReport r = spectral_error(g);
    CsvTable tab({"level", "gadget", "target", "error"});
    for (std::size_t j = 0; j < r.target_levels.size(); ++j)
        tab.add_row({(long long)j, r.gadget_levels[j], r.target_levels[j], r.per_level_error[j]});
    out.add("", std::move(tab));
    out.meta()["max_error"] = r.max_error;
    out.meta()["qubits"] = g.n_qubits();
    out.meta()["locality"] = locality(g.total);
    return 0;
}

int run_selfenergy(const Config& cfg, Output& out)
{
    require_gadget(cfg);
    if (!cfg.delta) throw ValidationError("--delta is required");
    if (cfg.order < 1) throw ValidationError("--order must be at least 1");
    const double eps = require_eps(cfg, 0.05);
    const TargetSpec t = target_for(cfg);
    const GadgetBuild g = builder_for(cfg.gadget, t, par_options(cfg))(*cfg.delta);
    const double max_z = h_norm(t) + t.sum_abs_alpha() + eps;
    const std::vector<double> zs = cfg.sweep("z") ? cfg.sweep("z")->values : z_grid(max_z, cfg.zgrid);
    const SubspaceSplit split = split_subspaces(g.penalty, g.delta / 2.0);

    std::vector<double> ex(zs.size()), se(zs.size());
    parallel_for(zs.size(), cfg.threads, [&](std::size_t i) {
        ex[i] = self_energy_exact(g.total, split, zs[i], g.effective_target).deviation;
        se[i] = self_energy_series(g.penalty, g.perturbation, split, zs[i], cfg.order, g.effective_target).deviation;
    });
    CsvTable tab({"z", "deviation_exact", "deviation_series"});
    for (std::size_t i = 0; i < zs.size(); ++i) tab.add_row({zs[i], ex[i], se[i]});
    out.add("", std::move(tab), json{{"z", {{"max_z", max_z}, {"points", zs.size()}}}});

    const Theorem1Result th = theorem1_check(g.penalty, g.perturbation, g.effective_target, eps, zs);
    out.meta()["theorem1"] = {{"holds", th.holds},         {"norm_condition", th.norm_condition},
                              {"v_norm", th.v_norm},       {"delta", th.delta},
                              {"worst_z", th.worst_z},     {"worst_deviation", th.worst_deviation}};
    return 0;
}

int run_reduce(const Config& cfg, Output& out)
{
    const double eps = require_eps(cfg, 5e-4);
    OperatorSum target;
    if (cfg.target) {
        target = load_target(*cfg.target).operator_sum();
    } else {
        if (cfg.k < 4 || cfg.k > PauliString::max_index + 1) throw ValidationError("--k must be at least 4");
        std::vector<PauliFactor> f;
        for (int q = 0; q < cfg.k; ++q) f.emplace_back(q, PauliAxis::X);
        target = OperatorSum::term(cfg.k, cfg.alpha_or(5e-3), PauliString(f));
    }
    ReductionOptions ro;
    ro.mode = cfg.optimized ? DeltaMode::Optimized : DeltaMode::Analytical;
    ro.tol_rel = cfg.tol_rel;
    const ReductionTrace tr = reduce_k_to_3(target, eps, ro);

    CsvTable tab({"iteration", "ancillas_added", "n_qubits", "delta", "delta_analytical", "helse_norm",
                  "error_step", "error_total", "partitions"});
    for (std::size_t i = 0; i < tr.iterations.size(); ++i) {
        const auto& it = tr.iterations[i];
        std::string parts;
        for (const auto& p : it.partitions)
            parts += (parts.empty() ? "" : "; ") + p.a.str() + " | " + p.b.str() + " -> q" + std::to_string(p.ancilla);
        tab.add_row({(long long)(i + 1), (long long)it.ancillas_added, (long long)it.n_qubits, it.delta,
                     it.analytical_delta, it.h_else_norm, it.measured_error, it.error_vs_target, parts});
    }
    out.add("", std::move(tab));
    out.meta()["iterations"] = tr.iterations.size();
    out.meta()["ancillas"] = tr.final_gadget.ancilla_count();
    out.meta()["cumulative_error"] = tr.measured_cumulative_error;
    out.meta()["error_budget"] = tr.cumulative_error_budget;
    out.meta()["final_locality"] = locality(tr.final_gadget.total);
    return 0;
}

// ---- figure recipes ----------------------------------------------------------

int fig2(const Config& cfg, Output& out)
{
    const double eps = require_eps(cfg, 0.05);
    const std::vector<double> alphas = grid_or(cfg, "alpha", parse_sweep("alpha:-1:1:21").values);
    const TargetSpec unit = default_target("subdivision", {1.0});
    const double d_an = subdivision_delta_bound(1.0, 0.0, eps);
    const DeltaSearchResult num = optimize_one("subdivision", unit, eps, cfg.tol_rel);
    require_search_ok(num, eps, "fig2");
    const double d_num = num.delta_min;

    std::vector<double> e_an(alphas.size()), e_num(alphas.size());
    parallel_for(alphas.size(), cfg.threads, [&](std::size_t i) {
        const TargetSpec t = default_target("subdivision", {alphas[i]});
        e_an[i] = spectral_error(build_subdivision_gadget(t, d_an)).max_error;
        e_num[i] = spectral_error(build_subdivision_gadget(t, d_num)).max_error;
    });
    CsvTable tab({"alpha", "error_analytical", "error_numerical"});
    for (std::size_t i = 0; i < alphas.size(); ++i) tab.add_row({alphas[i], e_an[i], e_num[i]});
    out.add("", std::move(tab), json{{"alpha", alphas}, {"eps", eps}});

    // self-energy deviation over z at alpha = 1
    const double max_z = 1.0 + eps;
    const std::vector<double> zs = z_grid(max_z, cfg.zgrid);
    const GadgetBuild ga = build_subdivision_gadget(unit, d_an), gn = build_subdivision_gadget(unit, d_num);
    const SubspaceSplit sa = split_subspaces(ga.penalty, d_an / 2.0), sn = split_subspaces(gn.penalty, d_num / 2.0);
    std::vector<std::array<double, 4>> dev(zs.size());
    parallel_for(zs.size(), cfg.threads, [&](std::size_t i) {
        dev[i][0] = self_energy_series(ga.penalty, ga.perturbation, sa, zs[i], cfg.order, ga.effective_target).deviation;
        dev[i][1] = self_energy_series(gn.penalty, gn.perturbation, sn, zs[i], cfg.order, gn.effective_target).deviation;
        dev[i][2] = self_energy_exact(ga.total, sa, zs[i], ga.effective_target).deviation;
        dev[i][3] = self_energy_exact(gn.total, sn, zs[i], gn.effective_target).deviation;
    });
    CsvTable sig({"z", "deviation_series_analytical", "deviation_series_numerical", "deviation_exact_analytical",
                  "deviation_exact_numerical", "epsilon"});
    for (std::size_t i = 0; i < zs.size(); ++i) sig.add_row({zs[i], dev[i][0], dev[i][1], dev[i][2], dev[i][3], eps});
    out.add("sigma", std::move(sig), json{{"max_z", max_z}, {"points", zs.size()}, {"order", cfg.order}});

    out.meta()["delta_analytical"] = d_an;
    out.meta()["delta_numerical"] = d_num;
    out.meta()["max_error_analytical"] = *std::max_element(e_an.begin(), e_an.end());
    return 0;
}

namespace {

// Delta over an eps panel and an alpha panel for two constructions.
struct ComparePoint {
    std::string panel;
    double alpha, eps;
    double analytical, numerical, other;
};

json compare_fits(const std::vector<ComparePoint>& pts, const std::vector<DeltaSearchResult>& num,
                  const std::vector<DeltaSearchResult>* other)
{
    std::vector<double> eps;
    std::vector<DeltaSearchResult> a, b;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].panel == "eps") {
            eps.push_back(pts[i].eps);
            a.push_back(num[i]);
            if (other) b.push_back((*other)[i]);
        }
    json j = json::object();
    if (auto f = fit_converged(eps, a)) j["numerical"] = fit_json(*f);
    if (other)
        if (auto f = fit_converged(eps, b)) j["other"] = fit_json(*f);
    return j;
}

} // namespace

int fig_sub_compare(const Config& cfg, Output& out)
{
    const std::vector<double> eps_grid = grid_or(cfg, "eps", parse_sweep("eps:0.001:0.1:17:log").values);
    const std::vector<double> alpha_grid = grid_or(cfg, "alpha", parse_sweep("alpha:0.1:1:10").values);
    const double eps_b = cfg.eps.value_or(0.05);
    std::vector<ComparePoint> pts;
    for (double e : eps_grid) pts.push_back({"eps", 1.0, e, 0, 0, 0});
    for (double a : alpha_grid) pts.push_back({"alpha", a, eps_b, 0, 0, 0});

    std::vector<DeltaSearchResult> num(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        auto& p = pts[i];
        const TargetSpec t = default_target("subdivision", {p.alpha});
        p.analytical = subdivision_delta_bound(p.alpha, 0.0, p.eps);
        p.other = ot06_subdivision_delta_bound(p.alpha, t.h_else, p.eps);
        num[i] = optimize_one("subdivision", t, p.eps, cfg.tol_rel);
        p.numerical = num[i].delta_min;
    });
    CsvTable tab({"panel", "alpha", "eps", "delta_analytical", "delta_numerical", "delta_ot06", "converged"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        tab.add_row({p.panel, p.alpha, p.eps, p.analytical, p.numerical, p.other, (long long)num[i].converged});
    }
    out.add("", std::move(tab), json{{"eps", eps_grid}, {"alpha", alpha_grid}, {"eps_alpha_panel", eps_b}});
    out.meta()["fits"] = compare_fits(pts, num, nullptr);
    return 0;
}

int fig_par_sub(const Config& cfg, Output& out)
{
    const double eps = require_eps(cfg, 5e-4);
    const double alpha = cfg.alpha_or(5e-3);
    if (cfg.k < 4) throw ValidationError("--k must be at least 4");
    std::vector<PauliFactor> f;
    for (int q = 0; q < cfg.k; ++q) f.emplace_back(q, PauliAxis::X);
    const OperatorSum target = OperatorSum::term(cfg.k, alpha, PauliString(f));

    ReductionOptions ra;
    const ReductionTrace an = reduce_k_to_3(target, eps, ra);
    std::optional<ReductionTrace> nu;
    if (!cfg.skip_optimize) {
        ReductionOptions ro;
        ro.mode = DeltaMode::Optimized;
        ro.tol_rel = cfg.tol_rel;
        nu = reduce_k_to_3(target, eps, ro);
    }
    const double nan = std::nan("");
    CsvTable tab({"iteration", "ancillas_added", "n_qubits", "delta_analytical", "delta_numerical",
                  "error_step_analytical", "error_step_numerical", "error_total_analytical", "error_total_numerical",
                  "partitions"});
    for (std::size_t i = 0; i < an.iterations.size(); ++i) {
        const auto& a = an.iterations[i];
        const ReductionIteration* b = nu && i < nu->iterations.size() ? &nu->iterations[i] : nullptr;
        std::string parts;
        for (const auto& p : a.partitions) parts += (parts.empty() ? "" : "; ") + p.a.str() + " | " + p.b.str();
        tab.add_row({(long long)(i + 1), (long long)a.ancillas_added, (long long)a.n_qubits, a.delta,
                     b ? b->delta : nan, a.measured_error, b ? b->measured_error : nan, a.error_vs_target,
                     b ? b->error_vs_target : nan, parts});
    }
    out.add("", std::move(tab), json{{"k", cfg.k}, {"alpha", alpha}, {"eps", eps}});
    out.meta()["iterations"] = an.iterations.size();
    out.meta()["ancillas"] = an.final_gadget.ancilla_count();
    out.meta()["cumulative_error_analytical"] = an.measured_cumulative_error;
    out.meta()["error_budget"] = an.cumulative_error_budget;
    return 0;
}

int fig_32_compare(const Config& cfg, Output& out)
{
    const std::vector<double> eps_grid = grid_or(cfg, "eps", parse_sweep("eps:0.001:0.1:17:log").values);
    const std::vector<double> alpha_grid = grid_or(cfg, "alpha", parse_sweep("alpha:0.1:1:10").values);
    const double eps_b = cfg.eps.value_or(0.01);
    std::vector<ComparePoint> pts;
    for (double e : eps_grid) pts.push_back({"eps", 1.0, e, 0, 0, 0});
    for (double a : alpha_grid) pts.push_back({"alpha", a, eps_b, 0, 0, 0});

    std::vector<DeltaSearchResult> num(pts.size()), ot(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        auto& p = pts[i];
        const TargetSpec t = default_target("3to2", {p.alpha});
        p.analytical = three_to_two_delta_bound(p.alpha, 0.0, p.eps);
        num[i] = optimize_one("3to2", t, p.eps, cfg.tol_rel);
        ot[i] = optimize_one("3to2-ot06", t, p.eps, cfg.tol_rel);
        p.numerical = num[i].delta_min;
        p.other = ot[i].delta_min;
    });
    CsvTable tab({"panel", "alpha", "eps", "delta_analytical", "delta_numerical", "delta_ot06", "converged_numerical",
                  "converged_ot06"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        tab.add_row({p.panel, p.alpha, p.eps, p.analytical, p.numerical, p.other, (long long)num[i].converged,
                     (long long)ot[i].converged});
    }
    out.add("", std::move(tab), json{{"eps", eps_grid}, {"alpha", alpha_grid}, {"eps_alpha_panel", eps_b}});
    out.meta()["fits"] = compare_fits(pts, num, &ot);
    return 0;
}

int fig_5th(const Config& cfg, Output& out)
{
    const double alpha = cfg.alpha_or(0.1);
    const std::vector<double> eps_grid =
        grid_or(cfg, "eps", log_grid(std::pow(10.0, -0.7), std::pow(10.0, -2.3), 14));
    const std::vector<double> alpha_grid = grid_or(cfg, "alpha", parse_sweep("alpha:0.1:1:10").values);
    const double eps_b = cfg.eps.value_or(0.01);
    std::vector<ComparePoint> pts;
    for (double e : eps_grid) pts.push_back({"eps", alpha, e, 0, 0, 0});
    for (double a : alpha_grid) pts.push_back({"alpha", a, eps_b, 0, 0, 0});

    std::vector<DeltaSearchResult> num(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        const TargetSpec t = default_target("5th-zzz", {pts[i].alpha});
        num[i] = optimize_one("5th-zzz", t, pts[i].eps, cfg.tol_rel);
    });
    CsvTable tab({"panel", "alpha", "eps", "inv_eps", "delta_min", "achieved_error", "converged", "bisected"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        tab.add_row({p.panel, p.alpha, p.eps, 1.0 / p.eps, num[i].delta_min, num[i].achieved_error,
                     (long long)num[i].converged, (long long)num[i].bisected});
    }
    out.add("", std::move(tab), json{{"eps", eps_grid}, {"alpha_eps_panel", alpha}, {"alpha", alpha_grid},
                                     {"eps_alpha_panel", eps_b}});
    const json fits = compare_fits(pts, num, nullptr);
    out.meta()["fits"] = fits;
    if (fits.contains("numerical")) std::fprintf(stderr, "slope %s\n", format_number(fits["numerical"]["slope"]).c_str());
    return 0;
}

int fig_par3_bound(const Config& cfg, Output& out)
{
    const double eps = require_eps(cfg, 0.01);
    const TargetSpec t = cfg.target ? load_target(*cfg.target) : fig7_target();
    ParallelThreeToTwoOptions po = par_options(cfg);
    po.include_v3 = true;
    const DeltaSearchResult opt = optimize_one("par-3to2", t, eps, cfg.tol_rel, po);
    require_search_ok(opt, eps, "fig-par3-bound");
    const double d = opt.delta_min;
    const GadgetBuild g = build_parallel_three_to_two_gadget(t, d, po);
    const SubspaceSplit split = split_subspaces(g.penalty, d / 2.0);
    const double max_z = h_norm(t) + t.sum_abs_alpha() + eps;
    const std::vector<double> zs = z_grid(max_z, cfg.zgrid);

    const int kmin = 3, kmax = 8;
    std::vector<double> meas(kmax - kmin + 1, 0.0);
    std::vector<HighOrderBound> bounds;
    for (int k = kmin; k <= kmax; ++k)
        bounds.push_back(parallel_high_order_bound(k, static_cast<int>(t.interactions.size()), target_alphas(t),
                                                   h_norm(t), d, max_z));
    std::mutex mu;
    parallel_for(zs.size(), cfg.threads, [&](std::size_t i) {
        std::vector<double> local;
        for (int k = kmin; k <= kmax; ++k)
            local.push_back(high_order_term_norm(g.penalty, g.perturbation, split, zs[i], k));
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t j = 0; j < local.size(); ++j) meas[j] = std::max(meas[j], local[j]);
    });
    CsvTable tab({"k", "order", "measured_norm", "bound", "ratio"});
    for (int k = kmin; k <= kmax; ++k) {
        const double m = meas[k - kmin], b = bounds[k - kmin].order_bound;
        tab.add_row({(long long)k, (long long)(k + 2), m, b, m / b});
    }
    out.add("", std::move(tab), json{{"max_z", max_z}, {"z_points", zs.size()}, {"delta", d}});

    // compensated vs uncompensated error, three decades above the optimum
    const std::vector<double> ds =
        grid_or(cfg, "delta", log_grid(10.0 * d, 1e4 * d, 13));
    ParallelThreeToTwoOptions nv = po;
    nv.include_v3 = false;
    std::vector<double> ev(ds.size()), en(ds.size());
    parallel_for(ds.size(), cfg.threads, [&](std::size_t i) {
        ev[i] = spectral_error(build_parallel_three_to_two_gadget(t, ds[i], po)).max_error;
        en[i] = spectral_error(build_parallel_three_to_two_gadget(t, ds[i], nv)).max_error;
    });
    CsvTable cmp({"delta", "error_v3", "error_no_v3", "ratio"});
    for (std::size_t i = 0; i < ds.size(); ++i) cmp.add_row({ds[i], ev[i], en[i], en[i] / ev[i]});
    out.add("v3", std::move(cmp), json{{"delta", ds}});

    out.meta()["delta_opt"] = d;
    out.meta()["error_at_opt"] = opt.achieved_error;
    out.meta()["error_no_v3_at_opt"] = spectral_error(build_parallel_three_to_two_gadget(t, d, nv)).max_error;
    return 0;
}

int fig_par3_scaling(const Config& cfg, Output& out)
{
    const std::vector<double> eps_grid = grid_or(cfg, "eps", parse_sweep("eps:0.01:0.1:9:log").values);
    const TargetSpec t = cfg.target ? load_target(*cfg.target) : fig8_target();
    const auto po = par_options(cfg);
    const auto pb = par_options(cfg, ThreeToTwoVariant::OT06);
    std::vector<DeltaSearchResult> imp(eps_grid.size()), old(eps_grid.size());
    parallel_for(2 * eps_grid.size(), cfg.threads, [&](std::size_t i) {
        const std::size_t j = i / 2;
        if (i % 2 == 0) imp[j] = optimize_one("par-3to2", t, eps_grid[j], cfg.tol_rel, po);
        else old[j] = optimize_one("par-3to2", t, eps_grid[j], cfg.tol_rel, pb);
    });
    CsvTable tab({"eps", "inv_eps", "delta_improved", "delta_bdlt08", "error_improved", "error_bdlt08",
                  "converged_improved", "converged_bdlt08"});
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
        tab.add_row({eps_grid[i], 1.0 / eps_grid[i], imp[i].delta_min, old[i].delta_min, imp[i].achieved_error,
                     old[i].achieved_error, (long long)imp[i].converged, (long long)old[i].converged});
    out.add("", std::move(tab), json{{"eps", eps_grid}});
    json fits = json::object();
    if (auto f = fit_converged(eps_grid, imp)) fits["improved"] = fit_json(*f);
    if (auto f = fit_converged(eps_grid, old)) fits["bdlt08"] = fit_json(*f);
    out.meta()["fits"] = fits;
    return 0;
}

} // namespace gadgetforge::cli
