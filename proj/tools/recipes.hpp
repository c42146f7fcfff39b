#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gadgetforge/csv.hpp"
#include "gadgetforge/gadgets.hpp"
#include "gadgetforge/search.hpp"

namespace gadgetforge::cli {

inline constexpr const char* version = "0.1.0";

struct Sweep {
    std::string param;
    std::vector<double> values;
};

// param:lo:hi:n[:log]
Sweep parse_sweep(const std::string& text);

struct Config {
    std::string command;
    std::string gadget;
    std::vector<double> alphas;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<double> helse_norm;
    std::optional<std::string> target;
    std::vector<Sweep> sweeps;
    int order = 3;
    int zgrid = 201;
    bool no_v3 = false;
    bool no_4local = false;
    bool ot06 = false;
    bool optimized = false;
    bool skip_optimize = false;
    bool s1_count = false;
    int k = 7;
    double tol_rel = 1e-5;
    int threads = 0;
    std::string out;

    const Sweep* sweep(const std::string& param) const;
    double alpha_or(double fallback) const { return alphas.empty() ? fallback : alphas.front(); }
    nlohmann::json echo() const;
};

// Collects the tables a command produces and writes them with a sidecar.
class Output {
public:
    explicit Output(const Config& cfg) : cfg_(cfg) {}

    void add(const std::string& suffix, CsvTable table, nlohmann::json grid = {});
    nlohmann::json& meta() { return meta_; }
    // Writes CSVs (stdout when --out is absent) and the sidecar.
    void flush(double runtime_seconds) const;

private:
    const Config& cfg_;
    std::vector<std::pair<std::string, CsvTable>> tables_;
    nlohmann::json grids_ = nlohmann::json::object();
    nlohmann::json meta_ = nlohmann::json::object();
};

// Evaluates f(0..n-1) on a small worker pool; results in index order.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

int run_bound(const Config& cfg);
int run_optimize(const Config& cfg, Output& out);
int run_spectrum(const Config& cfg, Output& out);
int run_selfenergy(const Config& cfg, Output& out);
int run_reduce(const Config& cfg, Output& out);

int fig2(const Config& cfg, Output& out);
int fig_sub_compare(const Config& cfg, Output& out);
int fig_par_sub(const Config& cfg, Output& out);
int fig_32_compare(const Config& cfg, Output& out);
int fig_5th(const Config& cfg, Output& out);
int fig_par3_bound(const Config& cfg, Output& out);
int fig_par3_scaling(const Config& cfg, Output& out);

} // namespace gadgetforge::cli
