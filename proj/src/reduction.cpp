#include "gadgetforge/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gadgetforge/errors.hpp"
#include "gadgetforge/gadgets.hpp"

namespace gadgetforge {

int iterations_needed(int k)
{
    if (k < 3) throw ValidationError("k-body reduction needs k >= 3");
    if (k == 3) return 0;
    int s = 0;
    for (long long p = 1; p < k - 2; p *= 2) ++s;
    return s;
}

namespace {

std::pair<PauliString, PauliString> split_ordered(const PauliString& term, const std::vector<int>& order)
{
    const int k = static_cast<int>(order.size());
    if (k < 4) throw ValidationError("partition needs a term of at least 4 bodies");
    const int r = (k + 1) / 2;
    std::vector<PauliFactor> a, b;
    for (int i = 0; i < k; ++i) (i < r ? a : b).emplace_back(order[i], term.axis_at(order[i]));
    return {PauliString(a), PauliString(b)};
}

std::vector<int> chain_of(const PauliString& term, const std::vector<double>& rank)
{
    std::vector<int> q = term.qubits();
    for (int i : q)
        if (i >= static_cast<int>(rank.size())) throw ValidationError("rank table does not cover the term");
    std::stable_sort(q.begin(), q.end(), [&](int a, int b) { return rank[a] < rank[b]; });
    return q;
}

} // namespace

std::pair<PauliString, PauliString> partition_term(const PauliString& term)
{
    return split_ordered(term, term.qubits());
}

std::pair<PauliString, PauliString> partition_term(const PauliString& term, const std::vector<double>& rank)
{
    return split_ordered(term, chain_of(term, rank));
}

double serial_error_budget(const std::vector<double>& per_step_errors)
{
    return std::accumulate(per_step_errors.begin(), per_step_errors.end(), 0.0);
}

ReductionTrace reduce_k_to_3(const OperatorSum& target, double epsilon, const ReductionOptions& opt)
{
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!target.is_real()) throw ValidationError("target must be Hermitian");
    if (locality(target) < 4) throw ValidationError("target has no term above 3-body");

    // final register size: one ancilla per cut, k - 3 per k-body term
    int final_n = target.n_qubits();
    for (const auto& t : target.terms()) final_n += std::max(0, t.string.weight() - 3);
    if (final_n > max_dense_qubits())
        throw DimensionError("reduced system needs " + std::to_string(final_n) + " qubits, cap is " +
                             std::to_string(max_dense_qubits()));

    ReductionTrace trace;
    trace.epsilon = epsilon;

    std::vector<double> rank(static_cast<std::size_t>(target.n_qubits()));
    std::iota(rank.begin(), rank.end(), 0.0);

    const Eigen::VectorXd target_levels = spectrum(target, opt.policy);
    OperatorSum current = target;
    OperatorSum penalty(target.n_qubits());
    std::vector<std::pair<std::string, int>> ancillas;
    int iter = 0;

    while (locality(current) > 3) {
        ++iter;
        const int n = current.n_qubits();
        TargetSpec spec;
        spec.h_else = OperatorSum(n);
        std::vector<PauliTerm> low;
        ReductionIteration rec;
        for (const auto& t : current.terms()) {
            if (t.string.weight() <= 3) {
                low.push_back(t);
                continue;
            }
            auto [a, b] = opt.chain_order ? partition_term(t.string, rank) : partition_term(t.string);
            const int w = n + static_cast<int>(spec.interactions.size());
            spec.interactions.push_back({t.coeff, {a, b}});
            rec.partitions.push_back({t.coeff, a, b, w});
        }
        spec.h_else = OperatorSum(n, low);

        // ancilla sits at the cut between the last A qubit and the first B qubit
        for (const auto& p : rec.partitions) {
            const auto qa = chain_of(p.a, rank);
            const auto qb = chain_of(p.b, rank);
            rank.push_back(0.5 * (rank[qa.back()] + rank[qb.front()]));
        }

        std::vector<double> alphas;
        for (const auto& it : spec.interactions) alphas.push_back(it.alpha);
        rec.h_else_norm = operator_norm(spec.h_else);
        rec.analytical_delta = parallel_subdivision_delta_bound(alphas, rec.h_else_norm, epsilon);
        rec.ancillas_added = static_cast<int>(spec.interactions.size());

        const Eigen::VectorXd prev_levels = spectrum(current, opt.policy);
        auto error_at = [&](double delta) {
            const GadgetBuild g = build_parallel_subdivision_gadget(spec, delta);
            return compare_levels(spectrum(g, opt.policy), prev_levels).max_error;
        };

        rec.delta = rec.analytical_delta;
        if (opt.mode == DeltaMode::Optimized) {
            DeltaSearchOptions so;
            so.epsilon = epsilon;
            so.tol_rel = opt.tol_rel;
            so.max_probes = opt.max_probes;
            so.delta_lo = delta_floor(rec.h_else_norm, spec.sum_abs_alpha(), epsilon);
            so.delta_hi = rec.analytical_delta;
            const DeltaSearchResult sr = minimal_delta(ErrorOfDelta(error_at), so);
            if (sr.achieved_error > epsilon * (1.0 + opt.tol_rel))
                throw NumericalError("iteration " + std::to_string(iter) + ": no gap reaches the error target");
            rec.delta = sr.delta_min;
            rec.search = sr;
        }

        const GadgetBuild g = build_parallel_subdivision_gadget(spec, rec.delta);
        const Eigen::VectorXd levels = spectrum(g, opt.policy);
        rec.measured_error = compare_levels(levels, prev_levels).max_error;
        rec.error_vs_target = compare_levels(levels, target_levels).max_error;
        rec.n_qubits = g.n_qubits();

        penalty = penalty.widened(g.n_qubits()) + g.penalty;
        for (std::size_t j = 0; j < g.ancillas.size(); ++j)
            ancillas.emplace_back("w" + std::to_string(iter) + "_" + std::to_string(j), g.ancillas[j].second);
        current = g.total;
        trace.iterations.push_back(std::move(rec));
    }

    const int N = current.n_qubits();
    GadgetBuild& f = trace.final_gadget;
    f.total = current;
    f.penalty = penalty;
    f.perturbation = current - penalty;
    f.ancillas = ancillas;
    f.delta = trace.iterations.back().delta;
    f.target = target;
    OperatorSum ground = OperatorSum::identity(N);
    for (const auto& a : ancillas) ground = ground * projector_term(N, a.second, 0);
    f.effective_target = target.widened(N) * ground;
    f.system_qubits = target.n_qubits();
    f.locality_cap = 3;

    trace.cumulative_error_budget = static_cast<double>(trace.iterations.size()) * epsilon;
    trace.measured_cumulative_error = trace.iterations.back().error_vs_target;
    return trace;
}

} // namespace gadgetforge
