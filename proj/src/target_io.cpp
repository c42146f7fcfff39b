#include "gadgetforge/target_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gadgetforge/csv.hpp"
#include "gadgetforge/errors.hpp"

namespace gadgetforge {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& what)
{
    throw ValidationError("target schema: " + field + ": " + what);
}

json parse_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

int read_n(const json& j)
{
    if (!j.is_object()) schema("<root>", "expected an object");
    if (!j.contains("n_qubits")) schema("n_qubits", "missing");
    const json& n = j["n_qubits"];
    if (!n.is_number_integer()) schema("n_qubits", "expected an integer");
    const long long v = n.get<long long>();
    if (v < 0 || v > PauliString::max_index + 1) schema("n_qubits", "out of range");
    return static_cast<int>(v);
}

std::vector<PauliTerm> read_terms(const json& j, int n)
{
    std::vector<PauliTerm> out;
    if (!j.contains("terms")) schema("terms", "missing");
    const json& terms = j["terms"];
    if (!terms.is_array()) schema("terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string at = "terms[" + std::to_string(i) + "]";
        const json& t = terms[i];
        if (!t.is_object()) schema(at, "expected an object");
        if (!t.contains("coeff") || !t["coeff"].is_number()) schema(at + ".coeff", "expected a number");
        const double c = t["coeff"].get<double>();
        if (!std::isfinite(c)) schema(at + ".coeff", "not finite");
        if (!t.contains("paulis") || !t["paulis"].is_array()) schema(at + ".paulis", "expected an array");
        std::vector<PauliFactor> f;
        std::set<int> seen;
        for (std::size_t k = 0; k < t["paulis"].size(); ++k) {
            const std::string pat = at + ".paulis[" + std::to_string(k) + "]";
            const json& p = t["paulis"][k];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_string())
                schema(pat, "expected [qubit, \"X\"|\"Y\"|\"Z\"]");
            const long long q = p[0].get<long long>();
            if (q < 0 || q >= n) schema(pat, "qubit index out of range");
            const std::string a = p[1].get<std::string>();
            if (a != "X" && a != "Y" && a != "Z") schema(pat, "axis must be X, Y or Z");
            if (!seen.insert(static_cast<int>(q)).second) schema(pat, "qubit repeated within a term");
            f.emplace_back(static_cast<int>(q), axis_from_char(a[0]));
        }
        out.push_back({c, PauliString(f)});
    }
    return out;
}

json string_json(const PauliString& s)
{
    json ps = json::array();
    for (const auto& [q, a] : s.factors()) ps.push_back(json::array({q, std::string(1, axis_char(a))}));
    return ps;
}

json term_json(double c, const PauliString& s)
{
    json t = json::object();
    t["coeff"] = c;
    t["paulis"] = string_json(s);
    return t;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

OperatorSum parse_operator(const std::string& text)
{
    const json j = parse_text(text);
    const int n = read_n(j);
    return OperatorSum(n, read_terms(j, n));
}

std::string operator_to_json(const OperatorSum& op)
{
    json j = json::object();
    j["n_qubits"] = op.n_qubits();
    j["terms"] = json::array();
    for (const auto& t : op.terms()) j["terms"].push_back(term_json(t.coeff, t.string));
    return dump(j);
}

TargetSpec parse_target(const std::string& text)
{
    const json j = parse_text(text);
    const int n = read_n(j);
    const std::vector<PauliTerm> terms = read_terms(j, n);

    std::vector<bool> tagged(terms.size(), false);
    TargetSpec t;
    if (j.contains("interactions")) {
        const json& ints = j["interactions"];
        if (!ints.is_array()) schema("interactions", "expected an array");
        for (std::size_t i = 0; i < ints.size(); ++i) {
            const std::string at = "interactions[" + std::to_string(i) + "]";
            const json& e = ints[i];
            if (!e.is_object()) schema(at, "expected an object");
            if (!e.contains("term") || !e["term"].is_number_integer()) schema(at + ".term", "expected an integer");
            const long long idx = e["term"].get<long long>();
            if (idx < 0 || idx >= static_cast<long long>(terms.size())) schema(at + ".term", "index out of range");
            if (tagged[idx]) schema(at + ".term", "term tagged twice");
            tagged[idx] = true;
            const PauliTerm& term = terms[idx];
            if (!e.contains("split") || !e["split"].is_array() || e["split"].empty())
                schema(at + ".split", "expected a non-empty array of qubit groups");
            std::uint64_t covered = 0;
            Interaction it;
            it.alpha = term.coeff;
            for (std::size_t g = 0; g < e["split"].size(); ++g) {
                const std::string gat = at + ".split[" + std::to_string(g) + "]";
                const json& grp = e["split"][g];
                if (!grp.is_array() || grp.empty()) schema(gat, "expected a non-empty array of qubits");
                std::vector<PauliFactor> f;
                for (const json& q : grp) {
                    if (!q.is_number_integer()) schema(gat, "qubit must be an integer");
                    const long long v = q.get<long long>();
                    if (v < 0 || v >= n) schema(gat, "qubit index out of range");
                    const std::uint64_t bit = std::uint64_t{1} << v;
                    if (covered & bit) schema(gat, "factor groups overlap on qubit " + std::to_string(v));
                    if (!term.string.acts_on(static_cast<int>(v)))
                        schema(gat, "qubit " + std::to_string(v) + " is not in the term's support");
                    covered |= bit;
                    f.emplace_back(static_cast<int>(v), term.string.axis_at(static_cast<int>(v)));
                }
                it.factors.emplace_back(f);
            }
            if (covered != term.string.support()) schema(at + ".split", "groups do not cover the term's support");
            t.interactions.push_back(std::move(it));
        }
    }
    std::vector<PauliTerm> rest;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (!tagged[i]) rest.push_back(terms[i]);
    t.h_else = OperatorSum(n, rest);
    t.validate();
    return t;
}

std::string target_to_json(const TargetSpec& t)
{
    json j = json::object();
    j["n_qubits"] = t.n_qubits();
    j["terms"] = json::array();
    j["interactions"] = json::array();
    for (const auto& it : t.interactions) {
        json split = json::array();
        for (const auto& f : it.factors) split.push_back(f.qubits());
        json e = json::object();
        e["term"] = j["terms"].size();
        e["split"] = split;
        j["interactions"].push_back(e);
        j["terms"].push_back(term_json(it.alpha, it.string()));
    }
    for (const auto& term : t.h_else.terms()) j["terms"].push_back(term_json(term.coeff, term.string));
    return dump(j);
}

TargetSpec load_target(const std::string& path) { return parse_target(read_file(path)); }

void save_target(const TargetSpec& target, const std::string& path)
{
    write_file_atomic(path, target_to_json(target));
}

bool same_target(const TargetSpec& a, const TargetSpec& b)
{
    if (a.h_else != b.h_else || a.interactions.size() != b.interactions.size()) return false;
    for (std::size_t i = 0; i < a.interactions.size(); ++i) {
        const auto& x = a.interactions[i];
        const auto& y = b.interactions[i];
        if (x.alpha != y.alpha || x.factors != y.factors) return false;
    }
    return true;
}

} // namespace gadgetforge
