#include "gadgetforge/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "gadgetforge/errors.hpp"

namespace gadgetforge {

namespace {

using cd = std::complex<double>;

// i^k for k mod 4
cd i_pow(int k)
{
    switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

void check_index(int q)
{
    if (q < 0 || q > PauliString::max_index)
        throw ValidationError("qubit index out of range: " + std::to_string(q));
}

} // namespace

char axis_char(PauliAxis a)
{
    switch (a) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
    }
    return '?';
}

PauliAxis axis_from_char(char c)
{
    switch (c) {
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default: throw ValidationError(std::string("unknown Pauli axis '") + c + "'");
    }
}

PauliString::PauliString(std::initializer_list<PauliFactor> factors)
    : PauliString(std::vector<PauliFactor>(factors))
{
}

PauliString::PauliString(const std::vector<PauliFactor>& factors)
{
    for (const auto& [q, a] : factors) {
        check_index(q);
        const std::uint64_t bit = std::uint64_t{1} << q;
        if ((x_ | z_) & bit)
            throw ValidationError("duplicate qubit index " + std::to_string(q) + " in Pauli string");
        if (a != PauliAxis::Z) x_ |= bit;
        if (a != PauliAxis::X) z_ |= bit;
    }
}

PauliString PauliString::from_masks(std::uint64_t x, std::uint64_t z)
{
    PauliString s;
    s.x_ = x;
    s.z_ = z;
    return s;
}

PauliString PauliString::single(int qubit, PauliAxis axis)
{
    return PauliString({{qubit, axis}});
}

PauliString PauliString::parse(std::string_view text)
{
    std::vector<PauliFactor> f;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '*' || text[i] == '\t')) ++i;
    };
    skip();
    if (text.substr(i) == "I") return {};
    while (i < text.size()) {
        const PauliAxis a = axis_from_char(text[i++]);
        std::size_t j = i;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
        if (j == i) throw ValidationError("missing qubit index in '" + std::string(text) + "'");
        f.emplace_back(std::stoi(std::string(text.substr(i, j - i))), a);
        i = j;
        skip();
    }
    return PauliString(f);
}

std::vector<PauliFactor> PauliString::factors() const
{
    std::vector<PauliFactor> out;
    std::uint64_t s = support();
    while (s) {
        const int q = std::countr_zero(s);
        out.emplace_back(q, axis_at(q));
        s &= s - 1;
    }
    return out;
}

std::vector<int> PauliString::qubits() const
{
    std::vector<int> out;
    std::uint64_t s = support();
    while (s) {
        out.push_back(std::countr_zero(s));
        s &= s - 1;
    }
    return out;
}

int PauliString::weight() const { return std::popcount(support()); }

bool PauliString::acts_on(int qubit) const
{
    return qubit >= 0 && qubit <= max_index && ((support() >> qubit) & 1u);
}

PauliAxis PauliString::axis_at(int qubit) const
{
    if (!acts_on(qubit)) throw ValidationError("string has no factor on qubit " + std::to_string(qubit));
    const bool x = (x_ >> qubit) & 1u;
    const bool z = (z_ >> qubit) & 1u;
    if (x && z) return PauliAxis::Y;
    return x ? PauliAxis::X : PauliAxis::Z;
}

int PauliString::max_qubit() const
{
    const std::uint64_t s = support();
    return s ? 63 - std::countl_zero(s) : -1;
}

int PauliString::y_count() const { return std::popcount(x_ & z_); }

std::string PauliString::str() const
{
    if (is_identity()) return "I";
    std::string out;
    for (const auto& [q, a] : factors()) {
        if (!out.empty()) out += ' ';
        out += axis_char(a);
        out += std::to_string(q);
    }
    return out;
}

bool display_less(const PauliString& a, const PauliString& b)
{
    if (a.weight() != b.weight()) return a.weight() < b.weight();
    const auto fa = a.factors();
    const auto fb = b.factors();
    return fa < fb;
}

PauliProduct multiply(const PauliString& a, const PauliString& b)
{
    // P = i^y X^x Z^z, and Z^za X^xb = (-1)^|za & xb| X^xb Z^za.
    const std::uint64_t xc = a.x_mask() ^ b.x_mask();
    const std::uint64_t zc = a.z_mask() ^ b.z_mask();
    const int ya = a.y_count();
    const int yb = b.y_count();
    const int yc = std::popcount(xc & zc);
    const int swaps = std::popcount(a.z_mask() & b.x_mask());
    return {i_pow(ya + yb - yc + 2 * swaps), PauliString::from_masks(xc, zc)};
}

bool commutes(const PauliString& a, const PauliString& b)
{
    const std::uint64_t anti = (a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask());
    return std::popcount(anti) % 2 == 0;
}

// ---------------------------------------------------------------------------

namespace {

using Key = std::pair<std::uint64_t, std::uint64_t>;

std::vector<PauliTerm> canonical(const std::map<Key, double>& acc)
{
    std::vector<PauliTerm> out;
    out.reserve(acc.size());
    for (const auto& [k, c] : acc) {
        if (!std::isfinite(c)) throw ValidationError("non-finite Pauli coefficient");
        if (std::abs(c) < coeff_cutoff) continue;
        out.push_back({c, PauliString::from_masks(k.first, k.second)});
    }
    std::sort(out.begin(), out.end(),
              [](const PauliTerm& x, const PauliTerm& y) { return display_less(x.string, y.string); });
    return out;
}

void check_fits(int n, const PauliString& s)
{
    if (s.max_qubit() >= n)
        throw ValidationError("Pauli string " + s.str() + " exceeds register of " + std::to_string(n) + " qubits");
}

} // namespace

OperatorSum::OperatorSum(int n_qubits) : n_(n_qubits)
{
    if (n_qubits < 0 || n_qubits > PauliString::max_index + 1)
        throw ValidationError("invalid qubit count " + std::to_string(n_qubits));
}

OperatorSum::OperatorSum(int n_qubits, const std::vector<PauliTerm>& terms) : OperatorSum(n_qubits)
{
    std::map<Key, double> acc;
    for (const auto& t : terms) {
        check_fits(n_, t.string);
        if (!std::isfinite(t.coeff)) throw ValidationError("non-finite Pauli coefficient");
        acc[{t.string.x_mask(), t.string.z_mask()}] += t.coeff;
    }
    terms_ = canonical(acc);
}

OperatorSum OperatorSum::identity(int n_qubits, double c)
{
    return OperatorSum(n_qubits, {{c, PauliString{}}});
}

OperatorSum OperatorSum::term(int n_qubits, double c, const PauliString& s)
{
    return OperatorSum(n_qubits, {{c, s}});
}

double OperatorSum::coeff(const PauliString& s) const
{
    for (const auto& t : terms_)
        if (t.string == s) return t.coeff;
    return 0.0;
}

bool OperatorSum::is_real() const
{
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.string.y_count() % 2 == 0; });
}

OperatorSum OperatorSum::widened(int new_n) const
{
    if (new_n < n_) throw ValidationError("cannot narrow an operator register");
    OperatorSum out(new_n);
    out.terms_ = terms_;
    return out;
}

std::string OperatorSum::str() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << (t.coeff < 0 ? " - " : " + ");
        else if (t.coeff < 0) os << "-";
        os << std::abs(t.coeff);
        if (!t.string.is_identity()) os << "*" << t.string.str();
        first = false;
    }
    return os.str();
}

bool OperatorSum::operator==(const OperatorSum& o) const
{
    if (n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != o.terms_[i].coeff || terms_[i].string != o.terms_[i].string) return false;
    return true;
}

OperatorSum add(const OperatorSum& a, const OperatorSum& b)
{
    if (a.n_qubits() != b.n_qubits())
        throw ValidationError("qubit count mismatch in add: " + std::to_string(a.n_qubits()) + " vs " +
                              std::to_string(b.n_qubits()));
    std::vector<PauliTerm> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return OperatorSum(a.n_qubits(), t);
}

OperatorSum scale(const OperatorSum& a, double c)
{
    std::vector<PauliTerm> t = a.terms();
    for (auto& x : t) x.coeff *= c;
    return OperatorSum(a.n_qubits(), t);
}

OperatorSum product(const OperatorSum& a, const OperatorSum& b)
{
    if (a.n_qubits() != b.n_qubits()) throw ValidationError("qubit count mismatch in product");
    std::map<Key, std::pair<cd, double>> acc;
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            const auto p = multiply(ta.string, tb.string);
            auto& slot = acc[{p.product.x_mask(), p.product.z_mask()}];
            slot.first += p.phase * (ta.coeff * tb.coeff);
            slot.second += std::abs(ta.coeff * tb.coeff);
        }
    std::map<Key, double> re;
    for (const auto& [k, c] : acc) {
        if (std::abs(c.first.imag()) > 1e-12 * std::max(1.0, c.second))
            throw std::domain_error("operator product has an anti-Hermitian part on " +
                                    PauliString::from_masks(k.first, k.second).str());
        re[k] = c.first.real();
    }
    return OperatorSum(a.n_qubits(), canonical(re));
}

OperatorSum i_commutator(const OperatorSum& a, const OperatorSum& b)
{
    if (a.n_qubits() != b.n_qubits()) throw ValidationError("qubit count mismatch in commutator");
    // Only anticommuting string pairs survive: i[P, Q] = 2i PQ.
    std::map<Key, double> acc;
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            if (commutes(ta.string, tb.string)) continue;
            const auto p = multiply(ta.string, tb.string);
            const cd c = cd(0.0, 2.0) * p.phase * (ta.coeff * tb.coeff);
            acc[{p.product.x_mask(), p.product.z_mask()}] += c.real();
        }
    return OperatorSum(a.n_qubits(), canonical(acc));
}

OperatorSum operator+(const OperatorSum& a, const OperatorSum& b) { return add(a, b); }
OperatorSum operator-(const OperatorSum& a, const OperatorSum& b) { return add(a, scale(b, -1.0)); }
OperatorSum operator-(const OperatorSum& a) { return scale(a, -1.0); }
OperatorSum operator*(double c, const OperatorSum& a) { return scale(a, c); }
OperatorSum operator*(const OperatorSum& a, double c) { return scale(a, c); }
OperatorSum operator*(const OperatorSum& a, const OperatorSum& b) { return product(a, b); }
OperatorSum& operator+=(OperatorSum& a, const OperatorSum& b)
{
    a = add(a, b);
    return a;
}

OperatorSum projector_term(int n_qubits, int qubit, int level)
{
    if (qubit < 0 || qubit >= n_qubits) throw ValidationError("projector qubit out of range");
    if (level != 0 && level != 1) throw ValidationError("projector level must be 0 or 1");
    const double s = level == 0 ? 0.5 : -0.5;
    return OperatorSum(n_qubits, {{0.5, PauliString{}}, {s, PauliString::single(qubit, PauliAxis::Z)}});
}

int locality(const OperatorSum& op)
{
    int k = 0;
    for (const auto& t : op.terms()) k = std::max(k, t.string.weight());
    return k;
}

int max_dense_qubits()
{
    if (const char* env = std::getenv("GADGETFORGE_MAX_QUBITS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 30) return static_cast<int>(v);
        throw ValidationError(std::string("invalid GADGETFORGE_MAX_QUBITS='") + env + "'");
    }
    return 14;
}

namespace {

void check_dim(const OperatorSum& op)
{
    const int cap = max_dense_qubits();
    if (op.n_qubits() > cap)
        throw DimensionError("dense realization of " + std::to_string(op.n_qubits()) +
                             " qubits exceeds the cap of " + std::to_string(cap));
}

} // namespace

Eigen::MatrixXcd to_matrix(const OperatorSum& op)
{
    check_dim(op);
    const Eigen::Index dim = Eigen::Index{1} << op.n_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        const std::uint64_t x = t.string.x_mask();
        const std::uint64_t z = t.string.z_mask();
        const cd base = i_pow(t.string.y_count()) * t.coeff;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const auto u = static_cast<std::uint64_t>(i);
            const double sign = (std::popcount(u & z) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(u ^ x), i) += sign * base;
        }
    }
    return m;
}

Eigen::MatrixXd to_real_matrix(const OperatorSum& op)
{
    if (!op.is_real()) throw std::domain_error("operator has complex matrix elements");
    check_dim(op);
    const Eigen::Index dim = Eigen::Index{1} << op.n_qubits();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        const std::uint64_t x = t.string.x_mask();
        const std::uint64_t z = t.string.z_mask();
        const double base = ((t.string.y_count() / 2) % 2 ? -1.0 : 1.0) * t.coeff;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const auto u = static_cast<std::uint64_t>(i);
            const double sign = (std::popcount(u & z) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(u ^ x), i) += sign * base;
        }
    }
    return m;
}

} // namespace gadgetforge
