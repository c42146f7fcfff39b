#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gadgetforge {

enum class PauliAxis : std::uint8_t { X, Y, Z };

char axis_char(PauliAxis a);
PauliAxis axis_from_char(char c);

using PauliFactor = std::pair<int, PauliAxis>;

// Tensor product of single-qubit Paulis, stored as X/Z bit masks.
// Qubit q corresponds to bit q; Y sets both bits. At most 64 qubits.
class PauliString {
public:
    static constexpr int max_index = 63;

    PauliString() = default;
    PauliString(std::initializer_list<PauliFactor> factors);
    explicit PauliString(const std::vector<PauliFactor>& factors);

    static PauliString from_masks(std::uint64_t x, std::uint64_t z);
    static PauliString single(int qubit, PauliAxis axis);
    // "X0 Z1 Y3" or "X0Z1Y3"; "I" or "" is the identity.
    static PauliString parse(std::string_view text);

    std::uint64_t x_mask() const { return x_; }
    std::uint64_t z_mask() const { return z_; }
    std::uint64_t support() const { return x_ | z_; }

    std::vector<PauliFactor> factors() const;
    std::vector<int> qubits() const;
    int weight() const;
    bool is_identity() const { return (x_ | z_) == 0; }
    bool acts_on(int qubit) const;
    PauliAxis axis_at(int qubit) const;
    int max_qubit() const;
    int y_count() const;

    std::string str() const;

    bool operator==(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }
    bool operator!=(const PauliString& o) const { return !(*this == o); }

private:
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

// Display order: weight first, then factor lists lexicographically.
bool display_less(const PauliString& a, const PauliString& b);

struct PauliProduct {
    std::complex<double> phase;
    PauliString product;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

struct PauliTerm {
    double coeff = 0.0;
    PauliString string;
};

inline constexpr double coeff_cutoff = 1e-12;

// Real combination of Pauli strings on n qubits, always kept canonical:
// one term per string, |c| < coeff_cutoff dropped, terms in display order.
class OperatorSum {
public:
    OperatorSum() = default;
    explicit OperatorSum(int n_qubits);
    OperatorSum(int n_qubits, const std::vector<PauliTerm>& terms);

    static OperatorSum identity(int n_qubits, double c = 1.0);
    static OperatorSum term(int n_qubits, double c, const PauliString& s);

    int n_qubits() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    double coeff(const PauliString& s) const;
    bool is_real() const;

    // Same operator on a register of new_n >= n_qubits qubits.
    OperatorSum widened(int new_n) const;
    std::string str() const;

    bool operator==(const OperatorSum& o) const;
    bool operator!=(const OperatorSum& o) const { return !(*this == o); }

private:
    int n_ = 0;
    std::vector<PauliTerm> terms_;
};

OperatorSum add(const OperatorSum& a, const OperatorSum& b);
OperatorSum scale(const OperatorSum& a, double c);
// Operator product. Throws std::domain_error when the result has an
// imaginary part (the product of the two operators is not Hermitian).
OperatorSum product(const OperatorSum& a, const OperatorSum& b);
// i[a, b], Hermitian whenever a and b are.
OperatorSum i_commutator(const OperatorSum& a, const OperatorSum& b);

OperatorSum operator+(const OperatorSum& a, const OperatorSum& b);
OperatorSum operator-(const OperatorSum& a, const OperatorSum& b);
OperatorSum operator-(const OperatorSum& a);
OperatorSum operator*(double c, const OperatorSum& a);
OperatorSum operator*(const OperatorSum& a, double c);
OperatorSum operator*(const OperatorSum& a, const OperatorSum& b);
OperatorSum& operator+=(OperatorSum& a, const OperatorSum& b);

// |0><0| = (I + Z)/2, |1><1| = (I - Z)/2 on the given qubit.
OperatorSum projector_term(int n_qubits, int qubit, int level);

int locality(const OperatorSum& op);

// Cap on dense realization; GADGETFORGE_MAX_QUBITS overrides the default 14.
int max_dense_qubits();

Eigen::MatrixXcd to_matrix(const OperatorSum& op);
// Real symmetric realization; throws std::domain_error if op has
// strings with an odd number of Y factors.
Eigen::MatrixXd to_real_matrix(const OperatorSum& op);

} // namespace gadgetforge
