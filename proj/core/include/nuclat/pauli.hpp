#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nuclat {

/// Tensor product of single-qubit operators I, X, Y, Z — one per qubit.
/// Qubit q addresses bit q (least significant first) of a computational-basis
/// index; labels print qubit 0 as the leftmost character.
class PauliString {
public:
    enum Op : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

    PauliString() = default;
    explicit PauliString(int n_qubits) : ops_(n_qubits, I) {}
    static PauliString from_label(std::string_view label);

    int n_qubits() const { return static_cast<int>(ops_.size()); }
    Op op(int qubit) const { return static_cast<Op>(ops_[qubit]); }
    void set(int qubit, Op op) { ops_[qubit] = op; }

    bool is_identity() const;
    int weight() const; ///< number of non-identity factors

    std::string label() const;

    /// `lhs * rhs` as (phase, string) with phase in {1, i, -1, -i} encoded as
    /// the exponent k of i^k. Strings must have equal length.
    static std::pair<int, PauliString> multiply(const PauliString& lhs, const PauliString& rhs);

    /// Occupation-style action on a basis index: P |bits> = phase * |bits ^ flip_mask()>.
    std::uint64_t flip_mask() const;   ///< qubits carrying X or Y
    std::uint64_t phase_mask() const;  ///< qubits carrying Y or Z (sign from their bits)
    int y_count() const;
    /// Full phase of P|bits>: i^{y_count} * (-1)^{popcount(bits & phase_mask)}.
    std::complex<double> phase_on(std::uint64_t bits) const;

    auto operator<=>(const PauliString&) const = default;

private:
    std::vector<std::uint8_t> ops_;
};

/// Weighted sum of Pauli strings with complex coefficients (MeV). Terms are
/// kept in canonical lexicographic order; zero coefficients (|c| <= 1e-12)
/// are dropped by simplify(), which all mutating entry points call.
class PauliSum {
public:
    static constexpr double kPruneThreshold = 1e-12;

    PauliSum() = default;
    explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

    int n_qubits() const { return n_qubits_; }
    std::size_t n_terms() const { return terms_.size(); }
    const std::map<PauliString, std::complex<double>>& terms() const { return terms_; }

    void add(const PauliString& p, std::complex<double> coeff);
    void add(const PauliSum& other, std::complex<double> scale = 1.0);
    void simplify(); ///< drop |coeff| <= 1e-12 terms

    PauliSum operator*(const PauliSum& rhs) const;
    PauliSum operator+(const PauliSum& rhs) const;
    PauliSum operator-(const PauliSum& rhs) const;
    PauliSum scaled(std::complex<double> factor) const;
    PauliSum adjoint() const;

    bool is_hermitian(double tol = 1e-9) const; ///< all coefficients real
    double max_abs_coeff() const;

    /// Sparse action on a computational-basis state: returns the image as
    /// index -> amplitude. Requires n_qubits <= 64.
    std::map<std::uint64_t, std::complex<double>> apply_to_basis_state(std::uint64_t bits) const;

    /// Dense matrix (2^n x 2^n); guarded against n_qubits > 12.
    Eigen::MatrixXcd dense() const;

    /// One term per line: signed coefficient (9 significant digits, MeV) then
    /// the label, in canonical term order. Hermitian sums only (real parts
    /// are printed; imaginary residue above 1e-9 is an error).
    std::string serialize() const;

private:
    int n_qubits_ = 0;
    std::map<PauliString, std::complex<double>> terms_;
};

} // namespace nuclat
