#include "nuclat/pauli.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nuclat {

namespace {

constexpr char kOpChars[4] = {'I', 'X', 'Y', 'Z'};

// Single-qubit products a*b -> (phase exponent of i, result op), with ops
// numbered I=0, X=1, Y=2, Z=3. XY = iZ, YZ = iX, ZX = iY and cyclic/reverses.
struct OpProduct {
    std::uint8_t phase; // exponent of i, mod 4
    std::uint8_t op;
};

constexpr OpProduct kOpTable[4][4] = {
    {{0, 0}, {0, 1}, {0, 2}, {0, 3}},
    {{0, 1}, {0, 0}, {1, 3}, {3, 2}},
    {{0, 2}, {3, 3}, {0, 0}, {1, 1}},
    {{0, 3}, {1, 2}, {3, 1}, {0, 0}},
};

constexpr std::complex<double> kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

} // namespace

PauliString PauliString::from_label(std::string_view label) {
    PauliString p(static_cast<int>(label.size()));
    for (std::size_t q = 0; q < label.size(); ++q) {
        switch (label[q]) {
        case 'I': p.ops_[q] = I; break;
        case 'X': p.ops_[q] = X; break;
        case 'Y': p.ops_[q] = Y; break;
        case 'Z': p.ops_[q] = Z; break;
        default: throw std::invalid_argument("PauliString: bad label character");
        }
    }
    return p;
}

bool PauliString::is_identity() const {
    for (std::uint8_t o : ops_)
        if (o != I) return false;
    return true;
}

int PauliString::weight() const {
    int w = 0;
    for (std::uint8_t o : ops_) w += (o != I);
    return w;
}

std::string PauliString::label() const {
    std::string s(ops_.size(), 'I');
    for (std::size_t q = 0; q < ops_.size(); ++q) s[q] = kOpChars[ops_[q]];
    return s;
}

std::pair<int, PauliString> PauliString::multiply(const PauliString& lhs, const PauliString& rhs) {
    if (lhs.n_qubits() != rhs.n_qubits())
        throw std::invalid_argument("PauliString::multiply: qubit count mismatch");
    PauliString out(lhs.n_qubits());
    int phase = 0;
    for (std::size_t q = 0; q < lhs.ops_.size(); ++q) {
        const OpProduct p = kOpTable[lhs.ops_[q]][rhs.ops_[q]];
        phase += p.phase;
        out.ops_[q] = p.op;
    }
    return {phase & 3, out};
}

std::uint64_t PauliString::flip_mask() const {
    if (ops_.size() > 64) throw std::runtime_error("PauliString: > 64 qubits unsupported here");
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < ops_.size(); ++q)
        if (ops_[q] == X || ops_[q] == Y) m |= 1ull << q;
    return m;
}

std::uint64_t PauliString::phase_mask() const {
    if (ops_.size() > 64) throw std::runtime_error("PauliString: > 64 qubits unsupported here");
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < ops_.size(); ++q)
        if (ops_[q] == Y || ops_[q] == Z) m |= 1ull << q;
    return m;
}

int PauliString::y_count() const {
    int n = 0;
    for (std::uint8_t o : ops_) n += (o == Y);
    return n;
}

std::complex<double> PauliString::phase_on(std::uint64_t bits) const {
    int exponent = y_count() & 3;
    if (__builtin_parityll(bits & phase_mask())) exponent = (exponent + 2) & 3;
    return kPhases[exponent];
}

void PauliSum::add(const PauliString& p, std::complex<double> coeff) {
    if (p.n_qubits() != n_qubits_)
        throw std::invalid_argument("PauliSum::add: qubit count mismatch");
    auto [it, inserted] = terms_.try_emplace(p, coeff);
    if (!inserted) {
        it->second += coeff;
        if (std::abs(it->second) <= kPruneThreshold) terms_.erase(it);
    } else if (std::abs(coeff) <= kPruneThreshold) {
        terms_.erase(it);
    }
}

void PauliSum::add(const PauliSum& other, std::complex<double> scale) {
    if (other.n_qubits_ != n_qubits_)
        throw std::invalid_argument("PauliSum::add: qubit count mismatch");
    for (const auto& [p, c] : other.terms_) add(p, c * scale);
}

void PauliSum::simplify() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= kPruneThreshold)
            it = terms_.erase(it);
        else
            ++it;
    }
}

PauliSum PauliSum::operator*(const PauliSum& rhs) const {
    if (rhs.n_qubits_ != n_qubits_)
        throw std::invalid_argument("PauliSum::operator*: qubit count mismatch");
    PauliSum out(n_qubits_);
    for (const auto& [pa, ca] : terms_)
        for (const auto& [pb, cb] : rhs.terms_) {
            auto [phase, p] = PauliString::multiply(pa, pb);
            out.add(p, ca * cb * kPhases[phase]);
        }
    return out;
}

PauliSum PauliSum::operator+(const PauliSum& rhs) const {
    PauliSum out = *this;
    out.add(rhs);
    return out;
}

PauliSum PauliSum::operator-(const PauliSum& rhs) const {
    PauliSum out = *this;
    out.add(rhs, -1.0);
    return out;
}

PauliSum PauliSum::scaled(std::complex<double> factor) const {
    PauliSum out(n_qubits_);
    for (const auto& [p, c] : terms_) out.add(p, c * factor);
    return out;
}

PauliSum PauliSum::adjoint() const {
    PauliSum out(n_qubits_);
    for (const auto& [p, c] : terms_) out.add(p, std::conj(c)); // strings are Hermitian
    return out;
}

bool PauliSum::is_hermitian(double tol) const {
    for (const auto& [p, c] : terms_)
        if (std::abs(c.imag()) > tol) return false;
    return true;
}

double PauliSum::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

std::map<std::uint64_t, std::complex<double>> PauliSum::apply_to_basis_state(
    std::uint64_t bits) const {
    if (n_qubits_ > 64)
        throw std::runtime_error("PauliSum::apply_to_basis_state: > 64 qubits unsupported");
    std::map<std::uint64_t, std::complex<double>> out;
    for (const auto& [p, c] : terms_) {
        const std::uint64_t image = bits ^ p.flip_mask();
        const std::complex<double> amp = c * p.phase_on(bits);
        auto [it, inserted] = out.try_emplace(image, amp);
        if (!inserted) it->second += amp;
    }
    for (auto it = out.begin(); it != out.end();) {
        if (std::abs(it->second) <= kPruneThreshold)
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

Eigen::MatrixXcd PauliSum::dense() const {
    if (n_qubits_ > 12) throw std::runtime_error("PauliSum::dense: more than 12 qubits");
    const std::int64_t dim = std::int64_t(1) << n_qubits_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [p, c] : terms_) {
        const std::uint64_t flip = p.flip_mask();
        for (std::int64_t col = 0; col < dim; ++col)
            m(static_cast<std::int64_t>(col ^ std::int64_t(flip)), col) +=
                c * p.phase_on(static_cast<std::uint64_t>(col));
    }
    return m;
}

std::string PauliSum::serialize() const {
    std::string out;
    char buf[64];
    for (const auto& [p, c] : terms_) {
        if (std::abs(c.imag()) > 1e-9)
            throw std::runtime_error("PauliSum::serialize: non-Hermitian sum");
        std::snprintf(buf, sizeof buf, "%+.8e ", c.real());
        out += buf;
        out += p.label();
        out += '\n';
    }
    return out;
}

} // namespace nuclat
