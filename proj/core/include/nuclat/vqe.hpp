#pragma once

#include "nuclat/encoding.hpp"
#include "nuclat/pauli.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nuclat {

// ---------------------------------------------------------------------------
// Ansatz
// ---------------------------------------------------------------------------

enum class Entangler { linear, circular };

/// Ry-only hardware-efficient ansatz: an initial Ry layer on every qubit,
/// then n_layers blocks of [CNOT ladder; Ry layer]. The ladder applies
/// CNOT(q, q+1) for q = 0..n-2, plus CNOT(n-1, 0) when circular. Parameter
/// k*n_qubits + q drives the Ry on qubit q in layer k (k = 0 is the initial
/// layer), giving n_qubits * (n_layers + 1) parameters. n_layers = 0 is the
/// bare product ansatz.
struct AnsatzSpec {
    int n_qubits = 1;
    int n_layers = 1;
    Entangler entangler = Entangler::linear;

    int n_params() const { return n_qubits * (n_layers + 1); }
};

/// Depth heuristic used by the pipeline when no override is given.
int default_layers(int dim);

struct GateOp {
    enum Kind { ry, cnot } kind = ry;
    int a = 0; ///< qubit (ry) or control (cnot)
    int b = 0; ///< parameter index (ry) or target (cnot)
};

std::vector<GateOp> build_ansatz(const AnsatzSpec& spec);

/// Exact statevector of the ansatz circuit applied to |0...0>. All gate
/// matrices are real, so amplitudes are real by construction (qubit q = bit q
/// of the basis index). Unit norm to 1e-12.
Eigen::VectorXd simulate(const AnsatzSpec& spec, const Eigen::VectorXd& params);

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

/// <state|observable|state> for a Hermitian PauliSum (real coefficients
/// required; domain error otherwise).
double expectation(const Eigen::VectorXd& state, const PauliSum& observable);

/// <state|observable|state> for a dense symmetric matrix of size 2^n.
double expectation(const Eigen::VectorXd& state, const Eigen::MatrixXd& observable);

/// Energy functional evaluated on simulated states. Three interchangeable
/// backends (cross-checked in tests):
///  - reduced_block: E = c^T H c + lambda (1 - |c|^2) with c the amplitudes
///    gathered at the Gray codewords — the fast path for dim <= 4096;
///  - pauli: term-by-term Pauli expectation of an encoded PauliSum;
///  - dense: full 2^n quadratic form.
class EnergyModel {
public:
    static EnergyModel reduced_block(Eigen::MatrixXd block, GrayCodeMap map, double lambda = 0.0);
    static EnergyModel pauli(PauliSum sum);
    static EnergyModel dense(Eigen::MatrixXd full);

    int n_qubits() const { return n_qubits_; }
    double energy(const Eigen::VectorXd& state) const;

private:
    enum class Kind { block, pauli, dense };
    Kind kind_ = Kind::dense;
    int n_qubits_ = 0;
    Eigen::MatrixXd mat_;
    GrayCodeMap map_;
    double lambda_ = 0.0;
    PauliSum sum_;
};

/// Parameter-shift gradient of E(theta) = model(simulate(spec, theta)):
/// dE/dtheta_k = [E(theta_k + pi/2) - E(theta_k - pi/2)] / 2, exact for Ry
/// generators.
Eigen::VectorXd gradient(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                         const EnergyModel& model);

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

enum class OptimizerKind { adam, lbfgs, adam_then_lbfgs };

struct VqeOptions {
    OptimizerKind optimizer = OptimizerKind::adam_then_lbfgs;
    int adam_iters = 500;
    double adam_lr = 0.05;
    int lbfgs_iters = 1500;
    int lbfgs_memory = 10;
    int restarts = 5;             ///< seeds seed, seed+1, ..
    std::uint64_t seed = 0;
    double init_range = 0.1;      ///< params ~ uniform(-range, +range)
    double tol_residual_mev = 1e-6;
    double grad_floor = 1e-10;
};

struct TracePoint {
    int t = 0;
    double energy_mev = 0.0;
    double residual_mev = 0.0; ///< energy - e0; NaN when e0 absent
    double grad_norm = 0.0;
};

struct VqeTrace {
    std::vector<TracePoint> points; ///< best restart only
    Eigen::VectorXd best_params;
    double final_energy_mev = 0.0;
    std::optional<double> e0_mev;
    bool converged = false;
    int best_seed = 0;
    int iterations = 0;                ///< best restart's iteration count
    long long energy_evaluations = 0;  ///< across all restarts

    /// CSV with header `t,energy_mev,residual_mev,grad_norm` (residual field
    /// empty when no reference energy was supplied).
    std::string to_csv() const;
};

/// Multi-start VQE: runs `restarts` independent optimizations (deterministic
/// seeds) and returns the best trace. Convergence = residual against e0 at or
/// below tol_residual_mev (or gradient floor when e0 is absent); hitting the
/// iteration cap is reported through `converged = false`, not an error.
VqeTrace optimize(const AnsatzSpec& spec, const EnergyModel& model, std::optional<double> e0,
                  const VqeOptions& options = {});

} // namespace nuclat
