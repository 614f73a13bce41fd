#include "nuclat/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <stdexcept>

namespace nuclat {

// ---------------------------------------------------------------------------
// Ansatz and simulation
// ---------------------------------------------------------------------------

int default_layers(int dim) {
    if (dim <= 1) return 0;
    return std::min(2 * ceil_log2(static_cast<std::uint64_t>(dim)), 12);
}

std::vector<GateOp> build_ansatz(const AnsatzSpec& spec) {
    if (spec.n_qubits < 1) throw std::domain_error("build_ansatz: need at least one qubit");
    if (spec.n_layers < 0) throw std::domain_error("build_ansatz: negative layer count");
    std::vector<GateOp> gates;
    const int n = spec.n_qubits;
    for (int q = 0; q < n; ++q) gates.push_back({GateOp::ry, q, q});
    for (int layer = 1; layer <= spec.n_layers; ++layer) {
        for (int q = 0; q + 1 < n; ++q) gates.push_back({GateOp::cnot, q, q + 1});
        if (spec.entangler == Entangler::circular && n >= 2)
            gates.push_back({GateOp::cnot, n - 1, 0});
        for (int q = 0; q < n; ++q) gates.push_back({GateOp::ry, q, layer * n + q});
    }
    return gates;
}

namespace {

void apply_ry(Eigen::VectorXd& psi, int qubit, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::int64_t bit = std::int64_t(1) << qubit;
    const std::int64_t dim = psi.size();
    for (std::int64_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const double a0 = psi[i];
        const double a1 = psi[i | bit];
        psi[i] = c * a0 - s * a1;
        psi[i | bit] = s * a0 + c * a1;
    }
}

void apply_cnot(Eigen::VectorXd& psi, int control, int target) {
    const std::int64_t cbit = std::int64_t(1) << control;
    const std::int64_t tbit = std::int64_t(1) << target;
    const std::int64_t dim = psi.size();
    for (std::int64_t i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(psi[i], psi[i | tbit]);
}

} // namespace

Eigen::VectorXd simulate(const AnsatzSpec& spec, const Eigen::VectorXd& params) {
    if (params.size() != spec.n_params())
        throw std::domain_error("simulate: parameter count does not match the ansatz");
    if (spec.n_qubits > 20) throw std::runtime_error("simulate: more than 20 qubits");
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(std::int64_t(1) << spec.n_qubits);
    psi[0] = 1.0;
    for (const GateOp& g : build_ansatz(spec)) {
        if (g.kind == GateOp::ry)
            apply_ry(psi, g.a, params[g.b]);
        else
            apply_cnot(psi, g.a, g.b);
    }
    return psi;
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

double expectation(const Eigen::VectorXd& state, const PauliSum& observable) {
    if (!observable.is_hermitian())
        throw std::domain_error("expectation: PauliSum observable is not Hermitian");
    if (state.size() != (std::int64_t(1) << observable.n_qubits()))
        throw std::invalid_argument("expectation: state size does not match the observable");
    const std::int64_t dim = state.size();
    double total = 0.0;
    for (const auto& [p, coeff] : observable.terms()) {
        if (p.y_count() & 1) continue; // zero in a real state
        const std::uint64_t flip = p.flip_mask();
        const std::uint64_t sign_mask = p.phase_mask();
        double acc = 0.0;
        for (std::int64_t b = 0; b < dim; ++b) {
            const double v = state[b] * state[static_cast<std::int64_t>(b ^ std::int64_t(flip))];
            acc += __builtin_parityll(static_cast<std::uint64_t>(b) & sign_mask) ? -v : v;
        }
        if (p.y_count() & 2) acc = -acc; // i^{y_count} for even counts
        total += coeff.real() * acc;
    }
    return total;
}

double expectation(const Eigen::VectorXd& state, const Eigen::MatrixXd& observable) {
    if (observable.rows() != state.size() || observable.cols() != state.size())
        throw std::invalid_argument("expectation: dimension mismatch");
    const double scale = std::max(1.0, observable.cwiseAbs().maxCoeff());
    if ((observable - observable.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::domain_error("expectation: dense observable is not symmetric");
    return state.dot(observable * state);
}

EnergyModel EnergyModel::reduced_block(Eigen::MatrixXd block, GrayCodeMap map, double lambda) {
    if (block.rows() != map.dim || block.cols() != map.dim)
        throw std::invalid_argument("EnergyModel: block size does not match the map");
    if (lambda < 0) throw std::domain_error("EnergyModel: lambda must be >= 0");
    EnergyModel m;
    m.kind_ = Kind::block;
    m.n_qubits_ = map.eta;
    m.mat_ = std::move(block);
    m.map_ = std::move(map);
    m.lambda_ = lambda;
    return m;
}

EnergyModel EnergyModel::pauli(PauliSum sum) {
    if (!sum.is_hermitian()) throw std::domain_error("EnergyModel: PauliSum is not Hermitian");
    EnergyModel m;
    m.kind_ = Kind::pauli;
    m.n_qubits_ = sum.n_qubits();
    m.sum_ = std::move(sum);
    return m;
}

EnergyModel EnergyModel::dense(Eigen::MatrixXd full) {
    EnergyModel m;
    m.kind_ = Kind::dense;
    m.n_qubits_ = ceil_log2(static_cast<std::uint64_t>(full.rows()));
    if (full.rows() != (std::int64_t(1) << m.n_qubits_) || full.rows() != full.cols())
        throw std::invalid_argument("EnergyModel: dense observable must be square of size 2^n");
    const double scale = std::max(1.0, full.cwiseAbs().maxCoeff());
    if ((full - full.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::domain_error("EnergyModel: dense observable is not symmetric");
    m.mat_ = std::move(full);
    return m;
}

double EnergyModel::energy(const Eigen::VectorXd& state) const {
    switch (kind_) {
    case Kind::block: {
        Eigen::VectorXd c(map_.dim);
        for (int k = 0; k < map_.dim; ++k) c[k] = state[map_.codes[k]];
        double e = c.dot(mat_ * c);
        if (lambda_ > 0) e += lambda_ * (1.0 - c.squaredNorm());
        return e;
    }
    case Kind::pauli:
        return expectation(state, sum_);
    case Kind::dense:
        return state.dot(mat_ * state);
    }
    return 0.0; // unreachable
}

Eigen::VectorXd gradient(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                         const EnergyModel& model) {
    constexpr double kHalfPi = 1.57079632679489661923;
    Eigen::VectorXd g(params.size());
    Eigen::VectorXd shifted = params;
    for (int k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kHalfPi;
        const double plus = model.energy(simulate(spec, shifted));
        shifted[k] = params[k] - kHalfPi;
        const double minus = model.energy(simulate(spec, shifted));
        shifted[k] = params[k];
        g[k] = 0.5 * (plus - minus);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64_step(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double uniform_unit(std::uint64_t& state) {
    return static_cast<double>(splitmix64_step(state) >> 11) * 0x1.0p-53;
}

struct RunState {
    const AnsatzSpec& spec;
    const EnergyModel& model;
    std::optional<double> e0;
    const VqeOptions& opt;
    Eigen::VectorXd params;
    std::vector<TracePoint> points;
    long long evals = 0;
    int t = 0;
    bool converged = false;

    double energy_at(const Eigen::VectorXd& p) {
        ++evals;
        return model.energy(simulate(spec, p));
    }

    Eigen::VectorXd grad_at(const Eigen::VectorXd& p) {
        evals += 2 * p.size();
        return gradient(spec, p, model);
    }

    /// Records one accepted iterate; returns true when the stop condition is met.
    bool record(double energy, double grad_norm) {
        TracePoint pt;
        pt.t = t++;
        pt.energy_mev = energy;
        pt.residual_mev = e0 ? energy - *e0 : std::numeric_limits<double>::quiet_NaN();
        pt.grad_norm = grad_norm;
        points.push_back(pt);
        if (e0 && pt.residual_mev <= opt.tol_residual_mev) {
            converged = true;
            return true;
        }
        if (!e0 && grad_norm <= opt.grad_floor) {
            converged = true;
            return true;
        }
        return false;
    }
};

void run_adam(RunState& rs) {
    const int n = static_cast<int>(rs.params.size());
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    for (int it = 1; it <= rs.opt.adam_iters; ++it) {
        const Eigen::VectorXd g = rs.grad_at(rs.params);
        const double energy = rs.energy_at(rs.params);
        if (rs.record(energy, g.norm())) return;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        const double mc = 1.0 - std::pow(beta1, it);
        const double vc = 1.0 - std::pow(beta2, it);
        for (int k = 0; k < n; ++k)
            rs.params[k] -= rs.opt.adam_lr * (m[k] / mc) / (std::sqrt(v[k] / vc) + eps);
    }
}

void run_lbfgs(RunState& rs) {
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    Eigen::VectorXd g = rs.grad_at(rs.params);
    double f = rs.energy_at(rs.params);
    for (int it = 0; it < rs.opt.lbfgs_iters; ++it) {
        if (rs.record(f, g.norm())) return;
        if (g.norm() < 1e-14) return; // exactly stationary

        // Two-loop recursion for d = -H g.
        Eigen::VectorXd d = -g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alpha[i] * y_hist[i];
        }
        if (!y_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            d *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha[i] - beta) * s_hist[i];
        }
        double slope = g.dot(d);
        if (slope >= 0) { // not a descent direction: reset to steepest descent
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g;
            slope = g.dot(d);
        }

        // Armijo backtracking.
        double step = 1.0;
        double f_new = f;
        Eigen::VectorXd p_new;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            p_new = rs.params + step * d;
            f_new = rs.energy_at(p_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return; // line search exhausted: converged to fp resolution

        const Eigen::VectorXd g_new = rs.grad_at(p_new);
        const Eigen::VectorXd s = p_new - rs.params;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > rs.opt.lbfgs_memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        rs.params = p_new;
        f = f_new;
        g = g_new;
    }
}

} // namespace

VqeTrace optimize(const AnsatzSpec& spec, const EnergyModel& model, std::optional<double> e0,
                  const VqeOptions& options) {
    if (model.n_qubits() != spec.n_qubits)
        throw std::invalid_argument("optimize: ansatz and observable qubit counts differ");
    if (options.restarts < 1) throw std::domain_error("optimize: need at least one restart");

    VqeTrace best;
    best.final_energy_mev = std::numeric_limits<double>::infinity();
    long long total_evals = 0;

    for (int r = 0; r < options.restarts; ++r) {
        RunState rs{spec, model, e0, options, Eigen::VectorXd(spec.n_params()), {}, 0, 0, false};
        std::uint64_t stream = (options.seed + static_cast<std::uint64_t>(r)) ^ 0x5BF03635DE2D4C4Full;
        for (int k = 0; k < spec.n_params(); ++k)
            rs.params[k] = options.init_range * (2.0 * uniform_unit(stream) - 1.0);

        const bool use_adam = options.optimizer != OptimizerKind::lbfgs;
        const bool use_lbfgs = options.optimizer != OptimizerKind::adam;
        if (use_adam) run_adam(rs);
        if (use_lbfgs && !rs.converged) run_lbfgs(rs);

        const double final_energy =
            rs.points.empty() ? rs.energy_at(rs.params) : rs.points.back().energy_mev;
        total_evals += rs.evals;
        if (final_energy < best.final_energy_mev) {
            best.points = std::move(rs.points);
            best.best_params = rs.params;
            best.final_energy_mev = final_energy;
            best.converged = rs.converged;
            best.best_seed = static_cast<int>(options.seed + static_cast<std::uint64_t>(r));
            best.iterations = rs.t;
        }
        if (best.converged) break; // deterministic early exit: later seeds unused
    }
    best.e0_mev = e0;
    best.energy_evaluations = total_evals;
    return best;
}

std::string VqeTrace::to_csv() const {
    std::string out = "t,energy_mev,residual_mev,grad_norm\n";
    char buf[160];
    for (const TracePoint& p : points) {
        if (std::isnan(p.residual_mev))
            std::snprintf(buf, sizeof buf, "%d,%.10e,,%.10e\n", p.t, p.energy_mev, p.grad_norm);
        else
            std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e\n", p.t, p.energy_mev,
                          p.residual_mev, p.grad_norm);
        out += buf;
    }
    return out;
}

} // namespace nuclat
