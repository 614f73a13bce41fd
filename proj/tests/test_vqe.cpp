#include "nuclat/vqe.hpp"

#include "nuclat/hamiltonian.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

using namespace nuclat;

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Embed a 2x2 gate at `qubit` of an n-qubit register (qubit 0 = least
// significant bit = last Kronecker factor).
Eigen::MatrixXd embed(const Eigen::MatrixXd& gate, int qubit, int n) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int q = n - 1; q >= 0; --q)
        out = kron(out, q == qubit ? gate : Eigen::MatrixXd::Identity(2, 2));
    return out;
}

Eigen::MatrixXd ry_gate(double theta) {
    Eigen::MatrixXd g(2, 2);
    g << std::cos(0.5 * theta), -std::sin(0.5 * theta), std::sin(0.5 * theta),
        std::cos(0.5 * theta);
    return g;
}

Eigen::MatrixXd cnot_gate(int control, int target, int n) {
    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(2, 2), p1 = Eigen::MatrixXd::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    Eigen::MatrixXd x(2, 2);
    x << 0, 1, 1, 0;
    return embed(p0, control, n) * Eigen::MatrixXd::Identity(1 << n, 1 << n) +
           embed(p1, control, n) * embed(x, target, n);
}

// Gate-by-gate dense oracle for the circuit simulator.
Eigen::VectorXd simulate_oracle(const AnsatzSpec& spec, const Eigen::VectorXd& params) {
    const int n = spec.n_qubits;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(std::int64_t(1) << n);
    psi[0] = 1.0;
    for (const GateOp& g : build_ansatz(spec)) {
        if (g.kind == GateOp::ry)
            psi = embed(ry_gate(params[g.b]), g.a, n) * psi;
        else
            psi = cnot_gate(g.a, g.b, n) * psi;
    }
    return psi;
}

Eigen::MatrixXd random_symmetric(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
            m(i, j) = entry(rng);
            m(j, i) = m(i, j);
        }
    return m;
}

} // namespace

TEST_CASE("ansatz construction: gate counts and parameter wiring") {
    CHECK(default_layers(1) == 0);
    CHECK(default_layers(2) == 2);
    CHECK(default_layers(4) == 4);
    CHECK(default_layers(54) == 12);
    CHECK(default_layers(100000) == 12); // capped

    auto count = [](const AnsatzSpec& spec) {
        int ry = 0, cnot = 0;
        for (const GateOp& g : build_ansatz(spec))
            (g.kind == GateOp::ry ? ry : cnot)++;
        return std::pair{ry, cnot};
    };

    CHECK(count({1, 1, Entangler::linear}) == std::pair{2, 0});
    CHECK(count({3, 2, Entangler::linear}) == std::pair{9, 4});
    CHECK(count({3, 2, Entangler::circular}) == std::pair{9, 6});
    CHECK(AnsatzSpec{5, 3}.n_params() == 20);

    // Every Ry reads a distinct parameter index, covering 0..n_params-1.
    const AnsatzSpec spec{4, 3, Entangler::circular};
    std::vector<int> used(spec.n_params(), 0);
    for (const GateOp& g : build_ansatz(spec))
        if (g.kind == GateOp::ry) used[g.b]++;
    for (int u : used) CHECK(u == 1);

    CHECK_THROWS_AS(build_ansatz({0, 1}), std::domain_error);
    CHECK_THROWS_AS(build_ansatz({2, -1}), std::domain_error);
}

TEST_CASE("simulator: worked states and the dense gate oracle") {
    // Zero parameters leave |00...0>.
    const AnsatzSpec spec3{3, 2, Entangler::linear};
    const Eigen::VectorXd zero = simulate(spec3, Eigen::VectorXd::Zero(spec3.n_params()));
    CHECK(zero[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // One qubit, theta = pi: Ry flips to |1>.
    const AnsatzSpec spec1{1, 0};
    Eigen::VectorXd pi_param(1);
    pi_param << std::numbers::pi;
    const Eigen::VectorXd flipped = simulate(spec1, pi_param);
    CHECK(std::abs(flipped[0]) <= 1e-12);
    CHECK(flipped[1] == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (const Entangler ent : {Entangler::linear, Entangler::circular}) {
        const AnsatzSpec spec{3, 2, ent};
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::VectorXd params(spec.n_params());
            for (int k = 0; k < params.size(); ++k) params[k] = angle(rng);
            const Eigen::VectorXd got = simulate(spec, params);
            CHECK((got - simulate_oracle(spec, params)).norm() <= 1e-12);
            CHECK(got.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(simulate(spec3, Eigen::VectorXd::Zero(2)), std::domain_error);
}

TEST_CASE("expectation values: worked cases and dense agreement") {
    Eigen::VectorXd ground(2);
    ground << 1.0, 0.0;
    PauliSum z(1);
    z.add(PauliString::from_label("Z"), 1.0);
    CHECK(expectation(ground, z) == doctest::Approx(1.0));

    Eigen::VectorXd excited(2);
    excited << 0.0, 1.0;
    CHECK(expectation(excited, z) == doctest::Approx(-1.0));

    PauliSum ident(3);
    ident.add(PauliString(3), -4.25);
    Eigen::VectorXd any = Eigen::VectorXd::Random(8).normalized();
    CHECK(expectation(any, ident) == doctest::Approx(-4.25).epsilon(1e-12));

    // Hermitian random sums: Pauli expectation == quadratic form of dense().
    std::mt19937_64 rng(37);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> coeff(-1.5, 1.5);
    const char ops[] = "IXYZ";
    for (int trial = 0; trial < 10; ++trial) {
        PauliSum sum(3);
        for (int t = 0; t < 5; ++t) {
            std::string label;
            for (int q = 0; q < 3; ++q) label.push_back(ops[pick(rng)]);
            PauliSum term(3);
            term.add(PauliString::from_label(label), coeff(rng));
            sum.add(term + term.adjoint(), 0.5); // hermitize
        }
        REQUIRE(sum.is_hermitian());
        const Eigen::VectorXd state = Eigen::VectorXd::Random(8).normalized();
        const Eigen::MatrixXcd dense = sum.dense();
        const double direct = (state.cast<std::complex<double>>().adjoint() * dense *
                               state.cast<std::complex<double>>())(0)
                                  .real();
        CHECK(expectation(state, sum) == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
    }

    PauliSum skew(1);
    skew.add(PauliString::from_label("X"), std::complex<double>{0.0, 1.0});
    Eigen::VectorXd v(2);
    v << 1.0, 0.0;
    CHECK_THROWS_AS(expectation(v, skew), std::domain_error);
}

TEST_CASE("energy backends agree: gathered block, Pauli sum, dense embedding") {
    std::mt19937_64 rng(41);
    const Eigen::MatrixXd block = random_symmetric(5, rng);
    const GrayCodeMap map = make_gray_map(5); // 3 qubits, 3 unused codewords

    const EnergyModel by_block = EnergyModel::reduced_block(block, map, 0.0);
    const EnergyModel by_pauli = EnergyModel::pauli(encode_gray(block, map));
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) full(map.codes[i], map.codes[j]) = block(i, j);
    const EnergyModel by_dense = EnergyModel::dense(full);

    CHECK(by_block.n_qubits() == 3);
    CHECK(by_pauli.n_qubits() == 3);
    CHECK(by_dense.n_qubits() == 3);

    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd state = Eigen::VectorXd::Random(8).normalized();
        const double e = by_block.energy(state);
        CHECK(by_pauli.energy(state) == doctest::Approx(e).epsilon(1e-10).scale(1.0));
        CHECK(by_dense.energy(state) == doctest::Approx(e).epsilon(1e-10).scale(1.0));
    }

    // The penalty raises leakage states but not codeword-supported ones.
    const EnergyModel penalized = EnergyModel::reduced_block(block, map, 100.0);
    Eigen::VectorXd leak = Eigen::VectorXd::Zero(8);
    leak[map.unused_code(0)] = 1.0;
    CHECK(penalized.energy(leak) == doctest::Approx(100.0).epsilon(1e-10));
    Eigen::VectorXd phys = Eigen::VectorXd::Zero(8);
    phys[map.codes[2]] = 1.0;
    CHECK(penalized.energy(phys) == doctest::Approx(block(2, 2)).epsilon(1e-10).scale(1.0));

    CHECK_THROWS_AS(EnergyModel::reduced_block(block, make_gray_map(4), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(EnergyModel::reduced_block(block, map, -1.0), std::domain_error);
    Eigen::MatrixXd skew = full;
    skew(0, 1) += 1.0;
    CHECK_THROWS_AS(EnergyModel::dense(skew), std::domain_error);
}

TEST_CASE("parameter-shift gradient equals finite differences") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);

    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const AnsatzSpec spec{3, 1 + trial % 3,
                              trial % 2 ? Entangler::circular : Entangler::linear};
        const Eigen::MatrixXd full = random_symmetric(8, rng);
        const EnergyModel model = EnergyModel::dense(full);

        Eigen::VectorXd params(spec.n_params());
        for (int k = 0; k < params.size(); ++k) params[k] = angle(rng);

        const Eigen::VectorXd g = gradient(spec, params, model);
        const double h = 1e-5;
        Eigen::VectorXd shifted = params;
        for (int k = 0; k < params.size(); ++k) {
            shifted[k] = params[k] + h;
            const double plus = model.energy(simulate(spec, shifted));
            shifted[k] = params[k] - h;
            const double minus = model.energy(simulate(spec, shifted));
            shifted[k] = params[k];
            const double fd = (plus - minus) / (2.0 * h);
            CHECK(std::abs(g[k] - fd) <= 1e-6 * (1.0 + std::abs(fd)));
            ++checked;
        }
    }
    CHECK(checked >= 100);

    // Diagonal observable at theta = 0: amplitude signs cannot change any
    // probability, so the gradient vanishes identically.
    const AnsatzSpec spec{3, 2, Entangler::linear};
    Eigen::VectorXd diag_entries = Eigen::VectorXd::LinSpaced(8, -3.0, 4.0);
    const EnergyModel diag_model = EnergyModel::dense(diag_entries.asDiagonal());
    const Eigen::VectorXd g0 =
        gradient(spec, Eigen::VectorXd::Zero(spec.n_params()), diag_model);
    CHECK(g0.norm() <= 1e-12);
}

TEST_CASE("optimizer: converges on a worked one-qubit problem, deterministically") {
    Eigen::MatrixXd h(2, 2);
    h << 1.0, 0.0, 0.0, -1.0; // ground energy -1 at |1>
    const EnergyModel model = EnergyModel::dense(h);
    const AnsatzSpec spec{1, 1};

    VqeOptions opt;
    opt.tol_residual_mev = 1e-8;
    opt.restarts = 2;
    opt.optimizer = OptimizerKind::lbfgs;

    const VqeTrace trace = optimize(spec, model, -1.0, opt);
    CHECK(trace.converged);
    CHECK(trace.iterations < 400);
    CHECK(trace.final_energy_mev == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(trace.best_seed >= 0);
    CHECK(trace.best_seed < 2);
    CHECK(trace.points.size() == static_cast<std::size_t>(trace.iterations));
    CHECK(trace.energy_evaluations > 0);

    const VqeTrace again = optimize(spec, model, -1.0, opt);
    CHECK(trace.to_csv() == again.to_csv()); // bit-for-bit reproducible

    CHECK_THROWS_AS(optimize({2, 1}, model, -1.0, opt), std::invalid_argument);
    VqeOptions bad = opt;
    bad.restarts = 0;
    CHECK_THROWS_AS(optimize(spec, model, -1.0, bad), std::domain_error);
}

TEST_CASE("optimizer without a reference energy stops at the gradient floor") {
    Eigen::MatrixXd flat(2, 2);
    flat << 3.5, 0.0, 0.0, 3.5; // constant energy: gradient is identically zero
    const EnergyModel model = EnergyModel::dense(flat);

    const VqeTrace trace = optimize({1, 1}, model, std::nullopt, {});
    CHECK(trace.converged);
    CHECK_FALSE(trace.e0_mev.has_value());
    CHECK(trace.final_energy_mev == doctest::Approx(3.5).epsilon(1e-12));

    // Residual column stays empty when no reference energy exists.
    const std::string csv = trace.to_csv();
    CHECK(csv.find(",,") != std::string::npos);
    CHECK(csv.rfind("t,energy_mev,residual_mev,grad_norm\n", 0) == 0);
}

TEST_CASE("full pipeline on the smallest two-nucleon problem") {
    LatticeConfig cfg;
    cfg.L = 2;
    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, {1, 1, +2});
    const Eigen::MatrixXd block = h.matrix();
    const double e0 = ground_state(h).energy_mev;

    const GrayCodeMap map = make_gray_map(h.dim());
    const double lambda = 1.5 * std::max(1.0, block.diagonal().maxCoeff());
    const EnergyModel model = EnergyModel::reduced_block(block, map, lambda);
    const AnsatzSpec spec{map.eta, default_layers(h.dim())};

    VqeOptions opt;
    opt.restarts = 1;

    const VqeTrace trace = optimize(spec, model, e0, opt);
    CHECK(trace.converged);
    CHECK(std::abs(trace.final_energy_mev - e0) <= 1e-6);

    // Penalized energies never undershoot the true ground state.
    for (const TracePoint& p : trace.points) CHECK(p.energy_mev >= e0 - 1e-9);
}

TEST_CASE("full pipeline on the smallest three-nucleon channel") {
    LatticeConfig cfg;
    cfg.L = 2;
    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, {1, 2, +1}, 0.5);
    REQUIRE(h.dim() == 7);
    const Eigen::MatrixXd block = h.matrix();
    const double e0 = ground_state(h).energy_mev;

    const GrayCodeMap map = make_gray_map(h.dim());
    const double lambda = 1.5 * std::max(1.0, block.diagonal().maxCoeff());
    const EnergyModel model = EnergyModel::reduced_block(block, map, lambda);
    const AnsatzSpec spec{map.eta, default_layers(h.dim())};

    VqeOptions opt;
    opt.restarts = 1;

    const VqeTrace trace = optimize(spec, model, e0, opt);
    CHECK(trace.converged);
    CHECK(std::abs(trace.final_energy_mev - e0) <= 1e-6);
    for (const TracePoint& p : trace.points) CHECK(p.energy_mev >= e0 - 1e-9);
}
