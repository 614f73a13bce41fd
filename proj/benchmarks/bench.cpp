// Microbenchmarks for the hot paths of the pipeline: kinetic-matrix assembly,
// symmetry reduction, Hamiltonian application, Gray encoding, and the VQE
// statevector layer. Run manually: build/benchmarks/nuclat-bench
// [--benchmark_filter=...].

#include "nuclat/encoding.hpp"
#include "nuclat/hamiltonian.hpp"
#include "nuclat/lattice.hpp"
#include "nuclat/symmetry.hpp"
#include "nuclat/vqe.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

nuclat::LatticeConfig config_for(int L) {
    nuclat::LatticeConfig cfg;
    cfg.L = L;
    return cfg;
}

void BM_KineticMatrix(benchmark::State& state) {
    const auto cfg = config_for(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto t = nuclat::kinetic_matrix(cfg);
        benchmark::DoNotOptimize(t.data());
    }
}
BENCHMARK(BM_KineticMatrix)->Arg(4)->Arg(6);

void BM_ReducedBasisTritonChannel(benchmark::State& state) {
    const auto cfg = config_for(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto basis = nuclat::build_reduced_basis(cfg, {1, 2, +1}, 0.5);
        benchmark::DoNotOptimize(basis.dim());
    }
}
BENCHMARK(BM_ReducedBasisTritonChannel)->Arg(2)->Arg(3);

void BM_BuildHamiltonianTriton(benchmark::State& state) {
    const auto cfg = config_for(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto h = nuclat::build_reduced_hamiltonian(cfg, {1, 2, +1}, 0.5);
        benchmark::DoNotOptimize(h.dim());
    }
}
BENCHMARK(BM_BuildHamiltonianTriton)->Arg(3)->Arg(4);

void BM_GroundStateTritonL4(benchmark::State& state) {
    const auto h = nuclat::build_reduced_hamiltonian(config_for(4), {1, 2, +1}, 0.5);
    for (auto _ : state) {
        auto gs = nuclat::ground_state(h);
        benchmark::DoNotOptimize(gs.energy_mev);
    }
}
BENCHMARK(BM_GroundStateTritonL4);

void BM_HamiltonianApplySpatialL4(benchmark::State& state) {
    const auto h = nuclat::build_reduced_hamiltonian(config_for(4), {1, 2, +1});
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(h.dim(), -1.0, 1.0);
    Eigen::VectorXd y(h.dim());
    for (auto _ : state) {
        h.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_HamiltonianApplySpatialL4);

void BM_GrayEncodeTritonL4(benchmark::State& state) {
    const auto h = nuclat::build_reduced_hamiltonian(config_for(4), {1, 2, +1}, 0.5);
    const Eigen::MatrixXd block = h.matrix();
    const auto map = nuclat::make_gray_map(h.dim());
    for (auto _ : state) {
        auto sum = nuclat::encode_gray(block, map);
        benchmark::DoNotOptimize(sum.n_terms());
    }
}
BENCHMARK(BM_GrayEncodeTritonL4);

void BM_Simulate(benchmark::State& state) {
    nuclat::AnsatzSpec spec;
    spec.n_qubits = static_cast<int>(state.range(0));
    spec.n_layers = 12;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd params(spec.n_params());
    for (int i = 0; i < params.size(); ++i) params[i] = u(rng);
    for (auto _ : state) {
        auto psi = nuclat::simulate(spec, params);
        benchmark::DoNotOptimize(psi.data());
    }
}
BENCHMARK(BM_Simulate)->Arg(6)->Arg(9);

void BM_GradientTritonL4(benchmark::State& state) {
    const auto h = nuclat::build_reduced_hamiltonian(config_for(4), {1, 2, +1}, 0.5);
    const Eigen::MatrixXd block = h.matrix();
    const auto map = nuclat::make_gray_map(h.dim());
    const auto model = nuclat::EnergyModel::reduced_block(block, map, 0.0);
    nuclat::AnsatzSpec spec;
    spec.n_qubits = map.eta;
    spec.n_layers = 6;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd params(spec.n_params());
    for (int i = 0; i < params.size(); ++i) params[i] = u(rng);
    for (auto _ : state) {
        auto grad = nuclat::gradient(spec, params, model);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(BM_GradientTritonL4);

void BM_JwSparseApplyL2(benchmark::State& state) {
    const auto hq = nuclat::jw_hamiltonian(config_for(2));
    const std::uint64_t bits = (1ull << 0) | (1ull << 17); // one proton, one neutron
    for (auto _ : state) {
        auto image = hq.apply_to_basis_state(bits);
        benchmark::DoNotOptimize(image.size());
    }
}
BENCHMARK(BM_JwSparseApplyL2);

} // namespace

BENCHMARK_MAIN();
