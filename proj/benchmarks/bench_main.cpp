#include "latcb/dynamics.hpp"
#include "latcb/interpolation.hpp"
#include "latcb/potential.hpp"
#include "latcb/stability.hpp"
#include "latcb/statics.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

latcb::Potential lj_chain() {
  return latcb::make_pair_potential(1, latcb::Mat::Identity(1, 1), 2.0, latcb::RadialFunction(latcb::LennardJones{1.0, 1.0}), 0.5);
}

latcb::Potential lj_square() {
  return latcb::make_pair_potential(2, latcb::Mat::Identity(2, 2), 2.0, latcb::RadialFunction(latcb::LennardJones{1.0, 1.0}));
}

latcb::DisplacementField wavy(const latcb::Potential& p, int n, double amp) {
  latcb::DisplacementField u(latcb::LatticeSpec(p.dim(), p.orientation(), n));
  for (std::size_t i = 0; i < u.site_count(); ++i) {
    const latcb::IVec s = u.lattice().multi_index(i);
    for (int c = 0; c < p.dim(); ++c) u[i][c] = amp * std::sin(2.0 * M_PI * (s.sum() + c) / n);
  }
  return u;
}

void BM_Forces2D(benchmark::State& state) {
  const auto p = lj_square();
  const auto u = wavy(p, static_cast<int>(state.range(0)), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(latcb::forces(p, u));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.site_count()));
}
BENCHMARK(BM_Forces2D)->Arg(16)->Arg(32)->Arg(64);

void BM_HessianApply2D(benchmark::State& state) {
  const auto p = lj_square();
  const auto u = wavy(p, static_cast<int>(state.range(0)), 0.05);
  const auto v = wavy(p, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(latcb::hessian_apply(p, u, v));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.site_count()));
}
BENCHMARK(BM_HessianApply2D)->Arg(16)->Arg(32);

void BM_StabilityConstant(benchmark::State& state) {
  const auto p = lj_square();
  for (auto _ : state) benchmark::DoNotOptimize(latcb::stability_constant(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_StabilityConstant)->Arg(32)->Arg(64);

void BM_QuasiGrad(benchmark::State& state) {
  const auto p = lj_square();
  const auto w = latcb::smooth_nodal_interp(wavy(p, 32, 0.05));
  latcb::Vec x(2);
  x << 3.3, 7.7;
  for (auto _ : state) benchmark::DoNotOptimize(latcb::quasi_grad(w, x));
}
BENCHMARK(BM_QuasiGrad);

void BM_AtomisticStatic1D(benchmark::State& state) {
  const auto p = lj_chain();
  const latcb::TrigField shape(1, {{latcb::IVec::Constant(1, 1), latcb::Vec::Zero(1), latcb::Vec::Ones(1)}});
  const auto force = latcb::make_macro_force(shape, 0.01);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const auto f = latcb::make_forces(force, eps, p.orientation());
  const latcb::DisplacementField zero(f.fa.lattice());
  latcb::AtomisticStaticOptions opts;
  opts.tol = 1e-12;
  for (auto _ : state) benchmark::DoNotOptimize(latcb::solve_atomistic_static(p, f.fa, zero, opts));
}
BENCHMARK(BM_AtomisticStatic1D)->Arg(32)->Arg(128);

void BM_VerletChain(benchmark::State& state) {
  const auto p = lj_chain();
  const latcb::TrigField u0(1, {{latcb::IVec::Constant(1, 1), latcb::Vec::Zero(1), latcb::Vec::Constant(1, 1e-4)}});
  const latcb::InitialData data{u0, latcb::TrigField::zero(1)};
  latcb::AtomisticDynamicsOptions opts;
  opts.samples = 2;
  for (auto _ : state) benchmark::DoNotOptimize(latcb::integrate_atomistic(p, data, 1.0 / 64, 0.05, opts));
}
BENCHMARK(BM_VerletChain);

}  // namespace
BENCHMARK_MAIN();
