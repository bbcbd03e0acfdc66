#include <benchmark/benchmark.h>

#include "ladapt/harness/rng.hpp"
#include "ladapt/metagrad.hpp"
#include "ladapt/projection.hpp"
#include "ladapt/restart.hpp"
#include "ladapt/squint.hpp"

namespace {

using ladapt::Matrix;
using ladapt::Vector;

Vector gaussian(ladapt::harness::Rng& rng, Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

void BM_ProjectBall(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  ladapt::harness::Rng rng(1);
  Matrix gram = Matrix::Zero(d, d);
  for (int k = 0; k < 3 * d; ++k) {
    const Vector g = gaussian(rng, d);
    gram += g * g.transpose();
  }
  const Vector outside = 5.0 * gaussian(rng, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ladapt::project_ball(2.0, gram, outside, 0.1));
  }
}
BENCHMARK(BM_ProjectBall)->Arg(2)->Arg(5)->Arg(16)->Arg(64);

void BM_SquintRound(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  ladapt::harness::Rng rng(2);
  ladapt::SquintL learner = ladapt::SquintL::uniform(K, false);
  Vector loss(static_cast<Eigen::Index>(K));
  for (auto _ : state) {
    for (Eigen::Index k = 0; k < loss.size(); ++k) loss[k] = rng.uniform();
    benchmark::DoNotOptimize(learner.round(ladapt::LossVector(loss)));
  }
}
BENCHMARK(BM_SquintRound)->Arg(2)->Arg(16)->Arg(256);

void BM_MetaGradRound(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  ladapt::harness::Rng rng(3);
  ladapt::MetaGradL learner(d, 2.0);
  // Warm up so the active set has its steady-state size.
  for (int t = 0; t < 1000; ++t) learner.round(ladapt::Gradient(gaussian(rng, static_cast<Eigen::Index>(d))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.round(ladapt::Gradient(gaussian(rng, static_cast<Eigen::Index>(d)))));
  }
}
BENCHMARK(BM_MetaGradRound)->Arg(2)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
