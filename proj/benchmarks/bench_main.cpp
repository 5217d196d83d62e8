#include <benchmark/benchmark.h>

#include <cmath>

#include "evglm/diagnostics.hpp"
#include "evglm/error_models.hpp"
#include "evglm/estimation.hpp"
#include "evglm/glm.hpp"
#include "evglm/regressors.hpp"
#include "evglm/rng.hpp"
#include "evglm/ts_sim.hpp"

using namespace evglm;

namespace {

ParamVec gevd_theta() {
  ParamVec t(2);
  t << 1.3, 0.25;
  return t;
}

void BM_GevdScore(benchmark::State& state) {
  auto fam = ErrorFamily::gevd();
  ParamVec th = gevd_theta();
  double y = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fam.score(th, y));
    y += 1e-9;
  }
}
BENCHMARK(BM_GevdScore);

void BM_GevdFisher(benchmark::State& state) {
  auto fam = ErrorFamily::gevd();
  ParamVec th = gevd_theta();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fam.fisher_info(th));
    th(1) += 1e-12;
  }
}
BENCHMARK(BM_GevdFisher);

void BM_GlmFisherCore(benchmark::State& state) {
  GlmSpec spec(ErrorFamily::gevd(), LinkFunction::parse("log,shape_gevd_shifted"), PartitionSpec({1, 1}));
  ParamVec th(2);
  th << 0.1, 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fisher_core(spec, th));
    th(0) += 1e-12;
  }
}
BENCHMARK(BM_GlmFisherCore);

void BM_ScoreMomentsIS(benchmark::State& state) {
  auto fam = ErrorFamily::gevd();
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_score_moments(fam, gevd_theta(), static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreMomentsIS)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CondII(benchmark::State& state) {
  GlmSpec spec(ErrorFamily::binomial(1), LinkFunction::parse("logit"), PartitionSpec::single(2));
  auto K = RegressorSampler::parse("const(1), normal(0, 1)");
  Eigen::VectorXd beta(2);
  beta << 0.2, -0.5;
  CheckConfig cfg;
  cfg.draws = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_cond_ii(spec, beta, K, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_CondII)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PoissonFit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(2));
  Rng rng(3);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  auto fam = ErrorFamily::poisson();
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y(i) = fam.quantile(ParamVec::Constant(1, std::exp(0.5 * X(i, 0) - 0.3 * X(i, 1))), rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(fisher_scoring_fit(spec, X, y, Eigen::VectorXd::Zero(2)));
}
BENCHMARK(BM_PoissonFit)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  TsConfig cfg;
  cfg.T = static_cast<int>(state.range(0));
  cfg.beta_xi = {0.3};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
