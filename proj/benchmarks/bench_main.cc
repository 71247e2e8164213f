#include <benchmark/benchmark.h>

#include "wncs/cost.h"
#include "wncs/dynamics.h"
#include "wncs/lyapunov.h"
#include "wncs/optimizer.h"
#include "wncs/reference.h"
#include "wncs/simulator.h"
#include "wncs/stability.h"

namespace wncs {
namespace {

void BM_RequiredEtaTable(benchmark::State& state) {
  const RateTarget rt = RobotArmRates(0.999);
  for (auto _ : state) {
    for (int n = 0; n <= 10; ++n) benchmark::DoNotOptimize(RequiredEta(n, rt));
  }
}
BENCHMARK(BM_RequiredEtaTable);

void BM_EtaConstant(benchmark::State& state) {
  const ChannelModel ch = RayleighQpskChannel();
  double p = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EtaConstant(ch, 1.0, p));
    p = p < 9.0 ? p + 0.01 : 0.5;
  }
}
BENCHMARK(BM_EtaConstant);

void BM_MinPower(benchmark::State& state) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  for (auto _ : state) benchmark::DoNotOptimize(MinPower(ch, rt, 5, 2.2));
}
BENCHMARK(BM_MinPower);

void BM_SolvePureTime(benchmark::State& state) {
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.9999);
  for (auto _ : state) benchmark::DoNotOptimize(SolvePureTime(ch, rt));
}
BENCHMARK(BM_SolvePureTime)->Unit(benchmark::kMillisecond);

void BM_SolveUnsaturated(benchmark::State& state) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveUnsaturatedInversion(ch, rt));
  }
}
BENCHMARK(BM_SolveUnsaturated)->Unit(benchmark::kMillisecond);

void BM_SolveGeneral(benchmark::State& state) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const int resolution = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SolveGeneral(ch, rt, PowerRule::kConstant, resolution));
  }
}
BENCHMARK(BM_SolveGeneral)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CertifyLinear(benchmark::State& state) {
  const LinearBlocks lin = RobotArmLinearization();
  const MatrixXd P = RobotArmP();
  for (auto _ : state) {
    benchmark::DoNotOptimize(CertifyLinear(lin.A_S, lin.A_U, P, 0.98, 1.0009));
  }
}
BENCHMARK(BM_CertifyLinear);

void BM_RobotArmStep(benchmark::State& state) {
  const ClosedLoopSystem sys = RobotArm();
  StepWorkspace ws = sys.MakeWorkspace();
  VectorXd chi = VectorXd::Constant(4, 0.3), next(4);
  for (auto _ : state) {
    sys.StepFailureInto(chi, next, &ws);
    benchmark::DoNotOptimize(next.data());
  }
}
BENCHMARK(BM_RobotArmStep);

void BM_SimulatePureTime(benchmark::State& state) {
  const ClosedLoopSystem sys = RobotArm();
  const LyapunovCertificate cert = RobotArmCertificate();
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const ThresholdPolicy policy = SolvePureTime(ch, rt)->policy;
  SimConfig cfg;
  cfg.horizon = 1000;
  cfg.trials = state.range(0);
  cfg.record_v_every = 10;
  cfg.target = rt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Simulate(sys, &cert, ch, policy, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.horizon * cfg.trials);
}
BENCHMARK(BM_SimulatePureTime)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace wncs

BENCHMARK_MAIN();
