#include "cli/commands.h"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <variant>

#include "CLI11.hpp"
#include "wncs/error.h"
#include "wncs/reference.h"

namespace wncs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

using Cell = std::variant<std::monostate, int64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

Cell Opt(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{std::monostate{}};
}

std::string FormatCell(const Cell& c) {
  if (const auto* i = std::get_if<int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

json CellJson(const Cell& c) {
  if (const auto* i = std::get_if<int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

fs::path PrepareDir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw SchemaError("cannot create output directory '" + dir + "'");
  return p;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot write '" + path.string() + "'");
  f << text;
}

void WriteJson(const fs::path& path, const json& doc) {
  WriteText(path, doc.dump(2) + "\n");
}

void WriteTable(const fs::path& dir, const std::string& stem, const Table& t,
                const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (size_t k = 0; k < row.size(); ++k) obj[t.header[k]] = CellJson(row[k]);
      arr.push_back(std::move(obj));
    }
    WriteJson(dir / (stem + ".json"), arr);
    return;
  }
  std::string text;
  for (size_t k = 0; k < t.header.size(); ++k) {
    if (k) text += ',';
    text += t.header[k];
  }
  text += '\n';
  for (const auto& row : t.rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) text += ',';
      text += FormatCell(row[k]);
    }
    text += '\n';
  }
  WriteText(dir / (stem + ".csv"), text);
}

json MatrixJson(const MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string RuleName(PowerRule r) {
  return r == PowerRule::kConstant ? "constant" : "inversion";
}

json PolicyJson(const ThresholdPolicy& p) {
  return json{{"n", p.n},
              {"hbar", p.hbar},
              {"rule", RuleName(p.rule)},
              {"power", p.power},
              {"requires_csi", p.requires_csi}};
}

json CostJson(const CostBreakdown& c) {
  return json{{"total", c.total},
              {"transmit", c.transmit_part},
              {"sensing", c.sensing_part},
              {"eta", c.eta},
              {"pr_active", c.pr_active}};
}

json OutcomeJson(const OptimizationOutcome& o) {
  return json{{"feasible", true},
              {"mode", ModeName(o.mode)},
              {"policy", PolicyJson(o.policy)},
              {"cost", CostJson(o.cost)},
              {"beta", o.verification.beta},
              {"verified", o.verification.pass},
              {"candidates_examined", o.candidates_examined}};
}

Table SweepTable(const std::vector<SweepPoint>& sweep) {
  Table t{{"n", "hbar", "feasible", "lower", "power", "cost"}, {}};
  for (const SweepPoint& s : sweep) {
    t.rows.push_back({int64_t{s.n}, s.hbar, int64_t{s.feasible},
                      s.feasible ? Cell{s.lower} : Cell{},
                      s.feasible ? Cell{s.power} : Cell{},
                      s.feasible ? Cell{s.cost} : Cell{}});
  }
  return t;
}

const ChannelModel& RequireChannel(const ExperimentConfig& cfg) {
  if (!cfg.channel) throw SchemaError("missing 'channel' section");
  return *cfg.channel;
}

const SystemSpec& RequireSystem(const ExperimentConfig& cfg) {
  if (!cfg.system) throw SchemaError("missing 'system' section");
  return *cfg.system;
}

std::optional<OptimizationOutcome> Solve(OptimizationMode mode,
                                         const ExperimentConfig& cfg,
                                         const ChannelModel& ch,
                                         const RateTarget& rt,
                                         std::vector<SweepPoint>* sweep) {
  const OptimizeSpec o = cfg.optimize.value_or(OptimizeSpec{});
  switch (mode) {
    case OptimizationMode::kPureChannel:
      return SolvePureChannel(ch, rt, o.rule, sweep);
    case OptimizationMode::kPureTime:
      return SolvePureTime(ch, rt, sweep, o.space);
    case OptimizationMode::kEpsLoss:
      return SolveEpsLoss(ch, rt, o.epsilon, sweep, o.space);
    case OptimizationMode::kUnsaturatedInversion:
      return SolveUnsaturatedInversion(ch, rt, sweep, o.space);
    case OptimizationMode::kGeneralGrid:
      return SolveGeneral(ch, rt, o.rule, o.resolution, sweep, o.space);
  }
  return std::nullopt;
}

OptimizationMode ResolveMode(const ExperimentConfig& cfg,
                             const Overrides& ov) {
  std::optional<std::string> name = ov.mode;
  if (!name && cfg.optimize) name = cfg.optimize->mode;
  if (!name) throw SchemaError("optimize: no mode given (--mode or optimize.mode)");
  const auto mode = ParseMode(*name);
  if (!mode) throw SchemaError("unknown mode '" + *name + "'");
  return *mode;
}

std::string InfeasibleDiagnostic(const ChannelModel& ch, const RateTarget& rt,
                                 OptimizationMode mode) {
  const int N = MaxHorizon(rt);
  double needed = 1.0;
  int at = 0;
  for (int n = 0; n <= N; ++n) {
    if (const auto e = RequiredEta(n, rt); e && *e < needed) {
      needed = *e;
      at = n;
    }
  }
  const double best = EtaConstant(ch, 0.0, ch.P_max());
  char buf[256];
  if (best < needed) {
    std::snprintf(buf, sizeof buf,
                  "binding constraint: power cap P_max = %.6g gives success "
                  "probability %.6g < eta* = %.6g (n = %d, N = %d)",
                  ch.P_max(), best, needed, at, N);
  } else {
    std::snprintf(buf, sizeof buf,
                  "binding constraint: restrictions of mode %s (eta* = %.6g "
                  "at n = %d reachable at P_max without them, N = %d)",
                  ModeName(mode).c_str(), needed, at, N);
  }
  return buf;
}

}  // namespace

void ApplyOverrides(const Overrides& ov, ExperimentConfig* cfg) {
  if (ov.seed) cfg->sim.seed = *ov.seed;
  if (ov.trials) cfg->sim.trials = *ov.trials;
  if (ov.horizon) cfg->sim.horizon = *ov.horizon;
  if (ov.out) cfg->output.directory = *ov.out;
}

int CmdCertify(const ExperimentConfig& cfg, std::ostream& out) {
  const SystemSpec& sys = RequireSystem(cfg);
  if (!sys.linear) throw SchemaError("certify: system has no linear maps");
  const LinearBlocks& blocks = *sys.linear;

  CertificateSpec spec;
  if (cfg.certificate) spec = *cfg.certificate;
  else spec.kind = CertificateSpec::Kind::kConstruct;
  const bool constructed = spec.kind == CertificateSpec::Kind::kConstruct;
  if (constructed) {
    ExperimentConfig c = cfg;
    c.certificate = spec;
    const LyapunovCertificate cert = *BuildCertificate(c);
    spec.P = cert.P();
    spec.a_S = cert.a_S();
    spec.a_U = cert.a_U();
  }
  if (spec.P.rows() != sys.system.chi_dim()) {
    throw SchemaError("certificate.P size does not match the state dimension");
  }
  const CertificationReport r =
      CertifyLinear(blocks.A_S, blocks.A_U, spec.P, spec.a_S, spec.a_U);
  const bool pd = r.min_eig_P > 0.0;
  bool pass = r.pass() && pd;

  json report{{"constructed", constructed},
              {"a_S", spec.a_S},
              {"a_U", spec.a_U},
              {"P", MatrixJson(spec.P)},
              {"positive_definite", pd},
              {"min_eig_P", r.min_eig_P},
              {"tol_psd", r.tol_psd},
              {"success", {{"pass", r.success_pass},
                           {"min_eig", r.min_eig_success}}},
              {"failure", {{"pass", r.failure_pass},
                           {"min_eig", r.min_eig_failure}}}};
  if (cfg.sampling) {
    const SamplingSpec& s = *cfg.sampling;
    if (pd) {
      const int d = sys.system.chi_dim();
      const SamplingReport sr = EstimateRatesSampling(
          sys.system,
          LyapunovCertificate::Quadratic(spec.P, spec.a_S, spec.a_U),
          BoxSampler{VectorXd::Constant(d, s.lower),
                     VectorXd::Constant(d, s.upper), s.count, s.seed});
      report["sampling"] = {{"count", s.count},
                            {"evaluated", sr.evaluated},
                            {"skipped", sr.skipped},
                            {"max_ratio_success", sr.max_ratio_success},
                            {"max_ratio_failure", sr.max_ratio_failure},
                            {"falsified_success", sr.falsified_success},
                            {"falsified_failure", sr.falsified_failure}};
      pass = pass && !sr.falsified();
    } else {
      report["sampling"] = {{"skipped_reason", "P is not positive definite"}};
    }
  }
  report["pass"] = pass;
  const fs::path dir = PrepareDir(cfg.output.directory);
  WriteJson(dir / "certificate.json", report);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "certify: %s (min eig success %.3e, failure %.3e, tol %.3e)\n",
                pass ? "PASS" : "FAIL", r.min_eig_success, r.min_eig_failure,
                r.tol_psd);
  out << buf;
  return pass ? kExitOk : kExitFailed;
}

int CmdFeasible(const ExperimentConfig& cfg, std::ostream& out) {
  const ChannelModel& ch = RequireChannel(cfg);
  const RateTarget rt = ResolveRates(cfg);
  const FeasibilityWindow w = ComputeFeasibility(ch, rt, cfg.feasibility_hbars);
  Table t{{"n", "eta_star", "p_lower", "kappa_lower", "feasible", "hbar", "N"},
          {}};
  for (const FeasibilityRow& row : w.rows) {
    t.rows.push_back({int64_t{row.n}, Opt(row.eta_star), Opt(row.p_lower),
                      Opt(row.kappa_lower), int64_t{row.feasible()}, row.hbar,
                      int64_t{w.N}});
  }
  WriteTable(PrepareDir(cfg.output.directory), "feasibility", t,
             cfg.output.format);
  out << "feasible: N = " << w.N << ", " << w.rows.size() << " rows\n";
  return kExitOk;
}

int CmdOptimize(const ExperimentConfig& cfg, const Overrides& ov,
                std::ostream& out) {
  const OptimizationMode mode = ResolveMode(cfg, ov);
  const ChannelModel& ch = RequireChannel(cfg);
  const RateTarget rt = ResolveRates(cfg);
  std::vector<SweepPoint> sweep;
  const auto outcome = Solve(mode, cfg, ch, rt, &sweep);
  const fs::path dir = PrepareDir(cfg.output.directory);
  WriteTable(dir, "sweep", SweepTable(sweep), cfg.output.format);
  if (!outcome) {
    const std::string why = InfeasibleDiagnostic(ch, rt, mode);
    WriteJson(dir / "outcome.json",
              json{{"feasible", false}, {"mode", ModeName(mode)},
                   {"diagnostic", why}});
    out << "optimize: infeasible; " << why << "\n";
    return kExitFailed;
  }
  WriteJson(dir / "outcome.json", OutcomeJson(*outcome));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "optimize %s: n = %d, hbar = %.6g, %s = %.6g, cost = %.6g, "
                "beta = %.9g\n",
                ModeName(mode).c_str(), outcome->policy.n, outcome->policy.hbar,
                outcome->policy.rule == PowerRule::kConstant ? "p" : "kappa",
                outcome->policy.power, outcome->cost.total,
                outcome->verification.beta);
  out << buf;
  return kExitOk;
}

int CmdSimulate(const ExperimentConfig& cfg, std::ostream& out) {
  const SystemSpec& sys = RequireSystem(cfg);
  const ChannelModel& ch = RequireChannel(cfg);
  std::optional<LyapunovCertificate> cert;
  try {
    cert = BuildCertificate(cfg);
  } catch (const InputError& e) {
    throw SchemaError(std::string("certificate: ") + e.what());
  }
  SimConfig sim = cfg.sim;
  std::optional<RateTarget> rt;
  if (cfg.target) rt = ResolveRates(cfg);
  sim.target = rt;

  ThresholdPolicy policy;
  if (cfg.policy) {
    policy = BuildPolicy(cfg, ch);
  } else if (cfg.optimize && cfg.optimize->mode && rt) {
    const auto o = Solve(*ParseMode(*cfg.optimize->mode), cfg, ch, *rt, nullptr);
    if (!o) {
      out << "simulate: optimizer found no feasible policy\n";
      return kExitFailed;
    }
    policy = o->policy;
  } else {
    throw SchemaError("simulate: need 'policy' or 'optimize' with 'target'");
  }

  const SimResult r =
      Simulate(sys.system, cert ? &*cert : nullptr, ch, policy, sim);
  const fs::path dir = PrepareDir(cfg.output.directory);
  const std::string& fmt = cfg.output.format;

  bool ok = true;
  json checks = json::object();
  if (!r.v_mean.empty()) {
    Table t{{"t", "v_mean", "v_sem", "v_bound"}, {}};
    for (size_t k = 0; k < r.record_times.size(); ++k) {
      t.rows.push_back({r.record_times[k], r.v_mean[k], r.v_sem[k],
                        r.v_bound.empty() ? Cell{} : Cell{r.v_bound[k]}});
    }
    WriteTable(dir, "v_mean", t, fmt);
    if (!r.v_bound.empty()) {
      const DecayCheckReport d = DecayCheck(r);
      checks["decay"] = {{"pass", d.pass},
                         {"worst_ratio", d.worst_ratio},
                         {"worst_t", d.worst_t}};
      ok = ok && d.pass;
    }
  }

  const double eta = PolicyEta(ch, policy);
  const int64_t total = r.horizon * r.trials;
  Table hist{{"tau", "bucket", "count", "fraction", "predicted"}, {}};
  std::optional<TauDistribution> stationary;
  if (eta > 0.0 && eta < 1.0) stationary = TauStationary(policy.n, eta);
  for (int j = 0; j <= policy.n; ++j) {
    const bool active = j == policy.n;
    Cell predicted;
    if (stationary) {
      predicted = active ? stationary->pr_active : stationary->pr_each_low;
    }
    hist.rows.push_back({int64_t{j + 1}, std::string(active ? "ge" : "eq"),
                         r.tau_histogram[j],
                         static_cast<double>(r.tau_histogram[j]) / total,
                         predicted});
  }
  WriteTable(dir, "tau_histogram", hist, fmt);
  if (stationary) {
    const CheckReport c = TauHistogramCheck(r, policy.n, eta);
    checks["tau"] = {{"pass", c.pass},
                     {"deviation", c.deviation},
                     {"tolerance", c.tolerance}};
    ok = ok && c.pass;
  }
  const CostBreakdown predicted = CostOfPolicy(ch, policy);
  const CostCheckReport cc = EmpiricalCostCheck(r, predicted);
  checks["cost"] = {{"pass", cc.pass},
                    {"empirical", cc.empirical},
                    {"predicted", cc.predicted},
                    {"abs_diff", cc.abs_diff},
                    {"rel_tolerance", cc.rel_tolerance}};
  ok = ok && cc.pass;

  if (!r.hitting_times.empty()) {
    Table t{{"trial", "hitting_time"}, {}};
    for (size_t i = 0; i < r.hitting_times.size(); ++i) {
      t.rows.push_back({static_cast<int64_t>(i), r.hitting_times[i]});
    }
    WriteTable(dir, "hitting_times", t, fmt);
  }
  if (sim.log_trials > 0) {
    Table t{{"trial", "t", "tau", "h", "power", "success"}, {}};
    for (const DeliveryEvent& e : r.delivery_log) {
      t.rows.push_back({e.trial, e.t, e.tau, e.h, e.power,
                        int64_t{e.success}});
    }
    WriteTable(dir, "deliveries", t, fmt);
    if (!r.v_traces.empty()) {
      Table v{{"trial", "t", "v"}, {}};
      for (size_t i = 0; i < r.v_traces.size(); ++i) {
        for (size_t k = 0; k < r.v_traces[i].size(); ++k) {
          v.rows.push_back({static_cast<int64_t>(i), static_cast<int64_t>(k),
                            r.v_traces[i][k]});
        }
      }
      WriteTable(dir, "v_traces", v, fmt);
    }
  }

  json summary{{"horizon", r.horizon},
               {"trials", r.trials},
               {"seed", sim.seed},
               {"policy", PolicyJson(policy)},
               {"eta", eta},
               {"empirical_cost", r.empirical_cost},
               {"empirical_transmit", r.empirical_transmit},
               {"empirical_sensing", r.empirical_sensing},
               {"predicted_cost", CostJson(predicted)},
               {"success_count", r.success_count},
               {"attempt_count", r.attempt_count},
               {"sensing_count", r.sensing_count},
               {"diverged_count", r.diverged_count},
               {"checks", checks},
               {"pass", ok}};
  if (rt) summary["mu"] = rt->mu();
  WriteJson(dir / "summary.json", summary);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "simulate: %s (empirical cost %.6g, predicted %.6g)\n",
                ok ? "PASS" : "FAIL", r.empirical_cost, predicted.total);
  out << buf;
  return ok ? kExitOk : kExitFailed;
}

int CmdReproduce(int figure, const Overrides& ov, std::ostream& out) {
  if (figure < 3 || figure > 8) {
    throw SchemaError("unknown figure " + std::to_string(figure) +
                      " (expected 3..8)");
  }
  const fs::path dir =
      PrepareDir(ov.out.value_or("wncs_fig" + std::to_string(figure)));
  const std::string stem = "fig" + std::to_string(figure);
  json summary = json::object();

  if (figure == 3) {
    const ChannelModel ch = RayleighQpskChannel();
    const RateTarget rt = RobotArmRates(0.999);
    Table t{{"rule", "n", "hbar", "feasible", "lower", "power", "cost"}, {}};
    std::map<std::string, double> minima;
    for (PowerRule rule : {PowerRule::kConstant, PowerRule::kInversion}) {
      std::vector<SweepPoint> sweep;
      const auto o = SolvePureChannel(ch, rt, rule, &sweep);
      for (const SweepPoint& s : sweep) {
        if (!s.feasible) continue;
        t.rows.push_back({RuleName(rule), int64_t{s.n}, s.hbar, int64_t{1},
                          s.lower, s.power, s.cost});
      }
      if (o) {
        summary[RuleName(rule)] = OutcomeJson(*o);
        minima[RuleName(rule)] = o->cost.total;
      }
    }
    if (minima.size() == 2) {
      summary["crossover_P_S"] = minima["constant"] - minima["inversion"];
    }
    WriteTable(dir, stem + "_series", t, "csv");
  } else if (figure == 4 || figure == 5) {
    const ChannelModel ch = ExpErrorChannel();
    Table t{{"mu", "n", "feasible", "p_lower", "p_star", "cost"}, {}};
    for (double mu : {0.995, 0.999, 0.9999}) {
      const RateTarget rt = RobotArmRates(mu);
      std::vector<SweepPoint> sweep;
      const auto o = SolvePureTime(ch, rt, &sweep);
      for (const SweepPoint& s : sweep) {
        t.rows.push_back({mu, int64_t{s.n}, int64_t{s.feasible},
                          s.feasible ? Cell{s.lower} : Cell{},
                          s.feasible ? Cell{s.power} : Cell{},
                          s.feasible ? Cell{s.cost} : Cell{}});
      }
      json entry = o ? OutcomeJson(*o) : json{{"feasible", false}};
      entry["mu"] = mu;
      entry["N"] = MaxHorizon(rt);
      summary["series"].push_back(entry);
    }
    WriteTable(dir, stem + "_series", t, "csv");
  } else if (figure == 6) {
    const ChannelModel ch = RayleighQpskChannel();
    const RateTarget rt = RobotArmRates(0.999);
    const SearchSpace space{9, std::nullopt};
    Table t{{"series", "n", "hbar", "feasible", "lower", "power", "cost"}, {}};
    auto emit = [&](const std::string& name,
                    const std::optional<OptimizationOutcome>& o,
                    const std::vector<SweepPoint>& sweep) {
      for (const SweepPoint& s : sweep) {
        if (!s.feasible) continue;
        t.rows.push_back({name, int64_t{s.n}, s.hbar, int64_t{1}, s.lower,
                          s.power, s.cost});
      }
      summary[name] = o ? OutcomeJson(*o) : json{{"feasible", false}};
    };
    std::vector<SweepPoint> eps_sweep, inv_sweep;
    const auto eps = SolveEpsLoss(ch, rt, 0.01, &eps_sweep, space);
    emit("eps_loss", eps, eps_sweep);
    const auto inv = SolveUnsaturatedInversion(ch, rt, &inv_sweep, space);
    emit("unsaturated", inv, inv_sweep);
    summary["epsilon"] = 0.01;
    WriteTable(dir, stem + "_series", t, "csv");
  } else if (figure == 7) {
    const RateTarget rt = RobotArmRates(0.999);
    Table t{{"P_S", "n", "hbar", "kappa", "cost"}, {}};
    for (double P_S : {0.0, 0.05, 0.1, 0.5, 1.0}) {
      const ChannelModel ch = RayleighQpskChannel(P_S);
      std::vector<SweepPoint> sweep;
      const auto o = SolveUnsaturatedInversion(ch, rt, &sweep);
      std::map<int, SweepPoint> best;
      for (const SweepPoint& s : sweep) {
        if (!s.feasible) continue;
        auto it = best.find(s.n);
        if (it == best.end() || s.cost < it->second.cost) best[s.n] = s;
      }
      for (const auto& [n, s] : best) {
        t.rows.push_back({P_S, int64_t{n}, s.hbar, s.power, s.cost});
      }
      json entry = o ? OutcomeJson(*o) : json{{"feasible", false}};
      entry["P_S"] = P_S;
      summary["series"].push_back(entry);
    }
    WriteTable(dir, stem + "_series", t, "csv");
  } else {
    const ChannelModel ch = RayleighQpskChannel();
    SimConfig sim;
    sim.trials = ov.trials.value_or(10000);
    sim.horizon = ov.horizon.value_or(20000);
    sim.seed = ov.seed.value_or(0);
    sim.record_v_every = sim.horizon;
    const std::vector<double> mus{0.99, 0.995, 0.999};
    std::vector<ThresholdPolicy> policies;
    for (double mu : mus) {
      const auto o = SolveUnsaturatedInversion(ch, RobotArmRates(mu));
      if (!o) throw InfeasibleError("no unsaturated policy for figure 8");
      policies.push_back(o->policy);
    }
    constexpr double kRadius = 1e-6;
    const std::vector<HittingRow> rows =
        HittingTimeExperiment(RobotArm(), ch, policies, kRadius, sim, true);
    Table t{{"series", "mu", "n", "hbar", "kappa", "mean_cost",
             "mean_hitting_time", "hits", "censored"},
            {}};
    for (size_t i = 0; i < rows.size(); ++i) {
      const HittingRow& h = rows[i];
      t.rows.push_back({std::string(h.baseline ? "baseline" : "inversion"),
                        h.baseline ? Cell{} : Cell{mus[i]},
                        int64_t{h.policy.n}, h.policy.hbar, h.policy.power,
                        h.mean_cost, h.mean_hitting_time, h.hits,
                        h.censored});
    }
    summary = {{"trials", sim.trials},
               {"horizon", sim.horizon},
               {"seed", sim.seed},
               {"radius_squared", kRadius}};
    WriteTable(dir, stem + "_series", t, "csv");
  }
  summary["figure"] = figure;
  WriteJson(dir / (stem + "_summary.json"), summary);
  out << "reproduce: figure " << figure << " written to " << dir.string()
      << "\n";
  return kExitOk;
}

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Energy-aware transmission policies for wireless control loops",
               "wncs"};
  app.require_subcommand(1, 1);
  std::string config_path;
  Overrides ov;
  int figure = 0;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", config_path, "Experiment config (JSON)")
          ->required();
    }
    sub->add_option("--out", ov.out, "Output directory");
  };
  CLI::App* certify = app.add_subcommand("certify", "Check a certificate");
  add_common(certify, true);
  CLI::App* feasible =
      app.add_subcommand("feasible", "Tabulate the feasibility window");
  add_common(feasible, true);
  CLI::App* optimize = app.add_subcommand("optimize", "Optimize a policy");
  add_common(optimize, true);
  optimize->add_option("--mode", ov.mode,
                       "pure-channel | pure-time | eps-loss | unsaturated | "
                       "general");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo run");
  add_common(simulate, true);
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Emit the data of a built-in figure");
  add_common(reproduce, false);
  reproduce->add_option("--figure", figure, "Figure id 3..8")->required();
  for (CLI::App* sub : {simulate, reproduce}) {
    sub->add_option("--seed", ov.seed, "Base RNG seed");
    sub->add_option("--trials", ov.trials, "Number of trials");
    sub->add_option("--horizon", ov.horizon, "Steps per trial");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (reproduce->parsed()) return CmdReproduce(figure, ov, out);
    ExperimentConfig cfg = LoadConfig(config_path);
    ApplyOverrides(ov, &cfg);
    if (certify->parsed()) return CmdCertify(cfg, out);
    if (feasible->parsed()) return CmdFeasible(cfg, out);
    if (optimize->parsed()) return CmdOptimize(cfg, ov, out);
    return CmdSimulate(cfg, out);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace wncs::cli
