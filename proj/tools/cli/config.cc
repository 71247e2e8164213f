#include "cli/config.h"

#include <fstream>
#include <set>

#include "wncs/error.h"
#include "wncs/reference.h"

namespace wncs::cli {
namespace {

using nlohmann::json;

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw SchemaError(where + ": unknown key '" + key + "'");
    }
  }
}

const json& Require(const json& obj, const std::string& key,
                    const std::string& where) {
  if (!obj.contains(key)) {
    throw SchemaError(where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

double Number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  return v.get<double>();
}

int64_t Integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    throw SchemaError(where + ": expected an integer");
  }
  return v.get<int64_t>();
}

std::string String(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": expected a string");
  return v.get<std::string>();
}

double NumberAt(const json& obj, const std::string& key,
                const std::string& where) {
  return Number(Require(obj, key, where), where + "." + key);
}

MatrixXd Matrix(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected nested arrays");
  const int rows = static_cast<int>(v.size());
  if (rows == 0) return MatrixXd(0, 0);
  if (!v[0].is_array()) throw SchemaError(where + ": expected nested arrays");
  const int cols = static_cast<int>(v[0].size());
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != cols) {
      throw SchemaError(where + ": ragged matrix");
    }
    for (int j = 0; j < cols; ++j) M(i, j) = Number(v[i][j], where);
  }
  return M;
}

VectorXd Vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected an array");
  VectorXd x(v.size());
  for (size_t i = 0; i < v.size(); ++i) x[i] = Number(v[i], where);
  return x;
}

PowerRule ParseRule(const json& v, const std::string& where) {
  const std::string s = String(v, where);
  if (s == "constant") return PowerRule::kConstant;
  if (s == "inversion") return PowerRule::kInversion;
  throw SchemaError(where + ": rule must be 'constant' or 'inversion'");
}

SystemSpec ParseSystem(const json& j) {
  const std::string type = String(Require(j, "type", "system"), "system.type");
  if (type == "robot_arm") {
    CheckKeys(j, {"type"}, "system");
    return SystemSpec{"robot_arm", RobotArm(), RobotArmLinearization()};
  }
  if (type != "linear") {
    throw SchemaError("system.type must be 'robot_arm' or 'linear'");
  }
  CheckKeys(j, {"type", "A_p", "B_p", "C_p", "A_c", "B_c", "C_c", "D_c", "hold"},
            "system");
  const MatrixXd A_p = Matrix(Require(j, "A_p", "system"), "system.A_p");
  const MatrixXd B_p = Matrix(Require(j, "B_p", "system"), "system.B_p");
  const MatrixXd C_p = Matrix(Require(j, "C_p", "system"), "system.C_p");
  const MatrixXd D_c = Matrix(Require(j, "D_c", "system"), "system.D_c");
  const int sy = C_p.rows();
  const int su = B_p.cols();
  MatrixXd A_c(0, 0), B_c(0, sy), C_c(su, 0);
  if (j.contains("A_c")) A_c = Matrix(j["A_c"], "system.A_c");
  if (j.contains("B_c")) B_c = Matrix(j["B_c"], "system.B_c");
  if (j.contains("C_c")) C_c = Matrix(j["C_c"], "system.C_c");
  MatrixXd C_g = MatrixXd::Identity(sy, sy);
  if (j.contains("hold")) {
    const json& h = j["hold"];
    if (h.is_string()) {
      const std::string kind = h.get<std::string>();
      if (kind == "zeroing") {
        C_g = MatrixXd::Zero(sy, sy);
      } else if (kind != "zoh") {
        throw SchemaError("system.hold must be 'zoh', 'zeroing' or a matrix");
      }
    } else {
      C_g = Matrix(h, "system.hold");
    }
  }
  try {
    SystemSpec spec{"linear",
                     LinearSystem(A_p, B_p, C_p, A_c, B_c, C_c, D_c, C_g),
                     std::nullopt};
    spec.linear = spec.system.linear_blocks();
    return spec;
  } catch (const InputError& e) {
    throw SchemaError(std::string("system: ") + e.what());
  }
}

CertificateSpec ParseCertificate(const json& j) {
  const std::string type =
      String(Require(j, "type", "certificate"), "certificate.type");
  CertificateSpec c;
  if (type == "robot_arm") {
    CheckKeys(j, {"type"}, "certificate");
    c.P = RobotArmP();
    c.a_S = 0.98;
    c.a_U = 1.0009;
  } else if (type == "quadratic") {
    CheckKeys(j, {"type", "P", "a_S", "a_U"}, "certificate");
    c.P = Matrix(Require(j, "P", "certificate"), "certificate.P");
    c.a_S = NumberAt(j, "a_S", "certificate");
    c.a_U = NumberAt(j, "a_U", "certificate");
    if (c.P.rows() != c.P.cols() || c.P.rows() == 0) {
      throw SchemaError("certificate.P must be square");
    }
  } else if (type == "construct") {
    CheckKeys(j, {"type", "a0"}, "certificate");
    c.kind = CertificateSpec::Kind::kConstruct;
    if (j.contains("a0")) c.a0 = Number(j["a0"], "certificate.a0");
  } else {
    throw SchemaError(
        "certificate.type must be 'robot_arm', 'quadratic' or 'construct'");
  }
  return c;
}

SuccessFunction ParseSuccess(const json& j) {
  const std::string type =
      String(Require(j, "type", "channel.success"), "channel.success.type");
  if (type == "qpsk_awgn") {
    CheckKeys(j, {"type", "bits"}, "channel.success");
    return SuccessFunction::QpskAwgn(
        static_cast<int>(Integer(Require(j, "bits", "channel.success"),
                                 "channel.success.bits")));
  }
  if (type == "exp_error") {
    CheckKeys(j, {"type"}, "channel.success");
    return SuccessFunction::ExpError();
  }
  throw SchemaError("channel.success.type must be 'qpsk_awgn' or 'exp_error'");
}

ChannelModel ParseChannel(const json& j) {
  const std::string type = String(Require(j, "type", "channel"), "channel.type");
  const double P_S = j.contains("P_S") ? Number(j["P_S"], "channel.P_S") : 0.0;
  const double P_max = NumberAt(j, "P_max", "channel");
  if (type == "quantized_rayleigh") {
    CheckKeys(j, {"type", "sigma2", "grid", "success", "P_S", "P_max"},
              "channel");
    RayleighGrid grid;
    if (j.contains("grid")) {
      const json& g = j["grid"];
      CheckKeys(g, {"min", "step", "max"}, "channel.grid");
      grid.min = NumberAt(g, "min", "channel.grid");
      grid.step = NumberAt(g, "step", "channel.grid");
      grid.max = NumberAt(g, "max", "channel.grid");
    }
    return QuantizedRayleigh(NumberAt(j, "sigma2", "channel"), grid,
                             ParseSuccess(Require(j, "success", "channel")),
                             P_S, P_max);
  }
  if (type == "single_point") {
    CheckKeys(j, {"type", "h", "success", "P_S", "P_max"}, "channel");
    return SinglePointChannel(NumberAt(j, "h", "channel"),
                              ParseSuccess(Require(j, "success", "channel")),
                              P_S, P_max);
  }
  if (type == "discrete") {
    CheckKeys(j, {"type", "alphabet", "pmf", "success", "P_S", "P_max"},
              "channel");
    const VectorXd a = Vector(Require(j, "alphabet", "channel"),
                              "channel.alphabet");
    const VectorXd p = Vector(Require(j, "pmf", "channel"), "channel.pmf");
    return ChannelModel(std::vector<double>(a.data(), a.data() + a.size()),
                        std::vector<double>(p.data(), p.data() + p.size()),
                        ParseSuccess(Require(j, "success", "channel")), P_S,
                        P_max);
  }
  throw SchemaError(
      "channel.type must be 'quantized_rayleigh', 'single_point' or "
      "'discrete'");
}

TargetSpec ParseTarget(const json& j) {
  CheckKeys(j, {"mu", "a_S", "a_U"}, "target");
  TargetSpec t;
  t.mu = NumberAt(j, "mu", "target");
  if (j.contains("a_S")) t.a_S = Number(j["a_S"], "target.a_S");
  if (j.contains("a_U")) t.a_U = Number(j["a_U"], "target.a_U");
  return t;
}

PolicySpec ParsePolicy(const json& j) {
  CheckKeys(j, {"n", "hbar", "rule", "power"}, "policy");
  PolicySpec p;
  p.n = static_cast<int>(Integer(Require(j, "n", "policy"), "policy.n"));
  p.hbar = j.contains("hbar") ? Number(j["hbar"], "policy.hbar") : 0.0;
  if (j.contains("rule")) p.rule = ParseRule(j["rule"], "policy.rule");
  p.power = NumberAt(j, "power", "policy");
  return p;
}

OptimizeSpec ParseOptimize(const json& j) {
  CheckKeys(j, {"mode", "rule", "epsilon", "resolution", "n", "hbar"},
            "optimize");
  OptimizeSpec o;
  if (j.contains("mode")) {
    o.mode = String(j["mode"], "optimize.mode");
    if (!ParseMode(*o.mode)) {
      throw SchemaError("optimize.mode: unknown mode '" + *o.mode + "'");
    }
  }
  if (j.contains("rule")) o.rule = ParseRule(j["rule"], "optimize.rule");
  if (j.contains("epsilon")) o.epsilon = Number(j["epsilon"], "optimize.epsilon");
  if (j.contains("resolution")) {
    o.resolution =
        static_cast<int>(Integer(j["resolution"], "optimize.resolution"));
  }
  if (j.contains("n")) {
    o.space.n = static_cast<int>(Integer(j["n"], "optimize.n"));
  }
  if (j.contains("hbar")) o.space.hbar = Number(j["hbar"], "optimize.hbar");
  return o;
}

void ParseSim(const json& j, SimConfig* sim) {
  CheckKeys(j,
            {"horizon", "trials", "seed", "initial", "record_every", "budget",
             "allow_unstable", "log_trials", "hitting_radius"},
            "sim");
  if (j.contains("horizon")) sim->horizon = Integer(j["horizon"], "sim.horizon");
  if (j.contains("trials")) sim->trials = Integer(j["trials"], "sim.trials");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw SchemaError("sim.seed: expected an unsigned integer");
    }
    sim->seed = j["seed"].get<uint64_t>();
  }
  if (j.contains("initial")) {
    const json& i = j["initial"];
    CheckKeys(i, {"sphere_radius", "state"}, "sim.initial");
    if (i.contains("sphere_radius") == i.contains("state")) {
      throw SchemaError(
          "sim.initial: give exactly one of 'sphere_radius' or 'state'");
    }
    if (i.contains("state")) {
      sim->initial_state = Vector(i["state"], "sim.initial.state");
    } else {
      sim->initial_state =
          SphereInit{Number(i["sphere_radius"], "sim.initial.sphere_radius")};
    }
  }
  if (j.contains("record_every")) {
    sim->record_v_every = Integer(j["record_every"], "sim.record_every");
  }
  if (j.contains("budget")) sim->budget = Number(j["budget"], "sim.budget");
  if (j.contains("allow_unstable")) {
    if (!j["allow_unstable"].is_boolean()) {
      throw SchemaError("sim.allow_unstable: expected a boolean");
    }
    sim->allow_unstable = j["allow_unstable"].get<bool>();
  }
  if (j.contains("log_trials")) {
    sim->log_trials = Integer(j["log_trials"], "sim.log_trials");
  }
  if (j.contains("hitting_radius")) {
    sim->hitting_radius = Number(j["hitting_radius"], "sim.hitting_radius");
  }
}

SamplingSpec ParseSampling(const json& j) {
  CheckKeys(j, {"count", "seed", "box"}, "sampling");
  SamplingSpec s;
  if (j.contains("count")) s.count = Integer(j["count"], "sampling.count");
  if (j.contains("seed")) {
    s.seed = static_cast<uint64_t>(Integer(j["seed"], "sampling.seed"));
  }
  if (j.contains("box")) {
    const json& b = j["box"];
    if (!b.is_array() || b.size() != 2) {
      throw SchemaError("sampling.box: expected [lower, upper]");
    }
    s.lower = Number(b[0], "sampling.box");
    s.upper = Number(b[1], "sampling.box");
    if (!(s.lower < s.upper)) throw SchemaError("sampling.box: empty box");
  }
  return s;
}

OutputSpec ParseOutput(const json& j) {
  CheckKeys(j, {"directory", "format"}, "output");
  OutputSpec o;
  if (j.contains("directory")) {
    o.directory = String(j["directory"], "output.directory");
  }
  if (j.contains("format")) {
    o.format = String(j["format"], "output.format");
    if (o.format != "csv" && o.format != "json") {
      throw SchemaError("output.format must be 'csv' or 'json'");
    }
  }
  return o;
}

}  // namespace

std::optional<OptimizationMode> ParseMode(const std::string& name) {
  for (OptimizationMode m :
       {OptimizationMode::kPureChannel, OptimizationMode::kPureTime,
        OptimizationMode::kEpsLoss, OptimizationMode::kUnsaturatedInversion,
        OptimizationMode::kGeneralGrid}) {
    if (ModeName(m) == name) return m;
  }
  return std::nullopt;
}

ExperimentConfig ParseConfig(const json& doc) {
  CheckKeys(doc,
            {"system", "certificate", "channel", "target", "policy",
             "optimize", "feasibility", "sim", "sampling", "output"},
            "config");
  ExperimentConfig cfg;
  try {
    if (doc.contains("system")) cfg.system = ParseSystem(doc["system"]);
    if (doc.contains("certificate")) {
      cfg.certificate = ParseCertificate(doc["certificate"]);
    }
    if (doc.contains("channel")) cfg.channel = ParseChannel(doc["channel"]);
    if (doc.contains("target")) cfg.target = ParseTarget(doc["target"]);
    if (doc.contains("policy")) cfg.policy = ParsePolicy(doc["policy"]);
    if (doc.contains("optimize")) cfg.optimize = ParseOptimize(doc["optimize"]);
    if (doc.contains("feasibility")) {
      const json& f = doc["feasibility"];
      CheckKeys(f, {"hbar"}, "feasibility");
      const VectorXd h = Vector(Require(f, "hbar", "feasibility"),
                                "feasibility.hbar");
      cfg.feasibility_hbars.assign(h.data(), h.data() + h.size());
    }
    if (doc.contains("sim")) ParseSim(doc["sim"], &cfg.sim);
    if (doc.contains("sampling")) cfg.sampling = ParseSampling(doc["sampling"]);
    if (doc.contains("output")) cfg.output = ParseOutput(doc["output"]);
  } catch (const InputError& e) {
    throw SchemaError(e.what());
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return ParseConfig(doc);
}

std::optional<LyapunovCertificate> BuildCertificate(
    const ExperimentConfig& cfg) {
  if (!cfg.certificate) return std::nullopt;
  const CertificateSpec& c = *cfg.certificate;
  if (c.kind == CertificateSpec::Kind::kQuadratic) {
    return LyapunovCertificate::Quadratic(c.P, c.a_S, c.a_U);
  }
  if (!cfg.system || !cfg.system->linear) {
    throw SchemaError("certificate.construct requires a linear system");
  }
  const LinearBlocks& blocks = *cfg.system->linear;
  return c.a0 ? ConstructLinearCertificate(blocks, *c.a0)
              : ConstructLinearCertificate(blocks);
}

RateTarget ResolveRates(const ExperimentConfig& cfg) {
  if (!cfg.target) throw SchemaError("missing 'target' section");
  std::optional<double> a_S = cfg.target->a_S;
  std::optional<double> a_U = cfg.target->a_U;
  if ((!a_S || !a_U) && cfg.certificate) {
    double cs = cfg.certificate->a_S, cu = cfg.certificate->a_U;
    if (cfg.certificate->kind == CertificateSpec::Kind::kConstruct) {
      const LyapunovCertificate cert = *BuildCertificate(cfg);
      cs = cert.a_S();
      cu = cert.a_U();
    }
    if (!a_S) a_S = cs;
    if (!a_U) a_U = cu;
  }
  if (!a_S || !a_U) {
    throw SchemaError("target: a_S and a_U are required without a certificate");
  }
  try {
    return RateTarget(cfg.target->mu, *a_S, *a_U);
  } catch (const InputError& e) {
    throw SchemaError(std::string("target: ") + e.what());
  }
}

ThresholdPolicy BuildPolicy(const ExperimentConfig& cfg,
                            const ChannelModel& ch) {
  if (!cfg.policy) throw SchemaError("missing 'policy' section");
  const PolicySpec& p = *cfg.policy;
  try {
    return p.rule == PowerRule::kConstant
               ? ThresholdPolicy::Constant(ch, p.n, p.hbar, p.power)
               : ThresholdPolicy::Inversion(p.n, p.hbar, p.power);
  } catch (const InputError& e) {
    throw SchemaError(std::string("policy: ") + e.what());
  }
}

}  // namespace wncs::cli
