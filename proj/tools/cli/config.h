#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wncs/channel.h"
#include "wncs/cost.h"
#include "wncs/dynamics.h"
#include "wncs/lyapunov.h"
#include "wncs/optimizer.h"
#include "wncs/simulator.h"
#include "wncs/stability.h"

namespace wncs::cli {

/// Malformed configuration or command line. Maps to exit code 2.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSpec {
  std::string name;
  ClosedLoopSystem system;
  /// Linear maps used for certification. For the robot arm this is the
  /// linearization at the origin.
  std::optional<LinearBlocks> linear;
};

struct CertificateSpec {
  enum class Kind { kQuadratic, kConstruct };
  Kind kind{Kind::kQuadratic};
  MatrixXd P;
  double a_S{0.0};
  double a_U{0.0};
  std::optional<double> a0;
};

struct TargetSpec {
  double mu{0.0};
  std::optional<double> a_S;
  std::optional<double> a_U;
};

struct PolicySpec {
  int n{0};
  double hbar{0.0};
  PowerRule rule{PowerRule::kConstant};
  double power{0.0};
};

struct OptimizeSpec {
  std::optional<std::string> mode;
  PowerRule rule{PowerRule::kConstant};
  double epsilon{0.01};
  int resolution{64};
  SearchSpace space;
};

struct SamplingSpec {
  int64_t count{100000};
  uint64_t seed{0};
  double lower{-1.0};
  double upper{1.0};
};

struct OutputSpec {
  std::string directory{"wncs_out"};
  std::string format{"csv"};
};

struct ExperimentConfig {
  std::optional<SystemSpec> system;
  std::optional<CertificateSpec> certificate;
  std::optional<ChannelModel> channel;
  std::optional<TargetSpec> target;
  std::optional<PolicySpec> policy;
  std::optional<OptimizeSpec> optimize;
  std::vector<double> feasibility_hbars{0.0};
  SimConfig sim;
  std::optional<SamplingSpec> sampling;
  OutputSpec output;
};

/// Validates every section and builds the domain objects. Unknown keys,
/// wrong types and invalid model parameters raise SchemaError.
ExperimentConfig ParseConfig(const nlohmann::json& doc);

ExperimentConfig LoadConfig(const std::string& path);

/// Rates from the target section, falling back to the certificate.
RateTarget ResolveRates(const ExperimentConfig& cfg);

/// Builds the certificate. Construction requires linear maps.
std::optional<LyapunovCertificate> BuildCertificate(
    const ExperimentConfig& cfg);

ThresholdPolicy BuildPolicy(const ExperimentConfig& cfg,
                            const ChannelModel& ch);

std::optional<OptimizationMode> ParseMode(const std::string& name);

}  // namespace wncs::cli
