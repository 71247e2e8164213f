#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "wncs/dynamics.h"

namespace wncs {

/// V with V(f_S(χ)) ≤ a_S V(χ) and V(f_U(χ)) ≤ a_U V(χ).
class LyapunovCertificate {
 public:
  enum class Form { kQuadratic, kOpaque };

  /// V(χ) = χᵀ P χ. P must be symmetric positive definite.
  static LyapunovCertificate Quadratic(const MatrixXd& P, double a_S,
                                       double a_U);
  static LyapunovCertificate Opaque(std::function<double(const VectorXd&)> V,
                                    double a_S, double a_U);

  Form form() const { return form_; }
  double a_S() const { return a_S_; }
  double a_U() const { return a_U_; }
  /// Empty unless the form is quadratic.
  const MatrixXd& P() const { return P_; }

  double operator()(const ConstVecRef& chi) const;

 private:
  LyapunovCertificate() = default;
  Form form_{Form::kOpaque};
  double a_S_{0.0};
  double a_U_{0.0};
  MatrixXd P_;
  std::function<double(const VectorXd&)> V_;
};

/// Growth bounds on W(x_p, x_c) used by the hold-specific compositions.
struct GrowthCertificateW {
  std::function<double(const VectorXd& xp, const VectorXd& xc)> W;
  double a_W1{0.0};
  double a_W0{0.0};
  double b_0{0.0};
  double lower_quadratic{1.0};
  double upper_quadratic{1.0};
};

struct CertificationReport {
  bool success_pass{false};
  bool failure_pass{false};
  double min_eig_success{0.0};
  double min_eig_failure{0.0};
  double tol_psd{0.0};
  double min_eig_P{0.0};
  bool pass() const { return success_pass && failure_pass; }
};

/// Checks a_S P - A_Sᵀ P A_S ⪰ 0 and a_U P - A_Uᵀ P A_U ⪰ 0 up to
/// tol_psd = 1e-9 (1 + |P|).
CertificationReport CertifyLinear(const MatrixXd& A_S, const MatrixXd& A_U,
                                  const MatrixXd& P, double a_S, double a_U);

/// Solves A0ᵀ P A0 - a0 P = -I by iterating on A0/√a0.
MatrixXd SolveScaledLyapunov(const MatrixXd& A0, double a0);

/// P = diag(P_0, ε I) with the nominal block from SolveScaledLyapunov.
LyapunovCertificate ConstructLinearCertificate(const LinearBlocks& blocks,
                                               double a0);
/// Same, with a0 = (1 + ρ(A_0)²) / 2.
LyapunovCertificate ConstructLinearCertificate(const LinearBlocks& blocks);

/// V = W + |ŷ| for a zeroing hold.
LyapunovCertificate ComposeZeroing(const GrowthCertificateW& w,
                                   const ChiLayout& layout);

/// V = W + ν |ŷ|² for a zero-order hold with output Lipschitz constant c.
LyapunovCertificate ComposeZoh(const GrowthCertificateW& w,
                               const ChiLayout& layout, double c, double nu);

struct BoxSampler {
  VectorXd lower;
  VectorXd upper;
  int64_t count{0};
  uint64_t seed{0};
};

struct SamplingReport {
  double max_ratio_success{0.0};
  double max_ratio_failure{0.0};
  VectorXd worst_success;
  VectorXd worst_failure;
  int64_t evaluated{0};
  int64_t skipped{0};
  bool falsified_success{false};
  bool falsified_failure{false};
  bool falsified() const { return falsified_success || falsified_failure; }
};

/// Largest sampled V(f(χ))/V(χ) for f = f_S and f = f_U. States with
/// V ≤ 1e-12 are skipped. A ratio above a_S (a_U) by more than a relative
/// 1e-9 falsifies the certificate.
SamplingReport EstimateRatesSampling(const ClosedLoopSystem& sys,
                                     const LyapunovCertificate& cert,
                                     const BoxSampler& sampler);

double SpectralRadius(const MatrixXd& A);

}  // namespace wncs
