#include "wncs/lyapunov.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wncs/error.h"
#include "wncs/parallel.h"
#include "wncs/random.h"

namespace wncs {

namespace {

double SymmetricMinEig(const MatrixXd& M) {
  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double SymmetricNorm(const MatrixXd& M) {
  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void RequireSymmetric(const MatrixXd& P, const char* who) {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw InputError(std::string(who) + ": P must be square and nonempty");
  }
  const double scale = 1.0 + P.cwiseAbs().maxCoeff();
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError(std::string(who) + ": P is not symmetric");
  }
}

}  // namespace

double SpectralRadius(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

LyapunovCertificate LyapunovCertificate::Quadratic(const MatrixXd& P,
                                                   double a_S, double a_U) {
  RequireSymmetric(P, "LyapunovCertificate");
  if (!(SymmetricMinEig(P) > 0.0)) {
    throw InputError("LyapunovCertificate: P must be positive definite");
  }
  if (!(a_S >= 0.0 && a_S < 1.0) || !(a_U > a_S)) {
    throw InputError("LyapunovCertificate: need 0 <= a_S < 1 and a_U > a_S");
  }
  LyapunovCertificate c;
  c.form_ = Form::kQuadratic;
  c.P_ = 0.5 * (P + P.transpose());
  c.a_S_ = a_S;
  c.a_U_ = a_U;
  return c;
}

LyapunovCertificate LyapunovCertificate::Opaque(
    std::function<double(const VectorXd&)> V, double a_S, double a_U) {
  if (!V) throw InputError("LyapunovCertificate: missing V");
  if (!(a_S >= 0.0 && a_S < 1.0) || !(a_U > a_S)) {
    throw InputError("LyapunovCertificate: need 0 <= a_S < 1 and a_U > a_S");
  }
  LyapunovCertificate c;
  c.form_ = Form::kOpaque;
  c.V_ = std::move(V);
  c.a_S_ = a_S;
  c.a_U_ = a_U;
  return c;
}

double LyapunovCertificate::operator()(const ConstVecRef& chi) const {
  if (form_ == Form::kQuadratic) {
    if (chi.size() != P_.rows()) {
      throw InputError("LyapunovCertificate: state dimension mismatch");
    }
    const int n = P_.rows();
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      double col = 0.0;
      for (int i = 0; i < n; ++i) col += P_(i, j) * chi[i];
      v += col * chi[j];
    }
    return v;
  }
  return V_(VectorXd(chi));
}

CertificationReport CertifyLinear(const MatrixXd& A_S, const MatrixXd& A_U,
                                  const MatrixXd& P, double a_S, double a_U) {
  RequireSymmetric(P, "CertifyLinear");
  const int n = P.rows();
  if (A_S.rows() != n || A_S.cols() != n || A_U.rows() != n ||
      A_U.cols() != n) {
    throw InputError("CertifyLinear: A_S, A_U and P sizes differ");
  }
  CertificationReport r;
  r.min_eig_P = SymmetricMinEig(P);
  r.tol_psd = 1e-9 * (1.0 + SymmetricNorm(P));
  r.min_eig_success = SymmetricMinEig(a_S * P - A_S.transpose() * P * A_S);
  r.min_eig_failure = SymmetricMinEig(a_U * P - A_U.transpose() * P * A_U);
  r.success_pass = r.min_eig_success >= -r.tol_psd;
  r.failure_pass = r.min_eig_failure >= -r.tol_psd;
  return r;
}

MatrixXd SolveScaledLyapunov(const MatrixXd& A0, double a0) {
  if (A0.rows() != A0.cols() || A0.rows() == 0) {
    throw InputError("SolveScaledLyapunov: A0 must be square and nonempty");
  }
  if (!(a0 > 0.0 && a0 < 1.0)) {
    throw InputError("SolveScaledLyapunov: a0 must lie in (0, 1)");
  }
  const double rho = SpectralRadius(A0);
  if (rho >= std::sqrt(a0)) {
    throw InfeasibleError("SolveScaledLyapunov: spectral radius " +
                          std::to_string(rho) + " is not below sqrt(a0)");
  }
  const int n = A0.rows();
  const MatrixXd A = A0 / std::sqrt(a0);
  MatrixXd term = MatrixXd::Identity(n, n) / a0;
  MatrixXd P = term;
  constexpr long kMaxIterations = 50000000;
  for (long k = 0; k < kMaxIterations; ++k) {
    term = A.transpose() * term * A;
    P += term;
    if (term.norm() < 1e-12) return 0.5 * (P + P.transpose());
  }
  throw InfeasibleError("SolveScaledLyapunov: iteration did not converge");
}

LyapunovCertificate ConstructLinearCertificate(const LinearBlocks& blocks,
                                               double a0) {
  const int m = blocks.layout.nominal();
  const int sy = blocks.layout.output;
  const int total = blocks.layout.total();
  if (blocks.A_S.rows() != total || blocks.A_S.cols() != total ||
      blocks.A_U.rows() != total || blocks.A_U.cols() != total) {
    throw InputError("ConstructLinearCertificate: block sizes differ from "
                     "the layout");
  }
  const MatrixXd A0 = blocks.A_S.topLeftCorner(m, m);
  const MatrixXd M = blocks.A_S.block(m, 0, sy, m);
  const MatrixXd P0 = SolveScaledLyapunov(A0, a0);
  const double lambda0 = SymmetricMinEig(P0);
  const double gain = std::pow(M.operatorNorm(), 2) / lambda0;

  double eps = 1.0;
  double a_S = a0 + eps * gain;
  for (int k = 0; k < 2000 && a_S > 0.5 * (1.0 + a0); ++k) {
    eps *= 0.5;
    a_S = a0 + eps * gain;
  }
  if (a_S >= 1.0) {
    throw InfeasibleError("ConstructLinearCertificate: a_S did not drop "
                          "below one");
  }
  MatrixXd P = MatrixXd::Zero(total, total);
  P.topLeftCorner(m, m) = P0;
  P.bottomRightCorner(sy, sy) = eps * MatrixXd::Identity(sy, sy);
  const double lambda = SymmetricMinEig(P);
  const double growth =
      SymmetricNorm(blocks.A_U.transpose() * P * blocks.A_U) / lambda;
  const double a_U = std::max(growth, a_S + 1e-9);
  return LyapunovCertificate::Quadratic(P, a_S, a_U);
}

LyapunovCertificate ConstructLinearCertificate(const LinearBlocks& blocks) {
  const int m = blocks.layout.nominal();
  const double rho = SpectralRadius(blocks.A_S.topLeftCorner(m, m));
  if (rho >= 1.0) {
    throw InfeasibleError("ConstructLinearCertificate: nominal loop is not "
                          "Schur stable");
  }
  return ConstructLinearCertificate(blocks, 0.5 * (1.0 + rho * rho));
}

namespace {

void CheckGrowth(const GrowthCertificateW& w) {
  if (!w.W) throw InputError("GrowthCertificateW: missing W");
  if (!(w.a_W1 > 0.0 && w.a_W1 < 1.0)) {
    throw InputError("GrowthCertificateW: a_W1 must lie in (0, 1)");
  }
  if (!(w.a_W0 >= 0.0) || !(w.b_0 >= 0.0)) {
    throw InputError("GrowthCertificateW: a_W0 and b_0 must be >= 0");
  }
  if (!(w.lower_quadratic > 0.0) ||
      !(w.upper_quadratic >= w.lower_quadratic)) {
    throw InputError("GrowthCertificateW: need 0 < lower <= upper");
  }
}

}  // namespace

LyapunovCertificate ComposeZeroing(const GrowthCertificateW& w,
                                   const ChiLayout& layout) {
  CheckGrowth(w);
  if (!(w.a_W0 > w.a_W1)) {
    throw InputError("ComposeZeroing: a_W0 must exceed a_W1");
  }
  auto W = w.W;
  auto V = [W, layout](const VectorXd& chi) {
    return W(chi.segment(0, layout.plant),
             chi.segment(layout.plant, layout.controller)) +
           chi.segment(layout.nominal(), layout.output).norm();
  };
  return LyapunovCertificate::Opaque(V, w.a_W1, w.a_W0);
}

LyapunovCertificate ComposeZoh(const GrowthCertificateW& w,
                               const ChiLayout& layout, double c, double nu) {
  CheckGrowth(w);
  if (!(c > 0.0)) throw InputError("ComposeZoh: c must be positive");
  const double bound = (1.0 - w.a_W1) * w.lower_quadratic / (c * c);
  if (!(nu > 0.0 && nu < bound)) {
    throw InputError("ComposeZoh: nu must lie in (0, " +
                     std::to_string(bound) + ")");
  }
  const double a_S = w.a_W1 + nu * c * c / w.lower_quadratic;
  const double a_U = std::max(w.a_W0, w.b_0 / nu + 1.0);
  auto W = w.W;
  auto V = [W, layout, nu](const VectorXd& chi) {
    return W(chi.segment(0, layout.plant),
             chi.segment(layout.plant, layout.controller)) +
           nu * chi.segment(layout.nominal(), layout.output).squaredNorm();
  };
  return LyapunovCertificate::Opaque(V, a_S, a_U);
}

namespace {

struct SamplingChunk {
  double max_s{-1.0};
  double max_u{-1.0};
  VectorXd worst_s;
  VectorXd worst_u;
  int64_t evaluated{0};
  int64_t skipped{0};
};

constexpr int64_t kSamplingChunk = 4096;
constexpr double kSkipV = 1e-12;

}  // namespace

SamplingReport EstimateRatesSampling(const ClosedLoopSystem& sys,
                                     const LyapunovCertificate& cert,
                                     const BoxSampler& sampler) {
  const int dim = sys.chi_dim();
  if (sampler.count < 1) throw InputError("EstimateRatesSampling: count < 1");
  if (sampler.lower.size() != dim || sampler.upper.size() != dim) {
    throw InputError("EstimateRatesSampling: box dimension mismatch");
  }
  if ((sampler.upper - sampler.lower).minCoeff() < 0.0) {
    throw InputError("EstimateRatesSampling: box upper below lower");
  }
  const int64_t chunks = (sampler.count + kSamplingChunk - 1) / kSamplingChunk;
  std::vector<SamplingChunk> parts(chunks);
  ParallelForChunks(chunks, [&](int64_t c) {
    SamplingChunk& part = parts[c];
    StepWorkspace ws = sys.MakeWorkspace();
    VectorXd chi(dim), next(dim);
    const int64_t end = std::min(sampler.count, (c + 1) * kSamplingChunk);
    for (int64_t i = c * kSamplingChunk; i < end; ++i) {
      Rng rng(sampler.seed, static_cast<uint64_t>(i));
      for (int j = 0; j < dim; ++j) {
        chi[j] = sampler.lower[j] +
                 (sampler.upper[j] - sampler.lower[j]) * rng.Uniform();
      }
      const double v = cert(chi);
      if (!(v > kSkipV)) {
        ++part.skipped;
        continue;
      }
      ++part.evaluated;
      sys.StepSuccessInto(chi, next, &ws);
      const double rs = cert(next) / v;
      if (rs > part.max_s) {
        part.max_s = rs;
        part.worst_s = chi;
      }
      sys.StepFailureInto(chi, next, &ws);
      const double ru = cert(next) / v;
      if (ru > part.max_u) {
        part.max_u = ru;
        part.worst_u = chi;
      }
    }
  });

  SamplingReport r;
  r.max_ratio_success = -1.0;
  r.max_ratio_failure = -1.0;
  for (const auto& part : parts) {
    r.evaluated += part.evaluated;
    r.skipped += part.skipped;
    if (part.max_s > r.max_ratio_success) {
      r.max_ratio_success = part.max_s;
      r.worst_success = part.worst_s;
    }
    if (part.max_u > r.max_ratio_failure) {
      r.max_ratio_failure = part.max_u;
      r.worst_failure = part.worst_u;
    }
  }
  if (r.evaluated == 0) {
    throw DegenerateInputError("EstimateRatesSampling: every sample had "
                               "V <= 1e-12");
  }
  r.falsified_success = r.max_ratio_success > cert.a_S() * (1.0 + 1e-9);
  r.falsified_failure = r.max_ratio_failure > cert.a_U() * (1.0 + 1e-9);
  return r;
}

}  // namespace wncs
