#include "wncs/dynamics.h"

#include <cmath>
#include <string>

#include "wncs/error.h"

namespace wncs {

HoldStrategy HoldStrategy::ZeroOrderHold() {
  return HoldStrategy(Kind::kZeroOrderHold, MatrixXd());
}

HoldStrategy HoldStrategy::Zeroing() {
  return HoldStrategy(Kind::kZeroing, MatrixXd());
}

HoldStrategy HoldStrategy::LinearHold(const MatrixXd& C_g) {
  if (C_g.rows() != C_g.cols()) {
    throw InputError("LinearHold: C_g must be square");
  }
  return HoldStrategy(Kind::kLinearHold, C_g);
}

MatrixXd HoldStrategy::Matrix(int output_dim) const {
  switch (kind_) {
    case Kind::kZeroOrderHold:
      return MatrixXd::Identity(output_dim, output_dim);
    case Kind::kZeroing:
      return MatrixXd::Zero(output_dim, output_dim);
    case Kind::kLinearHold:
      return C_g_;
  }
  return MatrixXd();
}

void HoldStrategy::Apply(const ConstVecRef& y_hat, VecRef out) const {
  switch (kind_) {
    case Kind::kZeroOrderHold:
      out = y_hat;
      return;
    case Kind::kZeroing:
      out.setZero();
      return;
    case Kind::kLinearHold:
      out.noalias() = C_g_ * y_hat;
      return;
  }
}

VectorXd HoldStrategy::Apply(const VectorXd& y_hat) const {
  VectorXd out(y_hat.size());
  Apply(y_hat, out);
  return out;
}

ClosedLoopSystem::ClosedLoopSystem(PlantModel plant,
                                   ControllerModel controller,
                                   HoldStrategy hold)
    : plant_(std::move(plant)),
      controller_(std::move(controller)),
      hold_(std::move(hold)) {
  if (plant_.state_dim <= 0 || plant_.input_dim <= 0 ||
      plant_.output_dim <= 0) {
    throw InputError("ClosedLoopSystem: plant dimensions must be positive");
  }
  if (controller_.state_dim < 0) {
    throw InputError("ClosedLoopSystem: negative controller dimension");
  }
  if (!plant_.step || !plant_.output || !controller_.output) {
    throw InputError("ClosedLoopSystem: missing plant or controller map");
  }
  if (controller_.state_dim > 0 && !controller_.step) {
    throw InputError("ClosedLoopSystem: dynamic controller needs a step map");
  }
  if (hold_.kind() == HoldStrategy::Kind::kLinearHold &&
      hold_.Matrix(plant_.output_dim).rows() != plant_.output_dim) {
    throw InputError("ClosedLoopSystem: C_g size differs from output_dim");
  }
  layout_ = ChiLayout{plant_.state_dim, controller_.state_dim,
                      plant_.output_dim};
}

StepWorkspace ClosedLoopSystem::MakeWorkspace() const {
  return StepWorkspace{VectorXd::Zero(plant_.output_dim),
                       VectorXd::Zero(plant_.input_dim)};
}

void ClosedLoopSystem::CheckDim(const ConstVecRef& chi) const {
  if (chi.size() != chi_dim()) {
    throw InputError("state has dimension " + std::to_string(chi.size()) +
                     ", expected " + std::to_string(chi_dim()));
  }
}

void ClosedLoopSystem::StepSuccessInto(const ConstVecRef& chi, VecRef out,
                                       StepWorkspace* ws) const {
  CheckDim(chi);
  const int sp = layout_.plant, sc = layout_.controller, sy = layout_.output;
  const auto xp = chi.segment(0, sp);
  const auto xc = chi.segment(sp, sc);
  plant_.output(xp, ws->y);
  controller_.output(xc, ws->y, ws->u);
  plant_.step(xp, ws->u, out.segment(0, sp));
  if (sc > 0) controller_.step(xc, ws->y, out.segment(sp, sc));
  hold_.Apply(ws->y, out.segment(sp + sc, sy));
}

void ClosedLoopSystem::StepFailureInto(const ConstVecRef& chi, VecRef out,
                                       StepWorkspace* ws) const {
  CheckDim(chi);
  const int sp = layout_.plant, sc = layout_.controller, sy = layout_.output;
  const auto xp = chi.segment(0, sp);
  const auto xc = chi.segment(sp, sc);
  const auto y_hat = chi.segment(sp + sc, sy);
  controller_.output(xc, y_hat, ws->u);
  plant_.step(xp, ws->u, out.segment(0, sp));
  if (sc > 0) controller_.step(xc, y_hat, out.segment(sp, sc));
  hold_.Apply(y_hat, out.segment(sp + sc, sy));
}

VectorXd ClosedLoopSystem::StepSuccess(const VectorXd& chi) const {
  StepWorkspace ws = MakeWorkspace();
  VectorXd out(chi_dim());
  StepSuccessInto(chi, out, &ws);
  return out;
}

VectorXd ClosedLoopSystem::StepFailure(const VectorXd& chi) const {
  StepWorkspace ws = MakeWorkspace();
  VectorXd out(chi_dim());
  StepFailureInto(chi, out, &ws);
  return out;
}

VectorXd ClosedLoopSystem::Iterate(const VectorXd& chi, int ell) const {
  if (ell < 1) throw InputError("Iterate: ell must be at least 1");
  VectorXd x = StepSuccess(chi);
  for (int l = 2; l <= ell; ++l) x = StepFailure(x);
  return x;
}

namespace {

constexpr double kArmPeriod = 1e-3;

}  // namespace

ClosedLoopSystem RobotArm() {
  PlantModel plant;
  plant.state_dim = 2;
  plant.input_dim = 1;
  plant.output_dim = 2;
  plant.step = [](const ConstVecRef& x, const ConstVecRef& u, VecRef next) {
    const double x1 = x[0], x2 = x[1];
    next[0] = x1 + kArmPeriod * x2;
    next[1] = x2 + kArmPeriod * (std::sin(x1) + u[0]);
  };
  plant.output = [](const ConstVecRef& x, VecRef y) { y = x; };

  ControllerModel controller;
  controller.state_dim = 0;
  controller.output = [](const ConstVecRef&, const ConstVecRef& y, VecRef u) {
    u[0] = -std::sin(y[0]) - 25.0 * y[0] - 10.0 * y[1];
  };
  return ClosedLoopSystem(std::move(plant), std::move(controller),
                          HoldStrategy::ZeroOrderHold());
}

LinearBlocks RobotArmLinearization() {
  // d/dx of x2 + T(sin x1 + u) with u = -sin y1 - 25 y1 - 10 y2.
  MatrixXd A_S(4, 4), A_U(4, 4);
  const double T = kArmPeriod;
  A_S << 1, T, 0, 0,
         T * (1 - 1 - 25), 1 - 10 * T, 0, 0,
         1, 0, 0, 0,
         0, 1, 0, 0;
  A_U << 1, T, 0, 0,
         T, 1, T * (-1 - 25), -10 * T,
         0, 0, 1, 0,
         0, 0, 0, 1;
  return LinearBlocks{A_S, A_U, ChiLayout{2, 0, 2}};
}

ClosedLoopSystem LinearSystem(const MatrixXd& A_p, const MatrixXd& B_p,
                              const MatrixXd& C_p, const MatrixXd& A_c,
                              const MatrixXd& B_c, const MatrixXd& C_c,
                              const MatrixXd& D_c, const MatrixXd& C_g) {
  const int sp = A_p.rows(), su = B_p.cols(), sy = C_p.rows();
  const int sc = A_c.rows();
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("LinearSystem: ") + what);
  };
  require(sp > 0 && A_p.cols() == sp, "A_p must be square and nonempty");
  require(B_p.rows() == sp && su > 0, "B_p must be s_p x s_u");
  require(C_p.cols() == sp && sy > 0, "C_p must be s_y x s_p");
  require(A_c.cols() == sc, "A_c must be square");
  require(B_c.rows() == sc && (sc == 0 || B_c.cols() == sy),
          "B_c must be s_c x s_y");
  require(C_c.rows() == su && C_c.cols() == sc, "C_c must be s_u x s_c");
  require(D_c.rows() == su && D_c.cols() == sy, "D_c must be s_u x s_y");
  require(C_g.rows() == sy && C_g.cols() == sy, "C_g must be s_y x s_y");

  PlantModel plant;
  plant.state_dim = sp;
  plant.input_dim = su;
  plant.output_dim = sy;
  plant.step = [A_p, B_p](const ConstVecRef& x, const ConstVecRef& u,
                          VecRef next) {
    next.noalias() = A_p * x;
    next.noalias() += B_p * u;
  };
  plant.output = [C_p](const ConstVecRef& x, VecRef y) {
    y.noalias() = C_p * x;
  };

  ControllerModel controller;
  controller.state_dim = sc;
  if (sc > 0) {
    controller.step = [A_c, B_c](const ConstVecRef& xc, const ConstVecRef& y,
                                 VecRef next) {
      next.noalias() = A_c * xc;
      next.noalias() += B_c * y;
    };
  }
  controller.output = [C_c, D_c, sc](const ConstVecRef& xc,
                                     const ConstVecRef& y, VecRef u) {
    u.noalias() = D_c * y;
    if (sc > 0) u.noalias() += C_c * xc;
  };

  ClosedLoopSystem sys(std::move(plant), std::move(controller),
                       HoldStrategy::LinearHold(C_g));

  const int n = sp + sc + sy;
  MatrixXd A_S = MatrixXd::Zero(n, n), A_U = MatrixXd::Zero(n, n);
  A_S.block(0, 0, sp, sp) = A_p + B_p * D_c * C_p;
  A_S.block(sp + sc, 0, sy, sp) = C_g * C_p;
  A_U.block(0, 0, sp, sp) = A_p;
  A_U.block(0, sp + sc, sp, sy) = B_p * D_c;
  A_U.block(sp + sc, sp + sc, sy, sy) = C_g;
  if (sc > 0) {
    A_S.block(0, sp, sp, sc) = B_p * C_c;
    A_S.block(sp, 0, sc, sp) = B_c * C_p;
    A_S.block(sp, sp, sc, sc) = A_c;
    A_U.block(0, sp, sp, sc) = B_p * C_c;
    A_U.block(sp, sp, sc, sc) = A_c;
    A_U.block(sp, sp + sc, sc, sy) = B_c;
  }
  sys.set_linear_blocks(LinearBlocks{A_S, A_U, sys.layout()});
  return sys;
}

}  // namespace wncs
