#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace wncs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using ConstVecRef = Eigen::Ref<const VectorXd>;
using VecRef = Eigen::Ref<VectorXd>;

/// Plant x_p' = f_p(x_p, u), y = g_p(x_p). The maps write into preallocated
/// outputs of the declared sizes.
struct PlantModel {
  int state_dim{};
  int input_dim{};
  int output_dim{};
  std::function<void(const ConstVecRef& x, const ConstVecRef& u, VecRef x_next)>
      step;
  std::function<void(const ConstVecRef& x, VecRef y)> output;
};

/// Controller x_c' = f_c(x_c, y), u = g_c(x_c, y). A static controller has
/// state_dim = 0 and may leave `step` empty.
struct ControllerModel {
  int state_dim{};
  std::function<void(const ConstVecRef& xc, const ConstVecRef& y,
                     VecRef xc_next)>
      step;
  std::function<void(const ConstVecRef& xc, const ConstVecRef& y, VecRef u)>
      output;
};

class HoldStrategy {
 public:
  enum class Kind { kZeroOrderHold, kZeroing, kLinearHold };

  static HoldStrategy ZeroOrderHold();
  static HoldStrategy Zeroing();
  static HoldStrategy LinearHold(const MatrixXd& C_g);

  Kind kind() const { return kind_; }
  /// The matrix C_g with ŷ' = C_g ŷ (identity for ZOH, zero for zeroing).
  MatrixXd Matrix(int output_dim) const;
  void Apply(const ConstVecRef& y_hat, VecRef out) const;
  VectorXd Apply(const VectorXd& y_hat) const;

 private:
  HoldStrategy(Kind kind, MatrixXd C_g) : kind_(kind), C_g_(std::move(C_g)) {}
  Kind kind_;
  MatrixXd C_g_;
};

/// Sizes of the three blocks of χ = (x_p, x_c, ŷ).
struct ChiLayout {
  int plant{};
  int controller{};
  int output{};
  int nominal() const { return plant + controller; }
  int total() const { return plant + controller + output; }
};

/// The success and failure maps χ' = A_S χ and χ' = A_U χ of a linear loop.
struct LinearBlocks {
  MatrixXd A_S;
  MatrixXd A_U;
  ChiLayout layout;
};

/// Scratch buffers for the allocation-free step functions.
struct StepWorkspace {
  VectorXd y;
  VectorXd u;
};

class ClosedLoopSystem {
 public:
  ClosedLoopSystem(PlantModel plant, ControllerModel controller,
                   HoldStrategy hold);

  const PlantModel& plant() const { return plant_; }
  const ControllerModel& controller() const { return controller_; }
  const HoldStrategy& hold() const { return hold_; }
  const ChiLayout& layout() const { return layout_; }
  int chi_dim() const { return layout_.total(); }

  /// Present when the system was built by LinearSystem().
  const std::optional<LinearBlocks>& linear_blocks() const { return linear_; }
  void set_linear_blocks(LinearBlocks blocks) { linear_ = std::move(blocks); }

  StepWorkspace MakeWorkspace() const;

  /// f_S. `out` must not alias `chi`.
  void StepSuccessInto(const ConstVecRef& chi, VecRef out,
                       StepWorkspace* ws) const;
  /// f_U. `out` must not alias `chi`.
  void StepFailureInto(const ConstVecRef& chi, VecRef out,
                       StepWorkspace* ws) const;

  VectorXd StepSuccess(const VectorXd& chi) const;
  VectorXd StepFailure(const VectorXd& chi) const;

  /// F(χ, 1) = f_S(χ); F(χ, ℓ) = f_U(F(χ, ℓ - 1)).
  VectorXd Iterate(const VectorXd& chi, int ell) const;

 private:
  void CheckDim(const ConstVecRef& chi) const;

  PlantModel plant_;
  ControllerModel controller_;
  HoldStrategy hold_;
  ChiLayout layout_;
  std::optional<LinearBlocks> linear_;
};

/// Single link robot arm sampled at 1 ms with the static feedback
/// u = -sin(y1) - 25 y1 - 10 y2, y = x_p and zero-order hold.
ClosedLoopSystem RobotArm();

/// Jacobians of the robot arm's f_S and f_U at the origin.
LinearBlocks RobotArmLinearization();

/// Linear plant and controller. A controller without state is given as
/// 0x0 A_c, 0xs_y B_c and s_u x 0 C_c.
ClosedLoopSystem LinearSystem(const MatrixXd& A_p, const MatrixXd& B_p,
                              const MatrixXd& C_p, const MatrixXd& A_c,
                              const MatrixXd& B_c, const MatrixXd& C_c,
                              const MatrixXd& D_c, const MatrixXd& C_g);

}  // namespace wncs
