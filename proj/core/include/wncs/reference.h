#pragma once

#include "wncs/channel.h"
#include "wncs/lyapunov.h"
#include "wncs/stability.h"

namespace wncs {

/// The reference 4x4 quadratic certificate of the robot arm with
/// a_S = 0.98 and a_U = 1.0009.
MatrixXd RobotArmP();
LyapunovCertificate RobotArmCertificate();
RateTarget RobotArmRates(double mu);

/// Rayleigh σ² = 1 quantized on {0, 0.05, ..., 5} with QPSK over 32 bits.
ChannelModel RayleighQpskChannel(double P_S = 0.0, double P_max = 10.0);

/// Gain 1 with success exp(-1/p), i.e. e(p) = 1 - exp(-1/p).
ChannelModel ExpErrorChannel(double P_max = 10.0);

}  // namespace wncs
