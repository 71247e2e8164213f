#include "wncs/reference.h"

namespace wncs {

MatrixXd RobotArmP() {
  MatrixXd P(4, 4);
  P << 0.0384, -0.0019, -0.0336, 0.0031,
       -0.0019, 0.0015, 0.0033, -0.0008,
       -0.0336, 0.0033, 0.0341, -0.0032,
       0.0031, -0.0008, -0.0032, 0.0009;
  return P;
}

LyapunovCertificate RobotArmCertificate() {
  return LyapunovCertificate::Quadratic(RobotArmP(), 0.98, 1.0009);
}

RateTarget RobotArmRates(double mu) { return RateTarget(mu, 0.98, 1.0009); }

ChannelModel RayleighQpskChannel(double P_S, double P_max) {
  return QuantizedRayleigh(1.0, RayleighGrid{0.0, 0.05, 5.0},
                           SuccessFunction::QpskAwgn(32), P_S, P_max);
}

ChannelModel ExpErrorChannel(double P_max) {
  return SinglePointChannel(1.0, SuccessFunction::ExpError(), 0.0, P_max);
}

}  // namespace wncs
