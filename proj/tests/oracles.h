#pragma once

// Reference values computed offline at 40 significant digits with mpmath.

namespace wncs::oracle {

// Quantized Rayleigh, sigma2 = 1, grid {0, 0.05, ..., 5}.
constexpr double kRho0 = 0.024690087971667333;
constexpr double kRho5 = 0.082084998623898795;
constexpr double kTail2p2 = 0.33287108369807952;

// QPSK over 32 bits.
constexpr double kQpsk32At0 = 2.3283064365386963e-10;
constexpr double kQpsk32At4 = 0.92780711201975227;
constexpr double kQpsk32At2p2 = 0.55975725952627125;

// exp(-1/9.5) and 9.5 / (10 exp(-1/9.5) + 1).
constexpr double kExpSuccess9p5 = 0.90008762625225925;
constexpr double kPureTimeCost9p5 = 0.94991676235415666;

// Required success probability for a_S = 0.98, a_U = 1.0009, mu = 0.999,
// evaluated at the binary64 values of those rates.
constexpr double kEtaStar[11] = {
    0.09004209711167756,  0.0989519370356282,  0.10981871123509739,
    0.12336668117060431,  0.14072780319979267, 0.16377558092050526,
    0.1958512298657666,   0.24355099098525504, 0.32196617099475594,
    0.47485266548885685,  0.9042275077543612};

// -1 / ln(0.5).
constexpr double kGainForHalf = 1.4426950408889634;

}  // namespace wncs::oracle
