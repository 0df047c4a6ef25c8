#pragma once

// Reference values produced by tests/oracle/compute_oracles.cpp (fixed-step
// RK4, h = 1e-6, Taylor start). Cross-checked where closed forms exist:
//   serrin t=1      vs 2*acos(exp(-1/2))            (|diff| ~ 1e-15)
//   linear lambda=2 vs pi/2                          (|diff| ~ 1e-14)
//   linear lambda=1 vs first zero of P_nu(cos rho), nu = (sqrt5-1)/2, mpmath
//                                                    (|diff| ~ 1e-14)

namespace edl_oracle::frozen {

inline constexpr double allen_cahn_t05_r = 2.200285671620283;
inline constexpr double allen_cahn_t05_slope = -0.500974691682152;
inline constexpr double serrin_t1_r = 1.838213314587178;
inline constexpr double linear1_R = 2.066461259876582;
inline constexpr double linear1_alpha = -0.940038755146273;
inline constexpr double linear_R_lambda_0p1 = 3.132981865460345;
inline constexpr double linear_R_lambda_100 = 0.240082499282944;
inline constexpr double lambda_for_R_2p5 = 0.554462035425912;
// allen-cahn t = 0.5: (U_{t+h} - U_{t-h}) / 2h at rho = r_t / 2, h = 1e-4
inline constexpr double allen_cahn_t05_H_half = 0.897005595425771;
inline constexpr double allen_cahn_t05_U_at_1 = 0.403977065624493;

// r_t for f(x) = x - x^3 at t = 0.1, 0.3, 0.5, 0.7, 0.9
inline constexpr double allen_cahn_sweep_t[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
inline constexpr double allen_cahn_sweep_r[5] = {2.071190324061608, 2.110696730809584, 2.200285671620283,
                                                 2.373324834078562, 2.763970991907158};

}  // namespace edl_oracle::frozen
