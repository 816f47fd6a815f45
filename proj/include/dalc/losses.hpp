#pragma once

// Probit-style losses of the normalized margin of a linear classifier
// under an isotropic Gaussian posterior.
//
//   phi(x)     = P[N(0,1) > x]          Gibbs risk of a single example
//   phi_dis(x) = 2 phi(x) phi(-x)       expected disagreement of two voters
//   phi_err(x) = phi(x)^2               expected joint error of two voters
//
// Pointwise, phi_err(x) + phi_dis(x) / 2 = phi(x).
//
// All functions throw std::invalid_argument on non-finite input.

namespace dalc {

double phi(double x);
double phi_dis(double x);
double phi_err(double x);

double d_phi(double x);
double d_phi_dis(double x);
double d_phi_err(double x);

}  // namespace dalc
