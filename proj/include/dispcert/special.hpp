#pragma once

namespace dispcert {

// ln B(a, b).
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0,1].
double incbeta(double a, double b, double x);

// x with I_x(a, b) = p, for p in [0,1].
double incbeta_inv(double a, double b, double p);

}  // namespace dispcert
