#ifndef CATLAB_SPECIAL_FUNCTIONS_HPP
#define CATLAB_SPECIAL_FUNCTIONS_HPP

namespace catlab {

// In-house special functions backing the Beta machinery.

// Lanczos approximation, accurate to ~1e-13 for x > 0.
double log_gamma(double x);

double log_beta(double a, double b);

// psi(x) via recurrence into the asymptotic range.
double digamma(double x);

// psi'(x), same scheme.
double trigamma(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// Absolute error <= 1e-10 over the supported range.
double incomplete_beta(double a, double b, double x);

}  // namespace catlab

#endif
