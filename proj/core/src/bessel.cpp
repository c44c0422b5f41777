#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uwmimo/acoustic_channel.hpp"

namespace uwmimo::channel {

namespace {

double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J0 + 2 sum J_2k = 1.
double j0_miller(double x) {
  const int start = 2 * (static_cast<int>(x + 40.0 + 4.0 * std::cbrt(x)) / 2);
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;
  double norm = 0.0;
  double j0 = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
    }
  }
  j0 = cur;
  norm += j0;
  return j0 / norm;
}

// Hankel asymptotic expansion, truncated at the smallest term.
double j0_asymptotic(double x) {
  double p = 1.0;
  double q = 0.0;
  double c = 1.0;  // c_k = prod_{m<=k} (2m-1)^2 / (k! 8^k)
  double xk = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    c *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
    xk *= x;
    const double term = c / xk;
    if (term > last || term < 1e-17) break;
    last = term;
    // P takes even k with alternating sign, Q takes odd k with a leading minus.
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      q -= (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j0: argument must be finite");
  x = std::abs(x);
  if (x < 4.0) return j0_series(x);
  if (x < 25.0) return j0_miller(x);
  return j0_asymptotic(x);
}

}  // namespace uwmimo::channel
