#pragma once

// Gaussian special functions, the isoperimetric profile and curvature rates.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace harnack {

template <typename Scalar>
constexpr Scalar inv_sqrt_2pi = Scalar(0.398942280401432677939946059934381868L);

template <typename Scalar>
inline Scalar normal_pdf(Scalar x) {
  using std::exp;
  return inv_sqrt_2pi<Scalar> * exp(Scalar(-0.5) * x * x);
}

template <typename Scalar>
inline Scalar log_normal_pdf(Scalar x) {
  using std::log;
  return log(inv_sqrt_2pi<Scalar>) - Scalar(0.5) * x * x;
}

template <typename Scalar>
inline Scalar normal_cdf(Scalar x) {
  using std::erfc;
  return Scalar(0.5) * erfc(-x * Scalar(0.70710678118654752440084436210484903L));
}

// Q(x) = 1 - Phi(x), accurate in the upper tail.
template <typename Scalar>
inline Scalar normal_sf(Scalar x) {
  return normal_cdf(-x);
}

namespace detail {

// Wichura's AS241 (PPND16), relative accuracy about 1e-16 before refinement.
template <typename Scalar>
Scalar ppnd16(Scalar p) {
  using std::log;
  using std::sqrt;
  const Scalar q = p - Scalar(0.5);
  if (std::abs(q) <= Scalar(0.425)) {
    const Scalar r = Scalar(0.180625) - q * q;
    const Scalar num =
        ((((((Scalar(2.5090809287301226727e+3) * r + Scalar(3.3430575583588128105e+4)) * r +
             Scalar(6.7265770927008700853e+4)) * r + Scalar(4.5921953931549871457e+4)) * r +
           Scalar(1.3731693765509461125e+4)) * r + Scalar(1.9715909503065514427e+3)) * r +
         Scalar(1.3314166789178437745e+2)) * r + Scalar(3.3871328727963666080e+0);
    const Scalar den =
        ((((((Scalar(5.2264952788528545610e+3) * r + Scalar(2.8729085735721942674e+4)) * r +
             Scalar(3.9307895800092710610e+4)) * r + Scalar(2.1213794301586595867e+4)) * r +
           Scalar(5.3941960214247511077e+3)) * r + Scalar(6.8718700749205790830e+2)) * r +
         Scalar(4.2313330701600911252e+1)) * r + Scalar(1);
    return q * num / den;
  }
  Scalar r = q < 0 ? p : Scalar(1) - p;
  r = sqrt(-log(r));
  Scalar val;
  if (r <= Scalar(5)) {
    r -= Scalar(1.6);
    const Scalar num =
        ((((((Scalar(7.74545014278341407640e-4) * r + Scalar(2.27238449892691845833e-2)) * r +
             Scalar(2.41780725177450611770e-1)) * r + Scalar(1.27045825245236838258e+0)) * r +
           Scalar(3.64784832476320460504e+0)) * r + Scalar(5.76949722146069140550e+0)) * r +
         Scalar(4.63033784615654529590e+0)) * r + Scalar(1.42343711074968357734e+0);
    const Scalar den =
        ((((((Scalar(1.05075007164441684324e-9) * r + Scalar(5.47593808499534494600e-4)) * r +
             Scalar(1.51986665636164571966e-2)) * r + Scalar(1.48103976427480074590e-1)) * r +
           Scalar(6.89767334985100004550e-1)) * r + Scalar(1.67638483018380384940e+0)) * r +
         Scalar(2.05319162663775882187e+0)) * r + Scalar(1);
    val = num / den;
  } else {
    r -= Scalar(5);
    const Scalar num =
        ((((((Scalar(2.01033439929228813265e-7) * r + Scalar(2.71155556874348757815e-5)) * r +
             Scalar(1.24266094738807843860e-3)) * r + Scalar(2.65321895265761230930e-2)) * r +
           Scalar(2.96560571828504891230e-1)) * r + Scalar(1.78482653991729133580e+0)) * r +
         Scalar(5.46378491116411436990e+0)) * r + Scalar(6.65790464350110377720e+0);
    const Scalar den =
        ((((((Scalar(2.04426310338993978564e-15) * r + Scalar(1.42151175831644588870e-7)) * r +
             Scalar(1.84631831751005468180e-5)) * r + Scalar(7.86869131145613259100e-4)) * r +
           Scalar(1.48753612908506148525e-2)) * r + Scalar(1.36929880922735805310e-1)) * r +
         Scalar(5.99832206555887937690e-1)) * r + Scalar(1);
    val = num / den;
  }
  return q < 0 ? -val : val;
}

}  // namespace detail

// Phi^{-1}(p) for p in (0, 1/2], computed in the lower tail where p carries full
// relative precision, then polished by one Halley step on Phi.
template <typename Scalar>
Scalar lower_quantile(Scalar p) {
  using std::exp;
  Scalar x = detail::ppnd16(p);
  const Scalar e = normal_cdf(x) - p;
  const Scalar u = e / normal_pdf(x);
  if (std::isfinite(u)) x -= u / (Scalar(1) + Scalar(0.5) * x * u);
  return x;
}

// Phi^{-1}(p). Outside (0,1) the result is -inf / +inf.
template <typename Scalar>
Scalar normal_quantile(Scalar p) {
  if (!(p >= Scalar(0) && p <= Scalar(1))) throw std::domain_error("normal_quantile: p outside [0,1]");
  if (p == Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  if (p == Scalar(1)) return std::numeric_limits<Scalar>::infinity();
  if (p <= Scalar(0.5)) return lower_quantile(p);
  return -lower_quantile(Scalar(1) - p);
}

// Phi^{-1} of a probability given together with its complement q = 1 - p.
// Whichever of the two is smaller is used, so upper-tail values keep precision.
template <typename Scalar>
Scalar probit_pair(Scalar p, Scalar q) {
  if (p <= q) return p <= Scalar(0) ? -std::numeric_limits<Scalar>::infinity() : lower_quantile(p);
  return q <= Scalar(0) ? std::numeric_limits<Scalar>::infinity() : -lower_quantile(q);
}

constexpr double clamp_epsilon = 1e-15;

// Clamped probit: the probability pair is pulled into [eps, 1-eps] before inversion.
struct ClampedProbit {
  double value;
  bool clamped;
};

inline ClampedProbit clamped_probit(double p, double q) {
  bool clamped = false;
  if (p < clamp_epsilon) {
    p = clamp_epsilon;
    q = 1.0 - clamp_epsilon;
    clamped = true;
  } else if (q < clamp_epsilon) {
    q = clamp_epsilon;
    p = 1.0 - clamp_epsilon;
    clamped = true;
  }
  return {probit_pair(p, q), clamped};
}

// I(v) = phi(Phi^{-1}(v)).
template <typename Scalar>
Scalar iso_profile(Scalar v) {
  if (!(v >= Scalar(0) && v <= Scalar(1))) throw std::domain_error("iso_profile: v outside [0,1]");
  if (v == Scalar(0) || v == Scalar(1)) return Scalar(0);
  const Scalar m = v <= Scalar(0.5) ? v : Scalar(1) - v;
  return normal_pdf(lower_quantile(m));
}

// I evaluated from a probability and its complement.
template <typename Scalar>
Scalar iso_profile_pair(Scalar p, Scalar q) {
  const Scalar m = p <= q ? p : q;
  if (m <= Scalar(0)) return Scalar(0);
  return normal_pdf(lower_quantile(m));
}

struct CurvatureParams {
  double K = 0.0;
  std::optional<double> N;  // absent means infinite dimension

  CurvatureParams() = default;
  CurvatureParams(double k, std::optional<double> n = std::nullopt) : K(k), N(n) {
    if (N && !(*N >= 1.0)) throw std::invalid_argument("CurvatureParams: N must be >= 1");
  }
};

// sigma(t) = (e^{2Kt} - 1)/K, equal to 2t at K = 0.
template <typename Scalar>
Scalar sigma(Scalar K, Scalar t) {
  using std::expm1;
  if (!(t >= Scalar(0))) throw std::domain_error("sigma: negative time");
  if (K == Scalar(0)) return Scalar(2) * t;
  return expm1(Scalar(2) * K * t) / K;
}

// K(t) = (1 - e^{-2Kt})/K, equal to 2t at K = 0.
template <typename Scalar>
Scalar kappa(Scalar K, Scalar t) {
  using std::expm1;
  if (!(t >= Scalar(0))) throw std::domain_error("kappa: negative time");
  if (K == Scalar(0)) return Scalar(2) * t;
  return -expm1(Scalar(-2) * K * t) / K;
}

}  // namespace harnack
