#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace losslab {

/// Truncated power series around expansion_point; coeffs[k] multiplies
/// (x - expansion_point)^k.
template <typename Scalar>
struct TaylorSeries {
  Scalar expansion_point{0};
  std::vector<Scalar> coeffs;
};

/// Rational function P(t)/Q(t), t = x - expansion_point, with Q(0) fixed to 1.
template <typename Scalar>
struct PadeApproximant {
  int m = 0;  // numerator order, num_coeffs.size() == m + 1
  int n = 0;  // denominator order, den_coeffs.size() == n + 1, den_coeffs[0] == 1
  std::vector<Scalar> num_coeffs;
  std::vector<Scalar> den_coeffs;
  Scalar expansion_point{0};
};

/// Series of the positive-class binary cross-entropy term as commonly
/// expanded around p = 1: coeffs[k] = (-1)^(k+1)/k in t = p - 1.
template <typename Scalar = double>
TaylorSeries<Scalar> taylor_pos_bce(int order) {
  if (order < 1) {
    throw std::invalid_argument("order too small: need order >= 1");
  }
  TaylorSeries<Scalar> s;
  s.expansion_point = Scalar(1);
  s.coeffs.resize(static_cast<std::size_t>(order) + 1, Scalar(0));
  for (int k = 1; k <= order; ++k) {
    s.coeffs[static_cast<std::size_t>(k)] = (k % 2 == 1 ? Scalar(1) : Scalar(-1)) / Scalar(k);
  }
  return s;
}

/// Series of the negative-class term around p = 0: coeffs[k] = -1/k in t = p.
template <typename Scalar = double>
TaylorSeries<Scalar> taylor_neg_bce(int order) {
  if (order < 1) {
    throw std::invalid_argument("order too small: need order >= 1");
  }
  TaylorSeries<Scalar> s;
  s.expansion_point = Scalar(0);
  s.coeffs.resize(static_cast<std::size_t>(order) + 1, Scalar(0));
  for (int k = 1; k <= order; ++k) {
    s.coeffs[static_cast<std::size_t>(k)] = Scalar(-1) / Scalar(k);
  }
  return s;
}

/// [m/n] approximant whose re-expansion matches the input series through
/// order m + n. Denominator coefficients come from the cross-multiplied
/// matching conditions, solved by LU with partial pivoting; the numerator
/// follows by convolution.
template <typename Scalar>
PadeApproximant<Scalar> pade_from_taylor(const TaylorSeries<Scalar>& series, int m, int n) {
  if (m < 0 || n < 0) {
    throw std::invalid_argument("pade orders must be non-negative");
  }
  const auto need = static_cast<std::size_t>(m + n + 1);
  if (series.coeffs.size() < need) {
    throw std::invalid_argument("series too short: need at least m + n + 1 coefficients");
  }
  const auto& c = series.coeffs;
  auto c_at = [&](int j) { return j >= 0 ? c[static_cast<std::size_t>(j)] : Scalar(0); };

  PadeApproximant<Scalar> out;
  out.m = m;
  out.n = n;
  out.expansion_point = series.expansion_point;
  out.den_coeffs.assign(static_cast<std::size_t>(n) + 1, Scalar(0));
  out.den_coeffs[0] = Scalar(1);

  if (n > 0) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Mat a = Mat::Zero(n, n);
    Vec rhs = Vec::Zero(n);
    // Row r encodes the vanishing of series order m + 1 + r in Q * A - P.
    for (int r = 0; r < n; ++r) {
      const int j = m + 1 + r;
      rhs(r) = -c_at(j);
      for (int k = 1; k <= n; ++k) {
        a(r, k - 1) = c_at(j - k);
      }
    }
    Eigen::PartialPivLU<Mat> lu(a);
    const Scalar rcond = lu.rcond();
    if (!(rcond > Scalar(1e-12))) {
      throw std::runtime_error("degenerate Pade system: condition estimate exceeds 1e12");
    }
    Vec b = lu.solve(rhs);
    for (int k = 1; k <= n; ++k) {
      out.den_coeffs[static_cast<std::size_t>(k)] = b(k - 1);
    }
  }

  out.num_coeffs.assign(static_cast<std::size_t>(m) + 1, Scalar(0));
  for (int j = 0; j <= m; ++j) {
    Scalar acc = Scalar(0);
    for (int k = 0; k <= std::min(j, n); ++k) {
      acc += out.den_coeffs[static_cast<std::size_t>(k)] * c_at(j - k);
    }
    out.num_coeffs[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

/// Evaluate by nested multiplication on both polynomials.
template <typename Scalar>
Scalar eval_pade(const PadeApproximant<Scalar>& approx, Scalar x) {
  const Scalar t = x - approx.expansion_point;
  auto horner = [t](const std::vector<Scalar>& coeffs) {
    Scalar acc = Scalar(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      acc = acc * t + *it;
    }
    return acc;
  };
  const Scalar q = horner(approx.den_coeffs);
  if (std::abs(q) < Scalar(1e-12)) {
    throw std::runtime_error("pole encountered: denominator vanishes at evaluation point");
  }
  return horner(approx.num_coeffs) / q;
}

/// First-order rational coefficients of the positive/negative core terms as
/// used by the alpa loss. The b1 = d1 = 0 denominators make both cores
/// affine; the loss module consumes their magnitudes.
struct AlpaCoefficients {
  double a0 = -1.5;
  double a1 = 1.5;
  double b1 = 0.0;
  double c0 = -1.0;
  double c1 = 1.0;
  double d1 = 0.0;
};

/// Positive core term, non-negative on [0, 1]: |a0 + a1*p| = 1.5 * (1 - p).
inline double alpa_pos_core(double p) { return 1.5 * (1.0 - p); }

/// Negative core term, non-negative on [0, 1]: |c0 + c1*(1 - p)| = p.
inline double alpa_neg_core_base(double p) { return p; }

struct CanonicalAlpaTerms {
  double (*pos)(double);
  double (*neg)(double);
};

inline CanonicalAlpaTerms canonical_alpa_terms() {
  return CanonicalAlpaTerms{&alpa_pos_core, &alpa_neg_core_base};
}

}  // namespace losslab
