#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "losslab/numeric.hpp"
#include "losslab/pade.hpp"

namespace losslab {

enum class LossKind { Bce, Ce, Focal, Asl, Cb, Alpa };
enum class AlpaVariant { V1, V2, V3, Custom };
enum class CbMode { Standard, AsPrinted };
enum class Reduction { MeanOverSamples, SumOverSamples };

using ClassCounts = std::vector<std::int64_t>;

/// Per-sample, per-class loss value together with its derivative with
/// respect to the logit that produced the probability.
template <typename Scalar>
struct LossEval {
  Scalar value;
  Scalar dvalue_dlogit;
};

/// Tagged loss configuration. All losses are non-negative quantities to be
/// minimized; correct confident predictions drive them to zero.
struct LossSpec {
  LossKind kind = LossKind::Bce;
  AlpaVariant variant = AlpaVariant::Custom;
  double alpha = 1.0;      // positive-branch balancing
  double beta = 1.0;       // negative-branch balancing
  double gamma_pos = 0.0;  // positive focusing exponent
  double gamma_neg = 0.0;  // negative focusing exponent
  double margin = 0.0;     // asl probability shift, in [0, 1)
  double lambda = std::numeric_limits<double>::quiet_NaN();  // hill factor, alpa v3 only
  double cb_beta = 0.99;   // class-balanced effective-number parameter
  CbMode cb_mode = CbMode::Standard;
  Reduction reduction = Reduction::MeanOverSamples;

  static LossSpec bce() {
    LossSpec s;
    s.kind = LossKind::Bce;
    return s;
  }

  static LossSpec ce() {
    LossSpec s;
    s.kind = LossKind::Ce;
    return s;
  }

  static LossSpec focal(double gamma, double alpha_pos = 1.0, double alpha_neg = 1.0) {
    LossSpec s;
    s.kind = LossKind::Focal;
    s.alpha = alpha_pos;
    s.beta = alpha_neg;
    s.gamma_pos = gamma;
    s.gamma_neg = gamma;
    return s;
  }

  static LossSpec asl(double gamma_pos, double gamma_neg, double margin = 0.0) {
    LossSpec s;
    s.kind = LossKind::Asl;
    s.gamma_pos = gamma_pos;
    s.gamma_neg = gamma_neg;
    s.margin = margin;
    return s;
  }

  static LossSpec cb(double cb_beta, CbMode mode = CbMode::Standard, double gamma = 0.0) {
    LossSpec s;
    s.kind = LossKind::Cb;
    s.cb_beta = cb_beta;
    s.cb_mode = mode;
    s.gamma_pos = gamma;  // only the as-printed mode reads this
    return s;
  }

  /// Preset hyperparameters per variant; Custom leaves the balancing and
  /// focusing fields unset (NaN) until the caller provides them.
  static LossSpec alpa(AlpaVariant variant) {
    LossSpec s;
    s.kind = LossKind::Alpa;
    s.variant = variant;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    switch (variant) {
      case AlpaVariant::V1:
        s.alpha = 1.0;
        s.beta = 1.0;
        s.gamma_pos = 0.0;
        s.gamma_neg = 4.0;
        break;
      case AlpaVariant::V2:
        s.alpha = 0.875;
        s.beta = 1.625;
        s.gamma_pos = 0.0;
        s.gamma_neg = 4.0;
        break;
      case AlpaVariant::V3:
        s.alpha = 1.25;
        s.beta = 2.0;
        s.gamma_pos = 3.0;
        s.gamma_neg = 2.0;
        s.lambda = 1.5;
        break;
      case AlpaVariant::Custom:
        s.alpha = nan;
        s.beta = nan;
        s.gamma_pos = nan;
        s.gamma_neg = nan;
        break;
    }
    return s;
  }

  static LossSpec alpa_custom(double alpha, double beta, double gamma_pos, double gamma_neg) {
    LossSpec s = alpa(AlpaVariant::Custom);
    s.alpha = alpha;
    s.beta = beta;
    s.gamma_pos = gamma_pos;
    s.gamma_neg = gamma_neg;
    return s;
  }

  void validate() const {
    if (kind == LossKind::Alpa) {
      if (std::isnan(alpha) || std::isnan(beta) || std::isnan(gamma_pos) || std::isnan(gamma_neg)) {
        throw std::invalid_argument("incomplete spec: alpa custom needs alpha, beta, gamma_pos, gamma_neg");
      }
      if (variant == AlpaVariant::V3 && std::isnan(lambda)) {
        throw std::invalid_argument("incomplete spec: alpa v3 needs lambda");
      }
    }
    if (alpha < 0.0 || beta < 0.0) {
      throw std::invalid_argument("balancing factors alpha/beta must be >= 0");
    }
    if (gamma_pos < 0.0 || gamma_neg < 0.0) {
      throw std::invalid_argument("focusing parameters gamma_pos/gamma_neg must be >= 0");
    }
    if (!(margin >= 0.0 && margin < 1.0)) {
      throw std::invalid_argument("margin must lie in [0, 1)");
    }
    if (!(cb_beta >= 0.0 && cb_beta < 1.0)) {
      throw std::invalid_argument("cb_beta must lie in [0, 1)");
    }
  }
};

/// Binary cross entropy on a clamped probability.
template <typename Scalar>
LossEval<Scalar> bce_term(Scalar p, int y) {
  LossEval<Scalar> e;
  e.value = (y == 1) ? safe_neg_log(p) : -std::log1p(-p);
  e.dvalue_dlogit = p - Scalar(y);
  return e;
}

/// Focal term; a single focusing exponent covers both branches.
template <typename Scalar>
LossEval<Scalar> focal_term(Scalar p, int y, const LossSpec& spec) {
  if (spec.gamma_pos < 0.0 || spec.gamma_neg < 0.0) {
    throw std::invalid_argument("focal gamma must be >= 0");
  }
  if (spec.gamma_pos != spec.gamma_neg) {
    throw std::invalid_argument("focal uses one gamma for both branches");
  }
  const Scalar g = static_cast<Scalar>(spec.gamma_pos);
  LossEval<Scalar> e;
  if (y == 1) {
    const Scalar a = static_cast<Scalar>(spec.alpha);
    const Scalar w = std::pow(Scalar(1) - p, g);
    const Scalar nl = safe_neg_log(p);
    e.value = a * w * nl;
    e.dvalue_dlogit = -a * w * (g * p * nl + (Scalar(1) - p));
  } else {
    const Scalar a = static_cast<Scalar>(spec.beta);
    const Scalar w = std::pow(p, g);
    const Scalar nl = -std::log1p(-p);
    e.value = a * w * nl;
    e.dvalue_dlogit = a * w * (g * (Scalar(1) - p) * nl + p);
  }
  return e;
}

/// Asymmetric term: separate focusing exponents, plus a probability shift on
/// the negative branch that zeroes both value and gradient once p <= margin.
template <typename Scalar>
LossEval<Scalar> asl_term(Scalar p, int y, const LossSpec& spec) {
  if (!(spec.margin >= 0.0 && spec.margin < 1.0)) {
    throw std::invalid_argument("margin must lie in [0, 1)");
  }
  LossEval<Scalar> e;
  if (y == 1) {
    const Scalar g = static_cast<Scalar>(spec.gamma_pos);
    const Scalar w = std::pow(Scalar(1) - p, g);
    const Scalar nl = safe_neg_log(p);
    e.value = w * nl;
    e.dvalue_dlogit = -w * (g * p * nl + (Scalar(1) - p));
  } else {
    const Scalar g = static_cast<Scalar>(spec.gamma_neg);
    const Scalar pm = std::max(p - static_cast<Scalar>(spec.margin), Scalar(0));
    if (pm == Scalar(0)) {
      e.value = Scalar(0);
      e.dvalue_dlogit = Scalar(0);
      return e;
    }
    const Scalar w = std::pow(pm, g);
    const Scalar nl = -std::log1p(-pm);
    e.value = w * nl;
    // nl/pm stays finite as pm -> 0, so no negative power of pm appears.
    e.dvalue_dlogit = w * (g * (nl / pm) + Scalar(1) / (Scalar(1) - pm)) * p * (Scalar(1) - p);
  }
  return e;
}

/// Unweighted negative core p^(gamma_neg + 1), computed the same way the
/// full loss path computes its focusing product.
template <typename Scalar>
Scalar alpa_neg_core(Scalar p, Scalar gamma_neg) {
  if (gamma_neg < Scalar(0)) {
    throw std::invalid_argument("gamma_neg must be >= 0");
  }
  return std::pow(p, gamma_neg) * p;
}

/// Full asymmetric rational-core term with sample weight (1 - pt)^(g+ + g-).
template <typename Scalar>
LossEval<Scalar> alpa_term(Scalar p, int y, const LossSpec& spec) {
  if (std::isnan(spec.alpha) || std::isnan(spec.beta) || std::isnan(spec.gamma_pos) ||
      std::isnan(spec.gamma_neg) ||
      (spec.variant == AlpaVariant::V3 && std::isnan(spec.lambda))) {
    throw std::invalid_argument("incomplete spec: alpa hyperparameters unresolved");
  }
  const Scalar gp = static_cast<Scalar>(spec.gamma_pos);
  const Scalar gn = static_cast<Scalar>(spec.gamma_neg);
  const Scalar gsum = gp + gn;
  LossEval<Scalar> e;
  if (y == 1) {
    // pt = p, so the sample weight is (1 - p)^gsum.
    const Scalar a = static_cast<Scalar>(spec.alpha);
    const Scalar focus = std::pow(Scalar(1) - p, gp) * std::pow(Scalar(1) - p, gsum);
    const Scalar core = static_cast<Scalar>(alpa_pos_core(static_cast<double>(p)));
    e.value = a * focus * core;
    e.dvalue_dlogit = -a * p * focus * (gsum + gp) * core - a * p * focus * Scalar(1.5) * (Scalar(1) - p);
  } else {
    // pt = 1 - p, so the sample weight is p^gsum.
    const Scalar b = static_cast<Scalar>(spec.beta);
    const Scalar focus = std::pow(p, gn) * std::pow(p, gsum);
    Scalar core, dcore;  // negative core and its derivative in p
    if (spec.variant == AlpaVariant::V3) {
      const Scalar lam = static_cast<Scalar>(spec.lambda);
      core = p * (lam - p);
      dcore = lam - Scalar(2) * p;
    } else {
      core = p;
      dcore = Scalar(1);
    }
    e.value = b * focus * core;
    e.dvalue_dlogit = b * (Scalar(1) - p) * focus * ((gn + gsum) * core + p * dcore);
  }
  return e;
}

/// Per-class weights from effective sample numbers: (1 - b)/(1 - b^n_k),
/// renormalized to mean 1 in Standard mode. AsPrinted reproduces the
/// count-independent scalar (1 - b^gamma)/(1 - b) for every class.
inline Eigen::VectorXd cb_weights(const ClassCounts& counts, double cb_beta,
                                  CbMode mode = CbMode::Standard, double gamma = 0.0) {
  if (!(cb_beta >= 0.0 && cb_beta < 1.0)) {
    throw std::invalid_argument("cb_beta must lie in [0, 1)");
  }
  if (counts.empty()) {
    throw std::invalid_argument("class counts must be non-empty");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(counts.size()));
  if (mode == CbMode::AsPrinted) {
    const double scalar = (1.0 - std::pow(cb_beta, gamma)) / (1.0 - cb_beta);
    w.setConstant(scalar);
    return w;
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 1) {
      throw std::invalid_argument("class counts must all be >= 1");
    }
    const double n = static_cast<double>(counts[k]);
    w(static_cast<Eigen::Index>(k)) =
        cb_beta == 0.0 ? 1.0 : (1.0 - cb_beta) / (1.0 - std::pow(cb_beta, n));
  }
  w *= static_cast<double>(w.size()) / w.sum();
  return w;
}

/// Raw effective-number weight for one class, before renormalization.
inline double cb_raw_weight(std::int64_t count, double cb_beta) {
  if (count < 1) {
    throw std::invalid_argument("class count must be >= 1");
  }
  if (cb_beta == 0.0) {
    return 1.0;
  }
  return (1.0 - cb_beta) / (1.0 - std::pow(cb_beta, static_cast<double>(count)));
}

/// Class-balanced term in the as-printed form: w * y^gamma * (-log p).
template <typename Scalar>
LossEval<Scalar> cb_as_printed_term(Scalar p, int y, const LossSpec& spec) {
  const Scalar g = static_cast<Scalar>(spec.gamma_pos);
  const Scalar b = static_cast<Scalar>(spec.cb_beta);
  const Scalar w = (Scalar(1) - std::pow(b, g)) / (Scalar(1) - b);
  const Scalar yg = std::pow(static_cast<Scalar>(y), g);  // pow(0, 0) == 1
  LossEval<Scalar> e;
  e.value = w * yg * safe_neg_log(p);
  e.dvalue_dlogit = w * yg * (p - Scalar(1));
  return e;
}

/// Dispatch a single (probability, target) pair through the configured loss.
/// Standard class-balanced weighting is applied by the batch layer, which
/// owns the class counts; here it falls through to the plain bce term.
template <typename Scalar>
LossEval<Scalar> loss_term(Scalar p, int y, const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::Bce:
    case LossKind::Ce:
      return bce_term(p, y);
    case LossKind::Focal:
      return focal_term(p, y, spec);
    case LossKind::Asl:
      return asl_term(p, y, spec);
    case LossKind::Cb:
      if (spec.cb_mode == CbMode::AsPrinted) {
        return cb_as_printed_term(p, y, spec);
      }
      return bce_term(p, y);
    case LossKind::Alpa:
      return alpa_term(p, y, spec);
  }
  throw std::logic_error("unknown loss kind");
}

/// One-vs-rest decomposition of a multi-class sample: one bce term per class
/// over sigmoid probabilities, no 1/K factor.
template <typename Scalar>
std::vector<LossEval<Scalar>> ce_multiclass(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& probs,
                                            const Eigen::VectorXi& onehot) {
  if (probs.size() != onehot.size()) {
    throw std::invalid_argument("probs and onehot must have the same length");
  }
  int ones = 0;
  for (Eigen::Index i = 0; i < onehot.size(); ++i) {
    if (onehot(i) != 0 && onehot(i) != 1) {
      throw std::invalid_argument("onehot entries must be 0 or 1");
    }
    ones += onehot(i);
  }
  if (ones != 1) {
    throw std::invalid_argument("onehot must contain exactly one 1");
  }
  std::vector<LossEval<Scalar>> terms;
  terms.reserve(static_cast<std::size_t>(probs.size()));
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    terms.push_back(bce_term(probs(i), onehot(i)));
  }
  return terms;
}

struct BatchLoss {
  double value = 0.0;
  Eigen::MatrixXd dlogits;  // same shape as the probability matrix
};

/// Reduce a samples-by-classes probability matrix against 0/1 targets.
/// Per sample, class terms are summed; the batch reduction follows
/// spec.reduction. Gradients are with respect to the logits.
inline BatchLoss batch_loss(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& onehots,
                            const LossSpec& spec, const ClassCounts* counts = nullptr) {
  if (probs.rows() != onehots.rows() || probs.cols() != onehots.cols()) {
    throw std::invalid_argument("probs and onehots shapes must agree");
  }
  if (probs.rows() == 0) {
    throw std::invalid_argument("batch must contain at least one sample");
  }
  spec.validate();

  Eigen::VectorXd weights;
  const bool standard_cb = spec.kind == LossKind::Cb && spec.cb_mode == CbMode::Standard;
  if (standard_cb) {
    if (counts == nullptr) {
      throw std::invalid_argument("class counts required for class-balanced loss");
    }
    if (static_cast<Eigen::Index>(counts->size()) != probs.cols()) {
      throw std::invalid_argument("class counts length must equal number of classes");
    }
    weights = cb_weights(*counts, spec.cb_beta, CbMode::Standard);
  }

  BatchLoss out;
  out.dlogits.resize(probs.rows(), probs.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double t = onehots(i, k);
      if (t != 0.0 && t != 1.0) {
        throw std::invalid_argument("targets must be 0 or 1");
      }
      ones += t == 1.0 ? 1 : 0;
    }
    if (spec.kind == LossKind::Ce && ones != 1) {
      throw std::invalid_argument("ce targets must be one-hot rows");
    }
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const int y = onehots(i, k) == 1.0 ? 1 : 0;
      LossEval<double> e = loss_term(probs(i, k), y, spec);
      if (standard_cb) {
        e.value *= weights(k);
        e.dvalue_dlogit *= weights(k);
      }
      total += e.value;
      out.dlogits(i, k) = e.dvalue_dlogit;
    }
  }
  if (spec.reduction == Reduction::MeanOverSamples) {
    const double inv = 1.0 / static_cast<double>(probs.rows());
    total *= inv;
    out.dlogits *= inv;
  }
  out.value = total;
  return out;
}

}  // namespace losslab
