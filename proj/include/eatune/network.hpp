#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>

#include "eatune/error.hpp"
#include "eatune/rng.hpp"

namespace eatune {

inline constexpr int kInputs = 9;
inline constexpr int kHidden = 5;

/// Weights and biases of the 9-5-5-1 regression network. Gradients share this
/// shape.
template <typename Scalar>
struct NetworkParams {
  using Input = Eigen::Matrix<Scalar, kInputs, 1>;
  using Hidden = Eigen::Matrix<Scalar, kHidden, 1>;
  static constexpr int kParamCount =
      kHidden * kInputs + kHidden + kHidden * kHidden + kHidden + kHidden + 1;
  using Flat = Eigen::Matrix<Scalar, kParamCount, 1>;

  Eigen::Matrix<Scalar, kHidden, kInputs, Eigen::RowMajor> w1 =
      Eigen::Matrix<Scalar, kHidden, kInputs, Eigen::RowMajor>::Zero();
  Hidden b1 = Hidden::Zero();
  Eigen::Matrix<Scalar, kHidden, kHidden, Eigen::RowMajor> w2 =
      Eigen::Matrix<Scalar, kHidden, kHidden, Eigen::RowMajor>::Zero();
  Hidden b2 = Hidden::Zero();
  Eigen::Matrix<Scalar, 1, kHidden> w3 = Eigen::Matrix<Scalar, 1, kHidden>::Zero();
  Scalar b3 = Scalar(0);

  /// Layer by layer: W1 (row-major), b1, W2 (row-major), b2, W3, b3.
  Flat flatten() const {
    Flat f;
    Eigen::Index o = 0;
    auto put = [&](const auto& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) f(o++) = m.data()[i];
    };
    put(w1);
    put(b1);
    put(w2);
    put(b2);
    put(w3);
    f(o) = b3;
    return f;
  }

  static NetworkParams unflatten(const Flat& f) {
    NetworkParams p;
    Eigen::Index o = 0;
    auto take = [&](auto& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f(o++);
    };
    take(p.w1);
    take(p.b1);
    take(p.w2);
    take(p.b2);
    take(p.w3);
    p.b3 = f(o);
    return p;
  }

  template <typename Other>
  NetworkParams<Other> cast() const {
    return NetworkParams<Other>::unflatten(flatten().template cast<Other>());
  }

  bool all_finite() const { return flatten().allFinite(); }
  bool operator==(const NetworkParams& o) const { return flatten() == o.flatten(); }
};

using NetworkParamsd = NetworkParams<double>;

template <typename Scalar>
struct LabeledInput {
  typename NetworkParams<Scalar>::Input x;
  Scalar target;
};

/// He initialisation: N(0,1) * sqrt(2 / fan_in), zero biases.
template <typename Scalar = double>
NetworkParams<Scalar> init_params(std::uint64_t seed) {
  CounterRng rng(seed);
  NetworkParams<Scalar> p;
  auto fill = [&](auto& m, int fan_in) {
    const double scale = std::sqrt(2.0 / fan_in);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Scalar(rng.normal() * scale);
  };
  fill(p.w1, kInputs);
  fill(p.w2, kHidden);
  fill(p.w3, kHidden);
  return p;
}

namespace detail {
template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& z) {
  return z.cwiseMax(typename Derived::Scalar(0));
}
}  // namespace detail

template <typename Scalar>
Scalar forward(const NetworkParams<Scalar>& p,
               const typename NetworkParams<Scalar>::Input& x) {
  if (!x.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "network input is not finite");
  }
  const typename NetworkParams<Scalar>::Hidden h1 = detail::relu(p.w1 * x + p.b1);
  const typename NetworkParams<Scalar>::Hidden h2 = detail::relu(p.w2 * h1 + p.b2);
  return (p.w3 * h2)(0) + p.b3;
}

template <typename Scalar>
struct LossAndGradients {
  Scalar mse;
  NetworkParams<Scalar> grads;
};

/// Mean squared error over `batch` and its exact gradient.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const NetworkParams<Scalar>& p,
                                            std::span<const LabeledInput<Scalar>> batch) {
  using Hidden = typename NetworkParams<Scalar>::Hidden;
  if (batch.empty()) {
    throw Error(ErrorKind::InvalidInput, "loss requires a nonempty batch");
  }
  const Scalar inv_n = Scalar(1) / Scalar(batch.size());
  LossAndGradients<Scalar> out{Scalar(0), NetworkParams<Scalar>{}};
  auto& g = out.grads;

  for (const auto& sample : batch) {
    if (!sample.x.allFinite()) {
      throw Error(ErrorKind::InvalidInput, "network input is not finite");
    }
    const Hidden z1 = p.w1 * sample.x + p.b1;
    const Hidden h1 = detail::relu(z1);
    const Hidden z2 = p.w2 * h1 + p.b2;
    const Hidden h2 = detail::relu(z2);
    const Scalar y = (p.w3 * h2)(0) + p.b3;
    const Scalar err = y - sample.target;
    out.mse += err * err * inv_n;

    const Scalar dy = Scalar(2) * err * inv_n;
    g.w3 += dy * h2.transpose();
    g.b3 += dy;
    const Hidden d2 = (p.w3.transpose() * dy).cwiseProduct(
        (z2.array() > Scalar(0)).template cast<Scalar>().matrix());
    g.w2 += d2 * h1.transpose();
    g.b2 += d2;
    const Hidden d1 = (p.w2.transpose() * d2).cwiseProduct(
        (z1.array() > Scalar(0)).template cast<Scalar>().matrix());
    g.w1 += d1 * sample.x.transpose();
    g.b1 += d1;
  }
  return out;
}

struct TrainingConfig {
  double learning_rate = 1e-3;
  int epochs = 5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  bool operator==(const TrainingConfig&) const = default;
};

template <typename Scalar>
struct AdamMoments {
  typename NetworkParams<Scalar>::Flat m = NetworkParams<Scalar>::Flat::Zero();
  typename NetworkParams<Scalar>::Flat v = NetworkParams<Scalar>::Flat::Zero();
};

/// One bias-corrected Adam update; `step_index` counts from 1.
template <typename Scalar>
void adam_step(NetworkParams<Scalar>& p, const NetworkParams<Scalar>& grads,
               AdamMoments<Scalar>& moments, long step_index, const TrainingConfig& cfg) {
  if (step_index < 1) {
    throw Error(ErrorKind::InvalidInput, "Adam step index starts at 1");
  }
  const auto g = grads.flatten();
  const Scalar b1 = Scalar(cfg.adam_beta1);
  const Scalar b2 = Scalar(cfg.adam_beta2);
  moments.m = b1 * moments.m + (Scalar(1) - b1) * g;
  moments.v = b2 * moments.v + (Scalar(1) - b2) * g.cwiseProduct(g);
  const Scalar c1 = Scalar(1) - Scalar(std::pow(cfg.adam_beta1, step_index));
  const Scalar c2 = Scalar(1) - Scalar(std::pow(cfg.adam_beta2, step_index));
  const auto m_hat = (moments.m / c1).array();
  const auto v_hat = (moments.v / c2).array();
  const typename NetworkParams<Scalar>::Flat update =
      (Scalar(cfg.learning_rate) * m_hat / (v_hat.sqrt() + Scalar(cfg.adam_eps))).matrix();
  p = NetworkParams<Scalar>::unflatten(p.flatten() - update);
}

}  // namespace eatune
