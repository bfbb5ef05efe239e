#pragma once

// Two-layer ReLU perceptrons with hand-derived backpropagation.
//
// Batches are column-major: each column of an input matrix is one sample, so
// a forward pass over B samples maps an (in x B) matrix to (out x B).

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "mecrl/rng.hpp"

namespace mecrl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kHiddenUnits = 64;

struct ParamTag {};
struct GradTag {};

// y = w2 relu(w1 x + b1) + b2.
template <class Tag>
struct MlpTensors {
  Matrix w1;  // hidden x in
  Vector b1;  // hidden
  Matrix w2;  // out x hidden
  Vector b2;  // out

  std::size_t in_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(w2.rows()); }

  static MlpTensors zeros(std::size_t in, std::size_t hidden, std::size_t out) {
    MlpTensors t;
    const auto i = static_cast<Eigen::Index>(in), h = static_cast<Eigen::Index>(hidden),
               o = static_cast<Eigen::Index>(out);
    t.w1 = Matrix::Zero(h, i);
    t.b1 = Vector::Zero(h);
    t.w2 = Matrix::Zero(o, h);
    t.b2 = Vector::Zero(o);
    return t;
  }

  template <class Other>
  bool same_shape(const MlpTensors<Other>& o) const {
    return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && b1.size() == o.b1.size() &&
           w2.rows() == o.w2.rows() && w2.cols() == o.w2.cols() && b2.size() == o.b2.size();
  }

  bool operator==(const MlpTensors& o) const {
    return same_shape(o) && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
  }

  bool all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
  }
};

using MlpParams = MlpTensors<ParamTag>;
using Gradients = MlpTensors<GradTag>;

// Activations retained by forward for the matching backward.
struct ForwardCache {
  Matrix input;  // in x B
  Matrix pre;    // hidden x B, before relu
  Matrix act;    // hidden x B, after relu
};

struct ForwardResult {
  Matrix y;  // out x B
  ForwardCache cache;
};

struct BackwardResult {
  Gradients grads;  // summed over the batch
  Matrix dx;        // in x B
};

// Glorot-uniform weights, zero biases.
MlpParams init_mlp(std::size_t in_dim, std::size_t out_dim, Rng& rng, std::size_t hidden = kHiddenUnits);

ForwardResult forward(const MlpParams& p, const Matrix& x);

// Output only; skips building a cache.
Matrix predict(const MlpParams& p, const Matrix& x);

// Gradient of sum_b <dy_b, y_b> with respect to parameters and inputs.
BackwardResult backward(const MlpParams& p, const ForwardCache& cache, const Matrix& dy);

// Input gradient only; equal to backward(...).dx.
Matrix backward_input(const MlpParams& p, const ForwardCache& cache, const Matrix& dy);

struct AdamState {
  Gradients m;
  Gradients v;
  long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const MlpParams& p, double lr);
};

// One bias-corrected adaptive-moment descent step:
//   p -= lr * m_hat / (sqrt(v_hat) + eps).
// Callers negate g to ascend.
void adam_step(AdamState& state, MlpParams& p, const Gradients& g);

// target <- (1 - tau) target + tau online.
void soft_update(MlpParams& target, const MlpParams& online, double tau_soft);

// Largest relative deviation between backward() and central differences of
// <dy, y> (step `h`) over every parameter and input component. The reference
// side evaluates the network in extended precision through its own loop so it
// shares no code with forward().
double grad_check(const MlpParams& p, const Vector& x, const Vector& dy, double h = 1e-6);

// Same, but against a caller-supplied analytic gradient (for mutation tests).
double grad_check_against(const MlpParams& p, const Vector& x, const Vector& dy, const Gradients& analytic,
                          const Vector& analytic_dx, double h = 1e-6);

}  // namespace mecrl::nn
