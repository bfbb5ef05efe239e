#include "mecrl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mecrl/error.hpp"

namespace mecrl::nn {

namespace {

template <class A, class B>
void check_same_shape(const MlpTensors<A>& a, const MlpTensors<B>& b, const char* op) {
  if (!a.same_shape(b)) throw DimensionError(std::string(op) + ": parameter shapes differ");
}

}  // namespace

MlpParams init_mlp(std::size_t in_dim, std::size_t out_dim, Rng& rng, std::size_t hidden) {
  if (in_dim == 0 || out_dim == 0 || hidden == 0) throw DimensionError("init_mlp: dimensions must be >= 1");
  MlpParams p = MlpParams::zeros(in_dim, hidden, out_dim);
  auto fill = [&rng](Matrix& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Row-major fill order so the draw sequence does not depend on storage.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
  };
  fill(p.w1);
  fill(p.w2);
  return p;
}

ForwardResult forward(const MlpParams& p, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != p.in_dim())
    throw_dimension("forward input rows", p.in_dim(), static_cast<std::size_t>(x.rows()));
  ForwardResult r;
  r.cache.input = x;
  r.cache.pre.noalias() = p.w1 * x;
  r.cache.pre.colwise() += p.b1;
  r.cache.act = r.cache.pre.cwiseMax(0.0);
  r.y.noalias() = p.w2 * r.cache.act;
  r.y.colwise() += p.b2;
  return r;
}

Matrix predict(const MlpParams& p, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != p.in_dim())
    throw_dimension("predict input rows", p.in_dim(), static_cast<std::size_t>(x.rows()));
  Matrix h = p.w1 * x;
  h.colwise() += p.b1;
  h = h.cwiseMax(0.0);
  Matrix y = p.w2 * h;
  y.colwise() += p.b2;
  return y;
}

BackwardResult backward(const MlpParams& p, const ForwardCache& cache, const Matrix& dy) {
  if (cache.pre.rows() != p.w1.rows() || cache.input.rows() != p.w1.cols() ||
      cache.act.cols() != cache.input.cols())
    throw DimensionError("backward: cache does not match parameters");
  if (static_cast<std::size_t>(dy.rows()) != p.out_dim() || dy.cols() != cache.input.cols())
    throw DimensionError("backward: dy shape does not match forward output");

  BackwardResult r;
  r.grads.w2.noalias() = dy * cache.act.transpose();
  r.grads.b2 = dy.rowwise().sum();
  Matrix dpre = p.w2.transpose() * dy;
  dpre = (cache.pre.array() > 0.0).select(dpre, 0.0);
  r.grads.w1.noalias() = dpre * cache.input.transpose();
  r.grads.b1 = dpre.rowwise().sum();
  r.dx.noalias() = p.w1.transpose() * dpre;
  return r;
}

Matrix backward_input(const MlpParams& p, const ForwardCache& cache, const Matrix& dy) {
  if (cache.pre.rows() != p.w1.rows() || cache.input.rows() != p.w1.cols() ||
      static_cast<std::size_t>(dy.rows()) != p.out_dim() ||
      dy.cols() != cache.input.cols())
    throw DimensionError("backward_input: cache does not match parameters");
  Matrix dpre = p.w2.transpose() * dy;
  dpre = (cache.pre.array() > 0.0).select(dpre, 0.0);
  Matrix dx = p.w1.transpose() * dpre;
  return dx;
}

AdamState AdamState::for_params(const MlpParams& p, double lr) {
  AdamState s;
  s.m = Gradients::zeros(p.in_dim(), p.hidden(), p.out_dim());
  s.v = s.m;
  s.lr = lr;
  return s;
}

void adam_step(AdamState& s, MlpParams& p, const Gradients& g) {
  check_same_shape(p, g, "adam_step");
  check_same_shape(p, s.m, "adam_step");
  ++s.t;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  auto update = [&](auto&& param, auto&& grad, auto&& m, auto&& v) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.eps);
  };
  update(p.w1.reshaped(), g.w1.reshaped(), s.m.w1.reshaped(), s.v.w1.reshaped());
  update(p.b1, g.b1, s.m.b1, s.v.b1);
  update(p.w2.reshaped(), g.w2.reshaped(), s.m.w2.reshaped(), s.v.w2.reshaped());
  update(p.b2, g.b2, s.m.b2, s.v.b2);
}

void soft_update(MlpParams& target, const MlpParams& online, double tau_soft) {
  check_same_shape(target, online, "soft_update");
  if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw DomainError("soft_update: tau_soft must lie in [0, 1]");
  if (tau_soft == 1.0) {
    target = online;
    return;
  }
  if (tau_soft == 0.0) return;
  auto blend = [tau_soft](auto& t, const auto& o) { t = (1.0 - tau_soft) * t + tau_soft * o; };
  blend(target.w1, online.w1);
  blend(target.b1, online.b1);
  blend(target.w2, online.w2);
  blend(target.b2, online.b2);
}

namespace {

// Reference network in extended precision with explicit loops.
struct ReferenceNet {
  std::size_t in, hid, out;
  std::vector<long double> w1, b1, w2, b2, x, dy;

  ReferenceNet(const MlpParams& p, const Vector& xv, const Vector& dyv)
      : in(p.in_dim()), hid(p.hidden()), out(p.out_dim()) {
    w1.resize(hid * in);
    for (std::size_t j = 0; j < hid; ++j)
      for (std::size_t i = 0; i < in; ++i) w1[j * in + i] = p.w1(j, i);
    b1.assign(p.b1.data(), p.b1.data() + hid);
    w2.resize(out * hid);
    for (std::size_t k = 0; k < out; ++k)
      for (std::size_t j = 0; j < hid; ++j) w2[k * hid + j] = p.w2(k, j);
    b2.assign(p.b2.data(), p.b2.data() + out);
    x.assign(xv.data(), xv.data() + in);
    dy.assign(dyv.data(), dyv.data() + out);
  }

  long double objective() const {
    std::vector<long double> h(hid);
    for (std::size_t j = 0; j < hid; ++j) {
      long double s = b1[j];
      for (std::size_t i = 0; i < in; ++i) s += w1[j * in + i] * x[i];
      h[j] = s > 0 ? s : 0;
    }
    long double f = 0;
    for (std::size_t k = 0; k < out; ++k) {
      long double s = b2[k];
      for (std::size_t j = 0; j < hid; ++j) s += w2[k * hid + j] * h[j];
      f += dy[k] * s;
    }
    return f;
  }

  long double central_difference(long double& slot, long double h) {
    const long double saved = slot;
    slot = saved + h;
    const long double fp = objective();
    slot = saved - h;
    const long double fm = objective();
    slot = saved;
    return (fp - fm) / (2 * h);
  }
};

double relative_error(double analytic, long double numeric) {
  const long double a = analytic;
  const long double denom = std::max({std::abs(a), std::abs(numeric), 1e-8L});
  return static_cast<double>(std::abs(a - numeric) / denom);
}

}  // namespace

double grad_check_against(const MlpParams& p, const Vector& x, const Vector& dy, const Gradients& analytic,
                          const Vector& analytic_dx, double h) {
  check_same_shape(p, analytic, "grad_check");
  if (static_cast<std::size_t>(x.size()) != p.in_dim() || static_cast<std::size_t>(dy.size()) != p.out_dim() ||
      analytic_dx.size() != x.size())
    throw DimensionError("grad_check: vector sizes do not match the network");
  ReferenceNet ref(p, x, dy);
  const long double step = h;
  double worst = 0.0;
  for (std::size_t j = 0; j < ref.hid; ++j)
    for (std::size_t i = 0; i < ref.in; ++i)
      worst = std::max(worst, relative_error(analytic.w1(j, i), ref.central_difference(ref.w1[j * ref.in + i], step)));
  for (std::size_t j = 0; j < ref.hid; ++j)
    worst = std::max(worst, relative_error(analytic.b1(j), ref.central_difference(ref.b1[j], step)));
  for (std::size_t k = 0; k < ref.out; ++k)
    for (std::size_t j = 0; j < ref.hid; ++j)
      worst = std::max(worst, relative_error(analytic.w2(k, j), ref.central_difference(ref.w2[k * ref.hid + j], step)));
  for (std::size_t k = 0; k < ref.out; ++k)
    worst = std::max(worst, relative_error(analytic.b2(k), ref.central_difference(ref.b2[k], step)));
  for (std::size_t i = 0; i < ref.in; ++i)
    worst = std::max(worst, relative_error(analytic_dx(i), ref.central_difference(ref.x[i], step)));
  return worst;
}

double grad_check(const MlpParams& p, const Vector& x, const Vector& dy, double h) {
  const ForwardResult f = forward(p, x);
  const BackwardResult b = backward(p, f.cache, dy);
  return grad_check_against(p, x, dy, b.grads, b.dx.col(0), h);
}

}  // namespace mecrl::nn
