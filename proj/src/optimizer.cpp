#include "vtag/optimizer.hpp"

#include <cmath>

#include "vtag/errors.hpp"

namespace vtag {

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps,
                             double clip_norm)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_norm_(clip_norm) {
  if (lr <= 0.0) throw ConfigError("adam: learning rate must be positive");
}

void AdamOptimizer::attach(std::vector<ParamRef> params) {
  params_ = std::move(params);
  m_.clear();
  v_.clear();
  for (const auto& p : params_) {
    m_.emplace_back(p.value->shape());
    v_.emplace_back(p.value->shape());
  }
  t_.fill(0.0);
}

double AdamOptimizer::grad_global_norm() const {
  double total = 0.0;
  for (const auto& p : params_)
    for (std::size_t i = 0; i < p.grad->size(); ++i)
      total += (*p.grad)[i] * (*p.grad)[i];
  return std::sqrt(total);
}

void AdamOptimizer::step() {
  const double norm = grad_global_norm();
  const double clip =
      (clip_norm_ > 0.0 && norm > clip_norm_) ? clip_norm_ / norm : 1.0;

  t_[0] += 1.0;
  const double t = t_[0];
  const double bias1 = 1.0 - std::pow(beta1_, t);
  const double bias2 = 1.0 - std::pow(beta2_, t);

  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& value = *params_[k].value;
    const Tensor& grad = *params_[k].grad;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = clip * grad[i];
      m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * g;
      v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * g * g;
      const double mhat = m_[k][i] / bias1;
      const double vhat = v_[k][i] / bias2;
      value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void AdamOptimizer::collect_state(std::vector<StateRef>& out) {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    out.push_back({"adam.m." + params_[k].name, &m_[k]});
    out.push_back({"adam.v." + params_[k].name, &v_[k]});
  }
  out.push_back({"adam.t", &t_});
}

}  // namespace vtag
