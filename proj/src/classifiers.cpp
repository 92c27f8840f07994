#include "vtag/classifiers.hpp"

#include <cmath>

#include "vtag/errors.hpp"
#include "vtag/layers.hpp"
#include "vtag/rng.hpp"

namespace vtag {

LogisticHead::LogisticHead(std::size_t feat_dim, std::size_t classes)
    : feat_dim_(feat_dim),
      classes_(classes),
      w_({feat_dim, classes}),
      b_({classes}),
      dw_({feat_dim, classes}),
      db_({classes}) {}

void LogisticHead::init(Rng& rng) {
  const double stddev = 1.0 / std::sqrt(static_cast<double>(feat_dim_));
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = stddev * rng.normal();
  b_.fill(0.0);
}

Tensor LogisticHead::logits(const Tensor& f) const {
  if (f.cols() != feat_dim_)
    throw DimensionError("logistic head: feature width disagrees");
  return add_row_broadcast(matmul(f, w_), b_);
}

Tensor LogisticHead::scores(const Tensor& f) const { return sigmoid(logits(f)); }

double LogisticHead::train(const Tensor& f, const Tensor& targets,
                           double weight, Tensor* dfeature) {
  Tensor z = logits(f);
  ScalarLoss loss = loss_binary_ce(z, targets);
  Tensor dz = scale(loss.dlogits, weight);
  axpy(1.0, matmul_tn(f, dz), dw_);
  axpy(1.0, col_sum(dz), db_);
  if (dfeature) *dfeature = matmul_nt(dz, w_);
  return loss.value;
}

void LogisticHead::zero_grad() {
  dw_.fill(0.0);
  db_.fill(0.0);
}

void LogisticHead::collect_params(std::vector<ParamRef>& out,
                                  const std::string& prefix) {
  out.push_back({join_name(prefix, "w"), &w_, &dw_});
  out.push_back({join_name(prefix, "b"), &b_, &db_});
}

MoeHead::MoeHead(std::size_t feat_dim, std::size_t classes, std::size_t experts)
    : feat_dim_(feat_dim),
      classes_(classes),
      experts_(experts),
      gate_w_({feat_dim, classes * (experts + 1)}),
      expert_w_({feat_dim, classes * experts}),
      dgate_w_({feat_dim, classes * (experts + 1)}),
      dexpert_w_({feat_dim, classes * experts}) {
  if (experts == 0) throw ConfigError("moe head: at least one expert required");
}

void MoeHead::init(Rng& rng) {
  const double stddev = 1.0 / std::sqrt(static_cast<double>(feat_dim_));
  for (std::size_t i = 0; i < gate_w_.size(); ++i)
    gate_w_[i] = stddev * rng.normal();
  for (std::size_t i = 0; i < expert_w_.size(); ++i)
    expert_w_[i] = stddev * rng.normal();
}

void MoeHead::mixture(const Tensor& f, Tensor* gates, Tensor* expert_sig,
                      Tensor* scores) const {
  if (f.cols() != feat_dim_)
    throw DimensionError("moe head: feature width disagrees");
  const std::size_t b = f.rows();
  const std::size_t ge = experts_ + 1;
  Tensor gate_logits = matmul(f, gate_w_);      // [B x C*(E+1)]
  Tensor expert_logits = matmul(f, expert_w_);  // [B x C*E]

  *gates = Tensor({b, classes_ * ge});
  *expert_sig = Tensor({b, classes_ * experts_});
  *scores = Tensor({b, classes_});

  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < classes_; ++c) {
      // Softmax over the E real experts plus the dummy zero expert.
      double mx = gate_logits.at(r, c * ge);
      for (std::size_t e = 1; e < ge; ++e)
        mx = std::max(mx, gate_logits.at(r, c * ge + e));
      double total = 0.0;
      for (std::size_t e = 0; e < ge; ++e) {
        const double g = std::exp(gate_logits.at(r, c * ge + e) - mx);
        gates->at(r, c * ge + e) = g;
        total += g;
      }
      double s = 0.0;
      for (std::size_t e = 0; e < ge; ++e) {
        gates->at(r, c * ge + e) /= total;
        if (e < experts_) {
          const double v = sigmoid_scalar(expert_logits.at(r, c * experts_ + e));
          expert_sig->at(r, c * experts_ + e) = v;
          s += gates->at(r, c * ge + e) * v;
        }
      }
      scores->at(r, c) = s;
    }
  }
}

Tensor MoeHead::scores(const Tensor& f) const {
  Tensor gates, expert_sig, s;
  mixture(f, &gates, &expert_sig, &s);
  return s;
}

double MoeHead::train(const Tensor& f, const Tensor& targets, double weight,
                      Tensor* dfeature) {
  Tensor gates, expert_sig, s;
  mixture(f, &gates, &expert_sig, &s);
  if (!s.same_shape(targets))
    throw DimensionError("moe head: target shape disagrees");

  const std::size_t b = f.rows();
  const std::size_t ge = experts_ + 1;
  const double denom = static_cast<double>(b * classes_);

  double loss = 0.0;
  Tensor dgate_logits({b, classes_ * ge});
  Tensor dexpert_logits({b, classes_ * experts_});
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < classes_; ++c) {
      const double y = targets.at(r, c);
      if (y != 0.0 && y != 1.0)
        throw TargetError("moe head: target must be 0 or 1");
      // The mixture lies strictly inside (0, 1): the dummy expert keeps
      // positive mass off the experts and each sigmoid is in (0, 1).
      const double p = std::min(std::max(s.at(r, c), 1e-300), 1.0 - 1e-16);
      loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)) / denom;
      const double ds = weight * (p - y) / (p * (1.0 - p)) / denom;
      for (std::size_t e = 0; e < ge; ++e) {
        const double g = gates.at(r, c * ge + e);
        const double v = e < experts_ ? expert_sig.at(r, c * experts_ + e) : 0.0;
        dgate_logits.at(r, c * ge + e) = ds * g * (v - s.at(r, c));
        if (e < experts_)
          dexpert_logits.at(r, c * experts_ + e) = ds * g * v * (1.0 - v);
      }
    }
  }

  axpy(1.0, matmul_tn(f, dgate_logits), dgate_w_);
  axpy(1.0, matmul_tn(f, dexpert_logits), dexpert_w_);
  if (dfeature) {
    *dfeature = matmul_nt(dgate_logits, gate_w_);
    axpy(1.0, matmul_nt(dexpert_logits, expert_w_), *dfeature);
  }
  return loss;
}

void MoeHead::zero_grad() {
  dgate_w_.fill(0.0);
  dexpert_w_.fill(0.0);
}

void MoeHead::collect_params(std::vector<ParamRef>& out,
                             const std::string& prefix) {
  out.push_back({join_name(prefix, "gate_w"), &gate_w_, &dgate_w_});
  out.push_back({join_name(prefix, "expert_w"), &expert_w_, &dexpert_w_});
}

}  // namespace vtag
