#pragma once

#include <cstddef>
#include <vector>

#include "vtag/params.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

// Adam with bias correction and global-norm gradient clipping applied
// before every update.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8, double clip_norm = 5.0);

  void attach(std::vector<ParamRef> params);

  double grad_global_norm() const;
  void step();
  std::size_t iterations() const { return static_cast<std::size_t>(t_[0]); }

  // Moments and step counter, named after the parameters they track.
  void collect_state(std::vector<StateRef>& out);

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  double clip_norm_ = 5.0;

  std::vector<ParamRef> params_;
  std::vector<Tensor> m_, v_;
  Tensor t_ = Tensor::zeros({1});
};

}  // namespace vtag
