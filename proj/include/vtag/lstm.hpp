#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vtag/layers.hpp"
#include "vtag/params.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

class Rng;

enum class CellKind { kLstm, kBnLstm };

struct CellState {
  Tensor h;  // [B x d_h]
  Tensor c;  // [B x d_h]
};

// Random matrix with orthonormal columns (rows >= cols) or rows (otherwise):
// the square factor of M^T M resp. M M^T equals the identity.
Tensor orthogonal_init(std::size_t rows, std::size_t cols, Rng& rng);

// One layer of the standard cell:
//   i,o,f = sigmoid(x W + h U + b),  g = tanh(x W + h U + b)
//   c' = f*c + i*g,  h' = o * tanh(c')
struct LstmLayer {
  LstmLayer() = default;
  LstmLayer(std::size_t input_dim, std::size_t hidden_dim);

  // Orthogonal W/U per gate; forget-gate bias 1, others 0.
  void init(Rng& rng);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

  struct Cache {
    Tensor x, h_prev, c_prev;
    Tensor i, o, f, g, c, tc;
  };

  void step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
            Tensor& h_out, Tensor& c_out, Cache* cache) const;

  // dh/dc are the gradients flowing into this step's outputs; fills dx,
  // dh_prev, dc_prev and accumulates parameter gradients.
  void backward(const Cache& cache, const Tensor& dh, const Tensor& dc,
                Tensor& dx, Tensor& dh_prev, Tensor& dc_prev);

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

  Tensor wi, wo, wf, wg;  // [input_dim x hidden]
  Tensor ui, uo, uf, ug;  // [hidden x hidden]
  Tensor bi, bo, bf, bg;  // [hidden]
  Tensor dwi, dwo, dwf, dwg, dui, duo, duf, dug, dbi, dbo, dbf, dbg;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
};

// Batch-normalized cell: the input-to-hidden and hidden-to-hidden
// pre-activations and the cell state are normalized, each with its own
// per-timestep statistics (capped at t_cap; later steps reuse the cap's
// statistics). The x/h norms keep beta fixed at zero; the gate bias does
// the shifting.
struct BnLstmLayer {
  BnLstmLayer() = default;
  BnLstmLayer(std::size_t input_dim, std::size_t hidden_dim, std::size_t t_cap,
              double bn_gamma_init = 0.1, double bn_decay = 0.999,
              double bn_eps = 1e-5);

  void init(Rng& rng);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t t_cap() const { return t_cap_; }

  struct Cache {
    Tensor x, h_prev, c_prev;
    Tensor i, o, f, g, c, tnc;
    BnCache bx, bh, bc;
    std::size_t t_index = 0;
  };

  // t is the 1-based step index selecting the BN statistics. Train mode on
  // fewer than two rows normalizes with population statistics (no update).
  void step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
            std::size_t t, BnMode mode, Tensor& h_out, Tensor& c_out,
            Cache* cache);

  void backward(const Cache& cache, const Tensor& dh, const Tensor& dc,
                Tensor& dx, Tensor& dh_prev, Tensor& dc_prev);

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);
  void collect_state(std::vector<StateRef>& out, const std::string& prefix);

  Tensor wi, wo, wf, wg;
  Tensor ui, uo, uf, ug;
  Tensor bi, bo, bf, bg;
  Tensor dwi, dwo, dwf, dwg, dui, duo, duf, dug, dbi, dbo, dbf, dbg;
  std::vector<BatchNorm> bn_x;  // per step, width 4*hidden, beta fixed
  std::vector<BatchNorm> bn_h;  // per step, width 4*hidden, beta fixed
  std::vector<BatchNorm> bn_c;  // per step, width hidden

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::size_t t_cap_ = 0;
};

// Stack of `depth` cells; layer l consumes layer l-1 hiddens. Supports
// step-by-step driving with a shrinking batch (rows sorted by sequence
// length descending) and full BPTT in reverse order.
class RecurrentStack {
 public:
  RecurrentStack() = default;
  RecurrentStack(CellKind kind, std::size_t depth, std::size_t input_dim,
                 std::size_t hidden_dim, std::size_t t_cap = 32,
                 double bn_decay = 0.999);

  void init(Rng& rng);

  CellKind kind() const { return kind_; }
  std::size_t depth() const { return depth_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

  // Starts a forward pass. record=true keeps per-step caches for backward.
  void begin(std::size_t batch, BnMode mode, bool record);
  // Runs one step over the first x.rows() samples (must not grow);
  // returns the top-layer hidden.
  Tensor step(const Tensor& x);
  std::size_t steps() const { return trace_.size(); }
  const std::vector<CellState>& states() const { return state_; }

  struct SequenceResult {
    std::vector<Tensor> top_hiddens;      // per step [B x d_h]
    std::vector<CellState> final_states;  // per layer
  };
  // Fixed-batch convenience: one step per input tensor.
  SequenceResult run_sequence(const std::vector<Tensor>& inputs, BnMode mode,
                              bool record = false);

  // Reverse pass. Call begin_backward once, then backward_step per recorded
  // step in reverse; dh_top carries the loss gradient injected at that
  // step's top-layer hidden. Returns the gradient w.r.t. that step's input.
  void begin_backward();
  Tensor backward_step(const Tensor& dh_top);

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);
  void collect_state(std::vector<StateRef>& out, const std::string& prefix);

 private:
  struct StepRecord {
    std::size_t rows = 0;
    std::vector<LstmLayer::Cache> lstm_cache;
    std::vector<BnLstmLayer::Cache> bn_cache;
  };

  static Tensor grow_rows(const Tensor& t, std::size_t rows);

  CellKind kind_ = CellKind::kLstm;
  std::size_t depth_ = 0;
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  BnMode mode_ = BnMode::kInfer;
  bool record_ = false;

  std::vector<LstmLayer> lstm_;
  std::vector<BnLstmLayer> bn_;

  std::vector<CellState> state_;
  std::vector<StepRecord> trace_;

  std::vector<Tensor> dh_carry_, dc_carry_;
  std::size_t back_pos_ = 0;
};

}  // namespace vtag
