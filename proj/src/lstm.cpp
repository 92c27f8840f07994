#include "vtag/lstm.hpp"

#include <cmath>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

Tensor orthogonal_init(std::size_t rows, std::size_t cols, Rng& rng) {
  const std::size_t n = std::max(rows, cols);
  const std::size_t m = std::min(rows, cols);
  // Modified Gram-Schmidt on the columns of an n x m Gaussian draw, run
  // twice per column to hold the 1e-8 orthogonality tolerance.
  Tensor a = Tensor::randn({n, m}, rng);
  for (std::size_t j = 0; j < m; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += a.at(r, k) * a.at(r, j);
        for (std::size_t r = 0; r < n; ++r) a.at(r, j) -= proj * a.at(r, k);
      }
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) norm += a.at(r, j) * a.at(r, j);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) a.at(r, j) /= norm;
  }
  return rows >= cols ? a : transpose(a);
}

namespace {

Tensor sigmoid_deriv_chain(const Tensor& d, const Tensor& s) {
  Tensor out = d;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= s[i] * (1.0 - s[i]);
  return out;
}

Tensor tanh_deriv_chain(const Tensor& d, const Tensor& t) {
  Tensor out = d;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= 1.0 - t[i] * t[i];
  return out;
}

}  // namespace

LstmLayer::LstmLayer(std::size_t input_dim, std::size_t hidden_dim)
    : wi({input_dim, hidden_dim}), wo({input_dim, hidden_dim}),
      wf({input_dim, hidden_dim}), wg({input_dim, hidden_dim}),
      ui({hidden_dim, hidden_dim}), uo({hidden_dim, hidden_dim}),
      uf({hidden_dim, hidden_dim}), ug({hidden_dim, hidden_dim}),
      bi({hidden_dim}), bo({hidden_dim}), bf({hidden_dim}), bg({hidden_dim}),
      dwi({input_dim, hidden_dim}), dwo({input_dim, hidden_dim}),
      dwf({input_dim, hidden_dim}), dwg({input_dim, hidden_dim}),
      dui({hidden_dim, hidden_dim}), duo({hidden_dim, hidden_dim}),
      duf({hidden_dim, hidden_dim}), dug({hidden_dim, hidden_dim}),
      dbi({hidden_dim}), dbo({hidden_dim}), dbf({hidden_dim}), dbg({hidden_dim}),
      input_dim_(input_dim), hidden_dim_(hidden_dim) {}

void LstmLayer::init(Rng& rng) {
  for (Tensor* w : {&wi, &wo, &wf, &wg})
    *w = orthogonal_init(input_dim_, hidden_dim_, rng);
  for (Tensor* u : {&ui, &uo, &uf, &ug})
    *u = orthogonal_init(hidden_dim_, hidden_dim_, rng);
  bi.fill(0.0);
  bo.fill(0.0);
  bf.fill(1.0);  // keeps early memory alive
  bg.fill(0.0);
}

void LstmLayer::step(const Tensor& x, const Tensor& h_prev,
                     const Tensor& c_prev, Tensor& h_out, Tensor& c_out,
                     Cache* cache) const {
  if (x.cols() != input_dim_)
    throw DimensionError("lstm step: input width disagrees with params");
  if (h_prev.rows() != x.rows() || c_prev.rows() != x.rows())
    throw DimensionError("lstm step: state rows disagree with input");

  Tensor i = sigmoid(add_row_broadcast(add(matmul(x, wi), matmul(h_prev, ui)), bi));
  Tensor o = sigmoid(add_row_broadcast(add(matmul(x, wo), matmul(h_prev, uo)), bo));
  Tensor f = sigmoid(add_row_broadcast(add(matmul(x, wf), matmul(h_prev, uf)), bf));
  Tensor g = tanh_t(add_row_broadcast(add(matmul(x, wg), matmul(h_prev, ug)), bg));

  Tensor c = add(mul(f, c_prev), mul(i, g));
  Tensor tc = tanh_t(c);
  Tensor h = mul(o, tc);

  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->c_prev = c_prev;
    cache->i = i;
    cache->o = o;
    cache->f = f;
    cache->g = g;
    cache->c = c;
    cache->tc = tc;
  }
  h_out = std::move(h);
  c_out = std::move(c);
}

void LstmLayer::backward(const Cache& cache, const Tensor& dh,
                         const Tensor& dc_in, Tensor& dx, Tensor& dh_prev,
                         Tensor& dc_prev) {
  Tensor d_o = mul(dh, cache.tc);
  Tensor dtc = mul(dh, cache.o);
  Tensor dc = add(dc_in, tanh_deriv_chain(dtc, cache.tc));

  Tensor d_f = mul(dc, cache.c_prev);
  Tensor d_i = mul(dc, cache.g);
  Tensor d_g = mul(dc, cache.i);
  dc_prev = mul(dc, cache.f);

  Tensor dpre_i = sigmoid_deriv_chain(d_i, cache.i);
  Tensor dpre_o = sigmoid_deriv_chain(d_o, cache.o);
  Tensor dpre_f = sigmoid_deriv_chain(d_f, cache.f);
  Tensor dpre_g = tanh_deriv_chain(d_g, cache.g);

  axpy(1.0, matmul_tn(cache.x, dpre_i), dwi);
  axpy(1.0, matmul_tn(cache.x, dpre_o), dwo);
  axpy(1.0, matmul_tn(cache.x, dpre_f), dwf);
  axpy(1.0, matmul_tn(cache.x, dpre_g), dwg);
  axpy(1.0, matmul_tn(cache.h_prev, dpre_i), dui);
  axpy(1.0, matmul_tn(cache.h_prev, dpre_o), duo);
  axpy(1.0, matmul_tn(cache.h_prev, dpre_f), duf);
  axpy(1.0, matmul_tn(cache.h_prev, dpre_g), dug);
  axpy(1.0, col_sum(dpre_i), dbi);
  axpy(1.0, col_sum(dpre_o), dbo);
  axpy(1.0, col_sum(dpre_f), dbf);
  axpy(1.0, col_sum(dpre_g), dbg);

  dx = matmul_nt(dpre_i, wi);
  axpy(1.0, matmul_nt(dpre_o, wo), dx);
  axpy(1.0, matmul_nt(dpre_f, wf), dx);
  axpy(1.0, matmul_nt(dpre_g, wg), dx);

  dh_prev = matmul_nt(dpre_i, ui);
  axpy(1.0, matmul_nt(dpre_o, uo), dh_prev);
  axpy(1.0, matmul_nt(dpre_f, uf), dh_prev);
  axpy(1.0, matmul_nt(dpre_g, ug), dh_prev);
}

void LstmLayer::zero_grad() {
  for (Tensor* g : {&dwi, &dwo, &dwf, &dwg, &dui, &duo, &duf, &dug, &dbi,
                    &dbo, &dbf, &dbg})
    g->fill(0.0);
}

void LstmLayer::collect_params(std::vector<ParamRef>& out,
                               const std::string& prefix) {
  out.push_back({join_name(prefix, "wi"), &wi, &dwi});
  out.push_back({join_name(prefix, "wo"), &wo, &dwo});
  out.push_back({join_name(prefix, "wf"), &wf, &dwf});
  out.push_back({join_name(prefix, "wg"), &wg, &dwg});
  out.push_back({join_name(prefix, "ui"), &ui, &dui});
  out.push_back({join_name(prefix, "uo"), &uo, &duo});
  out.push_back({join_name(prefix, "uf"), &uf, &duf});
  out.push_back({join_name(prefix, "ug"), &ug, &dug});
  out.push_back({join_name(prefix, "bi"), &bi, &dbi});
  out.push_back({join_name(prefix, "bo"), &bo, &dbo});
  out.push_back({join_name(prefix, "bf"), &bf, &dbf});
  out.push_back({join_name(prefix, "bg"), &bg, &dbg});
}

BnLstmLayer::BnLstmLayer(std::size_t input_dim, std::size_t hidden_dim,
                         std::size_t t_cap, double bn_gamma_init,
                         double bn_decay, double bn_eps)
    : wi({input_dim, hidden_dim}), wo({input_dim, hidden_dim}),
      wf({input_dim, hidden_dim}), wg({input_dim, hidden_dim}),
      ui({hidden_dim, hidden_dim}), uo({hidden_dim, hidden_dim}),
      uf({hidden_dim, hidden_dim}), ug({hidden_dim, hidden_dim}),
      bi({hidden_dim}), bo({hidden_dim}), bf({hidden_dim}), bg({hidden_dim}),
      dwi({input_dim, hidden_dim}), dwo({input_dim, hidden_dim}),
      dwf({input_dim, hidden_dim}), dwg({input_dim, hidden_dim}),
      dui({hidden_dim, hidden_dim}), duo({hidden_dim, hidden_dim}),
      duf({hidden_dim, hidden_dim}), dug({hidden_dim, hidden_dim}),
      dbi({hidden_dim}), dbo({hidden_dim}), dbf({hidden_dim}), dbg({hidden_dim}),
      input_dim_(input_dim), hidden_dim_(hidden_dim), t_cap_(t_cap) {
  if (t_cap_ == 0) throw ConfigError("bnlstm: t_cap must be positive");
  for (std::size_t t = 0; t < t_cap_; ++t) {
    bn_x.emplace_back(4 * hidden_dim, bn_gamma_init, /*learn_beta=*/false,
                      bn_decay, bn_eps);
    bn_h.emplace_back(4 * hidden_dim, bn_gamma_init, /*learn_beta=*/false,
                      bn_decay, bn_eps);
    bn_c.emplace_back(hidden_dim, bn_gamma_init, /*learn_beta=*/true,
                      bn_decay, bn_eps);
  }
}

void BnLstmLayer::init(Rng& rng) {
  for (Tensor* w : {&wi, &wo, &wf, &wg})
    *w = orthogonal_init(input_dim_, hidden_dim_, rng);
  for (Tensor* u : {&ui, &uo, &uf, &ug})
    *u = orthogonal_init(hidden_dim_, hidden_dim_, rng);
  bi.fill(0.0);
  bo.fill(0.0);
  bf.fill(1.0);
  bg.fill(0.0);
}

void BnLstmLayer::step(const Tensor& x, const Tensor& h_prev,
                       const Tensor& c_prev, std::size_t t, BnMode mode,
                       Tensor& h_out, Tensor& c_out, Cache* cache) {
  if (t < 1) throw DomainError("bnlstm step: t must be >= 1");
  if (x.cols() != input_dim_)
    throw DimensionError("bnlstm step: input width disagrees with params");
  const std::size_t d = hidden_dim_;
  const std::size_t rows = x.rows();
  const std::size_t idx = std::min(t, t_cap_) - 1;

  Tensor px({rows, 4 * d});
  paste_cols(px, 0 * d, matmul(x, wi));
  paste_cols(px, 1 * d, matmul(x, wo));
  paste_cols(px, 2 * d, matmul(x, wf));
  paste_cols(px, 3 * d, matmul(x, wg));
  Tensor ph({rows, 4 * d});
  paste_cols(ph, 0 * d, matmul(h_prev, ui));
  paste_cols(ph, 1 * d, matmul(h_prev, uo));
  paste_cols(ph, 2 * d, matmul(h_prev, uf));
  paste_cols(ph, 3 * d, matmul(h_prev, ug));

  // Short final steps of a length-sorted batch cannot form batch statistics;
  // they normalize against the population estimates instead.
  const BnMode eff = (mode == BnMode::kTrain && rows < 2) ? BnMode::kInfer : mode;

  Cache local;
  Cache* cc = cache ? cache : &local;
  Tensor nx = bn_x[idx].forward(px, eff, &cc->bx);
  Tensor nh = bn_h[idx].forward(ph, eff, &cc->bh);

  Tensor pre = add(nx, nh);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t cidx = 0; cidx < d; ++cidx) {
      pre.at(r, 0 * d + cidx) += bi[cidx];
      pre.at(r, 1 * d + cidx) += bo[cidx];
      pre.at(r, 2 * d + cidx) += bf[cidx];
      pre.at(r, 3 * d + cidx) += bg[cidx];
    }

  Tensor i = sigmoid(slice_cols(pre, 0 * d, 1 * d));
  Tensor o = sigmoid(slice_cols(pre, 1 * d, 2 * d));
  Tensor f = sigmoid(slice_cols(pre, 2 * d, 3 * d));
  Tensor g = tanh_t(slice_cols(pre, 3 * d, 4 * d));

  Tensor c = add(mul(f, c_prev), mul(i, g));
  Tensor nc = bn_c[idx].forward(c, eff, &cc->bc);
  Tensor tnc = tanh_t(nc);
  Tensor h = mul(o, tnc);

  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->c_prev = c_prev;
    cache->i = i;
    cache->o = o;
    cache->f = f;
    cache->g = g;
    cache->c = c;
    cache->tnc = tnc;
    cache->t_index = idx;
  }
  h_out = std::move(h);
  c_out = std::move(c);
}

void BnLstmLayer::backward(const Cache& cache, const Tensor& dh,
                           const Tensor& dc_in, Tensor& dx, Tensor& dh_prev,
                           Tensor& dc_prev) {
  const std::size_t d = hidden_dim_;
  const std::size_t rows = dh.rows();
  const std::size_t idx = cache.t_index;

  Tensor d_o = mul(dh, cache.tnc);
  Tensor dtnc = mul(dh, cache.o);
  Tensor dnc = tanh_deriv_chain(dtnc, cache.tnc);
  Tensor dc = add(bn_c[idx].backward(cache.bc, dnc), dc_in);

  Tensor d_f = mul(dc, cache.c_prev);
  Tensor d_i = mul(dc, cache.g);
  Tensor d_g = mul(dc, cache.i);
  dc_prev = mul(dc, cache.f);

  Tensor dpre({rows, 4 * d});
  paste_cols(dpre, 0 * d, sigmoid_deriv_chain(d_i, cache.i));
  paste_cols(dpre, 1 * d, sigmoid_deriv_chain(d_o, cache.o));
  paste_cols(dpre, 2 * d, sigmoid_deriv_chain(d_f, cache.f));
  paste_cols(dpre, 3 * d, tanh_deriv_chain(d_g, cache.g));

  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t cidx = 0; cidx < d; ++cidx) {
      dbi[cidx] += dpre.at(r, 0 * d + cidx);
      dbo[cidx] += dpre.at(r, 1 * d + cidx);
      dbf[cidx] += dpre.at(r, 2 * d + cidx);
      dbg[cidx] += dpre.at(r, 3 * d + cidx);
    }

  Tensor dpx = bn_x[idx].backward(cache.bx, dpre);
  Tensor dph = bn_h[idx].backward(cache.bh, dpre);

  Tensor dpx_i = slice_cols(dpx, 0 * d, 1 * d);
  Tensor dpx_o = slice_cols(dpx, 1 * d, 2 * d);
  Tensor dpx_f = slice_cols(dpx, 2 * d, 3 * d);
  Tensor dpx_g = slice_cols(dpx, 3 * d, 4 * d);
  Tensor dph_i = slice_cols(dph, 0 * d, 1 * d);
  Tensor dph_o = slice_cols(dph, 1 * d, 2 * d);
  Tensor dph_f = slice_cols(dph, 2 * d, 3 * d);
  Tensor dph_g = slice_cols(dph, 3 * d, 4 * d);

  axpy(1.0, matmul_tn(cache.x, dpx_i), dwi);
  axpy(1.0, matmul_tn(cache.x, dpx_o), dwo);
  axpy(1.0, matmul_tn(cache.x, dpx_f), dwf);
  axpy(1.0, matmul_tn(cache.x, dpx_g), dwg);
  axpy(1.0, matmul_tn(cache.h_prev, dph_i), dui);
  axpy(1.0, matmul_tn(cache.h_prev, dph_o), duo);
  axpy(1.0, matmul_tn(cache.h_prev, dph_f), duf);
  axpy(1.0, matmul_tn(cache.h_prev, dph_g), dug);

  dx = matmul_nt(dpx_i, wi);
  axpy(1.0, matmul_nt(dpx_o, wo), dx);
  axpy(1.0, matmul_nt(dpx_f, wf), dx);
  axpy(1.0, matmul_nt(dpx_g, wg), dx);

  dh_prev = matmul_nt(dph_i, ui);
  axpy(1.0, matmul_nt(dph_o, uo), dh_prev);
  axpy(1.0, matmul_nt(dph_f, uf), dh_prev);
  axpy(1.0, matmul_nt(dph_g, ug), dh_prev);
}

void BnLstmLayer::zero_grad() {
  for (Tensor* g : {&dwi, &dwo, &dwf, &dwg, &dui, &duo, &duf, &dug, &dbi,
                    &dbo, &dbf, &dbg})
    g->fill(0.0);
  for (auto& bn : bn_x) bn.zero_grad();
  for (auto& bn : bn_h) bn.zero_grad();
  for (auto& bn : bn_c) bn.zero_grad();
}

void BnLstmLayer::collect_params(std::vector<ParamRef>& out,
                                 const std::string& prefix) {
  out.push_back({join_name(prefix, "wi"), &wi, &dwi});
  out.push_back({join_name(prefix, "wo"), &wo, &dwo});
  out.push_back({join_name(prefix, "wf"), &wf, &dwf});
  out.push_back({join_name(prefix, "wg"), &wg, &dwg});
  out.push_back({join_name(prefix, "ui"), &ui, &dui});
  out.push_back({join_name(prefix, "uo"), &uo, &duo});
  out.push_back({join_name(prefix, "uf"), &uf, &duf});
  out.push_back({join_name(prefix, "ug"), &ug, &dug});
  out.push_back({join_name(prefix, "bi"), &bi, &dbi});
  out.push_back({join_name(prefix, "bo"), &bo, &dbo});
  out.push_back({join_name(prefix, "bf"), &bf, &dbf});
  out.push_back({join_name(prefix, "bg"), &bg, &dbg});
  for (std::size_t t = 0; t < t_cap_; ++t) {
    const std::string ts = "t" + std::to_string(t + 1);
    bn_x[t].collect_params(out, join_name(prefix, "bn_x." + ts));
    bn_h[t].collect_params(out, join_name(prefix, "bn_h." + ts));
    bn_c[t].collect_params(out, join_name(prefix, "bn_c." + ts));
  }
}

void BnLstmLayer::collect_state(std::vector<StateRef>& out,
                                const std::string& prefix) {
  for (std::size_t t = 0; t < t_cap_; ++t) {
    const std::string ts = "t" + std::to_string(t + 1);
    bn_x[t].collect_state(out, join_name(prefix, "bn_x." + ts));
    bn_h[t].collect_state(out, join_name(prefix, "bn_h." + ts));
    bn_c[t].collect_state(out, join_name(prefix, "bn_c." + ts));
  }
}

RecurrentStack::RecurrentStack(CellKind kind, std::size_t depth,
                               std::size_t input_dim, std::size_t hidden_dim,
                               std::size_t t_cap, double bn_decay)
    : kind_(kind), depth_(depth), input_dim_(input_dim),
      hidden_dim_(hidden_dim) {
  if (depth == 0) throw ConfigError("recurrent stack: depth must be >= 1");
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t in = (l == 0) ? input_dim : hidden_dim;
    if (kind == CellKind::kLstm)
      lstm_.emplace_back(in, hidden_dim);
    else
      bn_.emplace_back(in, hidden_dim, t_cap, 0.1, bn_decay);
  }
}

void RecurrentStack::init(Rng& rng) {
  for (auto& l : lstm_) l.init(rng);
  for (auto& l : bn_) l.init(rng);
}

void RecurrentStack::begin(std::size_t batch, BnMode mode, bool record) {
  mode_ = mode;
  record_ = record;
  trace_.clear();
  state_.assign(depth_, CellState{Tensor({batch, hidden_dim_}),
                                  Tensor({batch, hidden_dim_})});
}

Tensor RecurrentStack::step(const Tensor& x) {
  const std::size_t rows = x.rows();
  if (rows > state_[0].h.rows())
    throw DimensionError("recurrent step: batch may only shrink");

  StepRecord rec;
  rec.rows = rows;
  if (record_) {
    if (kind_ == CellKind::kLstm)
      rec.lstm_cache.resize(depth_);
    else
      rec.bn_cache.resize(depth_);
  }

  Tensor input = x;
  const std::size_t t = trace_.size() + 1;
  for (std::size_t l = 0; l < depth_; ++l) {
    Tensor h_prev = state_[l].h.rows() == rows ? state_[l].h
                                               : state_[l].h.top_rows(rows);
    Tensor c_prev = state_[l].c.rows() == rows ? state_[l].c
                                               : state_[l].c.top_rows(rows);
    Tensor h_out, c_out;
    if (kind_ == CellKind::kLstm) {
      lstm_[l].step(input, h_prev, c_prev, h_out, c_out,
                    record_ ? &rec.lstm_cache[l] : nullptr);
    } else {
      bn_[l].step(input, h_prev, c_prev, t, mode_, h_out, c_out,
                  record_ ? &rec.bn_cache[l] : nullptr);
    }
    state_[l].h = h_out;
    state_[l].c = c_out;
    input = std::move(h_out);
  }
  if (record_) trace_.push_back(std::move(rec));
  return input;
}

RecurrentStack::SequenceResult RecurrentStack::run_sequence(
    const std::vector<Tensor>& inputs, BnMode mode, bool record) {
  if (inputs.empty())
    throw DimensionError("run_sequence: at least one step required");
  begin(inputs[0].rows(), mode, record);
  SequenceResult out;
  for (const Tensor& x : inputs) out.top_hiddens.push_back(step(x));
  out.final_states = state_;
  return out;
}

Tensor RecurrentStack::grow_rows(const Tensor& t, std::size_t rows) {
  if (t.rows() == rows) return t;
  Tensor out({rows, t.cols()});
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) out.at(r, c) = t.at(r, c);
  return out;
}

void RecurrentStack::begin_backward() {
  if (trace_.empty())
    throw DimensionError("backward: no recorded forward steps");
  back_pos_ = trace_.size();
  const std::size_t rows = trace_.back().rows;
  dh_carry_.assign(depth_, Tensor({rows, hidden_dim_}));
  dc_carry_.assign(depth_, Tensor({rows, hidden_dim_}));
}

Tensor RecurrentStack::backward_step(const Tensor& dh_top) {
  if (back_pos_ == 0)
    throw DimensionError("backward_step: already at the first step");
  --back_pos_;
  const StepRecord& rec = trace_[back_pos_];
  const std::size_t rows = rec.rows;
  if (dh_top.rows() != rows)
    throw DimensionError("backward_step: dh rows disagree with the recorded step");

  // Rows entering the graph at this step (longer sequences already ended
  // going backward) carry zero future gradient.
  for (std::size_t l = 0; l < depth_; ++l) {
    dh_carry_[l] = grow_rows(dh_carry_[l], rows);
    dc_carry_[l] = grow_rows(dc_carry_[l], rows);
  }

  Tensor from_above;  // dx of the layer above at this step
  Tensor dx;
  for (std::size_t li = depth_; li-- > 0;) {
    Tensor dh = dh_carry_[li];
    if (li + 1 == depth_) axpy(1.0, dh_top, dh);
    if (!from_above.empty()) axpy(1.0, from_above, dh);

    Tensor dh_prev, dc_prev;
    if (kind_ == CellKind::kLstm) {
      lstm_[li].backward(rec.lstm_cache[li], dh, dc_carry_[li], dx, dh_prev,
                         dc_prev);
    } else {
      bn_[li].backward(rec.bn_cache[li], dh, dc_carry_[li], dx, dh_prev,
                       dc_prev);
    }
    dh_carry_[li] = std::move(dh_prev);
    dc_carry_[li] = std::move(dc_prev);
    from_above = dx;
  }
  return dx;
}

void RecurrentStack::zero_grad() {
  for (auto& l : lstm_) l.zero_grad();
  for (auto& l : bn_) l.zero_grad();
}

void RecurrentStack::collect_params(std::vector<ParamRef>& out,
                                    const std::string& prefix) {
  for (std::size_t l = 0; l < depth_; ++l) {
    const std::string lp = join_name(prefix, "layer" + std::to_string(l));
    if (kind_ == CellKind::kLstm)
      lstm_[l].collect_params(out, lp);
    else
      bn_[l].collect_params(out, lp);
  }
}

void RecurrentStack::collect_state(std::vector<StateRef>& out,
                                   const std::string& prefix) {
  for (std::size_t l = 0; l < bn_.size(); ++l)
    bn_[l].collect_state(out, join_name(prefix, "layer" + std::to_string(l)));
}

}  // namespace vtag
