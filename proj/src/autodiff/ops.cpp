// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/ops.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "opbench/errors.hpp"

namespace opbench::ad
{

namespace
{

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMat>;
using CMap = Eigen::Map<const RowMat>;
using StridedMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using CStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

CMap cmat(const Tensor &t)
{
  return CMap(t.ptr(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

Map mat(Tensor &t)
{
  return Map(t.ptr(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

Graph &owner(Var a, const char *op)
{
  if (!a.valid())
  {
    throw GraphError(op, "unbound variable");
  }
  return *a.graph();
}

Graph &owner(Var a, Var b, const char *op)
{
  Graph &g = owner(a, op);
  g.check_owner(b, op);
  return g;
}

void require_rank2(const Tensor &t, const char *op, const char *what)
{
  if (t.rank() != 2)
  {
    throw GraphError(op, std::string(what) + " must be rank 2, got " + to_string(t.shape()));
  }
}

void require_same_shape(const Tensor &a, const Tensor &b, const char *op)
{
  if (a.shape() != b.shape())
  {
    throw GraphError(op, "shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
}

template <typename Fn, typename Deriv>
Var unary(Var a, const char *op, Fn fn, Deriv deriv_from_output)
{
  Graph &g = owner(a, op);
  const Tensor &x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] = fn(x[i]);
  }
  const std::size_t ia = a.id();
  return g.record(std::move(y), g.requires_grad(a),
                  [ia, deriv_from_output](Graph &gr, std::size_t self)
                  {
                    const Tensor &out = gr.value(self);
                    const Tensor &x = gr.value(ia);
                    const Tensor &gout = gr.grad(self);
                    Tensor &gx = gr.grad(ia);
                    for (std::size_t i = 0; i < gout.size(); ++i)
                    {
                      gx[i] += gout[i] * deriv_from_output(x[i], out[i]);
                    }
                  });
}

double sigmoid_scalar(double x)
{
  if (x >= 0.0)
  {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Activation parse_activation(const std::string &name)
{
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity" || name == "linear") return Activation::identity;
  throw SpecError("unknown activation '" + name + "'");
}

std::string to_string(Activation a)
{
  switch (a)
  {
  case Activation::tanh: return "tanh";
  case Activation::relu: return "relu";
  case Activation::sigmoid: return "sigmoid";
  case Activation::identity: return "identity";
  }
  return "identity";
}

Var matmul(Var a, Var b)
{
  Graph &g = owner(a, b, "matmul");
  const Tensor &ta = a.value();
  const Tensor &tb = b.value();
  require_rank2(ta, "matmul", "lhs");
  require_rank2(tb, "matmul", "rhs");
  if (ta.dim(1) != tb.dim(0))
  {
    throw GraphError("matmul", "inner dimensions differ: " + to_string(ta.shape()) + " x " +
                                   to_string(tb.shape()));
  }
  Tensor out({ta.dim(0), tb.dim(1)});
  mat(out).noalias() = cmat(ta) * cmat(tb);
  const std::size_t ia = a.id(), ib = b.id();
  return g.record(std::move(out), g.requires_grad(a) || g.requires_grad(b),
                  [ia, ib](Graph &gr, std::size_t self)
                  {
                    const auto gout = cmat(gr.grad(self));
                    if (gr.requires_grad(ia))
                    {
                      mat(gr.grad(ia)).noalias() += gout * cmat(gr.value(ib)).transpose();
                    }
                    if (gr.requires_grad(ib))
                    {
                      mat(gr.grad(ib)).noalias() += cmat(gr.value(ia)).transpose() * gout;
                    }
                  });
}

Var affine(Var x, Var weight, Var bias)
{
  Graph &g = owner(x, weight, "affine");
  g.check_owner(bias, "affine");
  const Tensor &tx = x.value();
  const Tensor &tw = weight.value();
  const Tensor &tb = bias.value();
  require_rank2(tx, "affine", "input");
  require_rank2(tw, "affine", "weight");
  if (tx.dim(1) != tw.dim(0) || tb.size() != tw.dim(1))
  {
    throw GraphError("affine", "incompatible shapes x " + to_string(tx.shape()) + ", W " +
                                   to_string(tw.shape()) + ", b " + to_string(tb.shape()));
  }
  Tensor out({tx.dim(0), tw.dim(1)});
  auto o = mat(out);
  o.noalias() = cmat(tx) * cmat(tw);
  o.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(tb.ptr(), static_cast<Eigen::Index>(tb.size()));
  const std::size_t ix = x.id(), iw = weight.id(), ib = bias.id();
  const bool rg = g.requires_grad(x) || g.requires_grad(weight) || g.requires_grad(bias);
  return g.record(std::move(out), rg,
                  [ix, iw, ib](Graph &gr, std::size_t self)
                  {
                    const auto gout = cmat(gr.grad(self));
                    if (gr.requires_grad(ix))
                    {
                      mat(gr.grad(ix)).noalias() += gout * cmat(gr.value(iw)).transpose();
                    }
                    if (gr.requires_grad(iw))
                    {
                      mat(gr.grad(iw)).noalias() += cmat(gr.value(ix)).transpose() * gout;
                    }
                    if (gr.requires_grad(ib))
                    {
                      Tensor &gb = gr.grad(ib);
                      Eigen::Map<Eigen::RowVectorXd>(gb.ptr(), static_cast<Eigen::Index>(gb.size())) +=
                          gout.colwise().sum();
                    }
                  });
}

Var add(Var a, Var b)
{
  Graph &g = owner(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  out.requires_grad = false;
  const Tensor &tb = b.value();
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] += tb[i];
  }
  const std::size_t ia = a.id(), ib = b.id();
  return g.record(std::move(out), g.requires_grad(a) || g.requires_grad(b),
                  [ia, ib](Graph &gr, std::size_t self)
                  {
                    const Tensor &gout = gr.grad(self);
                    for (std::size_t id : {ia, ib})
                    {
                      if (gr.requires_grad(id))
                      {
                        Tensor &gx = gr.grad(id);
                        for (std::size_t i = 0; i < gout.size(); ++i)
                        {
                          gx[i] += gout[i];
                        }
                      }
                    }
                  });
}

Var sub(Var a, Var b)
{
  return add(a, scale(b, -1.0));
}

Var mul(Var a, Var b)
{
  Graph &g = owner(a, b, "mul");
  require_same_shape(a.value(), b.value(), "mul");
  const Tensor &ta = a.value();
  const Tensor &tb = b.value();
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = ta[i] * tb[i];
  }
  const std::size_t ia = a.id(), ib = b.id();
  return g.record(std::move(out), g.requires_grad(a) || g.requires_grad(b),
                  [ia, ib](Graph &gr, std::size_t self)
                  {
                    const Tensor &gout = gr.grad(self);
                    if (gr.requires_grad(ia))
                    {
                      const Tensor &vb = gr.value(ib);
                      Tensor &ga = gr.grad(ia);
                      for (std::size_t i = 0; i < gout.size(); ++i)
                      {
                        ga[i] += gout[i] * vb[i];
                      }
                    }
                    if (gr.requires_grad(ib))
                    {
                      const Tensor &va = gr.value(ia);
                      Tensor &gb = gr.grad(ib);
                      for (std::size_t i = 0; i < gout.size(); ++i)
                      {
                        gb[i] += gout[i] * va[i];
                      }
                    }
                  });
}

Var scale(Var a, double s)
{
  return unary(
      a, "scale", [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var tanh(Var a)
{
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a)
{
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a)
{
  return unary(a, "sigmoid", sigmoid_scalar, [](double, double y) { return y * (1.0 - y); });
}

Var activate(Var a, Activation act)
{
  switch (act)
  {
  case Activation::tanh: return tanh(a);
  case Activation::relu: return relu(a);
  case Activation::sigmoid: return sigmoid(a);
  case Activation::identity: return a;
  }
  return a;
}

Var concat_cols(Var a, Var b)
{
  Graph &g = owner(a, b, "concat_cols");
  const Tensor &ta = a.value();
  const Tensor &tb = b.value();
  require_rank2(ta, "concat_cols", "lhs");
  require_rank2(tb, "concat_cols", "rhs");
  if (ta.dim(0) != tb.dim(0))
  {
    throw GraphError("concat_cols", "row counts differ");
  }
  const std::size_t m = ta.dim(0), k1 = ta.dim(1), k2 = tb.dim(1);
  Tensor out({m, k1 + k2});
  mat(out).leftCols(static_cast<Eigen::Index>(k1)) = cmat(ta);
  mat(out).rightCols(static_cast<Eigen::Index>(k2)) = cmat(tb);
  const std::size_t ia = a.id(), ib = b.id();
  return g.record(std::move(out), g.requires_grad(a) || g.requires_grad(b),
                  [ia, ib, k1, k2](Graph &gr, std::size_t self)
                  {
                    const auto gout = cmat(gr.grad(self));
                    if (gr.requires_grad(ia))
                    {
                      mat(gr.grad(ia)) += gout.leftCols(static_cast<Eigen::Index>(k1));
                    }
                    if (gr.requires_grad(ib))
                    {
                      mat(gr.grad(ib)) += gout.rightCols(static_cast<Eigen::Index>(k2));
                    }
                  });
}

Var sum(Var a)
{
  Graph &g = owner(a, "sum");
  double s = 0.0;
  for (double v : a.value().data())
  {
    s += v;
  }
  const std::size_t ia = a.id();
  return g.record(Tensor({1}, std::vector<double>{s}), g.requires_grad(a),
                  [ia](Graph &gr, std::size_t self)
                  {
                    const double gs = gr.grad(self)[0];
                    Tensor &gx = gr.grad(ia);
                    for (std::size_t i = 0; i < gx.size(); ++i)
                    {
                      gx[i] += gs;
                    }
                  });
}

Var time_step(Var sequence, std::size_t t)
{
  Graph &g = owner(sequence, "time_step");
  const Tensor &s = sequence.value();
  if (s.rank() != 3 || t >= s.dim(1))
  {
    throw GraphError("time_step", "need [batch, steps, features] with t < steps, got shape " +
                                      to_string(s.shape()) + " and t = " + std::to_string(t));
  }
  const std::size_t batch = s.dim(0), steps = s.dim(1), feat = s.dim(2);
  Tensor out({batch, feat});
  for (std::size_t b = 0; b < batch; ++b)
  {
    for (std::size_t f = 0; f < feat; ++f)
    {
      out.at(b, f) = s[(b * steps + t) * feat + f];
    }
  }
  const std::size_t is = sequence.id();
  return g.record(std::move(out), g.requires_grad(sequence),
                  [is, t, batch, steps, feat](Graph &gr, std::size_t self)
                  {
                    const Tensor &gout = gr.grad(self);
                    Tensor &gs = gr.grad(is);
                    for (std::size_t b = 0; b < batch; ++b)
                    {
                      for (std::size_t f = 0; f < feat; ++f)
                      {
                        gs[(b * steps + t) * feat + f] += gout.at(b, f);
                      }
                    }
                  });
}

Var gru_cell(Var x, Var h, Var w_input, Var w_hidden, Var bias)
{
  Graph &g = owner(x, h, "gru_cell");
  for (Var v : {w_input, w_hidden, bias})
  {
    g.check_owner(v, "gru_cell");
  }
  const Tensor &tx = x.value();
  const Tensor &th = h.value();
  const Tensor &twx = w_input.value();
  const Tensor &twh = w_hidden.value();
  const Tensor &tb = bias.value();
  require_rank2(tx, "gru_cell", "x");
  require_rank2(th, "gru_cell", "h");
  require_rank2(twx, "gru_cell", "w_input");
  require_rank2(twh, "gru_cell", "w_hidden");
  const std::size_t batch = tx.dim(0), feat = tx.dim(1), hidden = th.dim(1);
  if (th.dim(0) != batch || twx.dim(0) != feat || twx.dim(1) != 3 * hidden ||
      twh.dim(0) != hidden || twh.dim(1) != 3 * hidden || tb.size() != 3 * hidden)
  {
    throw GraphError("gru_cell", "incompatible shapes x " + to_string(tx.shape()) + ", h " +
                                     to_string(th.shape()) + ", w_input " + to_string(twx.shape()) +
                                     ", w_hidden " + to_string(twh.shape()) + ", bias " +
                                     to_string(tb.shape()));
  }
  const auto H = static_cast<Eigen::Index>(hidden);
  const auto B = static_cast<Eigen::Index>(batch);

  // Pre-activations from the input: [B, 3H].
  RowMat ax = cmat(tx) * cmat(twx);
  ax.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(tb.ptr(), 3 * H);
  const auto hm = cmat(th);
  const auto uh = cmat(twh);
  RowMat zr = ax.leftCols(2 * H);
  zr.noalias() += hm * uh.leftCols(2 * H);
  zr = zr.unaryExpr(&sigmoid_scalar);

  // Cache layout per row: [z | r | n | r*h].
  auto cache = std::make_shared<RowMat>(B, 4 * H);
  cache->leftCols(2 * H) = zr;
  cache->middleCols(3 * H, H) = zr.rightCols(H).cwiseProduct(hm);
  RowMat npre = ax.rightCols(H);
  npre.noalias() += cache->middleCols(3 * H, H) * uh.rightCols(H);
  cache->middleCols(2 * H, H) = npre.array().tanh().matrix();

  Tensor out({batch, hidden});
  {
    auto o = mat(out);
    const auto z = cache->leftCols(H);
    const auto n = cache->middleCols(2 * H, H);
    o = hm + z.cwiseProduct(n - hm);
  }

  const std::size_t ix = x.id(), ih = h.id(), iwx = w_input.id(), iwh = w_hidden.id(),
                    ib = bias.id();
  bool rg = false;
  for (std::size_t id : {ix, ih, iwx, iwh, ib})
  {
    rg = rg || g.requires_grad(id);
  }
  return g.record(
      std::move(out), rg,
      [=](Graph &gr, std::size_t self)
      {
        const auto gout = cmat(gr.grad(self));
        const auto hmat = cmat(gr.value(ih));
        const auto u = cmat(gr.value(iwh));
        const auto z = cache->leftCols(H);
        const auto r = cache->middleCols(H, H);
        const auto n = cache->middleCols(2 * H, H);
        const auto rh = cache->middleCols(3 * H, H);

        // d pre-activations, [B, 3H] in gate order.
        RowMat da(B, 3 * H);
        da.rightCols(H) = gout.cwiseProduct(z).cwiseProduct(
            (1.0 - n.array().square()).matrix());
        const RowMat d_rh = da.rightCols(H) * u.rightCols(H).transpose();
        da.leftCols(H) = gout.cwiseProduct(n - hmat).cwiseProduct(
            z.cwiseProduct((1.0 - z.array()).matrix()));
        da.middleCols(H, H) = d_rh.cwiseProduct(hmat).cwiseProduct(
            r.cwiseProduct((1.0 - r.array()).matrix()));

        if (gr.requires_grad(ih))
        {
          auto gh = mat(gr.grad(ih));
          gh += gout.cwiseProduct((1.0 - z.array()).matrix());
          gh += d_rh.cwiseProduct(r);
          gh.noalias() += da.leftCols(2 * H) * u.leftCols(2 * H).transpose();
        }
        if (gr.requires_grad(iwh))
        {
          auto gu = mat(gr.grad(iwh));
          gu.leftCols(2 * H).noalias() += hmat.transpose() * da.leftCols(2 * H);
          gu.rightCols(H).noalias() += rh.transpose() * da.rightCols(H);
        }
        if (gr.requires_grad(iwx))
        {
          mat(gr.grad(iwx)).noalias() += cmat(gr.value(ix)).transpose() * da;
        }
        if (gr.requires_grad(ib))
        {
          Tensor &gb = gr.grad(ib);
          Eigen::Map<Eigen::RowVectorXd>(gb.ptr(), 3 * H) += da.colwise().sum();
        }
        if (gr.requires_grad(ix))
        {
          mat(gr.grad(ix)).noalias() += da * cmat(gr.value(iwx)).transpose();
        }
      });
}

Var contraction(Var branch, Var trunk, Var beta)
{
  Graph &g = owner(branch, trunk, "contraction");
  g.check_owner(beta, "contraction");
  const Tensor &tb = branch.value();
  const Tensor &tt = trunk.value();
  const Tensor &tbeta = beta.value();
  require_rank2(tb, "contraction", "branch");
  require_rank2(tt, "contraction", "trunk");
  const std::size_t batch = tb.dim(0), hidden = tb.dim(1), n = tt.dim(0);
  const std::size_t fields = tbeta.size();
  if (fields == 0 || tt.dim(1) != fields * hidden)
  {
    throw GraphError("contraction", "trunk width " + std::to_string(tt.dim(1)) +
                                        " != hidden " + std::to_string(hidden) + " x fields " +
                                        std::to_string(fields));
  }
  const auto H = static_cast<Eigen::Index>(hidden);
  const auto N = static_cast<Eigen::Index>(n);
  const auto stride = static_cast<Eigen::Index>(fields * n);
  Tensor out({batch, fields, n});
  const auto bm = cmat(tb);
  const auto tm = cmat(tt);
  for (std::size_t c = 0; c < fields; ++c)
  {
    StridedMap pc(out.ptr() + c * n, static_cast<Eigen::Index>(batch), N,
                  Eigen::OuterStride<>(stride));
    pc.noalias() = bm * tm.middleCols(static_cast<Eigen::Index>(c) * H, H).transpose();
    pc.array() += tbeta[c];
  }
  const std::size_t ib = branch.id(), it = trunk.id(), ibeta = beta.id();
  const bool rg = g.requires_grad(branch) || g.requires_grad(trunk) || g.requires_grad(beta);
  return g.record(
      std::move(out), rg,
      [=](Graph &gr, std::size_t self)
      {
        const Tensor &gout = gr.grad(self);
        const auto bmat = cmat(gr.value(ib));
        const auto tmat = cmat(gr.value(it));
        for (std::size_t c = 0; c < fields; ++c)
        {
          CStridedMap gc(gout.ptr() + c * n, static_cast<Eigen::Index>(batch), N,
                         Eigen::OuterStride<>(stride));
          const auto cH = static_cast<Eigen::Index>(c) * H;
          if (gr.requires_grad(ib))
          {
            mat(gr.grad(ib)).noalias() += gc * tmat.middleCols(cH, H);
          }
          if (gr.requires_grad(it))
          {
            mat(gr.grad(it)).middleCols(cH, H).noalias() += gc.transpose() * bmat;
          }
          if (gr.requires_grad(ibeta))
          {
            gr.grad(ibeta)[c] += gc.sum();
          }
        }
      });
}

Var mse_loss(Var pred, const Tensor &target)
{
  Graph &g = owner(pred, "mse_loss");
  const Tensor &p = pred.value();
  if (p.size() != target.size() || p.size() == 0)
  {
    throw GraphError("mse_loss", "prediction " + to_string(p.shape()) + " vs target " +
                                     to_string(target.shape()));
  }
  auto residual = std::make_shared<std::vector<double>>(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    const double d = p[i] - target[i];
    (*residual)[i] = d;
    s += d * d;
  }
  const double inv_n = 1.0 / static_cast<double>(p.size());
  const std::size_t ip = pred.id();
  return g.record(Tensor({1}, std::vector<double>{s * inv_n}), g.requires_grad(pred),
                  [ip, residual, inv_n](Graph &gr, std::size_t self)
                  {
                    const double gs = gr.grad(self)[0] * 2.0 * inv_n;
                    Tensor &gp = gr.grad(ip);
                    for (std::size_t i = 0; i < gp.size(); ++i)
                    {
                      gp[i] += gs * (*residual)[i];
                    }
                  });
}

}  // namespace opbench::ad
