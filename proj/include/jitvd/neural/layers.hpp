#pragma once

// Relational message-passing layers. Node features are row vectors, so a
// layer maps an |N| x d_in matrix to |N| x d_out. Every kernel is templated
// on the scalar type and has a matching backward pass.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <string>

#include <Eigen/Dense>

#include "jitvd/errors.hpp"
#include "jitvd/neural/graph_input.hpp"

namespace jitvd::neural {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Per-relation transform W_r (d_in x d_out); for attention layers also the
/// query/key kernels Q_r, K_r (d_out). `self` is the optional self-connection
/// weight (empty when disabled).
template <typename Scalar>
struct LayerParamsT {
  std::array<Mat<Scalar>, kNumRelations> W;
  std::array<Vec<Scalar>, kNumRelations> Q;
  std::array<Vec<Scalar>, kNumRelations> K;
  Mat<Scalar> self;

  Eigen::Index d_in() const { return W[0].rows(); }
  Eigen::Index d_out() const { return W[0].cols(); }
  bool has_self() const { return self.size() > 0; }

  static LayerParamsT zeros_like(const LayerParamsT& o) {
    LayerParamsT z;
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      z.W[r] = Mat<Scalar>::Zero(o.W[r].rows(), o.W[r].cols());
      z.Q[r] = Vec<Scalar>::Zero(o.Q[r].size());
      z.K[r] = Vec<Scalar>::Zero(o.K[r].size());
    }
    z.self = Mat<Scalar>::Zero(o.self.rows(), o.self.cols());
    return z;
  }
};

/// Everything the backward pass needs. For convolution layers the attention
/// fields stay empty.
template <typename Scalar>
struct LayerTrace {
  Mat<Scalar> out;  // ReLU(pre)
  Mat<Scalar> pre;
  std::array<Mat<Scalar>, kNumRelations> G;  // H W_r
  std::array<Vec<Scalar>, kNumRelations> q, k;
  std::array<std::vector<Scalar>, kNumRelations> logit;      // q_i + k_j per in-edge
  std::array<std::vector<Scalar>, kNumRelations> attention;  // softmax per in-edge
};

namespace detail {

template <typename Scalar>
void check_shapes(const LayerParamsT<Scalar>& p, const RelGraph& g, const Mat<Scalar>& H, bool attention) {
  if (H.rows() != g.num_nodes)
    throw ShapeMismatch("feature rows " + std::to_string(H.rows()) + " != nodes " + std::to_string(g.num_nodes));
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    if (p.W[r].rows() != H.cols() || p.W[r].cols() != p.d_out())
      throw ShapeMismatch("W_r shape does not match feature width " + std::to_string(H.cols()));
    if (attention && (p.Q[r].size() != p.d_out() || p.K[r].size() != p.d_out()))
      throw ShapeMismatch("attention kernels must have d_out entries");
  }
  if (p.has_self() && (p.self.rows() != H.cols() || p.self.cols() != p.d_out()))
    throw ShapeMismatch("self weight shape mismatch");
}

template <typename Scalar>
Scalar leaky(Scalar x, Scalar slope) {
  return x > Scalar(0) ? x : slope * x;
}

/// Sum whose result depends only on the multiset of terms, so reductions
/// over neighbors or nodes do not change under node relabeling.
template <typename Scalar>
Scalar sorted_sum(std::vector<Scalar>& terms) {
  std::sort(terms.begin(), terms.end());
  Scalar s(0);
  for (Scalar x : terms) s += x;
  return s;
}

/// H * W one row at a time; a row's result does not depend on its position
/// in H.
template <typename Scalar>
Mat<Scalar> rowwise_product(const Mat<Scalar>& H, const Mat<Scalar>& W) {
  Mat<Scalar> out(H.rows(), W.cols());
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row(H.cols());
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    row = H.row(i);
    out.row(i).noalias() = row * W;
  }
  return out;
}

template <typename Scalar>
Vec<Scalar> rowwise_dot(const Mat<Scalar>& G, const Vec<Scalar>& v) {
  Vec<Scalar> out(G.rows());
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row(G.cols());
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    row = G.row(i);
    out(i) = row.dot(v.transpose());
  }
  return out;
}

/// pre[i] += sum_e coeff[e] * G[src[e]] for the in-edges [lo, hi) of i.
template <typename Scalar, typename CoeffFn>
void aggregate(Mat<Scalar>& pre, int i, const Mat<Scalar>& G, const std::vector<int>& src, int lo, int hi,
               CoeffFn coeff, std::vector<Scalar>& buf) {
  if (hi - lo == 1) {
    pre.row(i) += coeff(lo) * G.row(src[static_cast<std::size_t>(lo)]);
    return;
  }
  for (Eigen::Index c = 0; c < G.cols(); ++c) {
    buf.clear();
    for (int e = lo; e < hi; ++e) buf.push_back(coeff(e) * G(src[static_cast<std::size_t>(e)], c));
    pre(i, c) += sorted_sum(buf);
  }
}

template <typename Scalar>
void finish(const LayerParamsT<Scalar>& p, const Mat<Scalar>& H, LayerTrace<Scalar>& t) {
  if (p.has_self()) t.pre += rowwise_product(H, p.self);
  t.out = t.pre.cwiseMax(Scalar(0));
}

}  // namespace detail

/// h_i' = ReLU( sum_r sum_{j in N_i^r} G_r[j] / |N_i^r| ).
template <typename Scalar>
LayerTrace<Scalar> rgcn_forward(const LayerParamsT<Scalar>& p, const RelGraph& g, const Mat<Scalar>& H) {
  detail::check_shapes(p, g, H, false);
  LayerTrace<Scalar> t;
  t.pre = Mat<Scalar>::Zero(g.num_nodes, p.d_out());
  std::vector<Scalar> buf;
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    t.G[r] = detail::rowwise_product(H, p.W[r]);
    for (int i = 0; i < g.num_nodes; ++i) {
      const int deg = g.in_degree(static_cast<int>(r), i);
      if (deg == 0) continue;
      const Scalar inv = Scalar(1) / Scalar(deg);
      detail::aggregate(t.pre, i, t.G[r], g.src[r], g.offsets[r][static_cast<std::size_t>(i)],
                        g.offsets[r][static_cast<std::size_t>(i) + 1], [inv](int) { return inv; }, buf);
    }
  }
  detail::finish(p, H, t);
  return t;
}

/// Attention layer: q_i = G_r[i] Q_r, k_j = G_r[j] K_r,
/// a_ij = softmax_j LeakyReLU(q_i + k_j) over i's in-neighbors under r,
/// h_i' = ReLU( sum_r sum_j a_ij G_r[j] ).
template <typename Scalar>
LayerTrace<Scalar> rgat_forward(const LayerParamsT<Scalar>& p, const RelGraph& g, const Mat<Scalar>& H,
                                Scalar slope) {
  detail::check_shapes(p, g, H, true);
  LayerTrace<Scalar> t;
  t.pre = Mat<Scalar>::Zero(g.num_nodes, p.d_out());
  std::vector<Scalar> buf;
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    t.G[r] = detail::rowwise_product(H, p.W[r]);
    t.q[r] = detail::rowwise_dot(t.G[r], p.Q[r]);
    t.k[r] = detail::rowwise_dot(t.G[r], p.K[r]);
    t.logit[r].assign(g.src[r].size(), Scalar(0));
    t.attention[r].assign(g.src[r].size(), Scalar(0));
    for (int i = 0; i < g.num_nodes; ++i) {
      const int lo = g.offsets[r][static_cast<std::size_t>(i)], hi = g.offsets[r][static_cast<std::size_t>(i) + 1];
      if (lo == hi) continue;
      Scalar mx = -std::numeric_limits<Scalar>::infinity();
      for (int e = lo; e < hi; ++e) {
        const auto eu = static_cast<std::size_t>(e);
        t.logit[r][eu] = t.q[r](i) + t.k[r](g.src[r][eu]);
        mx = std::max(mx, detail::leaky(t.logit[r][eu], slope));
      }
      buf.clear();
      for (int e = lo; e < hi; ++e) {
        const auto eu = static_cast<std::size_t>(e);
        t.attention[r][eu] = std::exp(detail::leaky(t.logit[r][eu], slope) - mx);
        buf.push_back(t.attention[r][eu]);
      }
      const Scalar z = detail::sorted_sum(buf);
      for (int e = lo; e < hi; ++e) t.attention[r][static_cast<std::size_t>(e)] /= z;
      const auto& a = t.attention[r];
      detail::aggregate(t.pre, i, t.G[r], g.src[r], lo, hi, [&a](int e) { return a[static_cast<std::size_t>(e)]; },
                        buf);
    }
  }
  detail::finish(p, H, t);
  return t;
}

/// Accumulates parameter gradients into `grad` and returns dL/dH.
template <typename Scalar>
Mat<Scalar> rgcn_backward(const LayerParamsT<Scalar>& p, const RelGraph& g, const Mat<Scalar>& H,
                          const LayerTrace<Scalar>& t, const Mat<Scalar>& d_out, LayerParamsT<Scalar>& grad) {
  const Mat<Scalar> d_pre = d_out.cwiseProduct((t.pre.array() > Scalar(0)).template cast<Scalar>().matrix());
  Mat<Scalar> dH = Mat<Scalar>::Zero(H.rows(), H.cols());
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    Mat<Scalar> dG = Mat<Scalar>::Zero(g.num_nodes, p.d_out());
    for (int i = 0; i < g.num_nodes; ++i) {
      const int deg = g.in_degree(static_cast<int>(r), i);
      if (deg == 0) continue;
      const Scalar inv = Scalar(1) / Scalar(deg);
      for (int e = g.offsets[r][static_cast<std::size_t>(i)]; e < g.offsets[r][static_cast<std::size_t>(i) + 1]; ++e)
        dG.row(g.src[r][static_cast<std::size_t>(e)]) += inv * d_pre.row(i);
    }
    grad.W[r].noalias() += H.transpose() * dG;
    dH.noalias() += dG * p.W[r].transpose();
  }
  if (p.has_self()) {
    grad.self.noalias() += H.transpose() * d_pre;
    dH.noalias() += d_pre * p.self.transpose();
  }
  return dH;
}

template <typename Scalar>
Mat<Scalar> rgat_backward(const LayerParamsT<Scalar>& p, const RelGraph& g, const Mat<Scalar>& H,
                          const LayerTrace<Scalar>& t, const Mat<Scalar>& d_out, Scalar slope,
                          LayerParamsT<Scalar>& grad) {
  const Mat<Scalar> d_pre = d_out.cwiseProduct((t.pre.array() > Scalar(0)).template cast<Scalar>().matrix());
  Mat<Scalar> dH = Mat<Scalar>::Zero(H.rows(), H.cols());
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    Mat<Scalar> dG = Mat<Scalar>::Zero(g.num_nodes, p.d_out());
    Vec<Scalar> dq = Vec<Scalar>::Zero(g.num_nodes), dk = Vec<Scalar>::Zero(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) {
      const int lo = g.offsets[r][static_cast<std::size_t>(i)], hi = g.offsets[r][static_cast<std::size_t>(i) + 1];
      if (lo == hi) continue;
      // da_ij = d_pre_i . G_j ; softmax backward: dE_ij = a_ij (da_ij - sum_k a_ik da_ik)
      Scalar weighted(0);
      std::vector<Scalar> da(static_cast<std::size_t>(hi - lo));
      for (int e = lo; e < hi; ++e) {
        const auto eu = static_cast<std::size_t>(e);
        const int j = g.src[r][eu];
        da[static_cast<std::size_t>(e - lo)] = d_pre.row(i).dot(t.G[r].row(j));
        weighted += t.attention[r][eu] * da[static_cast<std::size_t>(e - lo)];
        dG.row(j) += t.attention[r][eu] * d_pre.row(i);
      }
      for (int e = lo; e < hi; ++e) {
        const auto eu = static_cast<std::size_t>(e);
        const Scalar dE = t.attention[r][eu] * (da[static_cast<std::size_t>(e - lo)] - weighted);
        const Scalar dlogit = dE * (t.logit[r][eu] > Scalar(0) ? Scalar(1) : slope);
        dq(i) += dlogit;
        dk(g.src[r][eu]) += dlogit;
      }
    }
    grad.Q[r].noalias() += t.G[r].transpose() * dq;
    grad.K[r].noalias() += t.G[r].transpose() * dk;
    dG.noalias() += dq * p.Q[r].transpose();
    dG.noalias() += dk * p.K[r].transpose();
    grad.W[r].noalias() += H.transpose() * dG;
    dH.noalias() += dG * p.W[r].transpose();
  }
  if (p.has_self()) {
    grad.self.noalias() += H.transpose() * d_pre;
    dH.noalias() += d_pre * p.self.transpose();
  }
  return dH;
}

enum class Readout { Sum, Mean, Max };

/// Graph vector from node rows. Throws EmptyGraph for zero rows. When
/// `argmax` is given it receives, per column, the row that won a max readout.
template <typename Scalar>
Vec<Scalar> readout(const Mat<Scalar>& H, Readout mode, std::vector<Eigen::Index>* argmax = nullptr) {
  if (H.rows() == 0) throw EmptyGraph();
  switch (mode) {
    case Readout::Sum:
    case Readout::Mean: {
      Vec<Scalar> out(H.cols());
      std::vector<Scalar> buf;
      for (Eigen::Index c = 0; c < H.cols(); ++c) {
        buf.assign(H.col(c).data(), H.col(c).data() + H.rows());
        out(c) = detail::sorted_sum(buf);
      }
      if (mode == Readout::Mean) out /= Scalar(H.rows());
      return out;
    }
    case Readout::Max: {
      Vec<Scalar> out(H.cols());
      if (argmax) argmax->assign(static_cast<std::size_t>(H.cols()), 0);
      for (Eigen::Index c = 0; c < H.cols(); ++c) {
        Eigen::Index row = 0;
        out(c) = H.col(c).maxCoeff(&row);
        if (argmax) (*argmax)[static_cast<std::size_t>(c)] = row;
      }
      return out;
    }
  }
  return {};
}

template <typename Scalar>
Mat<Scalar> readout_backward(const Vec<Scalar>& d_graph, Eigen::Index rows, Readout mode,
                             const std::vector<Eigen::Index>& argmax) {
  Mat<Scalar> dH = Mat<Scalar>::Zero(rows, d_graph.size());
  switch (mode) {
    case Readout::Sum:
      dH.rowwise() = d_graph.transpose();
      break;
    case Readout::Mean:
      dH.rowwise() = d_graph.transpose() / Scalar(rows);
      break;
    case Readout::Max:
      for (Eigen::Index c = 0; c < d_graph.size(); ++c) dH(argmax[static_cast<std::size_t>(c)], c) = d_graph(c);
      break;
  }
  return dH;
}

}  // namespace jitvd::neural
