// Copyright 2026 The charnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "charnet/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace charnet {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::gcn: return "gcn";
    case ModelKind::gat: return "gat";
    case ModelKind::logistic: return "logistic";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "gcn") return ModelKind::gcn;
  if (s == "gat") return ModelKind::gat;
  if (s == "logistic" || s == "logreg") return ModelKind::logistic;
  throw InputError("unknown model '" + std::string(s) + "'");
}

const Matrix& ModelParams::at(std::string_view name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw DomainError("model has no parameter '" + std::string(name) + "'");
}

Matrix& ModelParams::at(std::string_view name) {
  return const_cast<Matrix&>(static_cast<const ModelParams&>(*this).at(name));
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += static_cast<std::size_t>(t.value.size());
  return n;
}

namespace {

using Index = Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(ix(fan_in), ix(fan_out));
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
  return w;
}

Matrix zeros_row(std::size_t n) { return Matrix::Zero(1, ix(n)); }

// Attention vectors a = [a_src; a_dst] drawn as one 2o x 1 Glorot vector.
std::pair<Matrix, Matrix> glorot_attention(std::size_t width, Rng& rng) {
  Matrix a = glorot(2 * width, 1, rng);
  Matrix src(1, ix(width)), dst(1, ix(width));
  for (std::size_t k = 0; k < width; ++k) {
    src(0, ix(k)) = a(ix(k), 0);
    dst(0, ix(k)) = a(ix(width + k), 0);
  }
  return {src, dst};
}

void check_features(const Matrix& features, std::size_t nodes) {
  if (static_cast<std::size_t>(features.rows()) != nodes)
    throw DomainError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                      std::to_string(nodes) + " nodes");
}

void check_shape(const Matrix& m, Index rows, Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw DomainError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& z) { return (z.array() > 0.0).cast<double>().matrix(); }

// Inverted-dropout keep mask scaled by 1/(1-p); all ones when p == 0.
Matrix dropout_mask(Index rows, Index cols, double p, std::uint64_t seed) {
  Matrix mask = Matrix::Ones(rows, cols);
  if (p <= 0.0) return mask;
  if (p >= 1.0) throw DomainError("dropout must be in [0, 1)");
  Rng rng(seed);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) mask(i, j) = rng.uniform() < p ? 0.0 : 1.0 / (1.0 - p);
  return mask;
}

// ---------------------------------------------------------------- GCN ----

struct GcnCache {
  Matrix ax;       // A X
  Matrix z1;       // A X W0 + b0
  Matrix drop;     // dropout mask on H1
  Matrix h1;       // relu(z1) * drop
  Matrix ah1;      // A H1
  Matrix output;   // A H1 W1 + b1
};

GcnCache gcn_forward_cached(const ModelParams& p, const Matrix& x, const Matrix& adj, double dropout,
                            std::uint64_t seed) {
  const Matrix& w0 = p.at("layer0.weight");
  const Matrix& b0 = p.at("layer0.bias");
  const Matrix& w1 = p.at("layer1.weight");
  const Matrix& b1 = p.at("layer1.bias");
  check_shape(adj, x.rows(), x.rows(), "propagation matrix");
  if (w0.rows() != x.cols())
    throw DomainError("layer0: weight expects " + std::to_string(w0.rows()) + " input features, got " +
                      std::to_string(x.cols()));
  check_shape(b0, 1, w0.cols(), "layer0 bias");
  if (w1.rows() != w0.cols())
    throw DomainError("layer1: weight expects " + std::to_string(w1.rows()) + " inputs, got " +
                      std::to_string(w0.cols()));
  check_shape(b1, 1, w1.cols(), "layer1 bias");

  GcnCache c;
  c.ax = adj * x;
  c.z1 = c.ax * w0;
  c.z1.rowwise() += b0.row(0);
  c.drop = dropout_mask(c.z1.rows(), c.z1.cols(), dropout, seed);
  c.h1 = relu(c.z1).cwiseProduct(c.drop);
  c.ah1 = adj * c.h1;
  c.output = c.ah1 * w1;
  c.output.rowwise() += b1.row(0);
  return c;
}

Gradients gcn_backward(const ModelParams& p, const Matrix& adj, const GcnCache& c, const Matrix& d_out) {
  const Matrix& w1 = p.at("layer1.weight");
  Matrix d_w1 = c.ah1.transpose() * d_out;
  Matrix d_b1 = d_out.colwise().sum();
  Matrix d_h1 = adj.transpose() * (d_out * w1.transpose());
  Matrix d_z1 = d_h1.cwiseProduct(relu_mask(c.z1)).cwiseProduct(c.drop);
  Matrix d_w0 = c.ax.transpose() * d_z1;
  Matrix d_b0 = d_z1.colwise().sum();
  Gradients g;
  for (const auto& t : p.tensors) {
    if (t.name == "layer0.weight") g.push_back(d_w0);
    else if (t.name == "layer0.bias") g.push_back(d_b0);
    else if (t.name == "layer1.weight") g.push_back(d_w1);
    else if (t.name == "layer1.bias") g.push_back(d_b1);
    else throw DomainError("unexpected GCN parameter '" + t.name + "'");
  }
  return g;
}

// ---------------------------------------------------------------- GAT ----

constexpr double kLeakySlope = 0.2;

struct GatLayerCache {
  Matrix input;
  Matrix projected;  // P = H W
  std::vector<std::vector<double>> raw;    // s_u + t_v per neighbourhood slot
  std::vector<std::vector<double>> alpha;  // attention per neighbourhood slot
  Matrix z;
  Matrix out;
  bool apply_relu = false;
};

GatLayerCache gat_layer_forward(const Matrix& h, const Matrix& w, const Matrix& a_src, const Matrix& a_dst,
                                const Matrix& b, const AttentionGraph& ag, bool apply_relu,
                                const std::string& layer) {
  if (w.rows() != h.cols())
    throw DomainError(layer + ": weight expects " + std::to_string(w.rows()) + " inputs, got " +
                      std::to_string(h.cols()));
  check_shape(a_src, 1, w.cols(), layer + " att_src");
  check_shape(a_dst, 1, w.cols(), layer + " att_dst");
  check_shape(b, 1, w.cols(), layer + " bias");
  if (static_cast<std::size_t>(h.rows()) != ag.neighborhoods.size())
    throw DomainError(layer + ": feature rows do not match node count");

  GatLayerCache c;
  c.input = h;
  c.apply_relu = apply_relu;
  c.projected = h * w;
  const Vector s = c.projected * a_src.transpose();
  const Vector t = c.projected * a_dst.transpose();
  const std::size_t n = ag.neighborhoods.size();
  c.raw.resize(n);
  c.alpha.resize(n);
  Matrix m = Matrix::Zero(h.rows(), w.cols());
  for (std::size_t u = 0; u < n; ++u) {
    const auto& nb = ag.neighborhoods[u];
    auto& raw = c.raw[u];
    auto& alpha = c.alpha[u];
    raw.resize(nb.size());
    alpha.resize(nb.size());
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nb.size(); ++k) {
      raw[k] = s(ix(u)) + t(ix(nb[k].first));
      const double e = raw[k] > 0 ? raw[k] : kLeakySlope * raw[k];
      max_e = std::max(max_e, e);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double e = raw[k] > 0 ? raw[k] : kLeakySlope * raw[k];
      alpha[k] = nb[k].second * std::exp(e - max_e);
      total += alpha[k];
    }
    for (std::size_t k = 0; k < nb.size(); ++k) {
      alpha[k] /= total;
      m.row(ix(u)) += alpha[k] * c.projected.row(ix(nb[k].first));
    }
  }
  c.z = m;
  c.z.rowwise() += b.row(0);
  c.out = apply_relu ? relu(c.z) : c.z;
  return c;
}

struct GatLayerGrads {
  Matrix d_input, d_w, d_src, d_dst, d_b;
};

GatLayerGrads gat_layer_backward(const GatLayerCache& c, const Matrix& w, const Matrix& a_src, const Matrix& a_dst,
                                 const AttentionGraph& ag, const Matrix& d_out) {
  const Matrix d_z = c.apply_relu ? Matrix(d_out.cwiseProduct(relu_mask(c.z))) : d_out;
  GatLayerGrads g;
  g.d_b = d_z.colwise().sum();
  Matrix d_p = Matrix::Zero(c.projected.rows(), c.projected.cols());
  const std::size_t n = ag.neighborhoods.size();
  Vector d_s = Vector::Zero(ix(n));
  Vector d_t = Vector::Zero(ix(n));
  std::vector<double> d_alpha;
  for (std::size_t u = 0; u < n; ++u) {
    const auto& nb = ag.neighborhoods[u];
    const auto& alpha = c.alpha[u];
    d_alpha.assign(nb.size(), 0.0);
    double weighted_sum = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Index v = ix(nb[k].first);
      d_p.row(v) += alpha[k] * d_z.row(ix(u));
      d_alpha[k] = d_z.row(ix(u)).dot(c.projected.row(v));
      weighted_sum += alpha[k] * d_alpha[k];
    }
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double d_e = alpha[k] * (d_alpha[k] - weighted_sum);
      const double d_raw = d_e * (c.raw[u][k] > 0 ? 1.0 : kLeakySlope);
      d_s(ix(u)) += d_raw;
      d_t(ix(nb[k].first)) += d_raw;
    }
  }
  d_p += d_s * a_src + d_t * a_dst;
  g.d_src = d_s.transpose() * c.projected;
  g.d_dst = d_t.transpose() * c.projected;
  g.d_w = c.input.transpose() * d_p;
  g.d_input = d_p * w.transpose();
  return g;
}

struct GatCache {
  GatLayerCache l0;
  Matrix drop;
  Matrix h1;
  GatLayerCache l1;
};

GatCache gat_forward_cached(const ModelParams& p, const Matrix& x, const AttentionGraph& ag, double dropout,
                            std::uint64_t seed) {
  GatCache c;
  c.l0 = gat_layer_forward(x, p.at("layer0.weight"), p.at("layer0.att_src"), p.at("layer0.att_dst"),
                           p.at("layer0.bias"), ag, true, "layer0");
  c.drop = dropout_mask(c.l0.out.rows(), c.l0.out.cols(), dropout, seed);
  c.h1 = c.l0.out.cwiseProduct(c.drop);
  c.l1 = gat_layer_forward(c.h1, p.at("layer1.weight"), p.at("layer1.att_src"), p.at("layer1.att_dst"),
                           p.at("layer1.bias"), ag, false, "layer1");
  return c;
}

Gradients gat_backward(const ModelParams& p, const AttentionGraph& ag, const GatCache& c, const Matrix& d_out) {
  GatLayerGrads g1 = gat_layer_backward(c.l1, p.at("layer1.weight"), p.at("layer1.att_src"), p.at("layer1.att_dst"),
                                        ag, d_out);
  const Matrix d_h1 = g1.d_input.cwiseProduct(c.drop);
  GatLayerGrads g0 = gat_layer_backward(c.l0, p.at("layer0.weight"), p.at("layer0.att_src"), p.at("layer0.att_dst"),
                                        ag, d_h1);
  Gradients g;
  for (const auto& t : p.tensors) {
    if (t.name == "layer0.weight") g.push_back(g0.d_w);
    else if (t.name == "layer0.att_src") g.push_back(g0.d_src);
    else if (t.name == "layer0.att_dst") g.push_back(g0.d_dst);
    else if (t.name == "layer0.bias") g.push_back(g0.d_b);
    else if (t.name == "layer1.weight") g.push_back(g1.d_w);
    else if (t.name == "layer1.att_src") g.push_back(g1.d_src);
    else if (t.name == "layer1.att_dst") g.push_back(g1.d_dst);
    else if (t.name == "layer1.bias") g.push_back(g1.d_b);
    else throw DomainError("unexpected GAT parameter '" + t.name + "'");
  }
  return g;
}

Matrix attention_matrix(const GatLayerCache& c, const AttentionGraph& ag) {
  const Index n = ix(ag.neighborhoods.size());
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t u = 0; u < ag.neighborhoods.size(); ++u)
    for (std::size_t k = 0; k < ag.neighborhoods[u].size(); ++k)
      a(ix(u), ix(ag.neighborhoods[u][k].first)) = c.alpha[u][k];
  return a;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Matrix row_softmax(const Matrix& logits) {
  Matrix p = logits;
  for (Index i = 0; i < p.rows(); ++i) {
    const double mx = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - mx).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

}  // namespace

ModelParams init_gcn(std::size_t in_dim, std::size_t hidden, std::size_t out_dim, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams p;
  p.kind = ModelKind::gcn;
  p.seed = seed;
  p.tensors.push_back({"layer0.weight", glorot(in_dim, hidden, rng)});
  p.tensors.push_back({"layer0.bias", zeros_row(hidden)});
  p.tensors.push_back({"layer1.weight", glorot(hidden, out_dim, rng)});
  p.tensors.push_back({"layer1.bias", zeros_row(out_dim)});
  return p;
}

ModelParams init_gat(std::size_t in_dim, std::size_t hidden, std::size_t out_dim, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams p;
  p.kind = ModelKind::gat;
  p.seed = seed;
  p.tensors.push_back({"layer0.weight", glorot(in_dim, hidden, rng)});
  auto [s0, d0] = glorot_attention(hidden, rng);
  p.tensors.push_back({"layer0.att_src", s0});
  p.tensors.push_back({"layer0.att_dst", d0});
  p.tensors.push_back({"layer0.bias", zeros_row(hidden)});
  p.tensors.push_back({"layer1.weight", glorot(hidden, out_dim, rng)});
  auto [s1, d1] = glorot_attention(out_dim, rng);
  p.tensors.push_back({"layer1.att_src", s1});
  p.tensors.push_back({"layer1.att_dst", d1});
  p.tensors.push_back({"layer1.bias", zeros_row(out_dim)});
  return p;
}

ModelParams init_logistic(std::size_t in_dim, std::size_t classes, std::uint64_t seed) {
  if (classes < 2) throw DomainError("logistic regression needs at least 2 classes");
  const std::size_t out = classes == 2 ? 1 : classes;
  ModelParams p;
  p.kind = ModelKind::logistic;
  p.seed = seed;
  p.tensors.push_back({"weight", Matrix::Zero(ix(in_dim), ix(out))});
  p.tensors.push_back({"bias", zeros_row(out)});
  return p;
}

Matrix normalize_adjacency(const CharacterGraph& g, bool weighted) {
  if (g.node_count() == 0) throw DomainError("cannot normalize the adjacency of an empty graph");
  const Index n = ix(g.node_count());
  Matrix a = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (const auto& nb : g.neighbors(i)) a(ix(i), ix(nb.index)) = weighted ? static_cast<double>(nb.weight) : 1.0;
  const Vector deg = a.rowwise().sum();
  const Vector inv_sqrt = deg.array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

AttentionGraph AttentionGraph::build(const CharacterGraph& g, bool weighted) {
  AttentionGraph ag;
  ag.neighborhoods.resize(g.node_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    auto& nb = ag.neighborhoods[u];
    nb.emplace_back(u, 1.0);
    for (const auto& x : g.neighbors(u)) nb.emplace_back(x.index, weighted ? static_cast<double>(x.weight) : 1.0);
  }
  return ag;
}

GcnOutput gcn_forward(const ModelParams& params, const Matrix& features, const Matrix& norm_adj) {
  GcnCache c = gcn_forward_cached(params, features, norm_adj, 0.0, 0);
  return {std::move(c.output), std::move(c.h1)};
}

GatOutput gat_forward(const ModelParams& params, const Matrix& features, const CharacterGraph& g, bool weighted) {
  check_features(features, g.node_count());
  const AttentionGraph ag = AttentionGraph::build(g, weighted);
  GatCache c = gat_forward_cached(params, features, ag, 0.0, 0);
  GatOutput out;
  out.attention.push_back(attention_matrix(c.l0, ag));
  out.attention.push_back(attention_matrix(c.l1, ag));
  out.output = std::move(c.l1.out);
  out.hidden = std::move(c.h1);
  return out;
}

ModelInputs ModelInputs::build(const CharacterGraph& g, const Matrix& features, ModelKind kind, bool weighted) {
  check_features(features, g.node_count());
  ModelInputs in;
  in.features = &features;
  if (kind == ModelKind::gcn) in.norm_adj = normalize_adjacency(g, weighted);
  else if (kind == ModelKind::gat) in.attention = AttentionGraph::build(g, weighted);
  else throw DomainError("model inputs are only defined for graph models");
  return in;
}

double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels, const std::vector<bool>& mask,
                             Matrix* grad) {
  const Matrix p = row_softmax(logits);
  std::size_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) count += mask[i];
  if (count == 0) throw DomainError("cross-entropy over an empty mask");
  if (grad) *grad = Matrix::Zero(logits.rows(), logits.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const int y = labels[i];
    if (y < 0 || y >= logits.cols()) throw DomainError("label out of range for node " + std::to_string(i));
    loss -= std::log(std::max(p(ix(i), y), 1e-300));
    if (grad) {
      grad->row(ix(i)) = p.row(ix(i)) / static_cast<double>(count);
      (*grad)(ix(i), y) -= 1.0 / static_cast<double>(count);
    }
  }
  return loss / static_cast<double>(count);
}

double pair_bce_with_logits(const Matrix& z, const std::vector<LabeledPair>& pairs, Matrix* grad) {
  if (pairs.empty()) throw DomainError("binary cross-entropy over no pairs");
  if (grad) *grad = Matrix::Zero(z.rows(), z.cols());
  const double scale = 1.0 / static_cast<double>(pairs.size());
  double loss = 0.0;
  for (const auto& pr : pairs) {
    const double s = z.row(ix(pr.u)).dot(z.row(ix(pr.v)));
    loss += softplus(s) - pr.target * s;
    if (grad) {
      const double ds = (sigmoid(s) - pr.target) * scale;
      grad->row(ix(pr.u)) += ds * z.row(ix(pr.v));
      grad->row(ix(pr.v)) += ds * z.row(ix(pr.u));
    }
  }
  return loss * scale;
}

double graph_model_loss(const ModelParams& params, const ModelInputs& inputs, const Objective& objective,
                        Gradients* grads, double dropout, std::uint64_t dropout_seed) {
  const Matrix& x = *inputs.features;
  auto loss_of = [&](const Matrix& out, Matrix* d_out) {
    return objective.task == Objective::Task::classification
               ? softmax_cross_entropy(out, objective.labels, objective.mask, d_out)
               : pair_bce_with_logits(out, objective.pairs, d_out);
  };
  Matrix d_out;
  if (params.kind == ModelKind::gcn) {
    GcnCache c = gcn_forward_cached(params, x, inputs.norm_adj, dropout, dropout_seed);
    const double loss = loss_of(c.output, grads ? &d_out : nullptr);
    if (grads) *grads = gcn_backward(params, inputs.norm_adj, c, d_out);
    return loss;
  }
  if (params.kind == ModelKind::gat) {
    GatCache c = gat_forward_cached(params, x, inputs.attention, dropout, dropout_seed);
    const double loss = loss_of(c.l1.out, grads ? &d_out : nullptr);
    if (grads) *grads = gat_backward(params, inputs.attention, c, d_out);
    return loss;
  }
  throw DomainError("graph_model_loss needs a GCN or GAT model");
}

double logistic_loss(const ModelParams& params, const Matrix& x, const std::vector<int>& labels, Gradients* grads) {
  const Matrix& w = params.at("weight");
  const Matrix& b = params.at("bias");
  if (w.rows() != x.cols())
    throw DomainError("logistic weight expects " + std::to_string(w.rows()) + " features, got " +
                      std::to_string(x.cols()));
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw DomainError("feature rows and labels differ in length");
  if (labels.empty()) throw DomainError("logistic loss over no samples");
  Matrix logits = x * w;
  logits.rowwise() += b.row(0);
  const double n = static_cast<double>(labels.size());
  Matrix d_logits = Matrix::Zero(logits.rows(), logits.cols());
  double loss = 0.0;
  if (w.cols() == 1) {
    for (Index i = 0; i < logits.rows(); ++i) {
      const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
      const double s = logits(i, 0);
      loss += softplus(s) - y * s;
      d_logits(i, 0) = (sigmoid(s) - y) / n;
    }
    loss /= n;
  } else {
    std::vector<bool> all(labels.size(), true);
    loss = softmax_cross_entropy(logits, labels, all, &d_logits);
  }
  if (grads) {
    grads->clear();
    for (const auto& t : params.tensors) {
      if (t.name == "weight") grads->push_back(x.transpose() * d_logits);
      else grads->push_back(d_logits.colwise().sum());
    }
  }
  return loss;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, const AdamConfig& config) {
  if (grads.size() != params.tensors.size()) throw DomainError("gradient count does not match parameter count");
  if (state.m.empty()) {
    for (const auto& t : params.tensors) {
      state.m.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
      state.v.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    }
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    check_shape(grads[i], params.tensors[i].value.rows(), params.tensors[i].value.cols(),
                "gradient of " + params.tensors[i].name);
    if (!grads[i].allFinite()) throw DomainError("non-finite gradient for parameter '" + params.tensors[i].name + "'");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    Matrix& p = params.tensors[i].value;
    Matrix g = grads[i];
    if (config.weight_decay > 0) g += config.weight_decay * p;
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g.cwiseProduct(g);
    const auto m_hat = state.m[i].array() / bc1;
    const auto v_hat = state.v[i].array() / bc2;
    p.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
  }
}

GradCheckInstance make_gradcheck_instance(ModelKind kind, std::size_t n, std::uint64_t seed, Objective::Task task) {
  Rng rng(seed);
  GradCheckInstance inst;
  const std::size_t in_dim = 4, hidden = 5, classes = 3;
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || rng.uniform() < 0.3)
        edges.push_back({nodes[i], nodes[j], static_cast<std::int64_t>(1 + rng.below(4))});
    }
  }
  inst.graph = CharacterGraph(nodes, edges);
  inst.features.resize(ix(n), ix(in_dim));
  for (Index i = 0; i < inst.features.rows(); ++i)
    for (Index j = 0; j < inst.features.cols(); ++j) inst.features(i, j) = rng.uniform(-1.0, 1.0);

  inst.objective.task = task;
  for (std::size_t i = 0; i < n; ++i) {
    inst.objective.labels.push_back(static_cast<int>(i % classes));
    inst.objective.mask.push_back(true);
  }
  if (task == Objective::Task::link_prediction) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        inst.objective.pairs.push_back({i, j, inst.graph.has_edge(i, j) ? 1.0 : 0.0});
  }

  const std::size_t out_dim = task == Objective::Task::classification ? classes : 4;
  const std::uint64_t pseed = derive_seed(seed, {1});
  if (kind == ModelKind::gcn) inst.params = init_gcn(in_dim, hidden, out_dim, pseed);
  else if (kind == ModelKind::gat) inst.params = init_gat(in_dim, hidden, out_dim, pseed);
  else inst.params = init_logistic(in_dim, classes, pseed);
  // Non-zero biases so every parameter carries a gradient signal.
  for (auto& t : inst.params.tensors)
    for (Index i = 0; i < t.value.rows(); ++i)
      for (Index j = 0; j < t.value.cols(); ++j)
        if (t.value(i, j) == 0.0) t.value(i, j) = rng.uniform(-0.5, 0.5);
  return inst;
}

double gradient_check(ModelKind kind, const GradCheckInstance& inst, double h) {
  ModelParams params = inst.params;
  if (params.kind != kind) throw DomainError("instance parameters do not match model kind " + to_string(kind));
  std::optional<ModelInputs> inputs;
  if (kind != ModelKind::logistic) inputs = ModelInputs::build(inst.graph, inst.features, kind, inst.weighted);
  auto loss = [&](Gradients* g) {
    return kind == ModelKind::logistic ? logistic_loss(params, inst.features, inst.objective.labels, g)
                                       : graph_model_loss(params, *inputs, inst.objective, g);
  };
  Gradients analytic;
  loss(&analytic);
  double worst = 0.0;
  for (std::size_t t = 0; t < params.tensors.size(); ++t) {
    Matrix& value = params.tensors[t].value;
    for (Index i = 0; i < value.rows(); ++i) {
      for (Index j = 0; j < value.cols(); ++j) {
        const double orig = value(i, j);
        value(i, j) = orig + h;
        const double up = loss(nullptr);
        value(i, j) = orig - h;
        const double down = loss(nullptr);
        value(i, j) = orig;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[t](i, j);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  }
  return worst;
}

LogisticModel logistic_fit(const Matrix& features, const std::vector<int>& labels, const LogisticConfig& config) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DomainError("feature rows and labels differ in length");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw DomainError("logistic regression needs at least 2 classes in the training data");
  if (*distinct.begin() < 0) throw DomainError("labels must be non-negative");
  LogisticModel model;
  model.classes = static_cast<std::size_t>(*distinct.rbegin()) + 1;
  model.params = init_logistic(static_cast<std::size_t>(features.cols()), model.classes, config.seed);
  AdamState state;
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  Gradients grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    model.loss_history.push_back(logistic_loss(model.params, features, labels, &grads));
    adam_step(model.params, grads, state, adam);
  }
  return model;
}

Matrix logistic_predict(const LogisticModel& model, const Matrix& features) {
  Matrix logits = features * model.params.at("weight");
  logits.rowwise() += model.params.at("bias").row(0);
  if (logits.cols() == 1) {
    Matrix p(logits.rows(), 2);
    for (Index i = 0; i < logits.rows(); ++i) {
      p(i, 1) = sigmoid(logits(i, 0));
      p(i, 0) = 1.0 - p(i, 1);
    }
    return p;
  }
  return row_softmax(logits);
}

TrainConfig classification_defaults() {
  TrainConfig c;
  c.epochs = 5000;
  c.learning_rate = 1e-4;
  return c;
}

TrainConfig link_prediction_defaults() {
  TrainConfig c;
  c.epochs = 15000;
  c.learning_rate = 1e-3;
  return c;
}

namespace {

ModelParams init_graph_model(const TrainConfig& config, std::size_t in_dim, std::size_t out_dim) {
  if (config.epochs < 1) throw DomainError("epochs must be >= 1");
  if (!(config.learning_rate > 0)) throw DomainError("learning rate must be positive");
  switch (config.model) {
    case ModelKind::gcn: return init_gcn(in_dim, config.hidden, out_dim, config.seed);
    case ModelKind::gat: return init_gat(in_dim, config.hidden, out_dim, config.seed);
    default: throw DomainError("graph training needs a GCN or GAT model");
  }
}

Matrix forward_output(const ModelParams& params, const ModelInputs& inputs, Matrix* hidden) {
  if (params.kind == ModelKind::gcn) {
    GcnCache c = gcn_forward_cached(params, *inputs.features, inputs.norm_adj, 0.0, 0);
    if (hidden) *hidden = c.h1;
    return c.output;
  }
  GatCache c = gat_forward_cached(params, *inputs.features, inputs.attention, 0.0, 0);
  if (hidden) *hidden = c.h1;
  return c.l1.out;
}

}  // namespace

NodeClassifierResult train_node_classifier(const CharacterGraph& g, const Matrix& features,
                                           const std::vector<int>& labels, const std::vector<bool>& train_mask,
                                           const TrainConfig& config) {
  const std::size_t n = g.node_count();
  check_features(features, n);
  if (labels.size() != n || train_mask.size() != n) throw DomainError("labels and mask must cover every node");
  std::set<int> train_classes;
  int max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    max_label = std::max(max_label, labels[i]);
    if (!train_mask[i]) continue;
    if (labels[i] < 0) throw DomainError("masked node '" + g.node(i) + "' has no label");
    train_classes.insert(labels[i]);
  }
  if (train_classes.empty()) throw DomainError("train mask is empty");
  if (train_classes.size() < 2) throw DomainError("train mask contains a single class");

  NodeClassifierResult result;
  result.params = init_graph_model(config, static_cast<std::size_t>(features.cols()),
                                   static_cast<std::size_t>(max_label) + 1);
  const ModelInputs inputs = ModelInputs::build(g, features, config.model, config.weighted);
  Objective objective;
  objective.labels = labels;
  objective.mask = train_mask;
  AdamState state;
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  Gradients grads;
  result.loss_history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = graph_model_loss(result.params, inputs, objective, &grads, config.dropout,
                                         derive_seed(config.seed, {0x64726f70, epoch}));
    if (!std::isfinite(loss)) throw DomainError("training loss became non-finite at epoch " + std::to_string(epoch));
    result.loss_history.push_back(loss);
    adam_step(result.params, grads, state, adam);
  }
  const Matrix logits = forward_output(result.params, inputs, &result.hidden);
  result.probabilities = row_softmax(logits);
  for (Index i = 0; i < logits.rows(); ++i) {
    Index best;
    logits.row(i).maxCoeff(&best);
    result.predictions.push_back(static_cast<int>(best));
  }
  return result;
}

double LinkPredictor::score(std::size_t u, std::size_t v) const {
  return node_vectors.row(ix(u)).dot(node_vectors.row(ix(v)));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_non_edges(
    const CharacterGraph& g, std::size_t count, Rng& rng,
    const std::vector<std::pair<std::size_t, std::size_t>>& exclude, bool distinct) {
  const std::size_t n = g.node_count();
  std::set<std::pair<std::size_t, std::size_t>> banned;
  for (auto [u, v] : exclude) banned.insert(u < v ? std::pair{u, v} : std::pair{v, u});
  const std::size_t pairs = n * (n > 0 ? n - 1 : 0) / 2;
  std::size_t banned_non_edges = 0;
  for (auto [u, v] : banned) banned_non_edges += !g.has_edge(u, v);
  const std::size_t available = pairs - g.edge_count() - banned_non_edges;
  if (count > 0 && available == 0) throw DomainError("graph has no non-edges to sample");
  if (distinct && count > available)
    throw DomainError("requested " + std::to_string(count) + " distinct non-edges but only " +
                      std::to_string(available) + " exist");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (out.size() < count) {
    std::size_t u = rng.below(n), v = rng.below(n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g.has_edge(u, v) || banned.count({u, v})) continue;
    if (distinct && !seen.insert({u, v}).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

LinkPredictor train_link_predictor(const CharacterGraph& g_train, const Matrix& features, const TrainConfig& config) {
  check_features(features, g_train.node_count());
  if (g_train.edge_count() == 0) throw DomainError("training graph has no edges");
  LinkPredictor result;
  result.params = init_graph_model(config, static_cast<std::size_t>(features.cols()), config.embedding_dim);
  const ModelInputs inputs = ModelInputs::build(g_train, features, config.model, config.weighted);

  std::vector<LabeledPair> positives;
  for (std::size_t u = 0; u < g_train.node_count(); ++u)
    for (const auto& nb : g_train.neighbors(u))
      if (nb.index > u) positives.push_back({u, nb.index, 1.0});

  Objective objective;
  objective.task = Objective::Task::link_prediction;
  AdamState state;
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  Gradients grads;
  result.loss_history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, {0x6e6567, epoch}));
    objective.pairs = positives;
    for (auto [u, v] : sample_non_edges(g_train, positives.size(), rng, {}, false))
      objective.pairs.push_back({u, v, 0.0});
    const double loss = graph_model_loss(result.params, inputs, objective, &grads, config.dropout,
                                         derive_seed(config.seed, {0x64726f70, epoch}));
    if (!std::isfinite(loss)) throw DomainError("training loss became non-finite at epoch " + std::to_string(epoch));
    result.loss_history.push_back(loss);
    adam_step(result.params, grads, state, adam);
  }
  result.node_vectors = forward_output(result.params, inputs, &result.hidden);
  return result;
}

Matrix one_hot_features(std::size_t n) { return Matrix::Identity(ix(n), ix(n)); }

Matrix aligned_features(const CharacterGraph& g, const EmbeddingMatrix& e, std::vector<std::string>* missing) {
  validate(e);
  std::map<std::string_view, std::size_t> row;
  for (std::size_t i = 0; i < e.entity_ids.size(); ++i) row.emplace(e.entity_ids[i], i);
  Matrix out = Matrix::Zero(ix(g.node_count()), ix(e.dim()));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto it = row.find(g.node(i));
    if (it == row.end()) {
      if (!missing) throw DomainError("no embedding vector for node '" + g.node(i) + "'");
      missing->push_back(g.node(i));
      continue;
    }
    out.row(ix(i)) = e.vectors.row(ix(it->second));
  }
  return out;
}

nlohmann::json params_to_json(const ModelParams& params) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : params.tensors) {
    std::vector<double> values(t.value.data(), t.value.data() + t.value.size());
    tensors.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}, {"values", values}});
  }
  return {{"kind", to_string(params.kind)}, {"seed", params.seed}, {"tensors", tensors}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  try {
    p.kind = model_kind_from_string(j.at("kind").get<std::string>());
    p.seed = j.value("seed", std::uint64_t{0});
    for (const auto& t : j.at("tensors")) {
      const auto rows = t.at("rows").get<Index>();
      const auto cols = t.at("cols").get<Index>();
      const auto values = t.at("values").get<std::vector<double>>();
      if (static_cast<Index>(values.size()) != rows * cols)
        throw InputError("checkpoint tensor '" + t.at("name").get<std::string>() + "' has the wrong value count");
      Matrix m(rows, cols);
      std::copy(values.begin(), values.end(), m.data());
      p.tensors.push_back({t.at("name").get<std::string>(), std::move(m)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model checkpoint: ") + e.what());
  }
  return p;
}

}  // namespace charnet
