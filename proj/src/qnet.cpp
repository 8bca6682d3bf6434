#include "rlcg/qnet.hpp"

#include <algorithm>
#include <cmath>

#include "rlcg/kernels/kernels.hpp"
#include "rlcg/rng.hpp"

namespace rlcg {

ParamLayout::ParamLayout(NetShape shape) : shape_(shape) {
  const std::size_t h = shape.hidden;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols, bool bias) {
    tensors_.push_back({std::move(name), rows, cols, total_, bias});
    total_ += rows * cols;
  };
  add("embed.column", kColumnFeatures, h, false);
  add("embed.constraint", kConstraintFeatures, h, false);
  for (std::size_t r = 0; r < shape.rounds; ++r) {
    const std::string p = "round" + std::to_string(r) + ".";
    add(p + "w_constraint", 2 * h, h, false);
    add(p + "b_constraint", h, 1, true);
    add(p + "w_column", 2 * h, h, false);
    add(p + "b_column", h, 1, true);
  }
  add("head.w_hidden", h, h, false);
  add("head.b_hidden", h, 1, true);
  add("head.w_out", h, 1, false);
  add("head.b_out", 1, 1, true);
}

QNetworkParams init_network(std::size_t hidden, std::size_t rounds, std::uint64_t seed) {
  if (hidden < 1 || rounds < 1) throw ShapeError("hidden width and rounds must be at least 1");
  QNetworkParams params;
  params.shape = {hidden, rounds};
  const ParamLayout layout(params.shape);
  params.values.assign(layout.total(), 0.0);
  params.adam_m.assign(layout.total(), 0.0);
  params.adam_v.assign(layout.total(), 0.0);
  SplitMix64 rng(seed);
  for (const auto& t : layout.tensors()) {
    if (t.is_bias) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.rows));
    for (std::size_t i = 0; i < t.size(); ++i) params.values[t.offset + i] = rng.uniform(-bound, bound);
  }
  return params;
}

void check_shape(const QNetworkParams& params) {
  if (params.shape.hidden < 1 || params.shape.rounds < 1) throw ShapeError("hidden width and rounds must be positive");
  const std::size_t n = ParamLayout(params.shape).total();
  if (params.values.size() != n || params.adam_m.size() != n || params.adam_v.size() != n)
    throw ShapeError("parameter vector length does not match shape (expected " + std::to_string(n) + ")");
  if (params.step_count < 0) throw ShapeError("negative Adam step count");
}

namespace {

struct Neighbor {
  std::size_t node;
  double weight;
};

// Adjacency lists in both directions with node degrees.
struct Graph {
  std::vector<std::vector<Neighbor>> of_constraint;
  std::vector<std::vector<Neighbor>> of_column;
  std::vector<double> constraint_degree;
  std::vector<double> column_degree;

  explicit Graph(const BipartiteState& s)
      : of_constraint(s.num_constraints),
        of_column(s.num_columns()),
        constraint_degree(s.num_constraints, 0.0),
        column_degree(s.num_columns(), 0.0) {
    for (const auto& e : s.edges) {
      of_constraint[e.constraint].push_back({e.column, e.coefficient});
      of_column[e.column].push_back({e.constraint, e.coefficient});
    }
    auto by_node = [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; };
    for (std::size_t c = 0; c < of_constraint.size(); ++c) {
      std::sort(of_constraint[c].begin(), of_constraint[c].end(), by_node);
      constraint_degree[c] = static_cast<double>(of_constraint[c].size());
    }
    for (std::size_t v = 0; v < of_column.size(); ++v) {
      std::sort(of_column[v].begin(), of_column[v].end(), by_node);
      column_degree[v] = static_cast<double>(of_column[v].size());
    }
  }
};

// agg[i] = sum_{nb} w * src[nb] / degree, each dimension summed in ascending
// value order so that node relabeling cannot change the rounding.
void aggregate(const std::vector<std::vector<Neighbor>>& adj, const std::vector<double>& degree,
               const Matrix& src, Matrix& agg, std::vector<double>& terms) {
  const std::size_t h = src.cols;
  agg = Matrix(adj.size(), h);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const auto& nbs = adj[i];
    if (nbs.empty()) continue;
    auto out = agg.row(i);
    const double deg = degree[i];
    if (nbs.size() == 1) {
      const auto row = src.row(nbs[0].node);
      for (std::size_t d = 0; d < h; ++d) out[d] = (nbs[0].weight * row[d]) / deg;
      continue;
    }
    terms.resize(nbs.size());
    for (std::size_t d = 0; d < h; ++d) {
      for (std::size_t k = 0; k < nbs.size(); ++k) terms[k] = nbs[k].weight * src(nbs[k].node, d);
      std::sort(terms.begin(), terms.end());
      double sum = 0.0;
      for (double t : terms) sum += t;
      out[d] = sum / deg;
    }
  }
}

// out = [left | right] * W + b, with W of shape (2H x H).
void concat_linear(std::span<const double> left, std::span<const double> right, const double* w, const double* b,
                   std::span<double> out) {
  const std::size_t h = out.size();
  std::copy(b, b + h, out.begin());
  for (std::size_t i = 0; i < left.size(); ++i)
    if (left[i] != 0.0) kernels::axpy(left[i], {w + i * h, h}, out);
  for (std::size_t i = 0; i < right.size(); ++i)
    if (right[i] != 0.0) kernels::axpy(right[i], {w + (left.size() + i) * h, h}, out);
}

void embed(const Matrix& features, const double* w, std::size_t h, Matrix& out) {
  out = Matrix(features.rows, h);
  for (std::size_t n = 0; n < features.rows; ++n) {
    auto row = out.row(n);
    for (std::size_t f = 0; f < features.cols; ++f)
      if (features(n, f) != 0.0) kernels::axpy(features(n, f), {w + f * h, h}, row);
  }
}

struct Cache {
  std::vector<Matrix> hc, hv;        // R + 1 entries each
  std::vector<Matrix> zc, zv;        // pre-activations, R entries
  std::vector<Matrix> agg_c, agg_v;  // R entries
};

void check_state(const QNetworkParams& params, const BipartiteState& state) {
  if (params.values.size() != ParamLayout(params.shape).total()) throw ShapeError("parameters do not match shape");
  if (state.column_features.cols != kColumnFeatures || state.constraint_features.cols != kConstraintFeatures ||
      state.column_features.rows != state.num_columns() || state.constraint_features.rows != state.num_constraints)
    throw ShapeError("state feature matrices have unexpected shape");
  for (std::size_t a : state.action_indices)
    if (a >= state.num_columns()) throw ShapeError("action index outside the column nodes");
}

void encode(const QNetworkParams& params, const ParamLayout& layout, const BipartiteState& state, const Graph& g,
            Cache& cache) {
  const std::size_t h = params.shape.hidden;
  const std::size_t rounds = params.shape.rounds;
  const double* w = params.values.data();
  cache.hc.resize(rounds + 1);
  cache.hv.resize(rounds + 1);
  cache.zc.resize(rounds);
  cache.zv.resize(rounds);
  cache.agg_c.resize(rounds);
  cache.agg_v.resize(rounds);
  embed(state.column_features, w + layout.embed_column(), h, cache.hv[0]);
  embed(state.constraint_features, w + layout.embed_constraint(), h, cache.hc[0]);

  std::vector<double> terms;
  for (std::size_t r = 0; r < rounds; ++r) {
    aggregate(g.of_constraint, g.constraint_degree, cache.hv[r], cache.agg_c[r], terms);
    cache.zc[r] = Matrix(state.num_constraints, h);
    for (std::size_t c = 0; c < state.num_constraints; ++c)
      concat_linear(cache.hc[r].row(c), cache.agg_c[r].row(c), w + layout.w_constraint(r), w + layout.b_constraint(r),
                    cache.zc[r].row(c));
    cache.hc[r + 1] = cache.zc[r];
    kernels::relu(cache.hc[r + 1].data);

    aggregate(g.of_column, g.column_degree, cache.hc[r + 1], cache.agg_v[r], terms);
    cache.zv[r] = Matrix(state.num_columns(), h);
    for (std::size_t v = 0; v < state.num_columns(); ++v)
      concat_linear(cache.hv[r].row(v), cache.agg_v[r].row(v), w + layout.w_column(r), w + layout.b_column(r),
                    cache.zv[r].row(v));
    cache.hv[r + 1] = cache.zv[r];
    kernels::relu(cache.hv[r + 1].data);
  }
}

struct HeadActivation {
  std::vector<double> pre;     // h W_1 + b_1
  std::vector<double> hidden;  // relu(pre)
  double q = 0.0;
};

HeadActivation head(const QNetworkParams& params, const ParamLayout& layout, std::span<const double> embedding) {
  const std::size_t h = params.shape.hidden;
  const double* w = params.values.data();
  HeadActivation act;
  act.pre.assign(w + layout.head_b_hidden(), w + layout.head_b_hidden() + h);
  for (std::size_t i = 0; i < h; ++i)
    if (embedding[i] != 0.0) kernels::axpy(embedding[i], {w + layout.head_w_hidden() + i * h, h}, act.pre);
  act.hidden = act.pre;
  kernels::relu(act.hidden);
  act.q = kernels::dot(act.hidden, {w + layout.head_w_out(), h}) + w[layout.head_b_out()];
  return act;
}

// grad_w[row i] += x[i] * dy for every i (outer product accumulation).
void accumulate_outer(std::span<const double> x, std::span<const double> dy, double* grad_w) {
  const std::size_t h = dy.size();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) kernels::axpy(x[i], dy, {grad_w + i * h, h});
}

// dx[i] += W[row i] . dy
void accumulate_input_grad(const double* w, std::span<const double> dy, std::span<double> dx) {
  const std::size_t h = dy.size();
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += kernels::dot({w + i * h, h}, dy);
}

void add_into(std::span<const double> src, std::span<double> dst) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace

std::vector<double> forward(const QNetworkParams& params, const BipartiteState& state) {
  check_state(params, state);
  const ParamLayout layout(params.shape);
  const Graph g(state);
  Cache cache;
  encode(params, layout, state, g, cache);
  std::vector<double> q;
  q.reserve(state.num_actions());
  const Matrix& hv = cache.hv.back();
  for (std::size_t a : state.action_indices) q.push_back(head(params, layout, hv.row(a)).q);
  return q;
}

LossAndGrad loss_and_grad(const QNetworkParams& params, std::span<const QSample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const ParamLayout layout(params.shape);
  const std::size_t h = params.shape.hidden;
  const std::size_t rounds = params.shape.rounds;
  const double* w = params.values.data();
  LossAndGrad out;
  out.gradient.assign(layout.total(), 0.0);
  double* gw = out.gradient.data();
  const double scale = 1.0 / static_cast<double>(batch.size());

  std::vector<double> dz(h), dcat_left(h), dcat_right(h);
  for (const auto& sample : batch) {
    const BipartiteState& state = *sample.state;
    check_state(params, state);
    if (sample.action >= state.num_actions()) throw ShapeError("sample action outside the action nodes");
    const Graph g(state);
    Cache cache;
    encode(params, layout, state, g, cache);

    const std::size_t node = state.action_indices[sample.action];
    const HeadActivation act = head(params, layout, cache.hv[rounds].row(node));
    const double err = act.q - sample.target;
    out.loss += err * err * scale;
    const double dq = 2.0 * err * scale;

    // Head.
    gw[layout.head_b_out()] += dq;
    kernels::axpy(dq, act.hidden, {gw + layout.head_w_out(), h});
    std::vector<double> du(w + layout.head_w_out(), w + layout.head_w_out() + h);
    for (double& x : du) x *= dq;
    kernels::relu_backward(du, act.pre);
    add_into(du, {gw + layout.head_b_hidden(), h});
    accumulate_outer(cache.hv[rounds].row(node), du, gw + layout.head_w_hidden());

    Matrix dhv(state.num_columns(), h);
    Matrix dhc(state.num_constraints, h);
    accumulate_input_grad(w + layout.head_w_hidden(), du, dhv.row(node));

    for (std::size_t r = rounds; r-- > 0;) {
      // Phase 2 (columns) backward. dhv holds dL/dh_v^{r+1}.
      Matrix dhv_prev(state.num_columns(), h);
      Matrix dhc_next = std::move(dhc);  // dL/dh_c^{r+1} accumulates contributions from phase 2
      if (dhc_next.rows != state.num_constraints) dhc_next = Matrix(state.num_constraints, h);
      for (std::size_t v = 0; v < state.num_columns(); ++v) {
        auto grad_out = dhv.row(v);
        if (std::all_of(grad_out.begin(), grad_out.end(), [](double x) { return x == 0.0; })) continue;
        std::copy(grad_out.begin(), grad_out.end(), dz.begin());
        kernels::relu_backward(dz, cache.zv[r].row(v));
        add_into(dz, {gw + layout.b_column(r), h});
        accumulate_outer(cache.hv[r].row(v), dz, gw + layout.w_column(r));
        accumulate_outer(cache.agg_v[r].row(v), dz, gw + layout.w_column(r) + h * h);
        accumulate_input_grad(w + layout.w_column(r), dz, dhv_prev.row(v));
        std::fill(dcat_right.begin(), dcat_right.end(), 0.0);
        accumulate_input_grad(w + layout.w_column(r) + h * h, dz, dcat_right);
        for (const auto& nb : g.of_column[v])
          kernels::axpy(nb.weight / g.column_degree[v], dcat_right, dhc_next.row(nb.node));
      }

      // Phase 1 (constraints) backward.
      Matrix dhc_prev(state.num_constraints, h);
      for (std::size_t c = 0; c < state.num_constraints; ++c) {
        auto grad_out = dhc_next.row(c);
        if (std::all_of(grad_out.begin(), grad_out.end(), [](double x) { return x == 0.0; })) continue;
        std::copy(grad_out.begin(), grad_out.end(), dz.begin());
        kernels::relu_backward(dz, cache.zc[r].row(c));
        add_into(dz, {gw + layout.b_constraint(r), h});
        accumulate_outer(cache.hc[r].row(c), dz, gw + layout.w_constraint(r));
        accumulate_outer(cache.agg_c[r].row(c), dz, gw + layout.w_constraint(r) + h * h);
        accumulate_input_grad(w + layout.w_constraint(r), dz, dhc_prev.row(c));
        std::fill(dcat_left.begin(), dcat_left.end(), 0.0);
        accumulate_input_grad(w + layout.w_constraint(r) + h * h, dz, dcat_left);
        for (const auto& nb : g.of_constraint[c])
          kernels::axpy(nb.weight / g.constraint_degree[c], dcat_left, dhv_prev.row(nb.node));
      }
      dhv = std::move(dhv_prev);
      dhc = std::move(dhc_prev);
    }

    // Embeddings.
    for (std::size_t v = 0; v < state.num_columns(); ++v)
      accumulate_outer(state.column_features.row(v), dhv.row(v), gw + layout.embed_column());
    for (std::size_t c = 0; c < state.num_constraints; ++c)
      accumulate_outer(state.constraint_features.row(c), dhc.row(c), gw + layout.embed_constraint());
  }
  return out;
}

void adam_step(QNetworkParams& params, std::span<const double> gradient, double lr, const AdamConfig& cfg) {
  check_shape(params);
  if (gradient.size() != params.values.size()) throw ShapeError("gradient length does not match parameters");
  ++params.step_count;
  const auto t = static_cast<double>(params.step_count);
  const kernels::AdamCoefficients c{lr, cfg.beta1, cfg.beta2, cfg.eps, 1.0 - std::pow(cfg.beta1, t),
                                    1.0 - std::pow(cfg.beta2, t)};
  kernels::adam(params.values, params.adam_m, params.adam_v, gradient, c);
}

}  // namespace rlcg
