#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcg/hyper.hpp"
#include "rlcg/matrix.hpp"
#include "rlcg/state_graph.hpp"

namespace rlcg {

struct NetShape {
  std::size_t hidden = 32;
  std::size_t rounds = 2;
  friend bool operator==(const NetShape&, const NetShape&) = default;
};

struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;  // 1 for vectors
  std::size_t offset = 0;
  bool is_bias = false;
  std::size_t size() const noexcept { return rows * cols; }
};

// Flat parameter layout:
//   embed.column [9 x H], embed.constraint [2 x H],
//   round{r}.w_constraint [2H x H], round{r}.b_constraint [H],
//   round{r}.w_column [2H x H], round{r}.b_column [H],
//   head.w_hidden [H x H], head.b_hidden [H], head.w_out [H], head.b_out [1].
// Weight matrices map row-vector inputs: out = in * W + b.
class ParamLayout {
 public:
  explicit ParamLayout(NetShape shape);

  const NetShape& shape() const noexcept { return shape_; }
  const std::vector<TensorSpec>& tensors() const noexcept { return tensors_; }
  std::size_t total() const noexcept { return total_; }

  std::size_t embed_column() const noexcept { return tensors_[0].offset; }
  std::size_t embed_constraint() const noexcept { return tensors_[1].offset; }
  std::size_t w_constraint(std::size_t r) const noexcept { return tensors_[2 + 4 * r].offset; }
  std::size_t b_constraint(std::size_t r) const noexcept { return tensors_[3 + 4 * r].offset; }
  std::size_t w_column(std::size_t r) const noexcept { return tensors_[4 + 4 * r].offset; }
  std::size_t b_column(std::size_t r) const noexcept { return tensors_[5 + 4 * r].offset; }
  std::size_t head_w_hidden() const noexcept { return tensors_[2 + 4 * shape_.rounds].offset; }
  std::size_t head_b_hidden() const noexcept { return tensors_[3 + 4 * shape_.rounds].offset; }
  std::size_t head_w_out() const noexcept { return tensors_[4 + 4 * shape_.rounds].offset; }
  std::size_t head_b_out() const noexcept { return tensors_[5 + 4 * shape_.rounds].offset; }

 private:
  NetShape shape_;
  std::vector<TensorSpec> tensors_;
  std::size_t total_ = 0;
};

// Q(s, a; w): all weights in one flat vector plus Adam state.
struct QNetworkParams {
  NetShape shape;
  std::vector<double> values;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::int64_t step_count = 0;

  ParamLayout layout() const { return ParamLayout(shape); }
  friend bool operator==(const QNetworkParams&, const QNetworkParams&) = default;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn in layout order from
// SplitMix64(seed); biases and Adam moments zero.
QNetworkParams init_network(std::size_t hidden, std::size_t rounds, std::uint64_t seed);

// Throws ShapeError when the flat vectors do not match the declared shape.
void check_shape(const QNetworkParams& params);

// One Q-value per action node of the state, in action_indices order.
//
// Embeddings are linear in the normalized node features. Each round first
// updates constraint embeddings from their column neighbours, then column
// embeddings from the updated constraints:
//
//   agg_c = sum_{v ~ c} x_vc h_v / deg(c)     (zero if isolated)
//   h_c  <- relu([h_c | agg_c] W_c + b_c)
//   agg_v = sum_{c ~ v} x_vc h_c / deg(v)
//   h_v  <- relu([h_v | agg_v] W_v + b_v)
//
// and the head maps an action node to relu(h_v W_1 + b_1) . w_2 + b_2.
// Neighbour terms are summed per dimension in ascending order of value, so
// relabelling nodes permutes the output bit for bit.
std::vector<double> forward(const QNetworkParams& params, const BipartiteState& state);

struct QSample {
  const BipartiteState* state = nullptr;
  std::size_t action = 0;  // position in state->action_indices
  double target = 0.0;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as params.values
};

// loss = mean over samples of (Q(s, a) - target)^2, gradient by reverse mode.
LossAndGrad loss_and_grad(const QNetworkParams& params, std::span<const QSample> batch);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(QNetworkParams& params, std::span<const double> gradient, double lr, const AdamConfig& cfg = {});

}  // namespace rlcg
