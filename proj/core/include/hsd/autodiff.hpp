#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace hsd::ad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Named trainable matrices, iterated in insertion order.
class ParameterSet {
 public:
  int add(std::string name, Matrix init);

  std::size_t size() const { return values_.size(); }
  bool contains(std::string_view name) const { return index_.contains(std::string(name)); }
  int index_of(std::string_view name) const;

  const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  Matrix& value(int i) { return values_[static_cast<std::size_t>(i)]; }
  const Matrix& value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  Matrix& value(std::string_view name) { return value(index_of(name)); }
  const Matrix& value(std::string_view name) const { return value(index_of(name)); }

  std::size_t num_scalars() const;

  friend bool operator==(const ParameterSet& a, const ParameterSet& b);

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::unordered_map<std::string, int> index_;
};

/// Gradient buffers shaped like a ParameterSet.
class Gradients {
 public:
  explicit Gradients(const ParameterSet& params);

  Matrix& operator[](int i) { return grads_[static_cast<std::size_t>(i)]; }
  const Matrix& operator[](int i) const { return grads_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return grads_.size(); }

  void zero();
  void scale(double s);
  bool all_finite() const;

 private:
  std::vector<Matrix> grads_;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Records a computation for reverse-mode differentiation. Parameter
/// gradients are accumulated into the Gradients passed at construction; with
/// no Gradients the tape only evaluates.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, const Matrix& grad_out)>;

  explicit Tape(const ParameterSet& params, Gradients* grads = nullptr);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return grads_ != nullptr; }
  const ParameterSet& params() const { return params_; }

  Var constant(Matrix value);
  Var param(int index);
  Var param(std::string_view name) { return param(params_.index_of(name)); }

  /// Rows `ids` of an embedding parameter, returned as the columns of a
  /// d × ids.size() matrix.
  Var embed(int table, std::span<const int> ids);

  /// Backpropagate from a 1×1 node.
  void backward(Var loss, double seed = 1.0);

  // Used by op implementations.
  const Matrix& value_of(int id) const { return *nodes_[static_cast<std::size_t>(id)].value; }
  Var push(Matrix value, Backprop backprop);
  void accumulate(int id, const Matrix& grad);
  template <typename Expr>
  void accumulate_expr(int id, const Expr& grad);
  Gradients& gradients() { return *grads_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix own;
    const Matrix* value = nullptr;
    Matrix grad;
    bool has_grad = false;
    Backprop backprop;
  };

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }

  const ParameterSet& params_;
  Gradients* grads_;
  std::deque<Node> nodes_;
};

template <typename Expr>
void Tape::accumulate_expr(int id, const Expr& grad) {
  Node& n = node(id);
  if (!n.has_grad) {
    n.grad = grad;
    n.has_grad = true;
  } else {
    n.grad += grad;
  }
}

// Operations. Shapes follow Eigen conventions; vectors are single columns.

Var matmul(Var a, Var b);
/// Elementwise sum; a single-column `b` is broadcast across the columns of `a`.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var sigmoid(Var a);
Var tanh(Var a);
Var one_minus(Var a);
Var transpose(Var a);
Var concat_rows(std::span<const Var> parts);
Var hstack(std::span<const Var> parts);
Var select_columns(Var a, std::span<const int> columns);
Var column(Var a, Eigen::Index j);
Var row_block(Var a, Eigen::Index start, Eigen::Index count);
/// Softmax over all entries of a row or column vector.
Var softmax(Var a);
/// -log(max(p[index], floor)) as a 1×1 node.
Var neg_log_prob(Var probs, Eigen::Index index, double floor = 1e-12);

Matrix softmax_values(const Matrix& logits);

}  // namespace hsd::ad
