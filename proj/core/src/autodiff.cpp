#include "hsd/autodiff.hpp"

#include <cmath>

#include "hsd/error.hpp"

namespace hsd::ad {

int ParameterSet::add(std::string name, Matrix init) {
  if (index_.contains(name)) throw Error("duplicate parameter '" + name + "'");
  const int i = static_cast<int>(values_.size());
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return i;
}

int ParameterSet::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw Error("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParameterSet::num_scalars() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

bool operator==(const ParameterSet& a, const ParameterSet& b) {
  if (a.names_ != b.names_) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const Matrix& x = a.values_[i];
    const Matrix& y = b.values_[i];
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    if (!(x.array() == y.array()).all()) return false;
  }
  return true;
}

Gradients::Gradients(const ParameterSet& params) {
  grads_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& v = params.value(static_cast<int>(i));
    grads_.push_back(Matrix::Zero(v.rows(), v.cols()));
  }
}

void Gradients::zero() {
  for (auto& g : grads_) g.setZero();
}

void Gradients::scale(double s) {
  for (auto& g : grads_) g *= s;
}

bool Gradients::all_finite() const {
  for (const auto& g : grads_) {
    if (!g.allFinite()) return false;
  }
  return true;
}

const Matrix& Var::value() const { return tape_->value_of(id_); }

Tape::Tape(const ParameterSet& params, Gradients* grads) : params_(params), grads_(grads) {}

Var Tape::push(Matrix value, Backprop backprop) {
  Node& n = nodes_.emplace_back();
  n.own = std::move(value);
  n.value = &n.own;
  if (recording()) n.backprop = std::move(backprop);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::param(int index) {
  Node& n = nodes_.emplace_back();
  n.value = &params_.value(index);
  if (recording()) {
    n.backprop = [index](Tape& t, const Matrix& g) { t.gradients()[index] += g; };
  }
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::embed(int table, std::span<const int> ids) {
  const Matrix& tab = params_.value(table);
  Matrix out(tab.cols(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || ids[j] >= tab.rows()) throw Error("embedding index out of range");
    out.col(static_cast<Eigen::Index>(j)) = tab.row(ids[j]).transpose();
  }
  std::vector<int> rows(ids.begin(), ids.end());
  return push(std::move(out), [table, rows = std::move(rows)](Tape& t, const Matrix& g) {
    Matrix& dt = t.gradients()[table];
    for (std::size_t j = 0; j < rows.size(); ++j) dt.row(rows[j]) += g.col(static_cast<Eigen::Index>(j)).transpose();
  });
}

void Tape::accumulate(int id, const Matrix& grad) { accumulate_expr(id, grad); }

void Tape::backward(Var loss, double seed) {
  if (!recording()) throw Error("backward on a tape without gradient buffers");
  if (loss.rows() != 1 || loss.cols() != 1) throw DimensionError("backward requires a scalar loss");
  accumulate(loss.id(), Matrix::Constant(1, 1, seed));
  for (int i = loss.id(); i >= 0; --i) {
    Node& n = node(i);
    if (!n.has_grad || !n.backprop) continue;
    n.backprop(*this, n.grad);
  }
}

namespace {

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

Tape& tape_of(Var a) {
  if (!a.valid()) throw Error("operation on an empty Var");
  return *a.tape();
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  require(A.cols() == B.rows(), "matmul", A, B);
  const int ia = a.id();
  const int ib = b.id();
  return t.push(A * B, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate_expr(ia, g * t.value_of(ib).transpose());
    t.accumulate_expr(ib, t.value_of(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  const int ia = a.id();
  const int ib = b.id();
  if (A.rows() == B.rows() && A.cols() == B.cols()) {
    return t.push(A + B, [ia, ib](Tape& t, const Matrix& g) {
      t.accumulate(ia, g);
      t.accumulate(ib, g);
    });
  }
  require(B.cols() == 1 && A.rows() == B.rows(), "add", A, B);
  Matrix out = A.colwise() + B.col(0);
  return t.push(std::move(out), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate_expr(ib, g.rowwise().sum());
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  require(A.rows() == B.rows() && A.cols() == B.cols(), "sub", A, B);
  const int ia = a.id();
  const int ib = b.id();
  return t.push(A - B, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate_expr(ib, -g);
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  require(A.rows() == B.rows() && A.cols() == B.cols(), "hadamard", A, B);
  const int ia = a.id();
  const int ib = b.id();
  return t.push(A.cwiseProduct(B), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate_expr(ia, g.cwiseProduct(t.value_of(ib)));
    t.accumulate_expr(ib, g.cwiseProduct(t.value_of(ia)));
  });
}

Var scale(Var a, double s) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.push(a.value() * s, [ia, s](Tape& t, const Matrix& g) { t.accumulate_expr(ia, g * s); });
}

Var sigmoid(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  Matrix y = a.value().unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  const int iy = static_cast<int>(t.size());
  return t.push(std::move(y), [ia, iy](Tape& t, const Matrix& g) {
    const Matrix& y = t.value_of(iy);
    t.accumulate_expr(ia, g.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var tanh(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  Matrix y = a.value().array().tanh().matrix();
  const int iy = static_cast<int>(t.size());
  return t.push(std::move(y), [ia, iy](Tape& t, const Matrix& g) {
    const Matrix& y = t.value_of(iy);
    t.accumulate_expr(ia, g.cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var one_minus(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.push((1.0 - a.value().array()).matrix(), [ia](Tape& t, const Matrix& g) { t.accumulate_expr(ia, -g); });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.push(a.value().transpose(), [ia](Tape& t, const Matrix& g) { t.accumulate_expr(ia, g.transpose()); });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concat_rows of nothing");
  Tape& t = tape_of(parts.front());
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    require(p.cols() == cols, "concat_rows", parts.front().value(), p.value());
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> layout;
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    layout.emplace_back(p.id(), p.rows());
    r += p.rows();
  }
  return t.push(std::move(out), [layout = std::move(layout)](Tape& t, const Matrix& g) {
    Eigen::Index r = 0;
    for (const auto& [id, n] : layout) {
      t.accumulate_expr(id, g.middleRows(r, n));
      r += n;
    }
  });
}

Var hstack(std::span<const Var> parts) {
  if (parts.empty()) throw Error("hstack of nothing");
  Tape& t = tape_of(parts.front());
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    require(p.rows() == rows, "hstack", parts.front().value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> layout;
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    layout.emplace_back(p.id(), p.cols());
    c += p.cols();
  }
  return t.push(std::move(out), [layout = std::move(layout)](Tape& t, const Matrix& g) {
    Eigen::Index c = 0;
    for (const auto& [id, n] : layout) {
      t.accumulate_expr(id, g.middleCols(c, n));
      c += n;
    }
  });
}

Var select_columns(Var a, std::span<const int> columns) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  Matrix out(A.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= A.cols()) throw Error("select_columns: column out of range");
    out.col(static_cast<Eigen::Index>(j)) = A.col(columns[j]);
  }
  const int ia = a.id();
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  std::vector<int> idx(columns.begin(), columns.end());
  return t.push(std::move(out), [ia, rows, cols, idx = std::move(idx)](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(rows, cols);
    for (std::size_t j = 0; j < idx.size(); ++j) d.col(idx[j]) += g.col(static_cast<Eigen::Index>(j));
    t.accumulate(ia, d);
  });
}

Var column(Var a, Eigen::Index j) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  if (j < 0 || j >= A.cols()) throw Error("column: index out of range");
  const int ia = a.id();
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  return t.push(A.col(j), [ia, j, rows, cols](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(rows, cols);
    d.col(j) = g;
    t.accumulate(ia, d);
  });
}

Var row_block(Var a, Eigen::Index start, Eigen::Index count) {
  Tape& t = tape_of(a);
  const Matrix& A = a.value();
  if (start < 0 || count < 0 || start + count > A.rows()) throw Error("row_block: range out of bounds");
  const int ia = a.id();
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  return t.push(A.middleRows(start, count), [ia, start, count, rows, cols](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(rows, cols);
    d.middleRows(start, count) = g;
    t.accumulate(ia, d);
  });
}

Matrix softmax_values(const Matrix& logits) {
  const double m = logits.maxCoeff();
  Matrix e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

Var softmax(Var a) {
  Tape& t = tape_of(a);
  if (a.rows() != 1 && a.cols() != 1) throw DimensionError("softmax expects a vector");
  const int ia = a.id();
  const int iy = static_cast<int>(t.size());
  return t.push(softmax_values(a.value()), [ia, iy](Tape& t, const Matrix& g) {
    const Matrix& y = t.value_of(iy);
    const double dot = g.cwiseProduct(y).sum();
    t.accumulate_expr(ia, y.cwiseProduct((g.array() - dot).matrix()));
  });
}

Var neg_log_prob(Var probs, Eigen::Index index, double floor) {
  Tape& t = tape_of(probs);
  const Matrix& P = probs.value();
  if (index < 0 || index >= P.size()) throw Error("neg_log_prob: index out of range");
  const double p = P(index);
  const double loss = -std::log(std::max(p, floor));
  const int ip = probs.id();
  const Eigen::Index rows = P.rows();
  const Eigen::Index cols = P.cols();
  return t.push(Matrix::Constant(1, 1, loss), [ip, index, p, floor, rows, cols](Tape& t, const Matrix& g) {
    if (p <= floor) return;
    Matrix d = Matrix::Zero(rows, cols);
    d(index) = -g(0, 0) / p;
    t.accumulate(ip, d);
  });
}

}  // namespace hsd::ad
