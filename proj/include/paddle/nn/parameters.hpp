/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace paddle::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

struct ParamBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  int group = 0;  // gradient-clipping group

  Eigen::Index size() const { return rows * cols; }
};

// All trainable tensors of a network live in one flat vector; layers hold
// block ids and view their slice as a column-major matrix. Gradients use the
// same layout, so optimizers and finite-difference checks work on flat
// vectors.
template <typename Scalar>
class ParameterSet {
 public:
  using MatrixMap = Eigen::Map<Matrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const Matrix<Scalar>>;

  int add(std::string name, Eigen::Index rows, Eigen::Index cols, int group) {
    for (const auto& b : blocks_) {
      if (b.name == name) throw std::logic_error("duplicate parameter block: " + name);
    }
    ParamBlock block{std::move(name), values_.size(), rows, cols, group};
    Vector<Scalar> grown = Vector<Scalar>::Zero(values_.size() + block.size());
    grown.head(values_.size()) = values_;
    values_ = std::move(grown);
    blocks_.push_back(std::move(block));
    return static_cast<int>(blocks_.size()) - 1;
  }

  MatrixMap mat(int id) { return view(values_, id); }
  ConstMatrixMap mat(int id) const { return view(values_, id); }

  MatrixMap view(Vector<Scalar>& flat, int id) const {
    const auto& b = blocks_[static_cast<std::size_t>(id)];
    return MatrixMap(flat.data() + b.offset, b.rows, b.cols);
  }
  ConstMatrixMap view(const Vector<Scalar>& flat, int id) const {
    const auto& b = blocks_[static_cast<std::size_t>(id)];
    return ConstMatrixMap(flat.data() + b.offset, b.rows, b.cols);
  }

  Vector<Scalar>& values() { return values_; }
  const Vector<Scalar>& values() const { return values_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  Eigen::Index size() const { return values_.size(); }
  Vector<Scalar> zeros() const { return Vector<Scalar>::Zero(values_.size()); }

 private:
  Vector<Scalar> values_;
  std::vector<ParamBlock> blocks_;
};

// Orthogonal initialisation scaled by `gain`; drawn in double so float and
// double networks built from the same seed agree up to rounding.
template <typename Scalar>
void orthogonal_init(Eigen::Map<Matrix<Scalar>> w, double gain, std::mt19937_64& rng) {
  if (gain == 0.0) {
    w.setZero();
    return;
  }
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::Index rows = w.rows(), cols = w.cols();
  const bool tall = rows >= cols;
  Eigen::MatrixXd g(tall ? rows : cols, tall ? cols : rows);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = unit(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  // Sign fix so the draw is a proper Haar sample.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  const Eigen::MatrixXd scaled = gain * (tall ? q : Eigen::MatrixXd(q.transpose()));
  w = scaled.template cast<Scalar>();
}

}  // namespace paddle::nn
