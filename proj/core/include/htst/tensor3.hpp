#pragma once

#include <Eigen/Dense>
#include <array>

namespace htst {

//! Dense 3-way array, leg 0 fastest (column-major style).
//! Used for the transfer components sitting at interior sites.
class Tensor3 {
public:
  Tensor3() : dims_{{0, 0, 0}} {}
  Tensor3(int d0, int d1, int d2)
      : dims_{{d0, d1, d2}},
        data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d0) * d1 * d2)) {}

  int dim(int leg) const { return dims_[leg]; }
  Eigen::Index size() const { return data_.size(); }

  double& operator()(int i0, int i1, int i2) {
    return data_[i0 + static_cast<Eigen::Index>(dims_[0]) * (i1 + static_cast<Eigen::Index>(dims_[1]) * i2)];
  }
  double operator()(int i0, int i1, int i2) const {
    return data_[i0 + static_cast<Eigen::Index>(dims_[0]) * (i1 + static_cast<Eigen::Index>(dims_[1]) * i2)];
  }

  //! Matricization with leg `leg` as columns; rows run over the remaining
  //! legs in increasing leg order, first one fastest.
  Eigen::MatrixXd unfold_cols(int leg) const;

  //! Inverse of unfold_cols: rebuild from a matrix whose columns index
  //! `leg` and whose rows index the other two legs (da fastest).
  static Tensor3 fold_cols(int leg, const Eigen::MatrixXd& m, int da, int db);

  //! Contract leg `leg` with a matrix: out(...,j,...) = sum_i in(...,i,...) m(i,j).
  Tensor3 contract(int leg, const Eigen::MatrixXd& m) const;

private:
  std::array<int, 3> dims_;
  Eigen::VectorXd data_;
};

}  // namespace htst
