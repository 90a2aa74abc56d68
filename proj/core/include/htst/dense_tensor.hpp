#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace htst {

//! Dense d-way array with mode 0 fastest. Oracle- and test-scale only;
//! construction checks an entry-count cap.
class DenseTensor {
public:
  static constexpr std::size_t kDefaultCap = std::size_t{1} << 24;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> dims, std::size_t cap = kDefaultCap);

  const std::vector<int>& dims() const { return dims_; }
  int order() const { return static_cast<int>(dims_.size()); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::size_t flat_index(std::span<const int> multi) const;
  double& at(std::span<const int> multi) { return data_[flat_index(multi)]; }
  double at(std::span<const int> multi) const { return data_[flat_index(multi)]; }

  //! Matricization: rows run over `row_modes` (first listed fastest),
  //! columns over `col_modes`. Together they must partition the modes.
  Eigen::MatrixXd unfold(std::span<const int> row_modes,
                         std::span<const int> col_modes) const;
  //! Unfold against the ascending-ordered complement of `row_modes`.
  Eigen::MatrixXd unfold(std::span<const int> row_modes) const;

  static DenseTensor fold(const Eigen::MatrixXd& m, std::span<const int> row_modes,
                          std::span<const int> col_modes, const std::vector<int>& dims);

  double norm() const;

private:
  std::vector<int> dims_;
  std::vector<double> data_;
};

}  // namespace htst
