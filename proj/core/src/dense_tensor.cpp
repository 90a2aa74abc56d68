#include "htst/dense_tensor.hpp"

#include "htst/tensor3.hpp"

#include <algorithm>
#include <stdexcept>

namespace htst {

// ---------------------------------------------------------------- Tensor3

Eigen::MatrixXd Tensor3::unfold_cols(int leg) const {
  const int d0 = dims_[0], d1 = dims_[1], d2 = dims_[2];
  if (leg == 2) {
    return Eigen::Map<const Eigen::MatrixXd>(data_.data(),
                                             static_cast<Eigen::Index>(d0) * d1, d2);
  }
  if (leg == 0) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(d1) * d2, d0);
    for (int i2 = 0; i2 < d2; ++i2)
      for (int i1 = 0; i1 < d1; ++i1)
        for (int i0 = 0; i0 < d0; ++i0)
          out(i1 + static_cast<Eigen::Index>(d1) * i2, i0) = (*this)(i0, i1, i2);
    return out;
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(d0) * d2, d1);
  for (int i2 = 0; i2 < d2; ++i2)
    for (int i1 = 0; i1 < d1; ++i1)
      for (int i0 = 0; i0 < d0; ++i0)
        out(i0 + static_cast<Eigen::Index>(d0) * i2, i1) = (*this)(i0, i1, i2);
  return out;
}

Tensor3 Tensor3::fold_cols(int leg, const Eigen::MatrixXd& m, int da, int db) {
  const int dleg = static_cast<int>(m.cols());
  if (m.rows() != static_cast<Eigen::Index>(da) * db)
    throw std::invalid_argument("Tensor3::fold_cols: row count mismatch");
  Tensor3 out;
  if (leg == 2) {
    out = Tensor3(da, db, dleg);
    for (int j = 0; j < dleg; ++j)
      for (int ib = 0; ib < db; ++ib)
        for (int ia = 0; ia < da; ++ia)
          out(ia, ib, j) = m(ia + static_cast<Eigen::Index>(da) * ib, j);
  } else if (leg == 0) {
    out = Tensor3(dleg, da, db);
    for (int j = 0; j < dleg; ++j)
      for (int ib = 0; ib < db; ++ib)
        for (int ia = 0; ia < da; ++ia)
          out(j, ia, ib) = m(ia + static_cast<Eigen::Index>(da) * ib, j);
  } else {
    out = Tensor3(da, dleg, db);
    for (int j = 0; j < dleg; ++j)
      for (int ib = 0; ib < db; ++ib)
        for (int ia = 0; ia < da; ++ia)
          out(ia, j, ib) = m(ia + static_cast<Eigen::Index>(da) * ib, j);
  }
  return out;
}

Tensor3 Tensor3::contract(int leg, const Eigen::MatrixXd& m) const {
  if (m.rows() != dims_[leg])
    throw std::invalid_argument("Tensor3::contract: dimension mismatch");
  const int d0 = dims_[0], d1 = dims_[1], d2 = dims_[2];
  const int dn = static_cast<int>(m.cols());
  if (leg == 0) {
    Eigen::Map<const Eigen::MatrixXd> in(data_.data(), d0,
                                         static_cast<Eigen::Index>(d1) * d2);
    Eigen::MatrixXd res = m.transpose() * in;  // dn x (d1 d2)
    Tensor3 out(dn, d1, d2);
    for (int i2 = 0; i2 < d2; ++i2)
      for (int i1 = 0; i1 < d1; ++i1)
        for (int j = 0; j < dn; ++j)
          out(j, i1, i2) = res(j, i1 + static_cast<Eigen::Index>(d1) * i2);
    return out;
  }
  if (leg == 2) {
    Eigen::Map<const Eigen::MatrixXd> in(data_.data(),
                                         static_cast<Eigen::Index>(d0) * d1, d2);
    Eigen::MatrixXd res = in * m;  // (d0 d1) x dn
    Tensor3 out(d0, d1, dn);
    for (int j = 0; j < dn; ++j)
      for (int i1 = 0; i1 < d1; ++i1)
        for (int i0 = 0; i0 < d0; ++i0)
          out(i0, i1, j) = res(i0 + static_cast<Eigen::Index>(d0) * i1, j);
    return out;
  }
  // leg == 1: contiguous (d0 x d1) slices per i2
  Tensor3 out(d0, dn, d2);
  for (int i2 = 0; i2 < d2; ++i2) {
    Eigen::Map<const Eigen::MatrixXd> slice(
        data_.data() + static_cast<Eigen::Index>(d0) * d1 * i2, d0, d1);
    Eigen::MatrixXd res = slice * m;  // d0 x dn
    for (int j = 0; j < dn; ++j)
      for (int i0 = 0; i0 < d0; ++i0) out(i0, j, i2) = res(i0, j);
  }
  return out;
}

// ------------------------------------------------------------ DenseTensor

DenseTensor::DenseTensor(std::vector<int> dims, std::size_t cap) : dims_(std::move(dims)) {
  std::size_t total = 1;
  for (int n : dims_) {
    if (n <= 0) throw std::invalid_argument("DenseTensor: mode sizes must be positive");
    if (total > cap / static_cast<std::size_t>(n))
      throw std::length_error("DenseTensor: entry count exceeds capacity");
    total *= static_cast<std::size_t>(n);
  }
  data_.assign(total, 0.0);
}

std::size_t DenseTensor::flat_index(std::span<const int> multi) const {
  std::size_t idx = 0, stride = 1;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    idx += stride * static_cast<std::size_t>(multi[k]);
    stride *= static_cast<std::size_t>(dims_[k]);
  }
  return idx;
}

namespace {

// strides of the given mode list within the natural layout, plus total size
std::pair<std::vector<std::size_t>, std::size_t> group_layout(
    const std::vector<int>& dims, std::span<const int> modes) {
  std::vector<std::size_t> natural(dims.size());
  std::size_t stride = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    natural[k] = stride;
    stride *= static_cast<std::size_t>(dims[k]);
  }
  std::vector<std::size_t> out;
  std::size_t total = 1;
  for (int m : modes) {
    out.push_back(natural[m]);
    total *= static_cast<std::size_t>(dims[m]);
  }
  return {out, total};
}

}  // namespace

Eigen::MatrixXd DenseTensor::unfold(std::span<const int> row_modes,
                                    std::span<const int> col_modes) const {
  if (row_modes.size() + col_modes.size() != dims_.size())
    throw std::invalid_argument("DenseTensor::unfold: modes must partition the order");
  auto [rstride, rsize] = group_layout(dims_, row_modes);
  auto [cstride, csize] = group_layout(dims_, col_modes);
  Eigen::MatrixXd out(rsize, csize);

  std::vector<int> ridx(row_modes.size(), 0), cidx(col_modes.size(), 0);
  for (std::size_t c = 0; c < csize; ++c) {
    std::size_t cbase = 0;
    for (std::size_t k = 0; k < col_modes.size(); ++k)
      cbase += cstride[k] * static_cast<std::size_t>(cidx[k]);
    for (std::size_t r = 0; r < rsize; ++r) {
      std::size_t base = cbase;
      for (std::size_t k = 0; k < row_modes.size(); ++k)
        base += rstride[k] * static_cast<std::size_t>(ridx[k]);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data_[base];
      for (std::size_t k = 0; k < row_modes.size(); ++k) {
        if (++ridx[k] < dims_[row_modes[k]]) break;
        ridx[k] = 0;
      }
    }
    for (std::size_t k = 0; k < col_modes.size(); ++k) {
      if (++cidx[k] < dims_[col_modes[k]]) break;
      cidx[k] = 0;
    }
  }
  return out;
}

Eigen::MatrixXd DenseTensor::unfold(std::span<const int> row_modes) const {
  std::vector<char> in_rows(dims_.size(), 0);
  for (int m : row_modes) in_rows[m] = 1;
  std::vector<int> cols;
  for (std::size_t m = 0; m < dims_.size(); ++m)
    if (!in_rows[m]) cols.push_back(static_cast<int>(m));
  return unfold(row_modes, cols);
}

DenseTensor DenseTensor::fold(const Eigen::MatrixXd& m, std::span<const int> row_modes,
                              std::span<const int> col_modes,
                              const std::vector<int>& dims) {
  DenseTensor out(dims);
  auto [rstride, rsize] = group_layout(dims, row_modes);
  auto [cstride, csize] = group_layout(dims, col_modes);
  if (static_cast<std::size_t>(m.rows()) != rsize ||
      static_cast<std::size_t>(m.cols()) != csize)
    throw std::invalid_argument("DenseTensor::fold: shape mismatch");

  std::vector<int> ridx(row_modes.size(), 0), cidx(col_modes.size(), 0);
  for (std::size_t c = 0; c < csize; ++c) {
    std::size_t cbase = 0;
    for (std::size_t k = 0; k < col_modes.size(); ++k)
      cbase += cstride[k] * static_cast<std::size_t>(cidx[k]);
    for (std::size_t r = 0; r < rsize; ++r) {
      std::size_t base = cbase;
      for (std::size_t k = 0; k < row_modes.size(); ++k)
        base += rstride[k] * static_cast<std::size_t>(ridx[k]);
      out.data_[base] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      for (std::size_t k = 0; k < row_modes.size(); ++k) {
        if (++ridx[k] < dims[row_modes[k]]) break;
        ridx[k] = 0;
      }
    }
    for (std::size_t k = 0; k < col_modes.size(); ++k) {
      if (++cidx[k] < dims[col_modes[k]]) break;
      cidx[k] = 0;
    }
  }
  return out;
}

double DenseTensor::norm() const {
  return Eigen::Map<const Eigen::VectorXd>(data_.data(),
                                           static_cast<Eigen::Index>(data_.size()))
      .norm();
}

}  // namespace htst
