#include "proxmc/linops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "proxmc/error.hpp"
#include "proxmc/kernels.hpp"

namespace proxmc {

// ---------------------------------------------------------------- D

SecondDiffOp::SecondDiffOp(std::size_t T) : T_(T) {
  if (T < 3) throw ConfigError("second difference operator needs T >= 3, got " + std::to_string(T));
}

SecondDiffOp build_D(std::size_t T) { return SecondDiffOp(T); }

void SecondDiffOp::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t k = 0; k + 2 < T_; ++k) y[k] = second_difference(x.data() + k);
}

std::vector<double> SecondDiffOp::apply(std::span<const double> x) const {
  std::vector<double> y(rows());
  apply(x, y);
  return y;
}

void SecondDiffOp::apply_transpose(std::span<const double> y, std::span<double> x) const {
  std::fill(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(T_), 0.0);
  for (std::size_t k = 0; k + 2 < T_; ++k) {
    const double v = y[k] / kSqrt6;
    x[k] += v;
    x[k + 1] -= 2.0 * v;
    x[k + 2] += v;
  }
}

double SecondDiffOp::l1_of_apply(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k + 2 < T_; ++k) s += std::fabs(second_difference(x.data() + k));
  return s;
}

std::vector<double> SecondDiffOp::dense() const {
  std::vector<double> m(rows() * T_, 0.0);
  for (std::size_t k = 0; k < rows(); ++k) {
    m[k * T_ + k] = 1.0 / kSqrt6;
    m[k * T_ + k + 1] = -2.0 / kSqrt6;
    m[k * T_ + k + 2] = 1.0 / kSqrt6;
  }
  return m;
}

// ---------------------------------------------------------------- A_i

DecimatedDiffOp::DecimatedDiffOp(int i, std::size_t T) : i_(i), T_(T) {
  if (i < 1 || i > 3) throw ConfigError("decimation index must be 1, 2 or 3");
  if (T < 3) throw ConfigError("decimated operator needs T >= 3");
  for (std::size_t k = static_cast<std::size_t>(i - 1); k + 2 < T; k += 3) offsets_.push_back(k);
}

DecimatedDiffOp build_decimated(int i, std::size_t T) { return DecimatedDiffOp(i, T); }

void DecimatedDiffOp::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t m = 0; m < offsets_.size(); ++m) y[m] = second_difference(x.data() + offsets_[m]);
}

void DecimatedDiffOp::apply_transpose(std::span<const double> y, std::span<double> x) const {
  std::fill(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(T_), 0.0);
  for (std::size_t m = 0; m < offsets_.size(); ++m) {
    const std::size_t k = offsets_[m];
    const double v = y[m] / kSqrt6;
    x[k] += v;
    x[k + 1] -= 2.0 * v;
    x[k + 2] += v;
  }
}

std::vector<double> DecimatedDiffOp::dense() const {
  std::vector<double> m(rows() * T_, 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    const std::size_t k = offsets_[r];
    m[r * T_ + k] = 1.0 / kSqrt6;
    m[r * T_ + k + 1] = -2.0 / kSqrt6;
    m[r * T_ + k + 2] = 1.0 / kSqrt6;
  }
  return m;
}

// ---------------------------------------------------------------- Gram-Schmidt helpers

namespace {

using Rows = std::vector<std::vector<double>>;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Two passes of projection against an orthonormal set.
void project_out(std::vector<double>& v, const Rows& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      double c = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) c += q[k] * v[k];
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * q[k];
    }
  }
}

Rows orthonormalize(const Rows& rows) {
  Rows q;
  q.reserve(rows.size());
  for (const auto& r : rows) {
    auto v = r;
    const double before = norm2(v);
    project_out(v, q);
    const double after = norm2(v);
    if (!(after > 1e-10 * before)) throw ConstructionError("rows are numerically dependent");
    for (double& x : v) x /= after;
    q.push_back(std::move(v));
  }
  return q;
}

Rows d_rows(std::size_t T) {
  const SecondDiffOp d(T);
  const auto m = d.dense();
  Rows rows(d.rows(), std::vector<double>(T));
  for (std::size_t r = 0; r < d.rows(); ++r)
    std::copy(m.begin() + static_cast<std::ptrdiff_t>(r * T),
              m.begin() + static_cast<std::ptrdiff_t>((r + 1) * T), rows[r].begin());
  return rows;
}

std::vector<double> invert_head_row(std::size_t T, int which) {
  std::vector<double> row(T, 0.0);
  if (which == 0) {
    row[0] = 1.0;
  } else {
    row[0] = -2.0 / kSqrt5;
    row[1] = 1.0 / kSqrt5;
  }
  return row;
}

}  // namespace

// ---------------------------------------------------------------- augmentation

AugmentedDiffOp::AugmentedDiffOp(AugmentVariant variant, std::size_t T, std::size_t free_rows,
                                 std::vector<double> dbar)
    : variant_(variant), T_(T), free_(free_rows), dbar_(std::move(dbar)) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> m(dbar_.data(), static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T));
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw ConstructionError("augmented operator is singular");
  const Mat inv = lu.inverse();
  const Mat inv_t = inv.transpose();
  const Mat m_t = m.transpose();
  inv_.assign(inv.data(), inv.data() + T * T);
  inv_t_.assign(inv_t.data(), inv_t.data() + T * T);
  dbar_t_.assign(m_t.data(), m_t.data() + T * T);
}

AugmentedDiffOp build_augmented(std::size_t T, AugmentVariant variant) {
  if (T < 3) throw ConfigError("augmented operator needs T >= 3, got " + std::to_string(T));
  if (variant == AugmentVariant::Decimated)
    throw ConfigError("use build_decimated_completion for decimated operators");

  Rows head{invert_head_row(T, 0), invert_head_row(T, 1)};
  const Rows d = d_rows(T);
  if (variant == AugmentVariant::Ortho) {
    const Rows q = orthonormalize(d);
    Rows u;
    for (auto v : head) {
      const double before = norm2(v);
      project_out(v, q);
      project_out(v, u);
      const double after = norm2(v);
      if (!(after > 1e-8 * before))
        throw ConstructionError("completion row lies in the row space of D");
      for (double& x : v) x /= after;
      u.push_back(std::move(v));
    }
    head = std::move(u);
  }

  std::vector<double> dbar;
  dbar.reserve(T * T);
  for (const auto& r : head) dbar.insert(dbar.end(), r.begin(), r.end());
  for (const auto& r : d) dbar.insert(dbar.end(), r.begin(), r.end());
  return AugmentedDiffOp(variant, T, 2, std::move(dbar));
}

AugmentedDiffOp build_decimated_completion(const DecimatedDiffOp& a) {
  const std::size_t T = a.dim();
  const auto dense_a = a.dense();
  Rows arows(a.rows(), std::vector<double>(T));
  for (std::size_t r = 0; r < a.rows(); ++r)
    std::copy(dense_a.begin() + static_cast<std::ptrdiff_t>(r * T),
              dense_a.begin() + static_cast<std::ptrdiff_t>((r + 1) * T), arows[r].begin());

  const std::size_t need = T - a.rows();
  Rows u;
  for (std::size_t k = 0; k < T && u.size() < need; ++k) {
    std::vector<double> v(T, 0.0);
    v[k] = 1.0;
    project_out(v, arows);
    project_out(v, u);
    const double n = norm2(v);
    if (n < 1e-6) continue;
    for (double& x : v) x /= n;
    u.push_back(std::move(v));
  }
  if (u.size() != need) throw ConstructionError("could not complete decimated operator");

  std::vector<double> dbar;
  dbar.reserve(T * T);
  for (const auto& r : u) dbar.insert(dbar.end(), r.begin(), r.end());
  dbar.insert(dbar.end(), dense_a.begin(), dense_a.end());
  return AugmentedDiffOp(AugmentVariant::Decimated, T, need, std::move(dbar));
}

void AugmentedDiffOp::apply(std::span<const double> x, std::span<double> y) const {
  if (variant_ == AugmentVariant::Decimated) {
    kernels::gemv(dbar_, T_, T_, x, y);
    return;
  }
  for (std::size_t r = 0; r < free_; ++r)
    y[r] = kernels::dot(std::span<const double>(dbar_).subspan(r * T_, T_), x);
  for (std::size_t k = 0; k + 2 < T_; ++k) y[k + 2] = second_difference(x.data() + k);
}

std::vector<double> AugmentedDiffOp::apply(std::span<const double> x) const {
  std::vector<double> y(T_);
  apply(x, y);
  return y;
}

void AugmentedDiffOp::apply_transpose(std::span<const double> x, std::span<double> y) const {
  if (variant_ == AugmentVariant::Decimated) {
    kernels::gemv(dbar_t_, T_, T_, x, y);
    return;
  }
  SecondDiffOp(T_).apply_transpose(x.subspan(2), y);
  for (std::size_t r = 0; r < free_; ++r)
    kernels::axpy(x[r], std::span<const double>(dbar_).subspan(r * T_, T_), y);
}

void AugmentedDiffOp::banded_lower_solve(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < T_; ++r) {
    double s = x[r];
    const double* row = dbar_.data() + r * T_;
    for (std::size_t c = r >= 2 ? r - 2 : 0; c < r; ++c) s -= row[c] * y[c];
    y[r] = s / row[r];
  }
}

void AugmentedDiffOp::banded_upper_solve_transposed(std::span<const double> x,
                                                    std::span<double> y) const {
  for (std::size_t c = T_; c-- > 0;) {
    double s = x[c];
    for (std::size_t r = c + 1; r < T_ && r <= c + 2; ++r) s -= dbar_[r * T_ + c] * y[r];
    y[c] = s / dbar_[c * T_ + c];
  }
}

void AugmentedDiffOp::solve(std::span<const double> x, std::span<double> y) const {
  if (variant_ == AugmentVariant::Invert)
    banded_lower_solve(x, y);
  else
    kernels::gemv(inv_, T_, T_, x, y);
}

std::vector<double> AugmentedDiffOp::solve(std::span<const double> x) const {
  std::vector<double> y(T_);
  solve(x, y);
  return y;
}

void AugmentedDiffOp::solve_transpose(std::span<const double> x, std::span<double> y) const {
  if (variant_ == AugmentVariant::Invert)
    banded_upper_solve_transposed(x, y);
  else
    kernels::gemv(inv_t_, T_, T_, x, y);
}

void AugmentedDiffOp::solve_dense(std::span<const double> x, std::span<double> y) const {
  kernels::gemv(inv_, T_, T_, x, y);
}

double AugmentedDiffOp::condition_number() const {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      dbar_.data(), static_cast<Eigen::Index>(T_), static_cast<Eigen::Index>(T_));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

}  // namespace proxmc
