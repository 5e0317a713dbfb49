#pragma once

// Second-order difference operator D (rows (1,-2,1)/sqrt(6)), its stride-3
// decimations, and invertible T x T augmentations used as metrics by the
// dual-space drift and the proposal covariances.

#include <cstddef>
#include <span>
#include <vector>

namespace proxmc {

inline constexpr double kSqrt6 = 2.449489742783178098197284074705891391965947480656670128432692567;
inline constexpr double kSqrt5 = 2.236067977499789696409173668731276235440618359611525724270897245;

/// (x_0 - 2 x_1 + x_2) / sqrt(6). Shared by every operator that applies a
/// row of D so that results agree to the last bit.
inline double second_difference(const double* x) { return ((x[0] - 2.0 * x[1]) + x[2]) / kSqrt6; }

class SecondDiffOp {
 public:
  explicit SecondDiffOp(std::size_t T);

  std::size_t dim() const { return T_; }
  std::size_t rows() const { return T_ - 2; }

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  /// x = D^T y; overwrites x.
  void apply_transpose(std::span<const double> y, std::span<double> x) const;
  double l1_of_apply(std::span<const double> x) const;
  /// Row-major (T-2) x T.
  std::vector<double> dense() const;

 private:
  std::size_t T_;
};

/// Throws ConfigError for T < 3.
SecondDiffOp build_D(std::size_t T);

/// Rows i-1, i+2, i+5, ... (zero-based) of D, for i in {1, 2, 3}. The rows
/// have disjoint supports and unit norm, so A A^T = I.
class DecimatedDiffOp {
 public:
  DecimatedDiffOp(int i, std::size_t T);

  int index() const { return i_; }
  std::size_t dim() const { return T_; }
  std::size_t rows() const { return offsets_.size(); }
  /// Zero-based row indices into D.
  std::span<const std::size_t> row_indices() const { return offsets_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  /// x = A^T y; overwrites x.
  void apply_transpose(std::span<const double> y, std::span<double> x) const;
  std::vector<double> dense() const;

 private:
  int i_;
  std::size_t T_;
  std::vector<std::size_t> offsets_;
};

DecimatedDiffOp build_decimated(int i, std::size_t T);

enum class AugmentVariant {
  Invert,     // first rows (1,0,...), (-2,1,0,...)/sqrt(5)
  Ortho,      // orthonormal completion of D
  Decimated,  // orthonormal completion of a DecimatedDiffOp
};

/// Invertible T x T matrix whose last rows are a penalty operator and whose
/// leading `free_rows()` rows complete it. Inverses are cached densely.
class AugmentedDiffOp {
 public:
  AugmentVariant variant() const { return variant_; }
  std::size_t dim() const { return T_; }
  /// Number of leading unpenalized coordinates in the transformed space.
  std::size_t free_rows() const { return free_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;
  /// y = dbar^{-1} x. Banded forward substitution for the Invert variant.
  void solve(std::span<const double> x, std::span<double> y) const;
  /// y = dbar^{-T} x. Banded back substitution for the Invert variant.
  void solve_transpose(std::span<const double> x, std::span<double> y) const;
  /// y = dbar^{-1} x through the cached dense inverse, for every variant.
  void solve_dense(std::span<const double> x, std::span<double> y) const;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> solve(std::span<const double> x) const;

  /// Row-major T x T.
  std::span<const double> dense() const { return dbar_; }
  std::span<const double> dense_inverse() const { return inv_; }
  /// The free_rows() x T completion block.
  std::span<const double> completion_rows() const {
    return std::span<const double>(dbar_).first(free_ * T_);
  }

  /// Two-norm condition number (singular values of the dense matrix).
  double condition_number() const;

  friend AugmentedDiffOp build_augmented(std::size_t T, AugmentVariant variant);
  friend AugmentedDiffOp build_decimated_completion(const DecimatedDiffOp& a);

 private:
  AugmentedDiffOp(AugmentVariant variant, std::size_t T, std::size_t free_rows,
                  std::vector<double> dbar);
  void banded_lower_solve(std::span<const double> x, std::span<double> y) const;
  void banded_upper_solve_transposed(std::span<const double> x, std::span<double> y) const;

  AugmentVariant variant_;
  std::size_t T_;
  std::size_t free_;
  std::vector<double> dbar_;
  std::vector<double> dbar_t_;
  std::vector<double> inv_;
  std::vector<double> inv_t_;
};

/// Invert or Ortho augmentation of D. Throws ConfigError for T < 3 and
/// ConstructionError when orthogonalization loses rank.
AugmentedDiffOp build_augmented(std::size_t T, AugmentVariant variant);

/// [U; A] with U an orthonormal basis of the orthogonal complement of A's
/// row space, obtained by Gram-Schmidt on the canonical basis.
AugmentedDiffOp build_decimated_completion(const DecimatedDiffOp& a);

}  // namespace proxmc
