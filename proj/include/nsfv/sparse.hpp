#pragma once

// Block-sparse (BSR, 4x4 blocks) matrices and the linear solvers behind the Newton iteration.

#include <Eigen/SparseCore>
#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nsfv {

class BlockMatrix {
 public:
  static constexpr int kB = 4;
  static constexpr int kBB = kB * kB;

  BlockMatrix() = default;
  /// cols[r] lists the block columns of block row r; they are sorted and deduplicated here.
  explicit BlockMatrix(std::vector<std::vector<std::size_t>> cols);

  std::size_t block_rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t size() const { return block_rows() * kB; }
  std::size_t nnz_blocks() const { return col_.size(); }

  std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }
  std::size_t row_end(std::size_t r) const { return row_ptr_[r + 1]; }
  std::size_t col(std::size_t slot) const { return col_[slot]; }
  std::size_t diag_slot(std::size_t r) const { return diag_[r]; }
  /// Slot of block (r, c), or npos when (r, c) is outside the pattern.
  std::size_t find(std::size_t r, std::size_t c) const;

  double* block(std::size_t slot) { return &val_[slot * kBB]; }
  const double* block(std::size_t slot) const { return &val_[slot * kBB]; }
  /// Entry (a, b) of a block, row-major.
  static std::size_t at(int a, int b) { return static_cast<std::size_t>(a * kB + b); }

  void set_zero();
  void zero_row(std::size_t r);

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;

  Eigen::SparseMatrix<double> to_eigen() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<std::size_t> diag_;
  std::vector<double> val_;
};

/// Block incomplete LU with zero fill on the pattern of the matrix.
class BlockIlu0 {
 public:
  void factor(const BlockMatrix& a);
  /// z = (LU)^{-1} r.
  void solve(std::span<const double> r, std::span<double> z) const;
  bool ready() const { return ready_; }

 private:
  BlockMatrix lu_;
  std::vector<std::array<double, BlockMatrix::kBB>> diag_inv_;
  bool ready_ = false;
};

struct KrylovOptions {
  int restart = 40;
  int max_iterations = 400;
  double rtol = 1e-8;
  double atol = 0.0;
};

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Basis storage reused between solves; vectors are allocated on first use.
struct KrylovWorkspace {
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> z;
  std::vector<double> w;
};

/// Restarted GMRES, right preconditioned, modified Gram-Schmidt. x holds the initial guess.
KrylovResult gmres(const BlockMatrix& a, const BlockIlu0& m, std::span<const double> b, std::span<double> x,
                   const KrylovOptions& opts, KrylovWorkspace& work);
KrylovResult gmres(const BlockMatrix& a, const BlockIlu0& m, std::span<const double> b, std::span<double> x,
                   const KrylovOptions& opts);

/// Sparse LU through Eigen; reuses the symbolic analysis while the pattern is unchanged.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Returns false if the factorization failed (singular matrix).
  bool factor(const BlockMatrix& a);
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace nsfv
