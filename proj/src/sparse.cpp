#include "nsfv/sparse.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "nsfv/errors.hpp"

namespace nsfv {

namespace {

using Block = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;
using BlockMap = Eigen::Map<Block>;
using ConstBlockMap = Eigen::Map<const Block>;
using Vec4Map = Eigen::Map<Eigen::Vector4d>;
using ConstVec4Map = Eigen::Map<const Eigen::Vector4d>;

}  // namespace

BlockMatrix::BlockMatrix(std::vector<std::vector<std::size_t>> cols) {
  const std::size_t n = cols.size();
  row_ptr_.assign(n + 1, 0);
  diag_.assign(n, npos);
  for (std::size_t r = 0; r < n; ++r) {
    auto& c = cols[r];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    row_ptr_[r + 1] = row_ptr_[r] + c.size();
  }
  col_.reserve(row_ptr_[n]);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c : cols[r]) {
      if (c == r) diag_[r] = col_.size();
      col_.push_back(c);
    }
    if (diag_[r] == npos) throw ConfigError("block matrix: pattern is missing a diagonal block");
  }
  val_.assign(col_.size() * kBB, 0.0);
}

std::size_t BlockMatrix::find(std::size_t r, std::size_t c) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return npos;
  return static_cast<std::size_t>(it - col_.begin());
}

void BlockMatrix::set_zero() { std::fill(val_.begin(), val_.end(), 0.0); }

void BlockMatrix::zero_row(std::size_t r) {
  std::fill(val_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r] * kBB),
            val_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1] * kBB), 0.0);
}

void BlockMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const auto n = static_cast<std::ptrdiff_t>(block_rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    double acc[kB] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t s = row_ptr_[r]; s < row_ptr_[r + 1]; ++s) {
      const double* b = &val_[s * kBB];
      const double* xv = &x[col_[s] * kB];
      for (int a = 0; a < kB; ++a) {
        acc[a] += b[a * kB] * xv[0] + b[a * kB + 1] * xv[1] + b[a * kB + 2] * xv[2] + b[a * kB + 3] * xv[3];
      }
    }
    for (int a = 0; a < kB; ++a) y[static_cast<std::size_t>(r) * kB + a] = acc[a];
  }
}

Eigen::SparseMatrix<double> BlockMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(val_.size());
  for (std::size_t r = 0; r < block_rows(); ++r) {
    for (std::size_t s = row_ptr_[r]; s < row_ptr_[r + 1]; ++s) {
      const double* b = block(s);
      for (int a = 0; a < kB; ++a) {
        for (int c = 0; c < kB; ++c) {
          const double v = b[at(a, c)];
          if (v != 0.0) trip.emplace_back(static_cast<int>(r * kB + a), static_cast<int>(col_[s] * kB + c), v);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(size()), static_cast<int>(size()));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void BlockIlu0::factor(const BlockMatrix& a) {
  lu_ = a;
  const std::size_t n = lu_.block_rows();
  diag_inv_.resize(n);
  std::vector<std::size_t> marker(n, BlockMatrix::npos);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = lu_.row_begin(i); s < lu_.row_end(i); ++s) marker[lu_.col(s)] = s;
    for (std::size_t s = lu_.row_begin(i); s < lu_.row_end(i); ++s) {
      const std::size_t k = lu_.col(s);
      if (k >= i) break;
      BlockMap lik(lu_.block(s));
      const ConstBlockMap dk(diag_inv_[k].data());
      const Block l = lik * dk;
      lik = l;
      for (std::size_t t = lu_.diag_slot(k) + 1; t < lu_.row_end(k); ++t) {
        const std::size_t target = marker[lu_.col(t)];
        if (target == BlockMatrix::npos) continue;
        BlockMap aij(lu_.block(target));
        aij.noalias() -= l * ConstBlockMap(lu_.block(t));
      }
    }
    const ConstBlockMap d(lu_.block(lu_.diag_slot(i)));
    BlockMap dinv(diag_inv_[i].data());
    dinv = d.inverse();
    for (std::size_t s = lu_.row_begin(i); s < lu_.row_end(i); ++s) marker[lu_.col(s)] = BlockMatrix::npos;
  }
  ready_ = true;
}

void BlockIlu0::solve(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = lu_.block_rows();
  constexpr int kB = BlockMatrix::kB;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector4d acc = ConstVec4Map(&r[i * kB]);
    for (std::size_t s = lu_.row_begin(i); s < lu_.diag_slot(i); ++s) {
      acc.noalias() -= ConstBlockMap(lu_.block(s)) * ConstVec4Map(&z[lu_.col(s) * kB]);
    }
    Vec4Map zi(&z[i * kB]);
    zi = acc;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    Eigen::Vector4d acc = ConstVec4Map(&z[ii * kB]);
    for (std::size_t s = lu_.diag_slot(ii) + 1; s < lu_.row_end(ii); ++s) {
      acc.noalias() -= ConstBlockMap(lu_.block(s)) * ConstVec4Map(&z[lu_.col(s) * kB]);
    }
    Vec4Map zi(&z[ii * kB]);
    zi.noalias() = ConstBlockMap(diag_inv_[ii].data()) * acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

KrylovResult gmres(const BlockMatrix& a, const BlockIlu0& m, std::span<const double> b, std::span<double> x,
                   const KrylovOptions& opts) {
  KrylovWorkspace work;
  return gmres(a, m, b, x, opts, work);
}

KrylovResult gmres(const BlockMatrix& a, const BlockIlu0& m, std::span<const double> b, std::span<double> x,
                   const KrylovOptions& opts, KrylovWorkspace& work) {
  const std::size_t n = a.size();
  const int restart = std::max(1, opts.restart);
  auto& v = work.v;
  auto& z = work.z;
  auto grow = [&](std::vector<std::vector<double>>& basis, int k) {
    if (basis.size() <= static_cast<std::size_t>(k)) basis.resize(static_cast<std::size_t>(k) + 1);
    basis[k].resize(n);
  };
  grow(v, 0);
  std::vector<double> hess(static_cast<std::size_t>((restart + 1) * restart), 0.0);
  std::vector<double> cs(restart), sn(restart), g(static_cast<std::size_t>(restart) + 1), y(restart);
  std::vector<double>& w = work.w;
  w.resize(n);
  auto H = [&](int i, int j) -> double& { return hess[static_cast<std::size_t>(i * restart + j)]; };

  KrylovResult res;
  a.multiply(x, w);
  for (std::size_t i = 0; i < n; ++i) v[0][i] = b[i] - w[i];
  double beta = norm2(v[0]);
  const double target = std::max(opts.rtol * beta, opts.atol);
  res.residual = beta;
  if (beta <= target || beta == 0.0) {
    res.converged = true;
    return res;
  }

  while (res.iterations < opts.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    double resid = beta;
    for (; j < restart && res.iterations < opts.max_iterations;) {
      grow(z, j);
      m.solve(v[j], z[j]);
      a.multiply(z[j], w);
      for (int i = 0; i <= j; ++i) {
        const double hij = dot(w, v[i]);
        H(i, j) = hij;
        for (std::size_t q = 0; q < n; ++q) w[q] -= hij * v[i][q];
      }
      const double hnext = norm2(w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), hnext);
      cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn[j] = denom == 0.0 ? 0.0 : hnext / denom;
      H(j, j) = denom;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      resid = std::abs(g[j + 1]);
      ++res.iterations;
      ++j;
      if (hnext == 0.0 || resid <= target) break;
      grow(v, j);
      for (std::size_t q = 0; q < n; ++q) v[j][q] = w[q] / hnext;
    }
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = H(i, i) == 0.0 ? 0.0 : s / H(i, i);
    }
    for (int i = 0; i < j; ++i) {
      for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * z[i][q];
    }
    a.multiply(x, w);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = b[i] - w[i];
    beta = norm2(v[0]);
    res.residual = beta;
    if (beta <= target || resid <= target) {
      res.converged = beta <= 10.0 * target;
      if (res.converged) return res;
    }
    if (beta == 0.0) break;
  }
  res.converged = res.residual <= target;
  return res;
}

struct DirectSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  Eigen::Index n = 0;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

bool DirectSolver::factor(const BlockMatrix& a) {
  Eigen::SparseMatrix<double> m = a.to_eigen();
  m.makeCompressed();
  // Explicit zeros are dropped by to_eigen, so the pattern can change between calls.
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  impl_->analyzed = true;
  impl_->n = m.rows();
  return impl_->lu.info() == Eigen::Success;
}

void DirectSolver::solve(std::span<const double> b, std::span<double> x) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd sol = impl_->lu.solve(rhs);
  std::copy(sol.data(), sol.data() + sol.size(), x.begin());
}

}  // namespace nsfv
