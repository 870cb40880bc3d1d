#include "nsfv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>

#include "nsfv/scheme.hpp"

namespace nsfv {

namespace {

using std::ptrdiff_t;
using std::size_t;

// Stencil entry relative to a center cell: offset (di, dj), derivative axis, weight.
struct Tap {
  int di;
  int dj;
  int axis;
  double coef;
};

// Shared geometry of one cell: its column, row and the neighbors that exist.
struct Around {
  int i, j;
  size_t c, e, w, n, s;
  bool bottom, top;
};

Around around(const Grid& g, size_t c) {
  const int i = g.col(c);
  const int j = g.row(c);
  const size_t n1 = static_cast<size_t>(g.n1());
  Around a{i, j, c, g.index(g.wrap(i + 1), j), g.index(g.wrap(i - 1), j), c + n1, c - n1, j == 0, j == g.n2() - 1};
  return a;
}

// Cell gradient of a no-slip field at a cell in the given row type.
void grad_taps(bool bottom, bool top, double inv_2h, Tap out[4]) {
  out[0] = {1, 0, 0, inv_2h};
  out[1] = {-1, 0, 0, -inv_2h};
  if (bottom) {
    out[2] = {0, 0, 1, inv_2h};
    out[3] = {0, 1, 1, inv_2h};
  } else if (top) {
    out[2] = {0, 0, 1, -inv_2h};
    out[3] = {0, -1, 1, -inv_2h};
  } else {
    out[2] = {0, 1, 1, inv_2h};
    out[3] = {0, -1, 1, -inv_2h};
  }
}

// Row divergence of a cell tensor with copied wall ghosts.
void div_taps(bool bottom, bool top, double inv_2h, Tap out[4]) {
  out[0] = {1, 0, 0, inv_2h};
  out[1] = {-1, 0, 0, -inv_2h};
  if (bottom) {
    out[2] = {0, 1, 1, inv_2h};
    out[3] = {0, 0, 1, -inv_2h};
  } else if (top) {
    out[2] = {0, 0, 1, inv_2h};
    out[3] = {0, -1, 1, -inv_2h};
  } else {
    out[2] = {0, 1, 1, inv_2h};
    out[3] = {0, -1, 1, -inv_2h};
  }
}

// Diffusive upwind fluxes of (rho, rho u1, rho u2, rho theta) through a face with normal e_axis.
inline void face_flux(const double* xl, const double* xr, int axis, double ha, double* f) {
  const double v = 0.5 * (xl[1 + axis] + xr[1 + axis]);
  const double rl[4] = {xl[0], xl[0] * xl[1], xl[0] * xl[2], xl[0] * xl[3]};
  const double rr[4] = {xr[0], xr[0] * xr[1], xr[0] * xr[2], xr[0] * xr[3]};
  const double* up = v >= 0.0 ? rl : rr;
  for (int q = 0; q < 4; ++q) f[q] = up[q] * v - ha * (rr[q] - rl[q]);
}

}  // namespace

StepKernels::StepKernels(const Grid& g)
    : g_(g),
      tcell_(4 * g.cells()),
      gcell_(4 * g.cells()),
      flux0_(4 * g.face_count(0)),
      flux1_(4 * g.face_count(1), 0.0),
      pos_(25 * g.cells(), 0xff) {
  const BlockMatrix pattern = make_pattern();
  for (size_t c = 0; c < g.cells(); ++c) {
    const int i = g.col(c);
    const int j = g.row(c);
    for (int dj = -2; dj <= 2; ++dj) {
      if (j + dj < 0 || j + dj >= g.n2()) continue;
      for (int di = -2; di <= 2; ++di) {
        if (std::abs(di) + std::abs(dj) > 2) continue;
        const size_t slot = pattern.find(c, g.index(g.wrap(i + di), j + dj));
        pos_[25 * c + 5 * (dj + 2) + di + 2] = static_cast<std::uint8_t>(slot - pattern.row_begin(c));
      }
    }
  }
}

bool StepKernels::residual(const SchemeParams& p, std::span<const double> x0, std::span<const double> x,
                           std::span<double> r) {
  const int n1 = g_.n1();
  const double h = g_.h();
  const double inv_h = 1.0 / h;
  const double inv_2h = 0.5 / h;
  const double inv_h2 = 1.0 / (h * h);
  const double mu = p.mu;
  const double lam = p.lambda;
  const double cv = p.law.cv();
  const double ha = std::pow(h, p.alpha);
  const double inv_dt = 1.0 / p.dt;
  const auto n = static_cast<ptrdiff_t>(g_.cells());
  const double* X = x.data();
  const double* X0 = x0.data();
  double* T = tcell_.data();
  double* G = gcell_.data();
  double* F0 = flux0_.data();
  double* F1 = flux1_.data();
  const double* tb = p.closure.theta_bottom.data();
  const double* tt = p.closure.theta_top.data();
  int bad = 0;

#pragma omp parallel for schedule(static) reduction(+ : bad)
  for (ptrdiff_t c = 0; c < n; ++c) {
    const Around a = around(g_, static_cast<size_t>(c));
    const double* xc = X + 4 * c;
    double d1[2];
    double d2[2];
    for (int k = 0; k < 2; ++k) {
      d1[k] = (X[4 * a.e + 1 + k] - X[4 * a.w + 1 + k]) * inv_2h;
      if (a.bottom) {
        d2[k] = (xc[1 + k] + X[4 * a.n + 1 + k]) * inv_2h;
      } else if (a.top) {
        d2[k] = -(xc[1 + k] + X[4 * a.s + 1 + k]) * inv_2h;
      } else {
        d2[k] = (X[4 * a.n + 1 + k] - X[4 * a.s + 1 + k]) * inv_2h;
      }
    }
    const double div = d1[0] + d2[1];
    const double pr = xc[0] * xc[3];
    double* gc = G + 4 * c;
    gc[0] = d1[0];
    gc[1] = d2[0];
    gc[2] = d1[1];
    gc[3] = d2[1];
    double* tc = T + 4 * c;
    tc[0] = 2.0 * mu * d1[0] + lam * div - pr;
    tc[1] = mu * (d2[0] + d1[1]);
    tc[2] = tc[1];
    tc[3] = 2.0 * mu * d2[1] + lam * div - pr;
    if (!(xc[0] > 0.0) || !(xc[3] > 0.0)) ++bad;
  }

#pragma omp parallel for schedule(static)
  for (ptrdiff_t f = 0; f < n; ++f) {
    const int i = static_cast<int>(f % n1);
    const size_t left = g_.index(g_.wrap(i - 1), static_cast<int>(f / n1));
    face_flux(X + 4 * left, X + 4 * f, 0, ha, F0 + 4 * f);
  }

#pragma omp parallel for schedule(static)
  for (ptrdiff_t f = n1; f < n; ++f) {
    face_flux(X + 4 * (f - n1), X + 4 * f, 1, ha, F1 + 4 * f);
  }

#pragma omp parallel for schedule(static)
  for (ptrdiff_t c = 0; c < n; ++c) {
    const Around a = around(g_, static_cast<size_t>(c));
    const double* xc = X + 4 * c;
    const double* xo = X0 + 4 * c;
    const double* fw = F0 + 4 * c;
    const double* fe = F0 + 4 * a.e;
    const double* fs = F1 + 4 * c;
    const double* fn = F1 + 4 * (c + n1);
    double divf[4];
    for (int q = 0; q < 4; ++q) divf[q] = (fe[q] - fw[q] + fn[q] - fs[q]) * inv_h;

    double divt[2];
    for (int k = 0; k < 2; ++k) {
      const double t0 = (T[4 * a.e + 2 * k] - T[4 * a.w + 2 * k]) * inv_2h;
      double t1;
      if (a.bottom) {
        t1 = (T[4 * a.n + 2 * k + 1] - T[4 * c + 2 * k + 1]) * inv_2h;
      } else if (a.top) {
        t1 = (T[4 * c + 2 * k + 1] - T[4 * a.s + 2 * k + 1]) * inv_2h;
      } else {
        t1 = (T[4 * a.n + 2 * k + 1] - T[4 * a.s + 2 * k + 1]) * inv_2h;
      }
      divt[k] = t0 + t1;
    }

    const double th = xc[3];
    double lap = X[4 * a.e + 3] + X[4 * a.w + 3] - 2.0 * th;
    lap += a.bottom ? 2.0 * (tb[a.i] - th) : X[4 * a.s + 3] - th;
    lap += a.top ? 2.0 * (tt[a.i] - th) : X[4 * a.n + 3] - th;

    const double* tc = T + 4 * c;
    const double* gc = G + 4 * c;
    const double work = tc[0] * gc[0] + tc[1] * gc[1] + tc[2] * gc[2] + tc[3] * gc[3];

    double* rc = r.data() + 4 * c;
    rc[0] = (xc[0] - xo[0]) * inv_dt + divf[0];
    rc[1] = (xc[0] * xc[1] - xo[0] * xo[1]) * inv_dt + divf[1] - divt[0];
    rc[2] = (xc[0] * xc[2] - xo[0] * xo[2]) * inv_dt + divf[2] - divt[1] - xc[0] * p.g;
    rc[3] = cv * ((xc[0] * th - xo[0] * xo[3]) * inv_dt + divf[3]) - p.kappa * lap * inv_h2 - work;
  }
  return bad == 0;
}

void StepKernels::jacobian(const SchemeParams& p, std::span<const double> x, BlockMatrix& jac) const {
  const double h = g_.h();
  const double inv_h = 1.0 / h;
  const double inv_2h = 0.5 / h;
  const double inv_h2 = 1.0 / (h * h);
  const double mu = p.mu;
  const double lam = p.lambda;
  const double kap = p.kappa;
  const double cv = p.law.cv();
  const double ha = std::pow(h, p.alpha);
  const double inv_dt = 1.0 / p.dt;
  const int n2 = g_.n2();
  const auto n = static_cast<ptrdiff_t>(g_.cells());
  const double* X = x.data();

#pragma omp parallel for schedule(static)
  for (ptrdiff_t kc = 0; kc < n; ++kc) {
    const size_t K = static_cast<size_t>(kc);
    const int i = g_.col(K);
    const int j = g_.row(K);
    const std::uint8_t* pos = pos_.data() + 25 * K;
    double buf[13 * 16] = {};
    auto blk = [&](int di, int dj) { return buf + 16 * pos[5 * (dj + 2) + di + 2]; };
    auto val = [&](int di, int dj) { return X + 4 * g_.index(g_.wrap(i + di), j + dj); };
    auto at = [](double* b, int r, int c) -> double& { return b[r * 4 + c]; };
    const double* xk = X + 4 * K;
    double* bk = blk(0, 0);
    const bool bottom = j == 0;
    const bool top = j == n2 - 1;

    at(bk, 0, 0) += inv_dt;
    at(bk, 1, 0) += xk[1] * inv_dt;
    at(bk, 1, 1) += xk[0] * inv_dt;
    at(bk, 2, 0) += xk[2] * inv_dt - p.g;
    at(bk, 2, 2) += xk[0] * inv_dt;
    at(bk, 3, 0) += cv * xk[3] * inv_dt;
    at(bk, 3, 3) += cv * xk[0] * inv_dt;

    // heat conduction
    at(bk, 3, 3) += 2.0 * kap * inv_h2;
    at(blk(1, 0), 3, 3) -= kap * inv_h2;
    at(blk(-1, 0), 3, 3) -= kap * inv_h2;
    if (bottom) {
      at(bk, 3, 3) += 2.0 * kap * inv_h2;
    } else {
      at(bk, 3, 3) += kap * inv_h2;
      at(blk(0, -1), 3, 3) -= kap * inv_h2;
    }
    if (top) {
      at(bk, 3, 3) += 2.0 * kap * inv_h2;
    } else {
      at(bk, 3, 3) += kap * inv_h2;
      at(blk(0, 1), 3, 3) -= kap * inv_h2;
    }

    // convective fluxes through the interior faces of K; s is the outward sign over h
    auto conv = [&](int ldi, int ldj, int rdi, int rdj, int axis, double s) {
      const double* xl = val(ldi, ldj);
      const double* xr = val(rdi, rdj);
      const double v = 0.5 * (xl[1 + axis] + xr[1 + axis]);
      const bool up_left = v >= 0.0;
      const double* xu = up_left ? xl : xr;
      const double rup[4] = {xu[0], xu[0] * xu[1], xu[0] * xu[2], xu[0] * xu[3]};
      const double sc[4] = {s, s, s, s * cv};
      const double dl = (up_left ? v : 0.0) + ha;
      const double dr = (up_left ? 0.0 : v) - ha;
      for (int side = 0; side < 2; ++side) {
        const double* xs = side == 0 ? xl : xr;
        const double d = side == 0 ? dl : dr;
        double* b = side == 0 ? blk(ldi, ldj) : blk(rdi, rdj);
        at(b, 0, 0) += sc[0] * d;
        at(b, 1, 0) += sc[1] * d * xs[1];
        at(b, 1, 1) += sc[1] * d * xs[0];
        at(b, 2, 0) += sc[2] * d * xs[2];
        at(b, 2, 2) += sc[2] * d * xs[0];
        at(b, 3, 0) += sc[3] * d * xs[3];
        at(b, 3, 3) += sc[3] * d * xs[0];
        for (int q = 0; q < 4; ++q) at(b, q, 1 + axis) += sc[q] * rup[q] * 0.5;
      }
    };
    conv(-1, 0, 0, 0, 0, -inv_h);
    conv(0, 0, 1, 0, 0, inv_h);
    if (!bottom) conv(0, -1, 0, 0, 1, -inv_h);
    if (!top) conv(0, 0, 0, 1, 1, inv_h);

    // momentum: -div_h (S - p I)
    Tap dtaps[4];
    div_taps(bottom, top, inv_2h, dtaps);
    for (const Tap& ct : dtaps) {
      const int ax = ct.axis;
      const double* xc = val(ct.di, ct.dj);
      double* bc = blk(ct.di, ct.dj);
      at(bc, 1 + ax, 0) += ct.coef * xc[3];
      at(bc, 1 + ax, 3) += ct.coef * xc[0];
      const int jc = j + ct.dj;
      Tap gtaps[4];
      grad_taps(jc == 0, jc == n2 - 1, inv_2h, gtaps);
      for (const Tap& gt : gtaps) {
        double* bd = blk(ct.di + gt.di, ct.dj + gt.dj);
        const double w = ct.coef * gt.coef;
        const int b = gt.axis;
        // d T_{ka} / d u_l = mu (delta_kl w_a + delta_al w_k) + lambda delta_ka w_l
        for (int k = 0; k < 2; ++k) {
          for (int l = 0; l < 2; ++l) {
            double m = 0.0;
            if (k == l && b == ax) m += mu;
            if (ax == l && b == k) m += mu;
            if (k == ax && b == l) m += lam;
            at(bd, 1 + k, 1 + l) -= w * m;
          }
        }
      }
    }

    // energy: -(S - p I) : grad_h u at K
    Tap ktaps[4];
    grad_taps(bottom, top, inv_2h, ktaps);
    double gk[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (const Tap& t : ktaps) {
      const double* xd = val(t.di, t.dj);
      gk[0][t.axis] += t.coef * xd[1];
      gk[1][t.axis] += t.coef * xd[2];
    }
    const double tr = gk[0][0] + gk[1][1];
    const double pk = xk[0] * xk[3];
    double sk[2][2];
    for (int m = 0; m < 2; ++m) {
      for (int b = 0; b < 2; ++b) sk[m][b] = mu * (gk[m][b] + gk[b][m]) + (m == b ? lam * tr : 0.0);
    }
    for (const Tap& t : ktaps) {
      double* bd = blk(t.di, t.dj);
      for (int m = 0; m < 2; ++m) {
        at(bd, 3, 1 + m) -= t.coef * (2.0 * sk[m][t.axis] - (m == t.axis ? pk : 0.0));
      }
    }
    at(bk, 3, 0) += xk[3] * tr;
    at(bk, 3, 3) += xk[0] * tr;

    const size_t first = jac.row_begin(K);
    const size_t len = jac.row_end(K) - first;
    std::copy(buf, buf + 16 * len, jac.block(first));
  }
}

BlockMatrix StepKernels::make_pattern() const {
  const int n2 = g_.n2();
  std::vector<std::vector<size_t>> cols(g_.cells());
  for (size_t c = 0; c < g_.cells(); ++c) {
    const int i = g_.col(c);
    const int j = g_.row(c);
    auto& row = cols[c];
    for (int dj = -2; dj <= 2; ++dj) {
      const int jj = j + dj;
      if (jj < 0 || jj >= n2) continue;
      const int reach = 2 - std::abs(dj);
      for (int di = -reach; di <= reach; ++di) row.push_back(g_.index(g_.wrap(i + di), jj));
    }
  }
  return BlockMatrix(std::move(cols));
}

}  // namespace nsfv
