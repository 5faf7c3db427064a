#include "h1ns/nonlinearity.hpp"

#include "h1ns/errors.hpp"
#include "h1ns/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace h1ns {

namespace {

// Dense (2M+1)^D cube, split real/imaginary, component-major.
struct Cube {
  int m = 0;
  int side = 0;
  std::size_t volume = 0;
  std::vector<double> re;
  std::vector<double> im;

  explicit Cube(const FourierField& f) : m(f.cutoff()), side(2 * m + 1) {
    const int d = f.dim();
    volume = 1;
    for (int r = 0; r < d; ++r) volume *= static_cast<std::size_t>(side);
    const int comps = f.components();
    re.assign(volume * static_cast<std::size_t>(comps), 0.0);
    im.assign(re.size(), 0.0);
    const auto& modes = f.modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::size_t lin = row_start(modes.point(i).data(), d) + static_cast<std::size_t>(modes.point(i)[d - 1] + m);
      for (int j = 0; j < comps; ++j) {
        const Complex z = f.coeffs()(j, static_cast<Eigen::Index>(i));
        re[static_cast<std::size_t>(j) * volume + lin] = z.real();
        im[static_cast<std::size_t>(j) * volume + lin] = z.imag();
      }
    }
  }

  // offset of the row holding every point whose leading d-1 coordinates match h
  std::size_t row_start(const int* h, int d) const {
    std::size_t lin = 0;
    for (int r = 0; r + 1 < d; ++r) lin = lin * static_cast<std::size_t>(side) + static_cast<std::size_t>(h[r] + m);
    return lin * static_cast<std::size_t>(side);
  }
};

std::vector<int> isqrt_table(int m) {
  std::vector<int> t(static_cast<std::size_t>(m) * m + 1);
  int s = 0;
  for (std::size_t x = 0; x < t.size(); ++x) {
    while (static_cast<std::size_t>(s + 1) * (s + 1) <= x) ++s;
    t[x] = s;
  }
  return t;
}

// Number of independent entries of the rank-2 accumulator.
template <int D, bool Sym>
constexpr int kPairs = Sym ? D * (D + 1) / 2 : D * D;

template <int D, bool Sym>
constexpr auto pair_table() {
  std::array<std::array<int, 2>, kPairs<D, Sym>> t{};
  int p = 0;
  for (int r = 0; r < D; ++r) {
    for (int j = Sym ? r : 0; j < D; ++j) t[static_cast<std::size_t>(p++)] = {r, j};
  }
  return t;
}

// Q^j = sum_r k^r T^{rj}, then P_k = -i c Leray(Q).
template <int D, bool Sym>
void finish(const int* k, const double* tr, const double* ti, std::size_t stride, double scale, Complex* out) {
  constexpr auto pairs = pair_table<D, Sym>();
  Complex q[D] = {};
  for (int p = 0; p < kPairs<D, Sym>; ++p) {
    const int r = pairs[static_cast<std::size_t>(p)][0];
    const int j = pairs[static_cast<std::size_t>(p)][1];
    const Complex t(tr[static_cast<std::size_t>(p) * stride], ti[static_cast<std::size_t>(p) * stride]);
    q[j] += static_cast<double>(k[r]) * t;
    if (Sym && r != j) q[r] += static_cast<double>(k[j]) * t;
  }
  Complex kq = 0.0;
  double kk = 0.0;
  for (int r = 0; r < D; ++r) {
    kq += static_cast<double>(k[r]) * q[r];
    kk += static_cast<double>(k[r]) * k[r];
  }
  const Complex minus_i_c(0.0, -scale);
  for (int r = 0; r < D; ++r) out[r] = minus_i_c * (q[r] - (kq / kk) * static_cast<double>(k[r]));
}

// Output rows share their leading D-1 coordinates. For every pair of input
// rows (h, k-h) the 1D convolution along the last axis is accumulated into the
// whole output row at once, T^{rj}_k = sum_h v^r_h w^j_{k-h}.
template <int D, bool Sym>
class RowConvolver {
 public:
  RowConvolver(const FourierField& v, const FourierField& w, int m_out)
      : cv_(v), cw_(w), mo_(std::min(m_out, cv_.m + cw_.m)),
        isq_(isqrt_table(std::max({cv_.m, cw_.m, mo_}))), span_(static_cast<std::size_t>(2 * mo_ + 1)) {}

  int reach() const { return mo_; }
  int half_length(int s) const { return isq_[static_cast<std::size_t>(mo_ * mo_ - s)]; }

  // acc holds P blocks of span() doubles for re and im; index k_last + reach().
  void row(const int* k, double* acc_re, double* acc_im) const {
    constexpr int P = kPairs<D, Sym>;
    constexpr auto pairs = pair_table<D, Sym>();
    int s_out = 0;
    for (int r = 0; r + 1 < D; ++r) s_out += k[r] * k[r];
    const int c = half_length(s_out);
    std::fill(acc_re, acc_re + P * span_, 0.0);
    std::fill(acc_im, acc_im + P * span_, 0.0);

    const int mv = cv_.m;
    const int mw = cw_.m;
    int h[D];
    int g[D];
    auto pair_rows = [&](int sv, int sw) {
      const int a = isq_[static_cast<std::size_t>(mv * mv - sv)];
      const int b = isq_[static_cast<std::size_t>(mw * mw - sw)];
      const std::size_t rv = cv_.row_start(h, D) + static_cast<std::size_t>(mv);
      const std::size_t rw = cw_.row_start(g, D) + static_cast<std::size_t>(mw);
      for (int h3 = -a; h3 <= a; ++h3) {
        const int lo = std::max(h3 - b, -c);
        const int hi = std::min(h3 + b, c);
        if (lo > hi) continue;
        const int len = hi - lo + 1;
        const std::size_t iw = rw + static_cast<std::size_t>(lo - h3);  // offset of g3 = lo - h3
        const std::size_t io = static_cast<std::size_t>(lo + mo_);
        double xr[D];
        double xi[D];
        for (int r = 0; r < D; ++r) {
          const std::size_t iv = static_cast<std::size_t>(r) * cv_.volume + rv + static_cast<std::size_t>(h3);
          xr[r] = cv_.re[iv];
          xi[r] = cv_.im[iv];
        }
        const double* __restrict yr = cw_.re.data() + iw;
        const double* __restrict yi = cw_.im.data() + iw;
        double* __restrict orr = acc_re + io;
        double* __restrict oi = acc_im + io;
        const std::size_t wv = cw_.volume;
        const std::size_t sp = span_;
#pragma omp simd
        for (int t = 0; t < len; ++t) {
#pragma GCC unroll 9
          for (int p = 0; p < P; ++p) {
            const auto r = pairs[static_cast<std::size_t>(p)][0];
            const auto j = static_cast<std::size_t>(pairs[static_cast<std::size_t>(p)][1]);
            const double br = yr[j * wv + t];
            const double bi = yi[j * wv + t];
            orr[static_cast<std::size_t>(p) * sp + t] += xr[r] * br - xi[r] * bi;
            oi[static_cast<std::size_t>(p) * sp + t] += xr[r] * bi + xi[r] * br;
          }
        }
      }
    };

    const int lo1 = std::max(-mv, k[0] - mw);
    const int hi1 = std::min(mv, k[0] + mw);
    for (h[0] = lo1; h[0] <= hi1; ++h[0]) {
      g[0] = k[0] - h[0];
      if constexpr (D == 2) {
        pair_rows(h[0] * h[0], g[0] * g[0]);
      } else {
        static_assert(D == 3);
        const int av = isq_[static_cast<std::size_t>(mv * mv - h[0] * h[0])];
        const int aw = isq_[static_cast<std::size_t>(mw * mw - g[0] * g[0])];
        const int lo2 = std::max(-av, k[1] - aw);
        const int hi2 = std::min(av, k[1] + aw);
        for (h[1] = lo2; h[1] <= hi2; ++h[1]) {
          g[1] = k[1] - h[1];
          pair_rows(h[0] * h[0] + h[1] * h[1], g[0] * g[0] + g[1] * g[1]);
        }
      }
    }
  }

  std::size_t span() const { return span_; }

 private:
  Cube cv_;
  Cube cw_;
  int mo_;
  std::vector<int> isq_;
  std::size_t span_;
};

template <int D, bool Sym>
void convolve_dense(const FourierField& v, const FourierField& w, FourierField& out, bool real) {
  const RowConvolver<D, Sym> conv(v, w, out.cutoff());
  const int mo = conv.reach();
  const double scale = std::pow(2 * std::numbers::pi, -D / 2.0);
  const auto& modes = out.modes();

  // leading coordinates of every output row; with real data only half of them
  std::vector<std::array<int, D - 1>> rows;
  std::array<int, D - 1> lead{};
  auto enumerate = [&](auto&& self, int r, int s) -> void {
    if (r == D - 1) {
      bool keep = true;
      if (real) {
        keep = false;
        bool all_zero = true;
        for (int q = 0; q < D - 1; ++q) {
          if (lead[static_cast<std::size_t>(q)] != 0) {
            keep = lead[static_cast<std::size_t>(q)] > 0;
            all_zero = false;
            break;
          }
        }
        keep = keep || all_zero;
      }
      if (keep) rows.push_back(lead);
      return;
    }
    const int e = conv.half_length(s);
    for (int x = -e; x <= e; ++x) {
      lead[static_cast<std::size_t>(r)] = x;
      self(self, r + 1, s + x * x);
    }
  };
  enumerate(enumerate, 0, 0);

  auto& coeffs = out.coeffs();
  parallel_for(rows.size(), [&](std::size_t n) {
    const auto& lead_n = rows[n];
    int k[D];
    int s = 0;
    for (int r = 0; r + 1 < D; ++r) {
      k[r] = lead_n[static_cast<std::size_t>(r)];
      s += k[r] * k[r];
    }
    constexpr int P = kPairs<D, Sym>;
    std::vector<double> acc_re(P * conv.span());
    std::vector<double> acc_im(P * conv.span());
    conv.row(k, acc_re.data(), acc_im.data());
    const bool origin_row = s == 0;
    const int c = conv.half_length(s);
    LatticePoint kp(D);
    for (int r = 0; r + 1 < D; ++r) kp[r] = k[r];
    for (int k3 = (real && origin_row) ? 1 : -c; k3 <= c; ++k3) {
      if (s == 0 && k3 == 0) continue;
      k[D - 1] = k3;
      kp[D - 1] = k3;
      const auto o = static_cast<std::size_t>(k3 + mo);
      Complex res[D];
      finish<D, Sym>(k, acc_re.data() + o, acc_im.data() + o, conv.span(), scale, res);
      const auto col = modes.find(kp);
      const auto ccol = static_cast<Eigen::Index>(modes.conjugate(static_cast<std::size_t>(col)));
      for (int r = 0; r < D; ++r) {
        coeffs(r, col) = res[r];
        if (real) coeffs(r, ccol) = std::conj(res[r]);
      }
    }
  });
}

// Any dimension: scatter every pair (h, g) into k = h + g.
void convolve_scatter(const FourierField& v, const FourierField& w, FourierField& out) {
  const int d = v.dim();
  const auto& mv = v.modes();
  const auto& mw = w.modes();
  const auto& mo = out.modes();
  CoeffMatrix q = CoeffMatrix::Zero(d, static_cast<Eigen::Index>(mo.size()));
  for (std::size_t a = 0; a < mv.size(); ++a) {
    const auto& h = mv.point(a);
    for (std::size_t b = 0; b < mw.size(); ++b) {
      const LatticePoint k = h + mw.point(b);
      const auto idx = mo.find(k);
      if (idx < 0) continue;
      Complex vk = 0.0;
      for (int r = 0; r < d; ++r) vk += v.coeffs()(r, static_cast<Eigen::Index>(a)) * static_cast<double>(k[r]);
      q.col(idx) += vk * w.coeffs().col(static_cast<Eigen::Index>(b));
    }
  }
  const double scale = std::pow(2 * std::numbers::pi, -d / 2.0);
  for (std::size_t i = 0; i < mo.size(); ++i) {
    const auto& k = mo.point(i);
    const auto col = static_cast<Eigen::Index>(i);
    Complex kq = 0.0;
    for (int r = 0; r < d; ++r) kq += static_cast<double>(k[r]) * q(r, col);
    const double kk = static_cast<double>(mo.norm_sq(i));
    for (int r = 0; r < d; ++r) {
      out.coeffs()(r, col) = Complex(0.0, -scale) * (q(r, col) - (kq / kk) * static_cast<double>(k[r]));
    }
  }
}

void require_divergence_free(const FourierField& v) {
  const auto& modes = v.modes();
  double div = 0.0;
  double grad = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& k = modes.point(i);
    Complex s = 0.0;
    for (int r = 0; r < v.dim(); ++r) s += static_cast<double>(k[r]) * v.coeffs()(r, static_cast<Eigen::Index>(i));
    div += std::norm(s);
    grad += static_cast<double>(modes.norm_sq(i)) * v.coeffs().col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  if (div > 1e-20 * grad) throw InvariantViolation("bilinear_P: first argument is not divergence free");
}

}  // namespace

bool exactly_real(const FourierField& v) {
  const auto& modes = v.modes();
  const auto& c = v.coeffs();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(modes.conjugate(i));
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      if (c(r, j) != std::conj(c(r, static_cast<Eigen::Index>(i)))) return false;
    }
  }
  return true;
}

FourierField bilinear_P(const FourierField& v, const FourierField& w, int m_out) {
  if (v.dim() != w.dim() || v.params().omega != w.params().omega) {
    throw DimensionMismatch("bilinear_P: fields do not share parameters");
  }
  if (!v.is_vector() || !w.is_vector()) throw DimensionMismatch("bilinear_P: vector fields required");
  if (m_out < 1) throw InvalidArgument("bilinear_P: output cutoff must be >= 1");
  require_divergence_free(v);

  FourierField out = FourierField::vector(v.params(), m_out);
  const bool real = exactly_real(v) && exactly_real(w);
  const bool sym = &v == &w || (v.same_layout(w) && v.coeffs() == w.coeffs());
  switch (v.dim()) {
    case 2:
      sym ? convolve_dense<2, true>(v, w, out, real) : convolve_dense<2, false>(v, w, out, real);
      break;
    case 3:
      sym ? convolve_dense<3, true>(v, w, out, real) : convolve_dense<3, false>(v, w, out, real);
      break;
    default:
      convolve_scatter(v, w, out);
  }
  out.mark_solenoidal(true);
  return out;
}

double bilinear_ratio(const FourierField& v, const FourierField& w, double omega) {
  const double den = sobolev_norm(v, 1.0) * sobolev_norm(w, 1.0);
  if (!(den > 0.0)) throw InvalidArgument("bilinear_ratio: both fields must be nonzero");
  return sobolev_norm(bilinear_P(v, w), -omega) / den;
}

FourierField zero_mean_product(const FourierField& z, const FourierField& v) {
  if (z.dim() != v.dim()) throw DimensionMismatch("zero_mean_product: dimensions differ");
  if (z.components() != 1 || v.components() != 1) throw DimensionMismatch("zero_mean_product: scalar fields required");
  FourierField out = FourierField::scalar(z.params(), z.cutoff() + v.cutoff());
  const auto& mz = z.modes();
  const auto& mv = v.modes();
  const auto& mo = out.modes();
  const double scale = std::pow(2 * std::numbers::pi, -z.dim() / 2.0);
  for (std::size_t a = 0; a < mz.size(); ++a) {
    const Complex za = scale * z.coeffs()(0, static_cast<Eigen::Index>(a));
    if (za == 0.0) continue;
    for (std::size_t b = 0; b < mv.size(); ++b) {
      const auto idx = mo.find(mz.point(a) + mv.point(b));
      if (idx >= 0) out.coeffs()(0, idx) += za * v.coeffs()(0, static_cast<Eigen::Index>(b));
    }
  }
  return out;
}

double zero_mean_product_norm(const FourierField& z, const FourierField& v) {
  return sobolev_norm(zero_mean_product(z, v), 0.0);
}

}  // namespace h1ns
