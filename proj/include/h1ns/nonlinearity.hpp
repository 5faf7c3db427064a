#pragma once

#include "h1ns/spectral.hpp"

namespace h1ns {

/// P(v,w) = -Leray(v . grad w) restricted to 0 < |k| <= m_out.
///
/// Direct convolution over stored modes, (2 pi)^{-d/2} applied once.
/// v must be divergence free (checked to 1e-10 relative); w may be any
/// zero-mean field. Conjugate-symmetric inputs give a conjugate-symmetric output.
FourierField bilinear_P(const FourierField& v, const FourierField& w, int m_out);

/// bilinear_P with m_out = cutoff(v) + cutoff(w), so no product mode is lost.
inline FourierField bilinear_P(const FourierField& v, const FourierField& w) {
  return bilinear_P(v, w, v.cutoff() + w.cutoff());
}

/// ||P(v,w)||_{-omega} / (||v||_1 ||w||_1) with an alias-free product.
double bilinear_ratio(const FourierField& v, const FourierField& w, double omega);

/// Scalar product (2 pi)^{-d/2} sum_h z_h v_{k-h} with k = 0 dropped.
FourierField zero_mean_product(const FourierField& z, const FourierField& v);

/// L2 norm of zero_mean_product(z, v).
double zero_mean_product_norm(const FourierField& z, const FourierField& v);

/// True when v_{-k} == conj(v_k) holds exactly for every stored mode.
bool exactly_real(const FourierField& v);

}  // namespace h1ns
