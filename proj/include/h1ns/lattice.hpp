#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace h1ns {

inline constexpr int kMaxDim = 8;

/// Integer wavevector in Z^d (2 <= d <= kMaxDim), stored inline.
using LatticePoint = Eigen::Matrix<int, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

LatticePoint make_point(std::initializer_list<int> components);

inline std::int64_t euclid_sq(const LatticePoint& k) {
  std::int64_t s = 0;
  for (Eigen::Index r = 0; r < k.size(); ++r) s += std::int64_t{k[r]} * k[r];
  return s;
}

inline double euclid(const LatticePoint& k) { return std::sqrt(static_cast<double>(euclid_sq(k))); }

bool is_zero(const LatticePoint& k);

/// Lexicographic order on components.
bool lex_less(const LatticePoint& a, const LatticePoint& b);

/// True for the half of Z^d_0 whose first nonzero component is positive.
bool lex_positive(const LatticePoint& k);

/// R_r: flips the sign of component r (zero based).
LatticePoint reflect(const LatticePoint& k, int r);

/// P_sigma: result_i = k_{sigma(i)}. sigma is zero based and must be a permutation of 0..d-1.
LatticePoint permute(const LatticePoint& k, std::span<const int> sigma);

/// Composite of reflections and a sort: maps k into 0 <= k_1 <= ... <= k_d.
LatticePoint canonicalize(const LatticePoint& k);

/// I(a) = { k != 0 : 0 <= k_1 <= ... <= k_d <= a }, in lexicographic order.
std::vector<LatticePoint> fundamental_domain(int d, int a);

/// The nonzero lattice points of the Euclidean ball |k| <= M, ordered by shell
/// |k|^2 and lexicographically within a shell. Instances are shared and immutable.
class ModeSet {
 public:
  static std::shared_ptr<const ModeSet> ball(int d, int cutoff);

  int dim() const { return d_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return points_.size(); }

  const LatticePoint& point(std::size_t i) const { return points_[i]; }
  std::int64_t norm_sq(std::size_t i) const { return norm_sq_[i]; }
  std::span<const std::int64_t> norms_sq() const { return norm_sq_; }

  /// Index of -point(i).
  std::size_t conjugate(std::size_t i) const { return conj_[i]; }

  /// Index of k, or -1 when k is zero or outside the ball.
  std::ptrdiff_t find(const LatticePoint& k) const;

  bool contains(const LatticePoint& k) const { return find(k) >= 0; }

 private:
  ModeSet(int d, int cutoff);

  int d_;
  int cutoff_;
  std::vector<LatticePoint> points_;
  std::vector<std::int64_t> norm_sq_;
  std::vector<std::size_t> conj_;
  std::vector<std::int32_t> cube_index_;  // (2M+1)^d lookup, -1 outside ball
};

}  // namespace h1ns
