#include "h1ns/lattice.hpp"

#include "h1ns/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace h1ns {

LatticePoint make_point(std::initializer_list<int> components) {
  if (components.size() < 1 || components.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidArgument("lattice point dimension out of range");
  }
  LatticePoint k(static_cast<Eigen::Index>(components.size()));
  Eigen::Index r = 0;
  for (int c : components) k[r++] = c;
  return k;
}

bool is_zero(const LatticePoint& k) { return (k.array() == 0).all(); }

bool lex_less(const LatticePoint& a, const LatticePoint& b) {
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    if (a[r] != b[r]) return a[r] < b[r];
  }
  return false;
}

bool lex_positive(const LatticePoint& k) {
  for (Eigen::Index r = 0; r < k.size(); ++r) {
    if (k[r] != 0) return k[r] > 0;
  }
  return false;
}

LatticePoint reflect(const LatticePoint& k, int r) {
  if (r < 0 || r >= k.size()) throw InvalidArgument("reflection index out of range");
  LatticePoint out = k;
  out[r] = -out[r];
  return out;
}

LatticePoint permute(const LatticePoint& k, std::span<const int> sigma) {
  const auto d = static_cast<std::size_t>(k.size());
  if (sigma.size() != d) throw InvalidArgument("permutation length differs from dimension");
  std::vector<bool> seen(d, false);
  for (int s : sigma) {
    if (s < 0 || static_cast<std::size_t>(s) >= d || seen[static_cast<std::size_t>(s)]) {
      throw InvalidArgument("invalid permutation");
    }
    seen[static_cast<std::size_t>(s)] = true;
  }
  LatticePoint out(k.size());
  for (std::size_t i = 0; i < d; ++i) out[static_cast<Eigen::Index>(i)] = k[sigma[i]];
  return out;
}

LatticePoint canonicalize(const LatticePoint& k) {
  LatticePoint out = k.cwiseAbs();
  std::sort(out.data(), out.data() + out.size());
  return out;
}

std::vector<LatticePoint> fundamental_domain(int d, int a) {
  if (d < 1 || d > kMaxDim) throw InvalidArgument("dimension out of range");
  if (a < 1) throw InvalidArgument("fundamental domain radius must be >= 1");
  std::vector<LatticePoint> out;
  LatticePoint k = LatticePoint::Zero(d);
  // odometer over nondecreasing tuples
  while (true) {
    if (!is_zero(k)) out.push_back(k);
    int r = d - 1;
    while (r >= 0 && k[r] == a) --r;
    if (r < 0) break;
    const int v = k[r] + 1;
    for (int s = r; s < d; ++s) k[s] = v;
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

ModeSet::ModeSet(int d, int cutoff) : d_(d), cutoff_(cutoff) {
  const int side = 2 * cutoff + 1;
  std::size_t cube = 1;
  for (int r = 0; r < d; ++r) cube *= static_cast<std::size_t>(side);
  const std::int64_t m2 = std::int64_t{cutoff} * cutoff;

  LatticePoint k = LatticePoint::Constant(d, -cutoff);
  for (std::size_t idx = 0; idx < cube; ++idx) {
    const std::int64_t n2 = euclid_sq(k);
    if (n2 > 0 && n2 <= m2) points_.push_back(k);
    for (int r = d - 1; r >= 0; --r) {
      if (++k[r] <= cutoff) break;
      k[r] = -cutoff;
    }
  }
  std::stable_sort(points_.begin(), points_.end(), [](const LatticePoint& a, const LatticePoint& b) {
    const auto na = euclid_sq(a);
    const auto nb = euclid_sq(b);
    return na != nb ? na < nb : lex_less(a, b);
  });

  cube_index_.assign(cube, -1);
  norm_sq_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    norm_sq_[i] = euclid_sq(points_[i]);
    std::size_t lin = 0;
    for (int r = 0; r < d; ++r) lin = lin * static_cast<std::size_t>(side) + static_cast<std::size_t>(points_[i][r] + cutoff);
    cube_index_[lin] = static_cast<std::int32_t>(i);
  }
  conj_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    conj_[i] = static_cast<std::size_t>(find(LatticePoint(-points_[i])));
  }
}

std::ptrdiff_t ModeSet::find(const LatticePoint& k) const {
  if (k.size() != d_) return -1;
  const int side = 2 * cutoff_ + 1;
  std::size_t lin = 0;
  for (int r = 0; r < d_; ++r) {
    if (k[r] < -cutoff_ || k[r] > cutoff_) return -1;
    lin = lin * static_cast<std::size_t>(side) + static_cast<std::size_t>(k[r] + cutoff_);
  }
  return cube_index_[lin];
}

std::shared_ptr<const ModeSet> ModeSet::ball(int d, int cutoff) {
  if (d < 2 || d > kMaxDim) throw InvalidArgument("dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  if (cutoff < 1) throw InvalidArgument("mode cutoff must be >= 1");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ModeSet>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{d, cutoff}];
  if (!slot) slot = std::shared_ptr<const ModeSet>(new ModeSet(d, cutoff));
  return slot;
}

}  // namespace h1ns
