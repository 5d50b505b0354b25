#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symplattice/domain.hpp"
#include "symplattice/error.hpp"
#include "symplattice/matrix.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice {

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000ULL;

enum class Exactness { exact_integer, floating };

// Lambda = g Z^{2d}
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(SymplecticMatrix g, Exactness e = Exactness::floating)
      : g_(std::move(g)), exactness_(e) {}
  static Lattice standard(int d);

  int dim_d() const { return g_.dim_d(); }
  const SymplecticMatrix& generator() const { return g_; }
  const Matrix& basis() const { return g_.matrix(); }
  Exactness exactness() const { return exactness_; }

 private:
  SymplecticMatrix g_;
  Exactness exactness_ = Exactness::floating;
};

// A stream of lattices, e.g. a sampler. Calls come from one thread at a time.
class LatticeSource {
 public:
  virtual ~LatticeSource() = default;
  virtual int dim_d() const = 0;
  virtual std::vector<Lattice> draw(std::size_t count) = 0;
};

// Columns of `basis` reduced with the Lovasz condition `delta`.
// reduced = basis * transform (transform is k x k, row-major, unimodular).
struct LllResult {
  Matrix basis;
  std::vector<long long> transform;
};

LllResult lll_reduce(const Matrix& basis, double delta = 0.99);

// Enumerates nonzero vectors of the lattice spanned by the columns of a
// basis inside a ball, after LLL, by depth-first search over the
// Gram-Schmidt profile. Both v and -v are reported.
class BallEnumerator {
 public:
  explicit BallEnumerator(const Matrix& basis, std::uint64_t node_budget = kDefaultNodeBudget);

  std::size_t ambient_dim() const { return n_; }
  std::size_t rank() const { return k_; }
  const Matrix& reduced_basis() const { return reduced_; }
  // coefficients w.r.t. the input basis of the vector with reduced coefficients x
  std::vector<long long> input_coordinates(const long long* x) const;
  // squared length of the first reduced vector
  double first_norm_sq() const { return bs_[0]; }
  std::uint64_t nodes_visited() const { return nodes_; }

  // visit(const double* v, const long long* x) for each nonzero v = R x with |v| <= radius
  template <class F>
  void for_each(double radius, F&& visit);

 private:
  template <class F>
  void descend(int i, bool top_zero, F& visit);
  void emit_vector(double* out, bool negate) const;

  std::size_t n_ = 0, k_ = 0;
  Matrix reduced_;
  std::vector<long long> transform_;
  std::vector<Vector> cols_;
  std::vector<Vector> mu_;  // mu_[i][j], j < i
  Vector bs_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  double r2_ = 0.0;
  std::vector<long long> x_;
  Vector partial_;
  Vector v_;
  std::vector<long long> xneg_;
};

template <class F>
void BallEnumerator::for_each(double radius, F&& visit) {
  if (!(radius > 0) || !std::isfinite(radius)) throw ValidationError("enumeration radius must be positive", "radius");
  // slack so that float error in the profile never drops a boundary point;
  // callers filter on the exact predicate
  r2_ = radius * radius * (1.0 + 1e-9) + 1e-300;
  nodes_ = 0;
  x_.assign(k_, 0);
  partial_.assign(k_ + 1, 0.0);
  descend(static_cast<int>(k_) - 1, true, visit);
}

template <class F>
void BallEnumerator::descend(int i, bool top_zero, F& visit) {
  double c = 0.0;
  for (std::size_t j = i + 1; j < k_; ++j) c -= mu_[j][i] * x_[j];
  const double rem = r2_ - partial_[i + 1];
  if (rem < 0) return;
  const double r = std::sqrt(rem / bs_[i]);
  long long lo = static_cast<long long>(std::ceil(c - r));
  const long long hi = static_cast<long long>(std::floor(c + r));
  if (top_zero) lo = std::max(lo, 0LL);
  for (long long xi = lo; xi <= hi; ++xi) {
    if (++nodes_ > budget_)
      throw ResourceError("enumeration node budget of " + std::to_string(budget_) + " nodes exceeded");
    const double diff = static_cast<double>(xi) - c;
    const double l = partial_[i + 1] + diff * diff * bs_[i];
    if (l > r2_) continue;
    x_[i] = xi;
    partial_[i] = l;
    if (i == 0) {
      if (top_zero && xi == 0) continue;
      emit_vector(v_.data(), false);
      visit(static_cast<const double*>(v_.data()), static_cast<const long long*>(x_.data()));
      for (std::size_t j = 0; j < k_; ++j) xneg_[j] = -x_[j];
      for (std::size_t j = 0; j < n_; ++j) v_[j] = -v_[j];
      visit(static_cast<const double*>(v_.data()), static_cast<const long long*>(xneg_.data()));
    } else {
      descend(i - 1, top_zero && xi == 0, visit);
    }
  }
  x_[i] = 0;
}

// Exactly { v in Lambda \ {0} : |v| <= radius }, sorted by norm then lexicographically.
std::vector<Vector> enumerate_in_ball(const Lattice& lat, double radius,
                                      std::uint64_t node_budget = kDefaultNodeBudget);
std::vector<Vector> enumerate_in_ball(const Matrix& basis, double radius,
                                      std::uint64_t node_budget = kDefaultNodeBudget);

struct ShortestVector {
  Vector v;
  std::vector<long long> coeffs;  // w.r.t. the input basis
  double norm = 0.0;
};

// Exact shortest vector. Among ties the coefficient vector whose first
// nonzero entry is positive and which is lexicographically largest wins, so
// e_1 is preferred on the standard lattice.
ShortestVector shortest_vector(const Matrix& basis, std::uint64_t node_budget = kDefaultNodeBudget);

enum class CountMode { direct, tessellated };

struct CountResult {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> tiles;  // tessellated mode only
  std::uint64_t warnings = 0;        // boundary-ambiguity hits
};

CountResult count_points(const Lattice& lat, const DomainSpec& spec, CountMode mode,
                         std::uint64_t node_budget = kDefaultNodeBudget);

// #(b^m Lambda ∩ Omega_2) for m = 0..N-1, re-reducing the basis per tile.
std::vector<std::uint64_t> tile_counts(const Matrix& basis, int N, double lo, double hi,
                                       std::uint64_t* warnings = nullptr,
                                       std::uint64_t node_budget = kDefaultNodeBudget);

// A bounded function with declared support radius.
struct SupportedFunction {
  std::function<double(const double*)> f;
  double radius = 0.0;
};

double siegel_transform(const Lattice& lat, const SupportedFunction& f,
                        std::uint64_t node_budget = kDefaultNodeBudget);
double siegel_transform(const Matrix& basis, const SupportedFunction& f,
                        std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace symplattice
