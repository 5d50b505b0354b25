#include "symplattice/lattice.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace symplattice {

Lattice Lattice::standard(int d) {
  return Lattice(SymplecticMatrix(Matrix::identity(2 * d)), Exactness::exact_integer);
}

namespace {

long long checked_sub_mul(long long a, long long q, long long b) {
  long long p, r;
  if (__builtin_mul_overflow(q, b, &p) || __builtin_sub_overflow(a, p, &r))
    throw ResourceError("basis transform overflowed 64-bit coefficients");
  return r;
}

}  // namespace

LllResult lll_reduce(const Matrix& basis, double delta) {
  const std::size_t n = basis.rows(), k = basis.cols();
  if (k == 0) throw ValidationError("empty basis");
  if (!(delta > 0.25 && delta < 1.0)) throw ValidationError("LLL delta must lie in (1/4, 1)", "delta");

  std::vector<Vector> v(k);
  for (std::size_t j = 0; j < k; ++j) v[j] = basis.column(j);
  std::vector<long long> u(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) u[i * k + i] = 1;

  std::vector<Vector> bstar(k, Vector(n));
  std::vector<Vector> mu(k, Vector(k, 0.0));
  Vector bs(k, 0.0);

  auto gs_row = [&](std::size_t i) {
    bstar[i] = v[i];
    for (std::size_t j = 0; j < i; ++j) {
      mu[i][j] = dot(v[i], bstar[j]) / bs[j];
      for (std::size_t t = 0; t < n; ++t) bstar[i][t] -= mu[i][j] * bstar[j][t];
    }
    bs[i] = norm_sq(bstar[i]);
    if (!(bs[i] > 1e-300)) throw DegeneracyError("linearly dependent basis vectors in LLL");
  };

  // returns true when a large multiple was subtracted, after which the row
  // is recomputed from the vectors to shed accumulated error
  auto size_reduce = [&](std::size_t i) {
    bool large = false;
    for (std::size_t jj = i; jj-- > 0;) {
      if (std::abs(mu[i][jj]) <= 0.5) continue;
      const double qd = std::round(mu[i][jj]);
      if (std::abs(qd) > 9e15) throw ResourceError("LLL size reduction coefficient out of range");
      const long long q = static_cast<long long>(qd);
      if (std::abs(qd) > 1e6) large = true;
      for (std::size_t t = 0; t < n; ++t) v[i][t] -= qd * v[jj][t];
      for (std::size_t t = 0; t < k; ++t) u[t * k + i] = checked_sub_mul(u[t * k + i], q, u[t * k + jj]);
      for (std::size_t l = 0; l < jj; ++l) mu[i][l] -= qd * mu[jj][l];
      mu[i][jj] -= qd;
    }
    return large;
  };

  gs_row(0);
  std::size_t i = 1;
  std::uint64_t guard = 0;
  while (i < k) {
    if (++guard > 10'000'000) throw ResourceError("LLL did not terminate");
    gs_row(i);
    for (int pass = 0; pass < 8; ++pass) {
      const bool large = size_reduce(i);
      if (!large) break;
      gs_row(i);
    }
    bool ok = true;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(mu[i][j]) > 0.51) ok = false;
    if (!ok) {
      gs_row(i);
      size_reduce(i);
    }
    const double m = mu[i][i - 1];
    if (bs[i] >= (delta - m * m) * bs[i - 1]) {
      ++i;
    } else {
      std::swap(v[i], v[i - 1]);
      for (std::size_t t = 0; t < k; ++t) std::swap(u[t * k + i], u[t * k + i - 1]);
      gs_row(i - 1);
      i = std::max<std::size_t>(i - 1, 1);
    }
  }
  LllResult r{Matrix(n, k), std::move(u)};
  for (std::size_t j = 0; j < k; ++j) r.basis.set_column(j, v[j]);
  return r;
}

BallEnumerator::BallEnumerator(const Matrix& basis, std::uint64_t node_budget)
    : n_(basis.rows()), k_(basis.cols()), budget_(node_budget) {
  LllResult red = lll_reduce(basis);
  reduced_ = std::move(red.basis);
  transform_ = std::move(red.transform);
  cols_.resize(k_);
  for (std::size_t j = 0; j < k_; ++j) cols_[j] = reduced_.column(j);
  mu_.assign(k_, Vector(k_, 0.0));
  bs_.assign(k_, 0.0);
  std::vector<Vector> bstar(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    bstar[i] = cols_[i];
    for (std::size_t j = 0; j < i; ++j) {
      mu_[i][j] = dot(cols_[i], bstar[j]) / bs_[j];
      for (std::size_t t = 0; t < n_; ++t) bstar[i][t] -= mu_[i][j] * bstar[j][t];
    }
    bs_[i] = norm_sq(bstar[i]);
  }
  v_.assign(n_, 0.0);
  xneg_.assign(k_, 0);
}

void BallEnumerator::emit_vector(double* out, bool negate) const {
  for (std::size_t t = 0; t < n_; ++t) out[t] = 0.0;
  for (std::size_t j = 0; j < k_; ++j) {
    const long long xj = x_[j];
    if (xj == 0) continue;
    const double c = negate ? -static_cast<double>(xj) : static_cast<double>(xj);
    for (std::size_t t = 0; t < n_; ++t) out[t] += c * cols_[j][t];
  }
}

std::vector<long long> BallEnumerator::input_coordinates(const long long* x) const {
  std::vector<long long> c(k_, 0);
  for (std::size_t i = 0; i < k_; ++i) {
    long long s = 0;
    for (std::size_t j = 0; j < k_; ++j) s = checked_sub_mul(s, -transform_[i * k_ + j], x[j]);
    c[i] = s;
  }
  return c;
}

std::vector<Vector> enumerate_in_ball(const Matrix& basis, double radius, std::uint64_t node_budget) {
  BallEnumerator en(basis, node_budget);
  std::vector<std::pair<double, Vector>> found;
  const double r2 = radius * radius;
  en.for_each(radius, [&](const double* v, const long long*) {
    Vector w(v, v + en.ambient_dim());
    const double q = norm_sq(w);
    if (q <= r2) found.emplace_back(q, std::move(w));
  });
  std::sort(found.begin(), found.end());
  std::vector<Vector> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

std::vector<Vector> enumerate_in_ball(const Lattice& lat, double radius, std::uint64_t node_budget) {
  return enumerate_in_ball(lat.basis(), radius, node_budget);
}

ShortestVector shortest_vector(const Matrix& basis, std::uint64_t node_budget) {
  BallEnumerator en(basis, node_budget);
  const double radius = std::sqrt(en.first_norm_sq());
  struct Candidate {
    double q;
    std::vector<long long> x;
  };
  std::vector<Candidate> cands;
  double best = en.first_norm_sq() * (1.0 + 1e-9);
  en.for_each(radius, [&](const double* v, const long long* x) {
    double q = 0.0;
    for (std::size_t t = 0; t < en.ambient_dim(); ++t) q += v[t] * v[t];
    if (q > best * (1.0 + 1e-12)) return;
    best = std::min(best, q);
    cands.push_back({q, std::vector<long long>(x, x + en.rank())});
  });
  ShortestVector sv;
  bool have = false;
  for (const auto& c : cands) {
    if (c.q > best * (1.0 + 1e-12)) continue;
    std::vector<long long> coeffs = en.input_coordinates(c.x.data());
    auto nz = std::find_if(coeffs.begin(), coeffs.end(), [](long long t) { return t != 0; });
    if (nz == coeffs.end() || *nz < 0) continue;
    if (!have || coeffs > sv.coeffs) {
      sv.coeffs = std::move(coeffs);
      have = true;
    }
  }
  if (!have) throw DegeneracyError("shortest vector search found nothing");
  sv.v.assign(basis.rows(), 0.0);
  for (std::size_t j = 0; j < basis.cols(); ++j)
    for (std::size_t t = 0; t < basis.rows(); ++t) sv.v[t] += static_cast<double>(sv.coeffs[j]) * basis(t, j);
  sv.norm = norm(sv.v);
  return sv;
}

namespace {

double tile_radius_sq(double hi) {
  // over 1 <= |y| < 2 with |x| <= hi/|y|, |x|^2 + |y|^2 peaks at an endpoint
  return std::max(hi * hi + 1.0, hi * hi / 4.0 + 4.0);
}

int exact_log2(double T) {
  int e;
  const double m = std::frexp(T, &e);
  if (m != 0.5) return -1;
  return e - 1;
}

CountResult count_direct(const Matrix& B, const DomainSpec& spec, std::uint64_t budget) {
  const std::size_t n = B.rows(), d = n / 2;
  const double hi = spec.product_hi, T = spec.cutoff_T;
  CountResult res;
  Matrix scaled(n, n);
  Vector v(n);
  // y-bands [y0, y1) with ratio 3; each band is enumerated after the
  // rescaling diag(s, 1/s) that makes its bounding region round
  for (double y0 = 1.0; y0 < T; y0 *= 3.0) {
    const double y1 = std::min(3.0 * y0, T);
    const double s = std::sqrt(y0 * y1 / hi);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scaled(i, j) = (i < d ? s : 1.0 / s) * B(i, j);
    const double r2 = std::max(s * s * hi * hi / (y0 * y0) + y0 * y0 / (s * s),
                               s * s * hi * hi / (y1 * y1) + y1 * y1 / (s * s));
    const double y0sq = y0 * y0, y1sq = y1 * y1;
    BallEnumerator en(scaled, budget);
    en.for_each(std::sqrt(r2), [&](const double*, const long long* x) {
      const std::vector<long long> c = en.input_coordinates(x);
      for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += B(t, j) * static_cast<double>(c[j]);
        v[t] = acc;
      }
      double yy = 0.0;
      for (std::size_t t = d; t < n; ++t) yy += v[t] * v[t];
      if (yy < y0sq || yy >= y1sq) return;
      const GuardedMembership g = contains_guarded(spec, v.data());
      if (g.ambiguous) ++res.warnings;
      if (g.inside) ++res.count;
    });
  }
  return res;
}

}  // namespace

namespace {

// b^m amplifies rounding in the x rows by 2^m and any symplectic defect by
// up to 4^m, so the tile recursion carries its basis in 256-bit floats.
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
                                           boost::multiprecision::et_off>;
using WideMatrix = std::vector<Wide>;  // n x n row-major

WideMatrix wide_mul(const WideMatrix& a, const WideMatrix& b, std::size_t n) {
  WideMatrix c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i * n + k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    }
  return c;
}

// Newton steps g <- g (I + J E / 2), E = g^T J g - J, which converge
// quadratically to an exactly (to working precision) symplectic matrix.
void symplectify(WideMatrix& g, std::size_t n) {
  const std::size_t d = n / 2;
  const Wide target = boost::multiprecision::ldexp(Wide(1), -230);
  for (int iter = 0; iter < 12; ++iter) {
    WideMatrix jg(n * n);  // J g
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        jg[i * n + j] = g[(i + d) * n + j];
        jg[(i + d) * n + j] = -g[i * n + j];
      }
    WideMatrix gt(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gt[i * n + j] = g[j * n + i];
    WideMatrix e = wide_mul(gt, jg, n);
    Wide defect = 0;
    for (std::size_t i = 0; i < d; ++i) {
      e[i * n + i + d] -= 1;
      e[(i + d) * n + i] += 1;
    }
    for (const Wide& x : e) defect = std::max(defect, abs(x));
    if (defect <= target) return;
    WideMatrix corr(n * n);  // I + J E / 2
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        corr[i * n + j] = e[(i + d) * n + j] / 2;
        corr[(i + d) * n + j] = -e[i * n + j] / 2;
      }
    for (std::size_t i = 0; i < n; ++i) corr[i * n + i] += 1;
    g = wide_mul(g, corr, n);
  }
}

}  // namespace

std::vector<std::uint64_t> tile_counts(const Matrix& basis, int N, double lo, double hi, std::uint64_t* warnings,
                                       std::uint64_t node_budget) {
  if (N < 1) throw ValidationError("tile count N must be positive", "N");
  const std::size_t n = basis.rows(), d = n / 2;
  if (basis.cols() != n || n == 0 || n % 2) throw ValidationError("tile counting needs a square 2d x 2d basis", "lattice");
  const DomainSpec omega2(static_cast<int>(d), 2.0, lo, hi);
  const double radius = std::sqrt(tile_radius_sq(hi));
  std::vector<std::uint64_t> tiles(N, 0);

  WideMatrix W(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) W[i * n + j] = basis(i, j);
  // only worth it once 4^N would lift the double-precision defect into view
  if (N > 8 && is_symplectic(basis, 1e-6)) symplectify(W, n);

  Matrix B(n, n);
  WideMatrix T(n * n);
  for (int m = 0; m < N; ++m) {
    for (std::size_t i = 0; i < n * n; ++i) B(i / n, i % n) = static_cast<double>(W[i]);
    // reduce in double, then apply the integer transform in wide precision
    const LllResult red = lll_reduce(B);
    for (std::size_t i = 0; i < n * n; ++i) T[i] = red.transform[i];
    W = wide_mul(W, T, n);
    for (std::size_t i = 0; i < n * n; ++i) B(i / n, i % n) = static_cast<double>(W[i]);

    BallEnumerator en(B, node_budget);
    std::uint64_t hits = 0;
    en.for_each(radius, [&](const double* v, const long long*) {
      const GuardedMembership g = contains_guarded(omega2, v);
      if (g.ambiguous && warnings) ++*warnings;
      if (g.inside) ++hits;
    });
    tiles[m] = hits;
    // next tile is b times this basis; scaling by powers of two is exact
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) W[i * n + j] = boost::multiprecision::ldexp(W[i * n + j], i < d ? 1 : -1);
  }
  return tiles;
}

CountResult count_points(const Lattice& lat, const DomainSpec& spec, CountMode mode, std::uint64_t node_budget) {
  spec.validate();
  if (spec.dim_d != lat.dim_d()) throw ValidationError("domain and lattice dimensions differ", "d");
  if (mode == CountMode::direct) return count_direct(lat.basis(), spec, node_budget);
  const int N = exact_log2(spec.cutoff_T);
  if (N < 1) throw ValidationError("tessellated counting needs T = 2^N with N >= 1", "T");
  CountResult res;
  res.tiles = tile_counts(lat.basis(), N, spec.product_lo, spec.product_hi, &res.warnings, node_budget);
  for (auto t : res.tiles) res.count += t;
  return res;
}

double siegel_transform(const Matrix& basis, const SupportedFunction& f, std::uint64_t node_budget) {
  if (!(f.radius > 0)) throw ValidationError("support radius must be positive", "radius");
  BallEnumerator en(basis, node_budget);
  const double r2 = f.radius * f.radius;
  double sum = 0.0;
  en.for_each(f.radius, [&](const double* v, const long long*) {
    double q = 0.0;
    for (std::size_t t = 0; t < en.ambient_dim(); ++t) q += v[t] * v[t];
    if (q <= r2) sum += f.f(v);
  });
  return sum;
}

double siegel_transform(const Lattice& lat, const SupportedFunction& f, std::uint64_t node_budget) {
  return siegel_transform(lat.basis(), f, node_budget);
}

}  // namespace symplattice
