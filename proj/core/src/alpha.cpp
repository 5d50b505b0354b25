#include "symplattice/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "symplattice/error.hpp"
#include "symplattice/integer_symplectic.hpp"
#include "symplattice/parallel.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/statistics.hpp"

namespace symplattice {

double alpha_diag(const Vector& a) {
  if (a.empty()) throw ValidationError("alpha_diag needs at least one entry", "a");
  Vector vals;
  for (double x : a) {
    if (!(x > 0)) throw ValidationError("alpha_diag entries must be positive", "a");
    vals.push_back(x);
    vals.push_back(1.0 / x);
  }
  std::sort(vals.begin(), vals.end());
  double p = 1.0, best = std::numeric_limits<double>::infinity();
  for (double v : vals) {
    p *= v;
    best = std::min(best, p);
  }
  return 1.0 / best;
}

double hermite_power(int r) {
  static const double exact[] = {1.0, 1.0, 4.0 / 3.0, 2.0, 4.0, 8.0, 64.0 / 3.0, 64.0, 256.0};
  if (r < 1) throw ValidationError("rank must be positive");
  if (r <= 8) return exact[r];
  return std::pow(2.0 / std::numbers::pi, r) * std::exp(2.0 * std::lgamma(2.0 + 0.5 * r));
}

double gram_covolume(const std::vector<Vector>& vs) {
  const std::size_t r = vs.size();
  if (r == 0) return 1.0;
  Matrix G(r, r);
  Vector scale(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double nn = norm_sq(vs[i]);
    if (!(nn > 0)) return 0.0;
    scale[i] = 1.0 / std::sqrt(nn);
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) G(i, j) = dot(vs[i], vs[j]) * scale[i] * scale[j];
  // Cholesky of the unit-diagonal Gram matrix
  double logdet = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    double pivot = G(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= G(j, k) * G(j, k);
    if (!(pivot > 1e-14)) return 0.0;
    const double l = std::sqrt(pivot);
    G(j, j) = l;
    logdet += 2.0 * std::log(l);
    for (std::size_t i = j + 1; i < r; ++i) {
      double s = G(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= G(i, k) * G(j, k);
      G(i, j) = s / l;
    }
  }
  double out = std::exp(0.5 * logdet);
  for (double s : scale) out /= s;
  return out;
}

namespace {

using Coeffs = std::vector<long long>;

struct SubResult {
  double covol = std::numeric_limits<double>::infinity();
  std::vector<Coeffs> witness;  // coefficient vectors w.r.t. the basis
};

Coeffs column_coeffs(const std::vector<long long>& transform, std::size_t k, std::size_t j) {
  Coeffs c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = transform[i * k + j];
  return c;
}

Vector combine(const Matrix& basis, const Coeffs& c) {
  Vector v(basis.rows(), 0.0);
  for (std::size_t j = 0; j < basis.cols(); ++j)
    if (c[j] != 0)
      for (std::size_t t = 0; t < basis.rows(); ++t) v[t] += static_cast<double>(c[j]) * basis(t, j);
  return v;
}

long long to_ll(const Integer& x) {
  if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
    throw ResourceError("sublattice coefficients overflowed 64 bits");
  return x.convert_to<long long>();
}

struct Search {
  double cap;
  std::uint64_t budget;
  bool certified = true;

  SubResult min_covolume(const Matrix& basis, int r) {
    const std::size_t k = basis.cols();
    SubResult best;
    if (static_cast<std::size_t>(r) == k) {
      std::vector<Vector> cols(k);
      for (std::size_t j = 0; j < k; ++j) cols[j] = basis.column(j);
      best.covol = gram_covolume(cols);
      for (std::size_t j = 0; j < k; ++j) {
        Coeffs c(k, 0);
        c[j] = 1;
        best.witness.push_back(c);
      }
      return best;
    }

    // start from the first r LLL vectors, a genuine rank-r sublattice
    BallEnumerator en(basis, budget);
    {
      const LllResult full = lll_reduce(basis);
      std::vector<Vector> w;
      for (int j = 0; j < r; ++j) {
        best.witness.push_back(column_coeffs(full.transform, k, j));
        w.push_back(combine(basis, best.witness.back()));
      }
      best.covol = gram_covolume(w);
    }

    const double gr = std::pow(hermite_power(r), 1.0 / r);
    auto bound = [&] { return std::sqrt(gr) * std::pow(best.covol, 1.0 / r); };
    double radius = bound();
    if (radius > cap) {
      certified = false;
      radius = cap;
    }

    struct Cand {
      double norm;
      Coeffs c;
    };
    std::vector<Cand> cands;
    en.for_each(radius, [&](const double* v, const long long* x) {
      double q = 0.0;
      for (std::size_t t = 0; t < en.ambient_dim(); ++t) q += v[t] * v[t];
      if (q > radius * radius) return;
      Coeffs c = en.input_coordinates(x);
      auto nz = std::find_if(c.begin(), c.end(), [](long long t) { return t != 0; });
      if (*nz < 0) return;  // one of each +-v pair
      long long g = 0;
      for (long long t : c) g = std::gcd(g, t < 0 ? -t : t);
      if (g != 1) return;
      cands.push_back({std::sqrt(q), std::move(c)});
    });
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.norm < b.norm || (a.norm == b.norm && a.c < b.c);
    });

    if (r == 1) {
      if (!cands.empty() && cands.front().norm < best.covol * (1 - 1e-12)) {
        best.covol = cands.front().norm;
        best.witness = {cands.front().c};
      }
      return best;
    }

    for (const Cand& cand : cands) {
      if (cand.norm > std::min(bound(), cap) * (1 + 1e-12)) break;
      IntVector ci(k);
      for (std::size_t i = 0; i < k; ++i) ci[i] = cand.c[i];
      const IntMatrix A = unimodular_completion(ci);
      const Matrix BA = basis * A.to_double();
      const Vector v = combine(basis, cand.c);
      const double vv = dot(v, v);
      Matrix proj(basis.rows(), k - 1);
      for (std::size_t j = 1; j < k; ++j) {
        Vector b = BA.column(j);
        const double f = dot(b, v) / vv;
        for (std::size_t t = 0; t < b.size(); ++t) b[t] -= f * v[t];
        proj.set_column(j - 1, b);
      }
      SubResult sub = min_covolume(proj, r - 1);
      const double covol = cand.norm * sub.covol;
      if (covol < best.covol * (1 - 1e-12)) {
        best.covol = covol;
        best.witness = {cand.c};
        for (const Coeffs& z : sub.witness) {
          IntVector full(k);
          for (std::size_t j = 1; j < k; ++j) full[j] = z[j - 1];
          const IntVector lifted = A * full;
          Coeffs c(k);
          for (std::size_t i = 0; i < k; ++i) c[i] = to_ll(lifted[i]);
          best.witness.push_back(std::move(c));
        }
      }
    }
    return best;
  }
};

}  // namespace

AlphaResult alpha_search(const Matrix& basis, double search_radius, std::uint64_t node_budget) {
  if (!(search_radius > 0)) throw ValidationError("search radius must be positive", "radius");
  const std::size_t k = basis.cols();
  Search s{search_radius, node_budget};
  AlphaResult out;
  double best_inv = 0.0;
  for (std::size_t r = 1; r <= k; ++r) {
    SubResult sub = s.min_covolume(basis, static_cast<int>(r));
    std::vector<Vector> w;
    for (const auto& c : sub.witness) w.push_back(combine(basis, c));
    const double covol = gram_covolume(w);
    out.rank_covolumes.push_back(covol);
    if (covol > 0 && 1.0 / covol > best_inv * (1 + 1e-12)) {
      best_inv = 1.0 / covol;
      out.witness_rank = static_cast<int>(r);
      out.witness_vectors = std::move(w);
    }
  }
  out.value = best_inv;
  out.certified = s.certified;
  return out;
}

AlphaResult alpha_search(const Lattice& lat, double search_radius, std::uint64_t node_budget) {
  return alpha_search(lat.basis(), search_radius, node_budget);
}

TailStats alpha_tail_stats(const std::vector<double>& alphas, const std::vector<double>& L_grid, std::uint64_t seed,
                           int bootstrap) {
  if (L_grid.size() < 2) throw ValidationError("L grid needs at least two points", "L_grid");
  for (std::size_t i = 1; i < L_grid.size(); ++i)
    if (!(L_grid[i] > L_grid[i - 1])) throw ValidationError("L grid must be increasing", "L_grid");
  if (!(L_grid.front() > 0) || L_grid.back() < 10.0 * L_grid.front())
    throw ValidationError("L grid must be positive and span at least one decade", "L_grid");
  if (alphas.empty()) throw ValidationError("no alpha samples", "samples");

  TailStats ts;
  ts.samples = alphas.size();
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  auto count_ge = [](const std::vector<double>& s, double L) {
    return static_cast<std::uint64_t>(s.end() - std::lower_bound(s.begin(), s.end(), L));
  };
  const double n = static_cast<double>(alphas.size());
  for (double L : L_grid) {
    TailRow row;
    row.L = L;
    row.hits = count_ge(sorted, L);
    row.survival = row.hits / n;
    const auto [lo, hi] = wilson_interval(row.hits, alphas.size());
    row.ci_lo = lo;
    row.ci_hi = hi;
    ts.rows.push_back(row);
  }
  ts.empty_tail = sorted.back() < L_grid.front();

  auto fit = [&](const std::vector<double>& s, int* points) {
    std::vector<double> xs, ys;
    for (double L : L_grid) {
      const auto h = count_ge(s, L);
      if (h == 0) continue;
      xs.push_back(std::log(L));
      ys.push_back(std::log(h / n));
    }
    if (points) *points = static_cast<int>(xs.size());
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return linear_fit(xs, ys).slope;
  };
  ts.slope = fit(sorted, &ts.fit_points);

  Rng rng(seed, 0x7a11);
  std::vector<double> slopes;
  std::vector<double> re(alphas.size());
  for (int b = 0; b < bootstrap; ++b) {
    for (auto& x : re) x = alphas[rng.below(alphas.size())];
    std::sort(re.begin(), re.end());
    const double s = fit(re, nullptr);
    if (std::isfinite(s)) slopes.push_back(s);
  }
  if (slopes.size() >= 2) {
    ts.slope_ci_lo = quantile(slopes, 0.025);
    ts.slope_ci_hi = quantile(slopes, 0.975);
  } else {
    ts.slope_ci_lo = ts.slope_ci_hi = std::numeric_limits<double>::quiet_NaN();
  }
  return ts;
}

TailStats alpha_tail_stats(LatticeSource& sampler, const std::vector<double>& L_grid, std::uint64_t samples,
                           std::uint64_t seed, int threads, std::vector<double>* alphas_out) {
  const std::vector<Lattice> lats = sampler.draw(samples);
  std::vector<double> alphas(lats.size());
  parallel_for(lats.size(), threads, [&](std::size_t i) {
    alphas[i] = alpha_search(lats[i], std::numeric_limits<double>::infinity()).value;
  });
  if (alphas_out) *alphas_out = alphas;
  return alpha_tail_stats(alphas, L_grid, seed);
}

}  // namespace symplattice
