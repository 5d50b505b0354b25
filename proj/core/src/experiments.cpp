#include "symplattice/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "symplattice/cumulants.hpp"
#include "symplattice/error.hpp"
#include "symplattice/parallel.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/statistics.hpp"

namespace symplattice {

MvtCalibration calibration_gate(const ChainConfig& cfg, std::uint64_t samples, int threads, double max_abs_z) {
  MvtCalibration c = calibrate_mvt(cfg, DomainSpec(cfg.dim_d, 2.0), samples, threads);
  if (c.degenerate || !(std::abs(c.z_score) <= max_abs_z)) {
    std::ostringstream msg;
    msg << "calibration gate failed: mean count " << c.mean << " vs volume " << c.target_volume << ", z = " << c.z_score
        << " (limit " << max_abs_z << ")";
    throw CalibrationError(msg.str());
  }
  return c;
}

std::vector<std::vector<std::uint64_t>> sample_tile_counts(LatticeSource& source, std::uint64_t samples, int N,
                                                           int threads) {
  const std::vector<Lattice> lats = source.draw(samples);
  std::vector<std::vector<std::uint64_t>> out(lats.size());
  parallel_for(lats.size(), threads, [&](std::size_t i) {
    out[i] = tile_counts(lats[i].basis(), N, 1.0, 2.0);
  });
  return out;
}

// ---- CLT ----

CltReport clt_from_tiles(int d, const std::vector<std::vector<std::uint64_t>>& tiles, const std::vector<int>& N_list,
                         double tile_volume, int bootstrap, std::uint64_t seed) {
  if (N_list.empty()) throw ValidationError("N_list must be nonempty", "N_list");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw ValidationError("N values must be positive", "N_list");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ValidationError("N_list must be increasing", "N_list");
  }
  if (tiles.size() < 2) throw ValidationError("need at least two samples", "samples");
  for (const auto& t : tiles)
    if (t.size() < static_cast<std::size_t>(N_list.back())) throw ValidationError("tile counts too short", "N_list");

  CltReport rep;
  rep.dim_d = d;
  rep.tile_volume = tile_volume;
  rep.exploratory = d < 4;
  for (int N : N_list) {
    const double vol = N * tile_volume;
    std::vector<double> xs(tiles.size());
    for (std::size_t i = 0; i < tiles.size(); ++i) {
      std::uint64_t c = 0;
      for (int m = 0; m < N; ++m) c += tiles[i][static_cast<std::size_t>(m)];
      xs[i] = (static_cast<double>(c) - vol) / std::sqrt(vol);
    }
    const CumulantTable ct = cumulant_table(xs, 4, bootstrap, seed + static_cast<std::uint64_t>(N));
    CltRow row;
    row.N = N;
    row.n = xs.size();
    row.mean = ct.values[0];
    row.var = ct.values[1];
    row.cum3 = ct.values[2];
    row.cum3_se = ct.stderrs[2];
    row.cum4 = ct.values[3];
    row.cum4_se = ct.stderrs[3];
    row.skew = skewness(xs);
    row.exkurt = excess_kurtosis(xs);
    row.ks = row.var > 0 ? ks_normal(xs, 0.0, std::sqrt(row.var)) : 1.0;
    rep.rows.push_back(row);
  }
  return rep;
}

CltReport clt_experiment(const CltConfig& cfg) {
  cfg.sampler.validate();
  if (cfg.samples < 100) throw ValidationError("clt needs at least 100 samples", "samples");
  if (cfg.N_list.empty()) throw ValidationError("N_list must be nonempty", "N_list");
  const MvtCalibration cal = calibration_gate(cfg.sampler, cfg.calibration_samples, cfg.threads);
  auto sampler = make_sampler(cfg.sampler, cfg.threads);
  const int n_max = *std::max_element(cfg.N_list.begin(), cfg.N_list.end());
  const auto tiles = sample_tile_counts(*sampler, cfg.samples, n_max, cfg.threads);
  CltReport rep = clt_from_tiles(cfg.sampler.dim_d, tiles, cfg.N_list, volume(DomainSpec(cfg.sampler.dim_d, 2.0)),
                                 cfg.bootstrap, cfg.sampler.seed);
  rep.calibration = cal;
  rep.calibration.counts.clear();
  return rep;
}

// ---- P_f ----

bool DomainIndicator::operator()(const double* v) const {
  const int d = spec.dim_d;
  double w[16];
  const double up = dilation * std::ldexp(1.0, s), down = dilation * std::ldexp(1.0, -s);
  for (int i = 0; i < d; ++i) {
    w[i] = up * v[i];
    w[i + d] = down * v[i + d];
  }
  return contains_guarded(spec, w).inside;
}

double DomainIndicator::inner_radius() const {
  return std::max(std::ldexp(1.0, s), std::ldexp(spec.product_lo / spec.cutoff_T, -s)) / dilation;
}

double DomainIndicator::outer_radius() const {
  const double hx = std::ldexp(spec.product_hi, -s), hy = std::ldexp(spec.cutoff_T, s);
  return std::sqrt(hx * hx + hy * hy) / dilation;
}

double DomainIndicator::lebesgue() const { return volume(spec) / std::pow(dilation, 2 * spec.dim_d); }

Matrix frame_for(const Vector& u, const Matrix* twist) {
  const std::size_t n = u.size(), d = n / 2;
  if (n == 0 || n % 2) throw ValidationError("frame vector must have even length", "x");
  // k e_{d+1} is (-Im U e_1, Re U e_1), so U e_1 = q - i p for u = (p, q)
  std::vector<Complex> target(d);
  for (std::size_t i = 0; i < d; ++i) target[i] = Complex(u[i + d], -u[i]);
  const double phase = std::arg(target[0]);
  const Complex rot = std::polar(1.0, -phase);
  std::vector<Complex> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = rot * target[i];
  v[0] = Complex(std::abs(target[0]), 0.0);
  // Householder reflection taking e_1 to v (v_0 real), then the phase
  std::vector<Complex> w(v);
  w[0] = 1.0 - v[0];
  for (std::size_t i = 1; i < d; ++i) w[i] = -v[i];
  double ww = 0.0;
  for (const Complex& c : w) ww += std::norm(c);
  ComplexMatrix U = ComplexMatrix::identity(d);
  if (ww > 1e-30)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) U(i, j) -= 2.0 * w[i] * std::conj(w[j]) / ww;
  const Complex ph = std::polar(1.0, phase);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) U(i, j) *= ph;
  const Matrix k = unitary_to_symplectic(U);
  return twist ? k * *twist : k;
}

namespace {

// unit-ball sample in R^m, scaled
void ball_point(Rng& rng, int m, double radius, double* out) {
  double nn = 0.0;
  for (int i = 0; i < m; ++i) {
    out[i] = rng.normal();
    nn += out[i] * out[i];
  }
  const double r = radius * std::pow(rng.uniform_pos(), 1.0 / m) / std::sqrt(nn);
  for (int i = 0; i < m; ++i) out[i] *= r;
}

// f(K (c e_1 + r)) with r uniform in the ball of radius sqrt(R^2 - c^2) inside e_1^perp
struct SliceSampler {
  const DomainIndicator& f;
  const Matrix& K;
  double R;

  double volume_factor(double c) const {
    const int m = 2 * f.spec.dim_d - 1;
    const double rho2 = R * R - c * c;
    return rho2 > 0 ? unit_ball_volume(m) * std::pow(rho2, 0.5 * m) : 0.0;
  }

  // one-point estimate of the slice integral
  double sample(double c, Rng& rng) const {
    const int n = 2 * f.spec.dim_d;
    const double rho2 = R * R - c * c;
    if (rho2 <= 0) return 0.0;
    double r[16], w[16];
    r[0] = c;
    ball_point(rng, n - 1, std::sqrt(rho2), r + 1);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += K(i, j) * r[j];
      w[i] = acc;
    }
    return f(w) ? volume_factor(c) : 0.0;
  }
};

Matrix random_twist(int d, Rng& rng) {
  // unitary fixing e_1: diag(1, Haar U(d-1)), embedded in K
  ComplexMatrix u = ComplexMatrix::identity(static_cast<std::size_t>(d));
  if (d > 1) {
    ComplexMatrix w(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i)
      for (int j = 0; j < d - 1; ++j) {
        const double re = rng.normal();
        w(i, j) = Complex(re, rng.normal());
      }
    orthonormalize_columns(w);
    for (int i = 0; i < d - 1; ++i)
      for (int j = 0; j < d - 1; ++j) u(i + 1, j + 1) = w(i, j);
  }
  return unitary_to_symplectic(u);
}

PTransformResult p_closed(const DomainIndicator& f, const Vector& x, const PTransformConfig& cfg) {
  const int d = f.spec.dim_d;
  const double r = norm(x);
  const double R = f.outer_radius();
  Vector u(x);
  for (double& c : u) c /= r;
  Rng rng(cfg.seed, 0x9f01);
  Matrix twist;
  if (cfg.alternate_frame) twist = random_twist(d, rng);
  const Matrix K = frame_for(u, cfg.alternate_frame ? &twist : nullptr);

  PTransformResult out;
  const long long nmax = static_cast<long long>(std::floor(R / r)) + 1;
  Vector nx(x.size());
  for (long long n = -nmax; n <= nmax; ++n) {
    if (n == 0) continue;
    for (std::size_t i = 0; i < x.size(); ++i) nx[i] = static_cast<double>(n) * x[i];
    if (f(nx.data())) out.line_sum += 1.0;
  }

  const SliceSampler slicer{f, K, R};
  const long long cmax = static_cast<long long>(std::floor(R * r));
  double slices = 0.0, var = 0.0;
  for (long long n = -cmax; n <= cmax; ++n) {
    const double c = static_cast<double>(n) / r;
    const double vol = slicer.volume_factor(c);
    if (vol <= 0) continue;
    std::uint64_t hits = 0;
    for (std::uint64_t k = 0; k < cfg.samples; ++k)
      if (slicer.sample(c, rng) > 0) ++hits;
    const double p = static_cast<double>(hits) / static_cast<double>(cfg.samples);
    slices += vol * p;
    var += vol * vol * p * (1 - p) / static_cast<double>(cfg.samples);
  }
  out.value = out.line_sum + slices / r;
  out.stderr_ = std::sqrt(var) / r;
  return out;
}

// Lattice K P a_y m(A) u_{t,s} Z^4 in the coordinates where e_1 pairs with e_4
// and e_2 with e_3; P maps them to the standard ordering.
PTransformResult p_definitional(const DomainIndicator& f, const Vector& x, const PTransformConfig& cfg) {
  if (f.spec.dim_d != 2) throw ValidationError("definitional P_f mode exists for d = 2 only", "d");
  const double r = norm(x);
  const double y = 1.0 / r;
  Vector u(x);
  for (double& c : u) c /= r;
  const Matrix K = frame_for(u);
  Matrix P(4, 4);
  P(0, 0) = P(1, 1) = P(3, 2) = P(2, 3) = 1.0;
  const Matrix KP = K * P;
  const double R = f.outer_radius();

  ExactModularSampler inner(cfg.seed ^ 0x7e57);
  Rng rng(cfg.seed, 0xdef1);
  std::vector<double> vals;
  vals.reserve(cfg.samples);
  for (std::uint64_t k = 0; k < cfg.samples; ++k) {
    const Matrix A = inner.next().basis();
    const double t2 = rng.uniform(), t3 = rng.uniform(), s = rng.uniform();
    const Matrix uts{{1, 0, 0, 0}, {t2, 1, 0, 0}, {t3, 0, 1, 0}, {s, t3, -t2, 1}};
    Matrix am(4, 4);
    am(0, 0) = y;
    am(3, 3) = 1.0 / y;
    am(1, 1) = A(0, 0);
    am(1, 2) = A(0, 1);
    am(2, 1) = A(1, 0);
    am(2, 2) = A(1, 1);
    const Matrix G = KP * (am * uts);
    BallEnumerator en(G);
    double count = 0.0;
    en.for_each(R, [&](const double* v, const long long*) {
      if (f(v)) count += 1.0;
    });
    vals.push_back(count);
  }
  PTransformResult out;
  out.value = mean(vals);
  out.stderr_ = standard_error(vals);
  return out;
}

}  // namespace

PTransformResult p_transform(const DomainIndicator& f, const Vector& x, const PTransformConfig& cfg) {
  f.spec.validate();
  if (x.size() != static_cast<std::size_t>(2 * f.spec.dim_d)) throw ValidationError("x must have length 2d", "x");
  if (!(norm(x) > 0)) throw ValidationError("P_f is undefined at x = 0", "x");
  if (cfg.samples < 2) throw ValidationError("need at least two Monte Carlo samples", "mc.samples");
  return cfg.mode == PMode::closed_form ? p_closed(f, x, cfg) : p_definitional(f, x, cfg);
}

// ---- second moment ----

namespace {

// {t > 0 : t z in Omega_2} is an interval [a, b]; its length and the number
// of n >= 1 with (n / j) z inside
struct LineInterval {
  double a = 0.0, b = 0.0;
};

LineInterval line_interval(const DomainSpec& spec, const double* z) {
  const int d = spec.dim_d;
  double xx = 0.0, yy = 0.0;
  for (int i = 0; i < d; ++i) {
    xx += z[i] * z[i];
    yy += z[i + d] * z[i + d];
  }
  const double px = std::sqrt(xx), py = std::sqrt(yy);
  LineInterval li;
  if (!(px > 0) || !(py > 0)) return li;
  const double p = px * py;
  li.a = std::max(1.0 / py, std::sqrt(spec.product_lo / p));
  li.b = std::min(spec.cutoff_T / py, std::sqrt(spec.product_hi / p));
  if (li.b < li.a) li.b = li.a;
  return li;
}

std::uint64_t line_hits(const DomainSpec& spec, const double* z, const LineInterval& li, int j) {
  if (li.b <= li.a) return 0;
  const int n2 = 2 * spec.dim_d;
  double w[16];
  auto inside = [&](long long n) {
    const double t = static_cast<double>(n) / j;
    for (int i = 0; i < n2; ++i) w[i] = t * z[i];
    return contains_guarded(spec, w).inside;
  };
  long long lo = std::max(1LL, static_cast<long long>(std::floor(li.a * j)));
  long long hi = static_cast<long long>(std::ceil(li.b * j));
  while (lo <= hi && !inside(lo)) ++lo;
  while (hi >= lo && !inside(hi)) --hi;
  return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
}

// uniform point of Omega_2: log|y| uniform, |x|^d uniform given |y|
void omega_point(const DomainSpec& spec, Rng& rng, double* out) {
  const int d = spec.dim_d;
  const double ry = std::exp(rng.uniform() * std::log(spec.cutoff_T));
  const double l = std::pow(spec.product_lo / ry, d), h = std::pow(spec.product_hi / ry, d);
  const double rx = std::pow(rng.uniform(l, h), 1.0 / d);
  auto sphere = [&](double radius, double* o) {
    double nn = 0.0;
    for (int i = 0; i < d; ++i) {
      o[i] = rng.normal();
      nn += o[i] * o[i];
    }
    const double sc = radius / std::sqrt(nn);
    for (int i = 0; i < d; ++i) o[i] *= sc;
  };
  sphere(rx, out);
  sphere(ry, out + d);
}

}  // namespace

SecondMomentReport second_moment_check(const SecondMomentConfig& cfg) {
  cfg.sampler.validate();
  if (cfg.sampler.dim_d != 2)
    throw ValidationError("second moment check runs at d = 2 (the Siegel transform is not square integrable at d = 1)",
                          "d");
  if (cfg.s < 0) throw ValidationError("s must be non-negative", "s");
  if (cfg.lattice_samples < static_cast<std::uint64_t>(cfg.mom_groups) * 2)
    throw ValidationError("too few lattice samples for median of means", "samples");
  if (cfg.mc_points < 1000) throw ValidationError("mc points must be at least 1000", "mc.points");
  if (cfg.explicit_j < 1) throw ValidationError("explicit_j must be positive", "mc.explicit_j");
  MvtCalibration cal = calibration_gate(cfg.sampler, cfg.calibration_samples, cfg.threads);
  cal.counts.clear();

  const int d = 2;
  const DomainSpec omega2(d, 2.0);
  SecondMomentReport rep;
  rep.calibration = cal;
  rep.zeta_2d = riemann_zeta(2.0 * d);
  rep.explicit_j = cfg.explicit_j;

  // lhs
  auto sampler = make_sampler(cfg.sampler, cfg.threads);
  const auto tiles = sample_tile_counts(*sampler, cfg.lattice_samples, cfg.s + 1, cfg.threads);
  std::vector<double> prods(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i)
    prods[i] = static_cast<double>(tiles[i][0]) * static_cast<double>(tiles[i][static_cast<std::size_t>(cfg.s)]);
  rep.lhs = median_of_means(prods, cfg.mom_groups);
  rep.lhs_mean = mean(prods);
  rep.lhs_stderr = standard_error(prods);

  // rhs = Vol/zeta(2d) E_z[ sum_j j^{-2d} P_f(b^{-s} z / j) ], z uniform on Omega_2
  const DomainIndicator f{omega2, 0, 1.0};
  const double R = f.outer_radius();
  const int J = cfg.explicit_j;
  const double zeta_odd = riemann_zeta(2.0 * d - 1);
  double harmonic = 0.0;
  for (int j = 1; j <= J; ++j) harmonic += std::pow(j, -(2.0 * d - 1));
  const double tail = zeta_odd - harmonic;

  const std::size_t chunks = 64;
  const std::uint64_t total = cfg.mc_points;
  std::vector<std::vector<double>> vals(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    Rng rng(cfg.sampler.seed ^ 0x5ec0, c);
    const std::uint64_t lo = c * total / chunks, hi = (c + 1) * total / chunks;
    double z[4], zp[4];
    for (std::uint64_t k = lo; k < hi; ++k) {
      omega_point(omega2, rng, z);
      for (int i = 0; i < d; ++i) {
        zp[i] = std::ldexp(z[i], -cfg.s);
        zp[i + d] = std::ldexp(z[i + d], cfg.s);
      }
      const double r0 = std::sqrt(zp[0] * zp[0] + zp[1] * zp[1] + zp[2] * zp[2] + zp[3] * zp[3]);
      // lines through the lattice points n x: explicit j <= J, Riemann-sum tail beyond
      const LineInterval li = line_interval(omega2, zp);
      double v = 0.0;
      for (int j = 1; j <= J; ++j) v += 2.0 * static_cast<double>(line_hits(omega2, zp, li, j)) / std::pow(j, 2 * d);
      v += 2.0 * (li.b - li.a) * tail;
      // slices: n = 0 contributes at every j, n != 0 only while n j / r0 <= R
      const Vector uhat{zp[0] / r0, zp[1] / r0, zp[2] / r0, zp[3] / r0};
      const Matrix K = frame_for(uhat);
      const SliceSampler slicer{f, K, R};
      double s0 = 0.0;
      for (int q = 0; q < 4; ++q) s0 += slicer.sample(0.0, rng);
      v += 0.25 * s0 * zeta_odd / r0;
      const int jmax = static_cast<int>(std::floor(R * r0));
      for (int j = 1; j <= jmax; ++j) {
        const long long nmax = static_cast<long long>(std::floor(R * r0 / j));
        double acc = 0.0;
        for (long long n = 1; n <= nmax; ++n) {
          const double cc = static_cast<double>(n) * j / r0;
          acc += slicer.sample(cc, rng) + slicer.sample(-cc, rng);
        }
        v += acc / (std::pow(j, 2 * d - 1) * r0);
      }
      vals[c].push_back(v);
    }
  });
  std::vector<double> all;
  all.reserve(total);
  for (auto& v : vals) all.insert(all.end(), v.begin(), v.end());
  const double scale = volume(omega2) / rep.zeta_2d;
  rep.rhs = scale * mean(all);
  rep.rhs_stderr = scale * standard_error(all);
  rep.relative_error = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
  return rep;
}

// ---- correlation decay ----

DecayReport decay_from_tiles(const std::vector<std::vector<std::uint64_t>>& tiles, int s_max, double tile_volume) {
  if (s_max < 0 || s_max > 8) throw ValidationError("s_max must lie in 0..8", "s_max");
  if (tiles.size() < 2) throw ValidationError("need at least two samples", "samples");
  DecayReport rep;
  rep.samples = tiles.size();
  rep.tile_volume = tile_volume;
  const std::size_t n = tiles.size();
  auto column = [&](int m) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(tiles[i].at(static_cast<std::size_t>(m)));
    return c;
  };
  const std::vector<double> c0 = column(0);
  const double m0 = mean(c0);
  rep.count_variance = variance(c0);
  std::vector<double> xs, ys;
  for (int s = 0; s <= s_max; ++s) {
    const std::vector<double> cs = column(s);
    const double ms = mean(cs);
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = (c0[i] - m0) * (cs[i] - ms);
    DecayRow row;
    row.s = s;
    row.D = std::abs(mean(prod));
    row.stderr_ = standard_error(prod);
    rep.rows.push_back(row);
    if (row.D > 0) {
      xs.push_back(s);
      ys.push_back(std::log(row.D));
    }
  }
  if (xs.size() >= 2) {
    const LinearFit fit = linear_fit(xs, ys);
    rep.rate = fit.slope;
    rep.rate_stderr = fit.slope_stderr;
  } else {
    rep.rate = std::nan("");
  }
  return rep;
}

DecayReport correlation_decay(const DecayConfig& cfg) {
  cfg.sampler.validate();
  if (cfg.s_max < 0 || cfg.s_max > 8) throw ValidationError("s_max must lie in 0..8", "s_max");
  if (cfg.samples < 100) throw ValidationError("decay needs at least 100 samples", "samples");
  MvtCalibration cal = calibration_gate(cfg.sampler, cfg.calibration_samples, cfg.threads);
  cal.counts.clear();
  auto sampler = make_sampler(cfg.sampler, cfg.threads);
  const auto tiles = sample_tile_counts(*sampler, cfg.samples, cfg.s_max + 1, cfg.threads);
  DecayReport rep = decay_from_tiles(tiles, cfg.s_max, volume(DomainSpec(cfg.sampler.dim_d, 2.0)));
  rep.calibration = cal;
  return rep;
}

}  // namespace symplattice
