#include "runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "symplattice/alpha.hpp"
#include "symplattice/cumulants.hpp"
#include "symplattice/domain.hpp"
#include "symplattice/error.hpp"
#include "symplattice/experiments.hpp"
#include "symplattice/haar.hpp"
#include "symplattice/lattice.hpp"
#include "symplattice/parallel.hpp"
#include "symplattice/siegel.hpp"
#include "symplattice/symplectic.hpp"

#ifndef SYMPLATTICE_VERSION
#define SYMPLATTICE_VERSION "unknown"
#endif

namespace symplattice::cli {

using nlohmann::json;

namespace {

// What a command hands back: a JSON report, optionally a CSV mirror and, for
// `sample`, a raw stream that replaces the JSON when requested.
struct Output {
  json report = json::object();
  std::string csv;
  std::string raw;
  bool has_raw = false;
  bool binary = false;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Integer& x) {
  if (boost::multiprecision::abs(x) <= std::numeric_limits<long long>::max()) return static_cast<long long>(x);
  return x.str();
}

json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const MvtCalibration& c) {
  return {{"mean", c.mean},       {"stderr", c.stderr_},        {"target_volume", c.target_volume},
          {"z", c.z_score},       {"degenerate", c.degenerate}, {"samples", c.samples}};
}

int read_threads(Config& cfg) {
  const std::int64_t t = cfg.get_int("threads", 0);
  if (t < 0) throw ValidationError("threads must be non-negative", "threads");
  return static_cast<int>(t);
}

ChainConfig read_sampler(Config& cfg, int default_d) {
  ChainConfig c;
  c.dim_d = static_cast<int>(cfg.get_int("d", default_d));
  if (c.dim_d < 1 || c.dim_d > 8) throw ValidationError("d must lie in 1..8", "d");
  c.kind = parse_sampler_kind(cfg.get_string("sampler.kind", "chain"));
  c.step_scale = cfg.get_double("sampler.eps", c.step_scale);
  c.burn_in = static_cast<int>(cfg.get_int("sampler.burn_in", c.burn_in));
  c.gap = static_cast<int>(cfg.get_int("sampler.gap", c.gap));
  c.chains = static_cast<int>(cfg.get_int("sampler.chains", c.chains));
  c.renormalize_every = static_cast<int>(cfg.get_int("sampler.renormalize_every", c.renormalize_every));
  c.seed = cfg.require_uint("seed");
  c.validate();
  return c;
}

json seeds_block(const ChainConfig& c) {
  return {{"seed", c.seed}, {"chains", c.kind == SamplerKind::chain ? c.chains : 1}, {"sampler", to_string(c.kind)}};
}

Matrix read_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lattice file " + path, "lattice");
  try {
    return read_matrix_text(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what(), "lattice");
  }
}

SymplecticMatrix read_symplectic(Config& cfg) {
  const std::string path = cfg.require_string("lattice");
  const double tol = cfg.get_double("symplectic_tol", kSymplecticTol);
  const Matrix m = read_lattice_file(path);
  try {
    return SymplecticMatrix(m, tol);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("lattice: ") + e.what(), "lattice");
  }
}

// T = 2^N when N is given; exactly one of the two may be set
DomainSpec read_domain(Config& cfg, int d, bool& from_N, double default_T) {
  if (cfg.has("T") && cfg.has("N")) throw ValidationError("give either T or N, not both", "N");
  const double lo = cfg.get_double("product_lo", 1.0);
  const double hi = cfg.get_double("product_hi", 2.0);
  from_N = cfg.has("N");
  DomainSpec spec;
  if (from_N) {
    const std::int64_t N = cfg.get_int("N", 1);
    if (N < 1 || N > 1000) throw ValidationError("N must lie in 1..1000", "N");
    spec = domain_pow2(d, static_cast<int>(N), lo, hi);
  } else {
    spec = DomainSpec(d, cfg.get_double("T", default_T), lo, hi);
  }
  spec.validate();
  return spec;
}

Output cmd_sample(Config& cfg, int threads, const std::string& format) {
  const ChainConfig sc = read_sampler(cfg, 1);
  const std::uint64_t n = cfg.get_uint("samples", 10);
  cfg.reject_unused();
  auto sampler = make_sampler(sc, threads);
  const auto lats = sampler->draw(n);
  Output o;
  if (format == "text") {
    std::ostringstream ss;
    ss << std::setprecision(17);
    for (const auto& l : lats) write_matrix_text(ss, l.basis());
    o.raw = ss.str();
    o.has_raw = true;
  } else if (format == "binary") {
    // "SYMPLAT1", int32 d, uint64 count, then each generator row-major as float64
    std::string buf = "SYMPLAT1";
    const std::int32_t d = sc.dim_d;
    buf.append(reinterpret_cast<const char*>(&d), sizeof d);
    const std::uint64_t count = lats.size();
    buf.append(reinterpret_cast<const char*>(&count), sizeof count);
    for (const auto& l : lats)
      for (double x : l.basis().data()) buf.append(reinterpret_cast<const char*>(&x), sizeof x);
    o.raw = std::move(buf);
    o.has_raw = true;
    o.binary = true;
  } else {
    json arr = json::array();
    for (const auto& l : lats) arr.push_back(to_json(l.basis()));
    o.report["lattices"] = arr;
    o.report["seeds"] = seeds_block(sc);
  }
  return o;
}

Output cmd_count(Config& cfg) {
  Matrix basis;
  int d;
  if (cfg.has("lattice")) {
    const SymplecticMatrix g = read_symplectic(cfg);
    d = g.dim_d();
    if (cfg.has("d") && cfg.get_int("d", d) != d) throw ValidationError("d does not match the lattice file", "d");
    basis = g.matrix();
  } else {
    d = static_cast<int>(cfg.get_int("d", 1));
    if (d < 1 || d > 8) throw ValidationError("d must lie in 1..8", "d");
    basis = Matrix::identity(2 * static_cast<std::size_t>(d));
  }
  bool from_N = false;
  const DomainSpec spec = read_domain(cfg, d, from_N, 2.0);
  const std::string mode_s = cfg.get_string("mode", from_N ? "tessellated" : "direct");
  CountMode mode;
  if (mode_s == "direct")
    mode = CountMode::direct;
  else if (mode_s == "tessellated")
    mode = CountMode::tessellated;
  else
    throw ValidationError("mode must be direct or tessellated", "mode");
  const std::uint64_t budget = cfg.get_uint("node_budget", kDefaultNodeBudget);
  cfg.reject_unused();

  const CountResult r = count_points(Lattice(SymplecticMatrix::unchecked(basis)), spec, mode, budget);
  Output o;
  o.report["count"] = r.count;
  o.report["tiles"] = r.tiles;
  o.report["warnings"] = r.warnings;
  o.report["volume"] = volume(spec);
  o.csv = "mode,T,count,warnings\n" + mode_s + "," + fmt(spec.cutoff_T) + "," + std::to_string(r.count) + "," +
          std::to_string(r.warnings) + "\n";
  return o;
}

Output cmd_reduce(Config& cfg) {
  const SymplecticMatrix g = read_symplectic(cfg);
  const std::uint64_t budget = cfg.get_uint("node_budget", kDefaultNodeBudget);
  cfg.reject_unused();
  const SiegelCoordinates sc = siegel_reduce(g, budget);
  Output o;
  o.report["a"] = sc.a;
  o.report["n_max_entry"] = sc.n.assemble().max_abs();
  o.report["m_bound"] = m_bound(g.dim_d());
  o.report["in_siegel_set"] = in_siegel_a(sc.a);
  o.report["gamma"] = to_json(sc.gamma.matrix());
  o.report["k"] = to_json(sc.k.matrix());
  o.report["n"] = to_json(sc.n.assemble());
  o.report["residual"] = relative_residual(sc.reconstruct(), g.matrix());
  return o;
}

Output cmd_decompose(Config& cfg) {
  const SymplecticMatrix g = read_symplectic(cfg);
  const double cond = cfg.get_double("cond_limit", 1e12);
  cfg.reject_unused();
  const IwasawaFactors f = iwasawa_decompose(g, cond);
  Output o;
  o.report["k"] = to_json(f.k.matrix());
  o.report["a"] = f.a;
  o.report["n"] = to_json(f.n.matrix());
  o.report["residual"] = relative_residual(f.reconstruct(), g.matrix());
  return o;
}

Output cmd_alpha(Config& cfg) {
  const SymplecticMatrix g = read_symplectic(cfg);
  const double radius = cfg.get_double("radius", 10.0);
  const std::uint64_t budget = cfg.get_uint("node_budget", kDefaultNodeBudget);
  cfg.reject_unused();
  const AlphaResult r = alpha_search(Lattice(g), radius, budget);
  Output o;
  o.report["value"] = r.value;
  o.report["witness_rank"] = r.witness_rank;
  o.report["witness_vectors"] = r.witness_vectors;
  o.report["certified"] = r.certified;
  o.report["rank_covolumes"] = r.rank_covolumes;
  return o;
}

Output cmd_alpha_tail(Config& cfg, int threads) {
  const ChainConfig sc = read_sampler(cfg, 2);
  const std::uint64_t n = cfg.get_uint("samples", 10000);
  const auto grid = cfg.get_double_list("L_grid", {5, 7.5, 10, 15, 20, 30, 50});
  const std::uint64_t cal_n = cfg.get_uint("calibration_samples", 2000);
  cfg.reject_unused();
  MvtCalibration cal = calibration_gate(sc, cal_n, threads);
  auto sampler = make_sampler(sc, threads);
  const TailStats t = alpha_tail_stats(*sampler, grid, n, sc.seed, threads);
  Output o;
  json rows = json::array();
  o.csv = "L,survival,ci_lo,ci_hi\n";
  for (const auto& r : t.rows) {
    rows.push_back({{"L", r.L}, {"survival", r.survival}, {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi}, {"hits", r.hits}});
    o.csv += fmt(r.L) + "," + fmt(r.survival) + "," + fmt(r.ci_lo) + "," + fmt(r.ci_hi) + "\n";
  }
  o.report["rows"] = rows;
  o.report["slope"] = t.slope;
  o.report["slope_ci"] = {t.slope_ci_lo, t.slope_ci_hi};
  o.report["fit_points"] = t.fit_points;
  o.report["empty_tail"] = t.empty_tail;
  o.report["samples"] = t.samples;
  o.report["warnings"] = t.empty_tail ? json::array({"no sampled lattice reached the smallest L"}) : json::array();
  o.report["calibration"] = to_json(cal);
  o.report["seeds"] = seeds_block(sc);
  return o;
}

Output cmd_volume(Config& cfg) {
  const int d = static_cast<int>(cfg.get_int("d", 1));
  if (d < 1 || d > 8) throw ValidationError("d must lie in 1..8", "d");
  bool from_N = false;
  const DomainSpec spec = read_domain(cfg, d, from_N, 2.0);
  const std::uint64_t mc = cfg.get_uint("mc.samples", 1000000);
  const std::uint64_t seed = cfg.require_uint("seed");
  cfg.reject_unused();
  if (mc < 1000) throw ValidationError("mc.samples must be at least 1000", "mc.samples");
  const double v = volume(spec);
  const McEstimate e = volume_monte_carlo(spec, mc, seed);
  Output o;
  o.report["volume"] = v;
  o.report["monte_carlo"] = {{"estimate", e.estimate},
                             {"stderr", e.stderr_},
                             {"z", (e.estimate - v) / e.stderr_},
                             {"relative_error", std::abs(e.estimate - v) / v}};
  o.report["seeds"] = {{"seed", seed}};
  o.csv = "d,T,volume,mc_estimate,mc_stderr\n" + std::to_string(d) + "," + fmt(spec.cutoff_T) + "," + fmt(v) + "," +
          fmt(e.estimate) + "," + fmt(e.stderr_) + "\n";
  return o;
}

Output cmd_clt(Config& cfg, int threads) {
  CltConfig c;
  c.sampler = read_sampler(cfg, 4);
  c.N_list = cfg.get_int_list("N_list", {64});
  c.samples = cfg.get_uint("samples", c.samples);
  c.calibration_samples = cfg.get_uint("calibration_samples", c.calibration_samples);
  c.bootstrap = static_cast<int>(cfg.get_int("bootstrap", c.bootstrap));
  c.threads = threads;
  cfg.reject_unused();
  const CltReport r = clt_experiment(c);
  Output o;
  json rows = json::array();
  o.csv = "N,mean,var,cum3,cum3_se,cum4,cum4_se,ks,skew,exkurt,n\n";
  for (const auto& w : r.rows) {
    rows.push_back({{"N", w.N},
                    {"mean", w.mean},
                    {"var", w.var},
                    {"cum3", w.cum3},
                    {"cum3_se", w.cum3_se},
                    {"cum4", w.cum4},
                    {"cum4_se", w.cum4_se},
                    {"ks", w.ks},
                    {"skew", w.skew},
                    {"exkurt", w.exkurt},
                    {"n", w.n}});
    o.csv += std::to_string(w.N) + "," + fmt(w.mean) + "," + fmt(w.var) + "," + fmt(w.cum3) + "," + fmt(w.cum3_se) +
             "," + fmt(w.cum4) + "," + fmt(w.cum4_se) + "," + fmt(w.ks) + "," + fmt(w.skew) + "," + fmt(w.exkurt) +
             "," + std::to_string(w.n) + "\n";
  }
  o.report["rows"] = rows;
  o.report["tile_volume"] = r.tile_volume;
  o.report["exploratory"] = r.exploratory;
  o.report["calibration"] = to_json(r.calibration);
  o.report["seeds"] = seeds_block(c.sampler);
  return o;
}

Output cmd_moment2(Config& cfg, int threads) {
  SecondMomentConfig c;
  c.sampler = read_sampler(cfg, 2);
  c.s = static_cast<int>(cfg.get_int("s", 0));
  c.lattice_samples = cfg.get_uint("samples", c.lattice_samples);
  c.mc_points = cfg.get_uint("mc.points", c.mc_points);
  c.explicit_j = static_cast<int>(cfg.get_int("mc.explicit_j", c.explicit_j));
  c.mom_groups = static_cast<int>(cfg.get_int("mc.groups", c.mom_groups));
  c.calibration_samples = cfg.get_uint("calibration_samples", c.calibration_samples);
  c.threads = threads;
  cfg.reject_unused();
  const SecondMomentReport r = second_moment_check(c);
  Output o;
  o.report["lhs"] = r.lhs;
  o.report["lhs_mean"] = r.lhs_mean;
  o.report["lhs_stderr"] = r.lhs_stderr;
  o.report["rhs"] = r.rhs;
  o.report["rhs_stderr"] = r.rhs_stderr;
  o.report["relative_error"] = r.relative_error;
  o.report["zeta_2d"] = r.zeta_2d;
  o.report["explicit_j"] = r.explicit_j;
  o.report["calibration"] = to_json(r.calibration);
  o.report["seeds"] = seeds_block(c.sampler);
  o.csv = "s,lhs,lhs_mean,lhs_stderr,rhs,rhs_stderr,relative_error\n" + std::to_string(c.s) + "," + fmt(r.lhs) + "," +
          fmt(r.lhs_mean) + "," + fmt(r.lhs_stderr) + "," + fmt(r.rhs) + "," + fmt(r.rhs_stderr) + "," +
          fmt(r.relative_error) + "\n";
  return o;
}

Output cmd_decay(Config& cfg, int threads) {
  DecayConfig c;
  c.sampler = read_sampler(cfg, 2);
  c.s_max = static_cast<int>(cfg.get_int("s_max", c.s_max));
  c.samples = cfg.get_uint("samples", c.samples);
  c.calibration_samples = cfg.get_uint("calibration_samples", c.calibration_samples);
  c.threads = threads;
  cfg.reject_unused();
  const DecayReport r = correlation_decay(c);
  Output o;
  json rows = json::array();
  o.csv = "s,D,stderr\n";
  for (const auto& w : r.rows) {
    rows.push_back({{"s", w.s}, {"D", w.D}, {"stderr", w.stderr_}});
    o.csv += std::to_string(w.s) + "," + fmt(w.D) + "," + fmt(w.stderr_) + "\n";
  }
  o.report["rows"] = rows;
  o.report["rate"] = r.rate;
  o.report["rate_stderr"] = r.rate_stderr;
  o.report["tile_volume"] = r.tile_volume;
  o.report["count_variance"] = r.count_variance;
  o.report["samples"] = r.samples;
  o.report["calibration"] = to_json(r.calibration);
  o.report["seeds"] = seeds_block(c.sampler);
  return o;
}

Output cmd_cover_check(Config& cfg) {
  const int r = static_cast<int>(cfg.get_int("r", 3));
  const double gamma = cfg.get_double("gamma", 2.0);
  const int grid = static_cast<int>(cfg.get_int("grid", 30));
  cfg.reject_unused();
  const CoverCertificate c = partition_cover_check(r, gamma, grid);
  Output o;
  o.report["covered"] = c.covered;
  o.report["tuples_checked"] = c.tuples_checked;
  o.report["partitions_enumerated"] = c.partitions_enumerated;
  o.report["in_diagonal"] = c.in_diagonal;
  o.report["per_level"] = c.per_level;
  o.report["counterexample"] = c.counterexample;
  o.report["schedule"] = {{"r", c.schedule.r}, {"alpha", c.schedule.alpha}, {"beta", c.schedule.beta}};
  return o;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& data, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw ValidationError("cannot write " + path, "output");
  f << data;
  if (!f) throw ValidationError("failed writing " + path, "output");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"sample", "count", "reduce",   "decompose", "alpha",      "alpha-tail",
                                                 "volume", "clt",   "moment2", "decay",     "cover-check"};
  return names;
}

int run(const std::string& command, Config& cfg, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  try {
    const std::string output = cfg.get_string("output", "");
    const std::string metadata = cfg.get_string("metadata", output.empty() ? "" : output + ".meta.json");
    const int threads = read_threads(cfg);
    const std::string format = cfg.get_string("format", command == "sample" ? "text" : "json");
    const bool sample_cmd = command == "sample";
    if (format != "json" && format != "csv" && !(sample_cmd && (format == "text" || format == "binary")))
      throw ValidationError("unsupported format '" + format + "' for " + command, "format");

    Output o;
    if (command == "sample")
      o = cmd_sample(cfg, threads, format);
    else if (command == "count")
      o = cmd_count(cfg);
    else if (command == "reduce")
      o = cmd_reduce(cfg);
    else if (command == "decompose")
      o = cmd_decompose(cfg);
    else if (command == "alpha")
      o = cmd_alpha(cfg);
    else if (command == "alpha-tail")
      o = cmd_alpha_tail(cfg, threads);
    else if (command == "volume")
      o = cmd_volume(cfg);
    else if (command == "clt")
      o = cmd_clt(cfg, threads);
    else if (command == "moment2")
      o = cmd_moment2(cfg, threads);
    else if (command == "decay")
      o = cmd_decay(cfg, threads);
    else if (command == "cover-check")
      o = cmd_cover_check(cfg);
    else
      throw ValidationError("unknown command " + command, "command");

    std::string payload;
    if (o.has_raw) {
      payload = o.raw;
    } else if (format == "csv") {
      if (o.csv.empty()) throw ValidationError("command " + command + " has no CSV form", "format");
      payload = o.csv;
    } else {
      json doc = json::object();
      doc["command"] = command;
      // where the report goes and how many threads ran it live in the metadata,
      // so equal seeds give equal bytes
      json config = cfg.resolved();
      for (const char* k : {"output", "metadata", "threads"}) config.erase(k);
      doc["config"] = config;
      for (auto& [k, v] : o.report.items()) doc[k] = v;
      payload = doc.dump(2) + "\n";
    }
    if (output.empty())
      out << payload << std::flush;
    else
      write_file(output, payload, o.binary);

    if (!metadata.empty()) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      const json meta = {{"command", command},
                         {"version", SYMPLATTICE_VERSION},
                         {"started_utc", started_utc},
                         {"elapsed_seconds", elapsed},
                         {"threads", resolve_threads(threads)},
                         {"config", cfg.resolved()},
                         {"report", output}};
      write_file(metadata, meta.dump(2) + "\n", false);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what();
    if (!e.key().empty()) err << " [key: " << e.key() << "]";
    err << "\n";
    return kExitValidation;
  } catch (const ResourceError& e) {
    err << "error: resource budget: " << e.what() << " [key: node_budget]\n";
    return kExitResource;
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << " [key: sampler]\n";
    return kExitCalibration;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace symplattice::cli
