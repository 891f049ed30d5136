#include "wkl/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wkl/errors.hpp"
#include "wkl/fredholm.hpp"
#include "wkl/kernels.hpp"
#include "wkl/params.hpp"
#include "wkl/stochastic.hpp"
#include "wkl/svg.hpp"
#include "wkl/verify.hpp"

namespace wkl::cli {
namespace {

using json = nlohmann::ordered_json;

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) {
    auto b = cur.find_first_not_of(" \t\r");
    auto e = cur.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "bad number '" + s + "' for " + what);
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  f << text;
}

std::string paths_csv(const PathEnsemble& p) {
  std::string s = "curve_index,time,value\n";
  for (std::size_t i = 0; i < p.curves.size(); ++i)
    for (std::size_t j = 0; j < p.times.size(); ++j)
      s += fmt::format("{},{},{}\n", i, g17(p.times[j]), g17(p.curves[i][j]));
  return s;
}

// Flag value if given, else the params-file key, else the default.
template <class T>
T pick(const std::optional<T>& flag, const RunConfig& cfg, const std::string& key, T fallback) {
  if (flag) return *flag;
  auto it = cfg.file_keys.find(key);
  if (it == cfg.file_keys.end()) return fallback;
  const double v = to_double(it->second, key);
  if constexpr (std::is_integral_v<T>) {
    if (v != std::floor(v) || v < 0) throw Error(ErrorCode::ConfigError, key + " must be a nonnegative integer");
  }
  return static_cast<T>(v);
}

KernelNumerics numerics(const RunConfig& cfg) {
  KernelNumerics num;
  num.radius = pick(cfg.radius, cfg, "radius", num.radius);
  num.panels = pick(cfg.panels, cfg, "panels", num.panels);
  num.order = pick(cfg.order, cfg, "order", num.order);
  if (num.panels < 1 || num.order < 2) throw Error(ErrorCode::ConfigError, "panels >= 1 and order >= 2 required");
  return num;
}

WandererParams params_of(const RunConfig& cfg, bool required) {
  if (cfg.params_path.empty()) {
    if (required) throw Error(ErrorCode::ConfigError, "--params is required");
    return {};
  }
  return params_from_config(cfg.file_keys);
}

struct KernelArgs {
  std::string family;
  std::string points;
  double rho = 0.0;
  double T = 0.0;
  int n = 1;
};

int kernel_eval(const RunConfig& cfg, const KernelArgs& ka, std::ostream& out) {
  const Family fam = parse_family(ka.family);
  const KernelNumerics num = numerics(cfg);
  ExtendedKernel K = ExtendedKernel::airy(num);
  switch (fam) {
    case Family::airy: break;
    case Family::abc: K = ExtendedKernel::abc(params_of(cfg, false), num); break;
    case Family::dbm: K = ExtendedKernel::dbm(ka.n, num); break;
    case Family::flat:
      if (!(ka.T > 0.0)) throw Error(ErrorCode::ConfigError, "--T > 0 is required for the flat family");
      K = ExtendedKernel::flat(params_of(cfg, true), ka.T, num);
      break;
    case Family::sloped: {
      if (!(ka.T > 0.0)) throw Error(ErrorCode::ConfigError, "--T > 0 is required for the sloped family");
      auto p = params_of(cfg, true);
      double rho = ka.rho;
      if (rho == 0.0) {
        auto m = multiplicities(p);
        if (m.v_a.empty()) throw Error(ErrorCode::ConfigError, "--rho is required when a_plus is zero");
        rho = m.v_a.front();
      }
      K = ExtendedKernel::sloped(p, rho, ka.T, num);
      break;
    }
  }

  std::ifstream in(ka.points);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + ka.points);
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::EmptyData, "empty points file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split(header, ',');
  int idx[4] = {-1, -1, -1, -1};
  const char* names[4] = {"t1", "x1", "t2", "x2"};
  for (int c = 0; c < 4; ++c) {
    auto it = std::find(cols.begin(), cols.end(), names[c]);
    if (it == cols.end()) throw Error(ErrorCode::ConfigError, std::string("points file lacks column ") + names[c]);
    idx[c] = static_cast<int>(it - cols.begin());
  }
  std::string text = header + ",value\n";
  std::string line;
  long rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw Error(ErrorCode::ConfigError, "ragged row: " + line);
    KernelQuery q{to_double(f[idx[0]], "t1"), to_double(f[idx[1]], "x1"), to_double(f[idx[2]], "t2"),
                  to_double(f[idx[3]], "x2")};
    text += line + "," + g17(K(q)) + "\n";
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::EmptyData, "no points");
  emit(cfg.out, text, out);
  if (!cfg.out.empty() && cfg.out != "-")
    out << fmt::format("kernel eval: {} points, family {}\n", rows, family_name(fam));
  return 0;
}

struct CdfArgs {
  std::string grid;
  double t = 0.0;
};

int cdf(const RunConfig& cfg, const CdfArgs& ca, bool bbp, std::ostream& out) {
  const auto grid = parse_grid(ca.grid);
  const int nodes = pick(cfg.nodes, cfg, "nodes", kDefaultNodes);
  if (nodes < 4) throw Error(ErrorCode::ConfigError, "nodes must be at least 4");
  const KernelNumerics num = numerics(cfg);
  ExtendedKernel K = bbp ? ExtendedKernel::abc(params_of(cfg, true), num) : ExtendedKernel::airy(num);
  const double t = bbp ? ca.t : 0.0;

  std::vector<double> F(grid.size()), err(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto e = gap_probability_estimate(K, {{t}, {grid[i]}}, nodes);
    F[i] = std::clamp(e.value, 0.0, 1.0);
    err[i] = e.error;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < F.size(); ++i) monotone = monotone && F[i] >= F[i - 1];
  const double max_err = grid.empty() ? 0.0 : *std::max_element(err.begin(), err.end());

  std::string text = "A,F\n";
  for (std::size_t i = 0; i < grid.size(); ++i) text += g17(grid[i]) + "," + g17(F[i]) + "\n";
  emit(cfg.out, text, out);

  if (!cfg.json.empty()) {
    json j;
    j["kind"] = bbp ? "bbp" : "tw2";
    if (bbp) j["t"] = t;
    j["nodes"] = nodes;
    j["monotone"] = monotone;
    j["max_error"] = max_err;
    for (std::size_t i = 0; i < grid.size(); ++i) j["rows"].push_back({{"A", grid[i]}, {"F", F[i]}, {"error", err[i]}});
    emit(cfg.json, j.dump(2) + "\n", out);
  }
  if (!cfg.svg.empty()) {
    SvgStyle st;
    st.title = bbp ? "BBP distribution" : "Tracy-Widom GUE";
    st.x_label = "A";
    st.y_label = "F(A)";
    emit(cfg.svg, render_svg(Table{grid, {F}, {"F"}}, st), out);
  }
  if (!cfg.out.empty() && cfg.out != "-")
    out << fmt::format("cdf {}: {} points, max error {:.3g}, monotone {}\n", bbp ? "bbp" : "tw2", grid.size(),
                       max_err, monotone ? "yes" : "no");
  return 0;
}

void write_paths(const RunConfig& cfg, const PathEnsemble& p, const std::string& title, std::ostream& out) {
  emit(cfg.out, paths_csv(p), out);
  if (!cfg.svg.empty()) {
    SvgStyle st;
    st.title = title;
    emit(cfg.svg, render_svg(p, st), out);
  }
  if (!cfg.out.empty() && cfg.out != "-")
    out << fmt::format("simulate {}: {} curves, {} times, strictly ordered {}\n", title, p.size(), p.times.size(),
                       p.strictly_ordered() ? "yes" : "no");
}

struct DbmArgs {
  int n = 2;
  std::string times = "0.05:1:0.05";
  std::string method = "euler";
  std::vector<double> start;
};

int simulate_dbm(const RunConfig& cfg, const DbmArgs& da, std::ostream& out) {
  const auto seed = pick(cfg.seed, cfg, "seed", kDefaultSeed);
  const auto times = parse_grid(da.times);
  PathEnsemble p;
  if (da.method == "matrix") {
    if (!da.start.empty()) throw Error(ErrorCode::ConfigError, "the matrix method starts at zero");
    p = sample_dbm_matrix(da.n, times, seed);
  } else if (da.method == "euler") {
    DBMSpec spec;
    spec.n = da.n;
    spec.start = da.start;
    spec.times = times;
    spec.dt = pick(cfg.dt, cfg, "dt", spec.dt);
    spec.seed = seed;
    p = sample_dbm_euler(spec);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown method " + da.method);
  }
  write_paths(cfg, p, "dbm", out);
  return 0;
}

struct BridgeArgs {
  std::vector<double> x, y;
  double a = 0.0, b = 1.0;
  int ppu = kPointsPerUnit;
  std::string method = "rejection";
  std::optional<double> ceiling, floor;
  std::vector<double> spike;
  long max_attempts = 1000000;
};

int simulate_bridges(const RunConfig& cfg, const BridgeArgs& ba, std::ostream& out) {
  const auto seed = pick(cfg.seed, cfg, "seed", kDefaultSeed);
  BridgeBoundary bnd;
  bnd.a = ba.a;
  bnd.b = ba.b;
  bnd.x = ba.x;
  bnd.y = ba.y;
  bnd.points_per_unit = ba.ppu;
  const std::size_t g = bnd.grid().size();
  if (ba.ceiling) bnd.ceiling.assign(g, *ba.ceiling);
  if (ba.floor) bnd.floor.assign(g, *ba.floor);
  if (!ba.spike.empty()) {
    if (ba.spike.size() != 2) throw Error(ErrorCode::ConfigError, "--spike takes t0,g0");
    bnd.spike = Spike{ba.spike[0], ba.spike[1]};
  }
  bnd.validate();
  PathEnsemble p;
  if (ba.method == "rejection") {
    p = sample_avoiding_rejection(bnd, seed, ba.max_attempts).paths;
  } else if (ba.method == "mcmc") {
    p = sample_avoiding_mcmc(bnd, pick(cfg.sweeps, cfg, "sweeps", 200), seed);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown method " + ba.method);
  }
  write_paths(cfg, p, "bridges", out);
  return 0;
}

struct FigureArgs {
  double L = 4.0;
  int flat = 2;
  int ppu = 64;
};

int simulate_figure1(const RunConfig& cfg, const FigureArgs& fa, std::ostream& out) {
  const auto p = params_of(cfg, true);
  const auto m = multiplicities(p);
  Figure1Config fc = figure1_config_from(m.v_a, m.m_a, m.v_b, m.m_b);
  fc.L = fa.L;
  fc.flat_curves = fa.flat;
  fc.points_per_unit = fa.ppu;
  fc.sweeps = pick(cfg.sweeps, cfg, "sweeps", fc.sweeps);
  fc.seed = pick(cfg.seed, cfg, "seed", kDefaultSeed);
  write_paths(cfg, figure1_emulation(fc), "figure1", out);
  return 0;
}

int verify(const RunConfig& cfg, const std::string& what, bool probe, std::ostream& out) {
  const auto p = params_of(cfg, true);
  VerifyOptions opt;
  opt.probe = probe;
  opt.seed = pick(cfg.seed, cfg, "seed", kDefaultSeed);
  opt.tail_rel_tol = pick(cfg.tail_tol, cfg, "tail_tol", opt.tail_rel_tol);
  opt.decay_ratio = pick(cfg.decay_ratio, cfg, "decay_ratio", opt.decay_ratio);
  const auto rep = run_verify(what, p, opt);
  if (!cfg.json.empty()) emit(cfg.json, report_json(rep, p, opt).dump(2) + "\n", out);
  if (!cfg.csv.empty()) emit(cfg.csv, report_csv(rep), out);

  int n_pass = 0, n_skip = 0;
  std::string failed;
  for (const auto& c : rep.checks) {
    if (c.status == CheckStatus::pass) ++n_pass;
    if (c.status == CheckStatus::skipped) ++n_skip;
    if (c.status == CheckStatus::fail) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  out << fmt::format("verify {}: {} ({} pass, {} skipped{})\n", what, rep.pass() ? "PASS" : "FAIL", n_pass, n_skip,
                     failed.empty() ? "" : "; failed: " + failed);
  return rep.pass() ? 0 : 1;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() != 3) throw Error(ErrorCode::ConfigError, "grid must be a:b:step, got '" + text + "'");
  const double a = to_double(f[0], "grid"), b = to_double(f[1], "grid"), h = to_double(f[2], "grid");
  if (!(h > 0.0) || !(b >= a)) throw Error(ErrorCode::ConfigError, "grid needs step > 0 and b >= a");
  const long n = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
  if (n > 10000000) throw Error(ErrorCode::ConfigError, "grid too large");
  std::vector<double> g(n);
  for (long i = 0; i < n; ++i) g[i] = a + static_cast<double>(i) * h;
  return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Airy wanderer kernels, gap probabilities, samplers and limit checks", "wkl"};
  app.require_subcommand(1);

  RunConfig cfg;
  double radius = 0, dt = 0, tail_tol = 0, decay_ratio = 0;
  int panels = 0, order = 0, nodes = 0, sweeps = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<CLI::Option*, std::function<void()>>> overrides;

  auto add_params = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--params", cfg.params_path, "key = value parameter file");
    if (required) o->required();
  };
  auto add_numerics = [&](CLI::App* s) {
    overrides.emplace_back(s->add_option("--radius", radius, "contour truncation radius (0: adaptive)"),
                           [&] { cfg.radius = radius; });
    overrides.emplace_back(s->add_option("--panels", panels, "panels per contour ray"), [&] { cfg.panels = panels; });
    overrides.emplace_back(s->add_option("--order", order, "Gauss-Legendre order per panel"),
                           [&] { cfg.order = order; });
  };
  auto add_seed = [&](CLI::App* s) {
    overrides.emplace_back(s->add_option("--seed", seed, fmt::format("RNG seed (default {})", kDefaultSeed)),
                           [&] { cfg.seed = seed; });
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", cfg.out, "output CSV (default stdout)"); };

  std::function<int()> action;

  // kernel eval
  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "kernel evaluation")->require_subcommand(1);
  auto* keval = kernel->add_subcommand("eval", "evaluate a kernel at the rows of a t1,x1,t2,x2 CSV");
  keval->add_option("--family", ka.family, "abc, sloped, flat, dbm or airy")->required();
  keval->add_option("--points", ka.points, "CSV with columns t1,x1,t2,x2")->required()->check(CLI::ExistingFile);
  keval->add_option("--rho", ka.rho, "sloped: group value (default v_1)");
  keval->add_option("--T", ka.T, "sloped/flat: the large parameter");
  keval->add_option("--n", ka.n, "dbm: number of paths");
  add_params(keval, false);
  add_numerics(keval);
  add_out(keval);
  keval->callback([&] { action = [&] { return kernel_eval(cfg, ka, out); }; });

  // cdf tw2 | bbp
  CdfArgs ca;
  auto* cdfc = app.add_subcommand("cdf", "one-point distribution functions")->require_subcommand(1);
  for (const char* name : {"tw2", "bbp"}) {
    const bool bbp = std::string(name) == "bbp";
    auto* s = cdfc->add_subcommand(name, bbp ? "top curve of the wanderer ensemble at time t" : "Tracy-Widom GUE");
    s->add_option("--grid", ca.grid, "a:b:step")->required();
    overrides.emplace_back(s->add_option("--nodes", nodes, "Nystrom nodes per time"), [&] { cfg.nodes = nodes; });
    if (bbp) {
      add_params(s, true);
      s->add_option("--t", ca.t, "time");
    }
    add_numerics(s);
    add_out(s);
    s->add_option("--json", cfg.json, "JSON summary with error estimates");
    s->add_option("--svg", cfg.svg, "SVG plot");
    s->callback([&, bbp] { action = [&, bbp] { return cdf(cfg, ca, bbp, out); }; });
  }

  // simulate dbm | bridges | figure1
  auto* sim = app.add_subcommand("simulate", "path samplers")->require_subcommand(1);
  DbmArgs da;
  auto* sdbm = sim->add_subcommand("dbm", "Dyson Brownian motion, beta = 2");
  sdbm->add_option("--n", da.n, "number of paths");
  sdbm->add_option("--times", da.times, "output times a:b:step, a > 0");
  sdbm->add_option("--method", da.method, "euler or matrix")->check(CLI::IsMember({"euler", "matrix"}));
  sdbm->add_option("--start", da.start, "starting points, decreasing")->delimiter(',');
  overrides.emplace_back(sdbm->add_option("--dt", dt, "Euler step"), [&] { cfg.dt = dt; });
  sdbm->callback([&] { action = [&] { return simulate_dbm(cfg, da, out); }; });

  BridgeArgs ba;
  double ceiling = 0, floor_v = 0;
  auto* sbr = sim->add_subcommand("bridges", "avoiding Brownian bridges");
  sbr->add_option("--x", ba.x, "entrance values, decreasing")->delimiter(',')->required();
  sbr->add_option("--y", ba.y, "exit values, decreasing")->delimiter(',')->required();
  sbr->add_option("--a", ba.a, "left end");
  sbr->add_option("--b", ba.b, "right end");
  sbr->add_option("--ppu", ba.ppu, "grid points per unit time");
  sbr->add_option("--method", ba.method, "rejection or mcmc")->check(CLI::IsMember({"rejection", "mcmc"}));
  auto* oc = sbr->add_option("--ceiling", ceiling, "constant ceiling");
  auto* of = sbr->add_option("--floor", floor_v, "constant floor");
  sbr->add_option("--spike", ba.spike, "t0,g0")->delimiter(',');
  sbr->add_option("--max-attempts", ba.max_attempts, "rejection attempt cap");
  overrides.emplace_back(sbr->add_option("--sweeps", sweeps, "MCMC sweeps"), [&] { cfg.sweeps = sweeps; });
  sbr->callback([&] {
    if (oc->count()) ba.ceiling = ceiling;
    if (of->count()) ba.floor = floor_v;
    action = [&] { return simulate_bridges(cfg, ba, out); };
  });

  FigureArgs fa;
  auto* sfig = sim->add_subcommand("figure1", "qualitative line-ensemble picture from the slopes");
  add_params(sfig, true);
  sfig->add_option("--L", fa.L, "half width");
  sfig->add_option("--flat", fa.flat, "number of trailing flat curves");
  sfig->add_option("--ppu", fa.ppu, "grid points per unit time");
  overrides.emplace_back(sfig->add_option("--sweeps", sweeps, "MCMC sweeps"), [&] { cfg.sweeps = sweeps; });
  sfig->callback([&] { action = [&] { return simulate_figure1(cfg, fa, out); }; });

  for (auto* s : {sdbm, sbr, sfig}) {
    add_seed(s);
    add_out(s);
    s->add_option("--svg", cfg.svg, "SVG plot");
  }

  // verify
  auto* ver = app.add_subcommand("verify", "finite-T checks of the limit statements")->require_subcommand(1);
  std::string what;
  bool probe = false;
  for (const char* name : {"sweep-dbm", "sweep-flat", "residues", "tail-count", "symmetry", "all"}) {
    auto* s = ver->add_subcommand(name);
    add_params(s, true);
    add_seed(s);
    s->add_option("--json", cfg.json, "JSON report");
    s->add_option("--csv", cfg.csv, "sweep CSV");
    s->add_flag("--probe", probe, "run sweeps outside their hypotheses, asserting nothing");
    overrides.emplace_back(s->add_option("--tail-tol", tail_tol, "relative tolerance of the tail identities"),
                           [&] { cfg.tail_tol = tail_tol; });
    overrides.emplace_back(s->add_option("--decay-ratio", decay_ratio, "residue shrink factor per doubling"),
                           [&] { cfg.decay_ratio = decay_ratio; });
    s->callback([&, name] {
      what = name;
      action = [&] { return verify(cfg, what, probe, out); };
    });
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "wkl: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 2;
  }

  try {
    for (auto& [opt, set] : overrides)
      if (opt->count()) set();
    if (!cfg.params_path.empty()) {
      std::ifstream in(cfg.params_path);
      if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + cfg.params_path);
      cfg.file_keys = parse_key_values(in);
    }
    if (!action) throw Error(ErrorCode::ConfigError, "no command");
    return action();
  } catch (const Error& e) {
    err << "wkl: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "wkl: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace wkl::cli
