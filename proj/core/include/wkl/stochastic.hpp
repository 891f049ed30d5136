#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace wkl {

// Reproducible stream keyed by (seed, a, b).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

// curves[i][j] is curve i at times[j]; curve 0 is the top one.
struct PathEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> curves;
  bool non_intersecting = false;

  std::size_t size() const { return curves.size(); }
  bool strictly_ordered() const;
};

struct WeylVector {
  std::vector<double> x;
  bool open = true;

  bool valid() const;
};

struct DBMSpec {
  int n = 1;
  std::vector<double> start;  // empty means all zeros
  std::vector<double> times;  // output grid, increasing, > 0
  double dt = 1.0 / 512.0;
  std::uint64_t seed = 0;
};

PathEnsemble sample_dbm_euler(const DBMSpec& spec);
PathEnsemble sample_dbm_matrix(int n, const std::vector<double>& times, std::uint64_t seed);
PathEnsemble time_reverse(const PathEnsemble& paths);

struct Spike {
  double t0 = 0.0;
  double g0 = 0.0;
};

constexpr int kPointsPerUnit = 512;

struct BridgeBoundary {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> x;        // entrance, strictly decreasing
  std::vector<double> y;        // exit, strictly decreasing
  std::vector<double> ceiling;  // empty: +inf; else one value per grid point
  std::vector<double> floor;    // empty: -inf; else one value per grid point
  std::optional<Spike> spike;   // single-point floor for the bottom curve
  int points_per_unit = kPointsPerUnit;
  // Weight each grid interval by the exact probability that the bridges
  // between grid values do not touch. Off: grid-only avoidance.
  bool between_grid = true;

  std::vector<double> grid() const;
  void validate() const;
};

PathEnsemble sample_free_bridges(const BridgeBoundary& bnd, std::uint64_t seed);

struct RejectionResult {
  PathEnsemble paths;
  long attempts = 0;
  double acceptance_rate = 0.0;
};

RejectionResult sample_avoiding_rejection(const BridgeBoundary& bnd, std::uint64_t seed,
                                          long max_attempts = 1000000);

// Fraction of accepted free draws over exactly `attempts` attempts.
struct AcceptanceEstimate {
  double rate = 0.0;
  double se = 0.0;
  long attempts = 0;
};
AcceptanceEstimate estimate_acceptance(const BridgeBoundary& bnd, long attempts, std::uint64_t seed);

struct MCMCOptions {
  int max_window = 0;  // in grid intervals; 0 means one time unit
  long attempt_cap = 200000;
};

PathEnsemble sample_avoiding_mcmc(const BridgeBoundary& bnd, int sweeps, std::uint64_t seed,
                                  MCMCOptions opt = {});

// Continue a chain from an ordered state.
void mcmc_sweeps(const BridgeBoundary& bnd, PathEnsemble& state, int sweeps, std::uint64_t seed,
                 MCMCOptions opt = {});

enum class Sampler { rejection, mcmc };

struct CouplingPoint {
  int curve = 0;
  double time = 0.0;
  double max_excess_se = 0.0;    // max over u of (F_high(u) - F_low(u)) / SE
  double max_dominance_se = 0.0; // max over u of (F_low(u) - F_high(u)) / SE
};

struct CouplingReport {
  std::vector<CouplingPoint> points;
  bool dominance_holds = true;  // no excess beyond 3 SE anywhere
  bool strict_detected = false; // some point shows dominance beyond 3 SE
  int samples = 0;
};

CouplingReport monotone_coupling_check(const BridgeBoundary& low, const BridgeBoundary& high,
                                       int n_samples, std::uint64_t seed,
                                       Sampler sampler = Sampler::rejection, int sweeps = 20);

double modulus_of_continuity(const std::vector<double>& times, const std::vector<double>& curve,
                             double delta);

struct Figure1Config {
  std::vector<double> slopes_right;  // boundary slope of each group at +L
  std::vector<int> sizes_right;
  std::vector<double> slopes_left;   // slope magnitude at -L
  std::vector<int> sizes_left;
  int flat_curves = 2;
  double L = 4.0;
  double spacing = 0.0;  // 0 means 3 sqrt(L)
  int points_per_unit = 64;
  int sweeps = 40;
  std::uint64_t seed = 1;
};

// Groups from the parameters: slope -2/v for each distinct value v.
Figure1Config figure1_config_from(const std::vector<double>& v_right, const std::vector<int>& m_right,
                                  const std::vector<double>& v_left, const std::vector<int>& m_left);
BridgeBoundary figure1_boundary(const Figure1Config& cfg);
PathEnsemble figure1_emulation(const Figure1Config& cfg);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace wkl
