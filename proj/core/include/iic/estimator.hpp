#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iic/connectivity.hpp"
#include "iic/lattice.hpp"
#include "iic/oracle.hpp"

namespace iic {

/// Binomial counts for one crossing event.
struct ArmStats {
  Color kind = Color::White;
  int k = 0;
  int m = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;

  double p_hat() const;
  /// Wilson 95% half-width.
  double ci_halfwidth() const;
  /// Plain binomial standard error sqrt(p(1-p)/N).
  double stderr_() const;

  ArmStats& operator+=(const ArmStats& other);
};

/// Estimate {Lambda_k <-> dLambda_m} in the colour `kind` from i.i.d.
/// configurations at parameter p. Trial t draws its colours from the stream
/// (seed, stream * 2^32 + t) in sweep order, so results depend on (seed,
/// stream, trials) only.
ArmStats estimate_arm(Color kind, int k, int m, std::uint64_t trials, double p,
                      std::uint64_t seed, std::uint64_t stream = 0, int workers = 1);

enum class TvMode { Exact, Empirical };
const char* to_string(TvMode mode);

/// Region whose marginal is compared.
enum class TvRegion { Ball, Ring1 };
const char* to_string(TvRegion region);
TvRegion region_from_string(std::string_view text);
std::vector<Site> tv_region_sites(TvRegion region, int k);

struct TvReport {
  int k = 0;
  int m = 0;
  int n = 0;
  TvMode mode = TvMode::Exact;
  TvRegion region = TvRegion::Ball;
  double tv = 0.0;
  /// P(Lambda_k <-*> dLambda_m): exact, or estimated in empirical mode.
  double bound = 0.0;
  /// Empirical mode only: samples per measure, and the bound's standard error.
  std::optional<std::uint64_t> samples;
  std::optional<double> bound_sigma;
  std::optional<double> bound_ci;
};

/// Half the L1 distance between the exact region marginals under the arm
/// conditioning at radii m and n. Throws InvariantViolation if tv > bound.
TvReport exact_tv(int k, int m, int n, double p, TvRegion region = TvRegion::Ball);

/// Same comparison from independent rejection samples at radii m and n; the
/// bound is estimated with estimate_arm on `samples` fresh trials.
TvReport empirical_tv(int k, int m, int n, std::uint64_t samples, double p, std::uint64_t seed,
                      TvRegion region = TvRegion::Ball, int workers = 1);

/// Empirical atom counts over `region` from rejection samples at radius n.
std::vector<std::uint64_t> rejection_histogram(std::span<const Site> region, int n,
                                               std::uint64_t samples, double p,
                                               std::uint64_t seed, std::uint64_t stream,
                                               int workers = 1);

/// Half L1 distance between two probability vectors.
double total_variation(std::span<const double> a, std::span<const double> b);
/// Half L1 distance between two count vectors normalised by their totals.
double total_variation_counts(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

struct ScalePoint {
  int m = 0;
  double p_hat = 0.0;
  /// Trials behind p_hat; 0 means unweighted.
  std::uint64_t trials = 0;
};

struct ExponentFit {
  double slope = 0.0;      // of log p_hat against log m
  double intercept = 0.0;
  double exponent = 0.0;   // -slope
  double stderr_ = 0.0;
  std::vector<ScalePoint> points;
};

/// Least squares of log p_hat on log m, weighted by inverse binomial variance
/// of log p_hat when trials are known. Throws DegenerateFit on p_hat == 0 or
/// fewer than two scales.
ExponentFit fit_loglog(std::span<const ScalePoint> points);

/// Dual-arm estimates at every scale (independent trials per scale, p = 1/2)
/// followed by fit_loglog. Needs at least four increasing scales.
ExponentFit fit_exponent(int k, std::span<const int> scales, std::uint64_t trials,
                         std::uint64_t seed, int workers = 1,
                         std::vector<ArmStats>* per_scale = nullptr);

}  // namespace iic
