#include "iic/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iic/errors.hpp"
#include "iic/numeric.hpp"
#include "iic/parallel.hpp"
#include "iic/uniform_field.hpp"

namespace iic {

double ArmStats::p_hat() const {
  return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

double ArmStats::ci_halfwidth() const { return wilson_interval(hits, trials).halfwidth(); }

double ArmStats::stderr_() const {
  if (trials == 0) return 0.0;
  const double p = p_hat();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

ArmStats& ArmStats::operator+=(const ArmStats& other) {
  if (other.k != k || other.m != m || other.kind != kind) {
    throw std::invalid_argument("merging statistics of different events");
  }
  trials += other.trials;
  hits += other.hits;
  return *this;
}

ArmStats estimate_arm(Color kind, int k, int m, std::uint64_t trials, double p,
                      std::uint64_t seed, std::uint64_t stream, int workers) {
  if (k < 0 || k > m) throw std::invalid_argument("estimate_arm needs 0 <= k <= m");
  if (trials == 0) throw std::invalid_argument("estimate_arm needs at least one trial");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const RadialSweep prototype(k, m);
  const bool want_black = kind == Color::Black;
  const bool half = p == 0.5;

  auto shard = [&](std::uint64_t begin, std::uint64_t end) {
    RadialSweep sweep = prototype;
    ArmStats s{kind, k, m, 0, 0};
    std::vector<std::uint64_t> raw;
    for (std::uint64_t t = begin; t < end; ++t) {
      // Colours are drawn in sweep order. At p = 1/2 site i takes bit i of
      // the raw stream, so a ring is a shifted copy of stream words.
      StreamRng rng(seed, (stream << 32) + t);
      int reach = 0;
      if (half) {
        raw.clear();
        reach = sweep.reach_bits([&](std::span<std::uint64_t> words, std::size_t from,
                                     std::size_t width) {
          const std::size_t need = (from + width + 63) / 64 + 1;
          while (raw.size() < need) raw.push_back(rng());
          const std::size_t a = from >> 6;
          const unsigned shift = from & 63;
          for (std::size_t o = 0; o < words.size(); ++o) {
            std::uint64_t w = raw[a + o] >> shift;
            if (shift != 0) w |= raw[a + o + 1] << (64 - shift);
            words[o] = want_black ? w : ~w;
          }
          if (width & 63) words.back() &= (std::uint64_t{1} << (width & 63)) - 1;
        });
      } else {
        reach = sweep.reach([&](std::size_t) { return (rng.uniform() < p) == want_black; });
      }
      ++s.trials;
      s.hits += reach >= m;
    }
    return s;
  };
  const auto parts = run_sharded<ArmStats>(trials, 256, workers, shard);
  ArmStats total{kind, k, m, 0, 0};
  for (const auto& part : parts) total += part;
  return total;
}

const char* to_string(TvMode mode) { return mode == TvMode::Exact ? "exact" : "empirical"; }

const char* to_string(TvRegion region) { return region == TvRegion::Ball ? "ball" : "ring1"; }

TvRegion region_from_string(std::string_view text) {
  if (text == "ball") return TvRegion::Ball;
  if (text == "ring1") return TvRegion::Ring1;
  throw std::invalid_argument("unknown region '" + std::string(text) + "'");
}

std::vector<Site> tv_region_sites(TvRegion region, int k) {
  if (region == TvRegion::Ring1) return ring_sites(1);
  const auto ball = shared_ball(k);
  return {ball->sites().begin(), ball->sites().end()};
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tables of different sizes");
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return 0.5 * s.value();
}

double total_variation_counts(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tables of different sizes");
  double na = 0.0;
  double nb = 0.0;
  for (auto v : a) na += static_cast<double>(v);
  for (auto v : b) nb += static_cast<double>(v);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("empty histogram");
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s.add(std::abs(static_cast<double>(a[i]) / na - static_cast<double>(b[i]) / nb));
  }
  return 0.5 * s.value();
}

TvReport exact_tv(int k, int m, int n, double p, TvRegion region) {
  if (k < 0 || k > m || m > n) throw std::invalid_argument("exact_tv needs 0 <= k <= m <= n");
  const auto sites = tv_region_sites(region, k);
  const MarginalTable at_m = exact_conditioned_marginal(sites, m, p);
  const MarginalTable at_n = exact_conditioned_marginal(sites, n, p);
  TvReport r;
  r.k = k;
  r.m = m;
  r.n = n;
  r.mode = TvMode::Exact;
  r.region = region;
  r.tv = total_variation(at_m.probs, at_n.probs);
  r.bound = exact_dual_arm_probability(k, m, p);
  // Both sides are sums of at most 2^19 terms; allow for their rounding.
  if (r.tv > r.bound + 1e-12) {
    throw InvariantViolation("exact total variation " + std::to_string(r.tv) +
                             " exceeds dual-arm bound " + std::to_string(r.bound));
  }
  return r;
}

std::vector<std::uint64_t> rejection_histogram(std::span<const Site> region, int n,
                                               std::uint64_t samples, double p,
                                               std::uint64_t seed, std::uint64_t stream,
                                               int workers) {
  MarginalTable index;
  index.region.assign(region.begin(), region.end());
  std::sort(index.region.begin(), index.region.end());
  for (const Site& s : index.region) {
    if (norm(s) > n) throw std::invalid_argument("histogram region outside Lambda_n");
  }
  const std::size_t atoms = std::size_t{1} << index.region.size();
  auto shard = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> counts(atoms, 0);
    for (std::uint64_t i = begin; i < end; ++i) {
      StreamRng rng(seed, (stream << 32) + i);
      const RejectionSample s = sample_conditioned_rejection(n, p, rng);
      ++counts[index.atom_of(s.config)];
    }
    return counts;
  };
  const auto parts = run_sharded<std::vector<std::uint64_t>>(samples, 4096, workers, shard);
  std::vector<std::uint64_t> total(atoms, 0);
  for (const auto& part : parts) {
    for (std::size_t a = 0; a < atoms; ++a) total[a] += part[a];
  }
  return total;
}

TvReport empirical_tv(int k, int m, int n, std::uint64_t samples, double p, std::uint64_t seed,
                      TvRegion region, int workers) {
  if (k < 0 || k > m || m > n) throw std::invalid_argument("empirical_tv needs 0 <= k <= m <= n");
  if (samples == 0) throw std::invalid_argument("empirical_tv needs samples");
  auto sites = tv_region_sites(region, k);
  // Region sites must exist in both balls.
  for (const Site& s : sites) {
    if (norm(s) > m) throw std::invalid_argument("comparison region not inside Lambda_m");
  }
  const auto at_m = rejection_histogram(sites, m, samples, p, seed, 1, workers);
  const auto at_n = rejection_histogram(sites, n, samples, p, seed, 2, workers);
  const ArmStats bound = estimate_arm(Color::White, k, m, samples, p, seed, 3, workers);
  TvReport r;
  r.k = k;
  r.m = m;
  r.n = n;
  r.mode = TvMode::Empirical;
  r.region = region;
  r.tv = total_variation_counts(at_m, at_n);
  r.bound = bound.p_hat();
  r.samples = samples;
  r.bound_sigma = bound.stderr_();
  r.bound_ci = bound.ci_halfwidth();
  return r;
}

ExponentFit fit_loglog(std::span<const ScalePoint> points) {
  if (points.size() < 2) throw DegenerateFit("need at least two scales");
  ExponentFit fit;
  fit.points.assign(points.begin(), points.end());
  double sw = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys, ws;
  for (const ScalePoint& pt : points) {
    if (!(pt.p_hat > 0.0)) {
      throw DegenerateFit("zero estimate at scale " + std::to_string(pt.m));
    }
    if (pt.m <= 0) throw DegenerateFit("non-positive scale");
    const double x = std::log(static_cast<double>(pt.m));
    const double y = std::log(pt.p_hat);
    double w = 1.0;
    if (pt.trials > 0) {
      // Delta method, Var(log p_hat) = (1 - p) / (N p), with p shrunk by half
      // a count so that p_hat == 1 keeps a finite weight.
      const double n = static_cast<double>(pt.trials);
      const double shrunk = (pt.p_hat * n + 0.5) / (n + 1.0);
      w = n * shrunk / (1.0 - shrunk);
    }
    xs.push_back(x);
    ys.push_back(y);
    ws.push_back(w);
    sw += w;
    sx += w * x;
    sy += w * y;
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
    sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) throw DegenerateFit("scales do not vary");
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.exponent = -fit.slope;
  const bool weighted = std::all_of(points.begin(), points.end(),
                                    [](const ScalePoint& pt) { return pt.trials > 0; });
  if (weighted) {
    fit.stderr_ = std::sqrt(1.0 / sxx);
  } else if (xs.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      rss += ws[i] * r * r;
    }
    fit.stderr_ = std::sqrt(rss / static_cast<double>(xs.size() - 2) / sxx);
  }
  return fit;
}

ExponentFit fit_exponent(int k, std::span<const int> scales, std::uint64_t trials,
                         std::uint64_t seed, int workers, std::vector<ArmStats>* per_scale) {
  if (scales.size() < 4) throw std::invalid_argument("exponent fit needs at least four scales");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (scales[i] <= scales[i - 1]) throw std::invalid_argument("scales must increase");
  }
  if (scales.front() < k) throw std::invalid_argument("scales must be >= k");
  std::vector<ScalePoint> points;
  std::vector<ArmStats> stats;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const ArmStats s = estimate_arm(Color::White, k, scales[i], trials, 0.5, seed,
                                    static_cast<std::uint64_t>(scales[i]), workers);
    stats.push_back(s);
    points.push_back(ScalePoint{scales[i], s.p_hat(), s.trials});
  }
  if (per_scale) *per_scale = stats;
  return fit_loglog(points);
}

}  // namespace iic
