#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "iic/coupling.hpp"
#include "iic/errors.hpp"
#include "iic/estimator.hpp"
#include "iic/markov_check.hpp"
#include "iic/numeric.hpp"
#include "iic/oracle.hpp"
#include "iic/parallel.hpp"
#include "report.hpp"

namespace iic::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kMarkovTolerance = 1e-12;
constexpr double kLawTolerance = 0.005;
constexpr double kRateSigmas = 4.0;

/// Flags shared by every experiment command.
struct Common {
  std::uint64_t seed = 1;
  double p = 0.5;
  std::string out = "csv";
  std::string out_dir = ".";
};

struct Replicas {
  std::uint64_t first = 0;
  std::uint64_t count = 0;
};

/// What a command hands back for persistence.
struct Outcome {
  int exit_code = kExitOk;
  ojson flags = ojson::object();
  std::optional<Replicas> replicas;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--p", c.p, "Site parameter")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--out", c.out, "Result format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out-dir", c.out_dir, "Directory for results and manifest");
}

void common_flags(ojson& flags, const Common& c) {
  flags["seed"] = c.seed;
  flags["p"] = c.p;
  flags["out"] = c.out;
}

std::string render(const Table& t, const Common& c) { return c.out == "json" ? t.to_json() : t.to_csv(); }

std::string ext(const Common& c) { return c.out == "json" ? ".json" : ".csv"; }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string flag_text(const ojson& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void persist(const std::string& command, const Common& c, const Outcome& o) {
  const fs::path dir(c.out_dir);
  ojson manifest;
  manifest["command"] = command;
  manifest["flags"] = o.flags;
  manifest["seed"] = c.seed;
  if (o.replicas) {
    manifest["replica_range"] = {o.replicas->first, o.replicas->first + o.replicas->count};
  } else {
    manifest["replica_range"] = nullptr;
  }
  manifest["version"] = IIC_VERSION;
  manifest["timestamp"] = utc_timestamp();
  manifest["workers"] = worker_count();
  manifest["exit_code"] = o.exit_code;
  auto outputs = ojson::array();
  for (const auto& [name, text] : o.files) {
    write_file(dir / name, text);
    outputs.push_back(name);
  }
  manifest["outputs"] = outputs;
  write_file(dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- verify

struct VerifyFlags {
  int n = 2;
  std::uint64_t samples = 500;
  std::uint64_t replicas = 1'000'000;
  std::uint64_t proof_replicas = 100'000;
  std::string backend = "exact";
};

struct CheckTable {
  Table table{{"suite", "check", "value", "limit", "status"}, {}};
  bool all_pass = true;

  void add(const std::string& suite, const std::string& check, Cell value, Cell limit, bool pass) {
    table.add({suite, check, std::move(value), std::move(limit), std::string(pass ? "PASS" : "FAIL")});
    all_pass = all_pass && pass;
  }
};

std::string triple_label(int k, int m, int n) {
  return "(" + std::to_string(k) + "," + std::to_string(m) + "," + std::to_string(n) + ")";
}

std::vector<double> normalise(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::vector<double> out(counts.size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = total ? static_cast<double>(counts[i]) / static_cast<double>(total) : 0.0;
  }
  return out;
}

void markov_suite(const VerifyFlags& f, const Common& c, CheckTable& checks, std::ostream& err) {
  const Stopwatch clock;
  const auto circuits = enumerate_circuits(f.n);
  checks.add("markov", "circuits", static_cast<std::uint64_t>(circuits.size()), std::monostate{},
             !circuits.empty());
  StreamRng rng(c.seed, 0x4d41524bULL);
  const auto triples = sample_markov_triples(circuits, f.n, f.samples, rng);
  double worst_arm = 0.0, worst_interior = 0.0;
  for (const auto& t : triples) {
    const MarkovCheck r = check_markov_triple(t, c.p);
    worst_arm = std::max(worst_arm, r.tv_arm_vs_circuit);
    worst_interior = std::max(worst_interior, r.tv_circuit_vs_interior);
  }
  checks.add("markov", "triples", static_cast<std::uint64_t>(triples.size()), f.samples,
             triples.size() == f.samples);
  checks.add("markov", "max_tv_arm_vs_circuit", worst_arm, kMarkovTolerance,
             worst_arm <= kMarkovTolerance);
  checks.add("markov", "max_tv_circuit_vs_interior", worst_interior, kMarkovTolerance,
             worst_interior <= kMarkovTolerance);
  err << "markov suite: " << format_double(clock.seconds()) << " s\n";
}

void law_suite(const VerifyFlags& f, const Common& c, const OracleBackend& backend,
               ConditionalOracle& oracle, CheckTable& checks, std::ostream& err) {
  const Stopwatch clock;
  const int m = std::max(1, f.n - 1);
  const int n = std::max(m, f.n);
  const std::string label = triple_label(0, m, n);
  const Ball inner(1);
  const auto region = inner.sites();
  CouplingBatch batch{0, m, n, c.seed, 0, f.replicas, backend, {region.begin(), region.end()}};
  try {
    const CouplingSummary s = run_coupling_batch(batch, oracle, worker_count());
    const auto exact_n = exact_conditioned_marginal(region, n, c.p);
    const auto exact_m = exact_conditioned_marginal(region, m, c.p);
    const double tv_n = total_variation(exact_n.probs, normalise(s.omega_n_atoms));
    const double tv_m = total_variation(exact_m.probs, normalise(s.omega_m_atoms));
    checks.add("coupling_law", "tv_omega_n_vs_exact " + label, tv_n, kLawTolerance,
               tv_n <= kLawTolerance);
    checks.add("coupling_law", "tv_omega_m_vs_exact " + label, tv_m, kLawTolerance,
               tv_m <= kLawTolerance);
    checks.add("coupling_law", "dominated_replicas " + label, s.replicas, f.replicas,
               s.replicas == f.replicas);
  } catch (const InvariantViolation& e) {
    err << "coupling_law: " << e.what() << "\n";
    checks.add("coupling_law", "dominated_replicas " + label, std::string("violation"), f.replicas,
               false);
  }
  err << "coupling_law suite: " << format_double(clock.seconds()) << " s\n";
}

void proof_suite(const VerifyFlags& f, const Common& c, const OracleBackend& backend,
                 ConditionalOracle& oracle, CheckTable& checks, std::ostream& err) {
  const Stopwatch clock;
  std::vector<std::array<int, 3>> triples;
  auto push = [&](int k, int m, int n) {
    const std::array<int, 3> t{k, m, n};
    if (m >= 1 && std::find(triples.begin(), triples.end(), t) == triples.end()) triples.push_back(t);
  };
  push(0, std::max(1, f.n - 1), f.n);
  push(0, f.n, f.n);
  push(f.n - 1, f.n, f.n);
  for (const auto& [k, m, n] : triples) {
    const std::string label = triple_label(k, m, n);
    CouplingBatch batch{k, m, n, c.seed, 0, f.proof_replicas, backend, {}};
    try {
      const CouplingSummary s = run_coupling_batch(batch, oracle, worker_count());
      const bool exact = s.approximate_replicas == 0;
      checks.add("proof", "hit_iff_dual " + label, s.replicas - s.event_mismatches, s.replicas,
                 s.event_mismatches == 0);
      checks.add("proof", "agree_when_not_hit " + label, s.replicas - s.violations, s.replicas,
                 !exact || s.violations == 0);
      checks.add("proof", "black_circuits " + label, s.circuits, s.replicas - s.hits,
                 s.circuits == s.replicas - s.hits);
      checks.add("proof", "markov_thresholds " + label, s.markov_checked - s.markov_mismatches,
                 s.markov_checked, s.markov_mismatches == 0);
      const double truth = exact_dual_arm_probability(k, m, c.p);
      const Interval ci = wilson_interval(s.hits, s.replicas, kRateSigmas);
      checks.add("proof", "hit_rate " + label, s.replicas ? static_cast<double>(s.hits) / static_cast<double>(s.replicas) : 0.0,
                 truth, s.replicas == 0 || (ci.lo <= truth && truth <= ci.hi));
      if (s.first_bad_replica) {
        err << "proof " << label << ": first failing replica (seed " << c.seed << ", replica "
            << *s.first_bad_replica << ")\n";
      }
    } catch (const CircuitInvariantViolation& e) {
      err << "proof " << label << ": " << e.what() << "\n";
      checks.add("proof", "black_circuits " + label, std::string("violation"), std::monostate{}, false);
    } catch (const InvariantViolation& e) {
      err << "proof " << label << ": " << e.what() << "\n";
      checks.add("proof", "invariants " + label, std::string("violation"), std::monostate{}, false);
    }
  }
  err << "proof suite: " << format_double(clock.seconds()) << " s\n";
}

Outcome cmd_verify(const VerifyFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  if (f.n < 1) throw std::invalid_argument("--n must be at least 1");
  OracleBackend backend;
  backend.mode = backend_from_string(f.backend);
  if (backend.mode == BackendMode::Exact && f.n > 2) {
    throw CapacityExceeded("exact verification suites enumerate Ball(n) and support n <= 2");
  }
  ConditionalOracle oracle(c.p);
  CheckTable checks;
  markov_suite(f, c, checks, err);
  law_suite(f, c, backend, oracle, checks, err);
  proof_suite(f, c, backend, oracle, checks, err);
  // Every exact threshold is compared against p inside the oracle; reaching
  // this line means none fell below it.
  checks.add("fkg", "exact_thresholds_checked", oracle.exact_thresholds(), std::monostate{},
             backend.mode != BackendMode::Exact || oracle.exact_thresholds() > 0);

  Outcome o;
  o.flags["n"] = f.n;
  o.flags["samples"] = f.samples;
  o.flags["replicas"] = f.replicas;
  o.flags["proof-replicas"] = f.proof_replicas;
  o.flags["backend"] = f.backend;
  common_flags(o.flags, c);
  o.replicas = Replicas{0, std::max(f.replicas, f.proof_replicas)};
  o.exit_code = checks.all_pass ? kExitOk : kExitFailure;
  const std::string csv = checks.table.to_csv();
  out << csv;
  o.files.emplace_back("verify" + ext(c), render(checks.table, c));
  return o;
}

// ---------------------------------------------------------------- couple

struct CoupleFlags {
  int k = 0;
  int m = 1;
  int n = 2;
  std::uint64_t replicas = 100'000;
  std::uint64_t first_replica = 0;
  std::string backend = "exact";
  std::string trace;
  std::uint64_t trace_replicas = 1;
};

Outcome cmd_couple(const CoupleFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  if (f.k < 0 || f.k > f.m || f.m > f.n) throw std::invalid_argument("need 0 <= k <= m <= n");
  OracleBackend backend;
  backend.mode = backend_from_string(f.backend);
  ConditionalOracle oracle(c.p);
  Outcome o;
  o.flags["k"] = f.k;
  o.flags["m"] = f.m;
  o.flags["n"] = f.n;
  o.flags["replicas"] = f.replicas;
  o.flags["first-replica"] = f.first_replica;
  o.flags["backend"] = f.backend;
  if (!f.trace.empty()) {
    o.flags["trace"] = f.trace;
    o.flags["trace-replicas"] = f.trace_replicas;
  }
  common_flags(o.flags, c);
  o.replicas = Replicas{f.first_replica, f.replicas};

  Table t{{"k", "m", "n", "backend", "replicas", "hits", "duals", "agrees", "event_mismatches",
           "violations", "circuits", "markov_checked", "markov_mismatches", "approximate",
           "hit_rate", "dual_rate", "agree_rate"},
          {}};
  const Stopwatch clock;
  CouplingBatch batch{f.k, f.m, f.n, c.seed, f.first_replica, f.replicas, backend, {}};
  const CouplingSummary s = run_coupling_batch(batch, oracle, worker_count());
  err << "couple: " << format_double(clock.seconds()) << " s\n";
  if (s.replicas > 0) {
    const double r = static_cast<double>(s.replicas);
    t.add({std::int64_t{f.k}, std::int64_t{f.m}, std::int64_t{f.n}, f.backend, s.replicas, s.hits,
           s.duals, s.agrees, s.event_mismatches, s.violations, s.circuits, s.markov_checked,
           s.markov_mismatches, s.approximate_replicas, static_cast<double>(s.hits) / r,
           static_cast<double>(s.duals) / r, static_cast<double>(s.agrees) / r});
  }
  out << t.to_csv();
  o.files.emplace_back("couple" + ext(c), render(t, c));

  if (!f.trace.empty()) {
    std::ostringstream trace;
    const std::uint64_t count = std::min(f.trace_replicas, f.replicas);
    for (std::uint64_t r = f.first_replica; r < f.first_replica + count; ++r) {
      const auto outcome = run_coupling(f.k, f.m, f.n, UniformField(c.seed, r), oracle, backend);
      write_trace_jsonl(trace, r, outcome.trace);
    }
    o.files.emplace_back(f.trace, trace.str());
  }

  const bool exact = s.approximate_replicas == 0;
  if (s.event_mismatches > 0 || (exact && s.violations > 0) || s.markov_mismatches > 0) {
    err << "couple: assertion failed (" << s.event_mismatches << " hit/dual mismatches, "
        << s.violations << " disagreements, " << s.markov_mismatches
        << " threshold mismatches); first at seed " << c.seed << ", replica "
        << s.first_bad_replica.value_or(0) << "\n";
    o.exit_code = kExitFailure;
  }
  return o;
}

// ---------------------------------------------------------------- tv

struct TvFlags {
  int k = 0;
  int m = 1;
  int n = 2;
  std::string mode = "exact";
  std::string region = "ball";
  std::uint64_t samples = 1'000'000;
};

Outcome cmd_tv(const TvFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  const TvRegion region = region_from_string(f.region);
  Outcome o;
  o.flags["k"] = f.k;
  o.flags["m"] = f.m;
  o.flags["n"] = f.n;
  o.flags["mode"] = f.mode;
  o.flags["region"] = f.region;
  if (f.mode == "empirical") o.flags["samples"] = f.samples;
  common_flags(o.flags, c);

  Table t{{"k", "m", "n", "mode", "region", "tv", "bound", "trials", "ci"}, {}};
  const Stopwatch clock;
  bool ok = true;
  if (f.mode == "exact") {
    const TvReport r = exact_tv(f.k, f.m, f.n, c.p, region);
    t.add({std::int64_t{r.k}, std::int64_t{r.m}, std::int64_t{r.n}, std::string("exact"), f.region,
           r.tv, r.bound, std::monostate{}, std::monostate{}});
  } else {
    const TvReport r = empirical_tv(f.k, f.m, f.n, f.samples, c.p, c.seed, region, worker_count());
    o.replicas = Replicas{0, f.samples};
    t.add({std::int64_t{r.k}, std::int64_t{r.m}, std::int64_t{r.n}, std::string("empirical"),
           f.region, r.tv, r.bound, *r.samples, *r.bound_ci});
    ok = r.tv <= r.bound + 3.0 * *r.bound_sigma;
    if (!ok) err << "tv: empirical distance exceeds the estimated bound + 3 sigma\n";
  }
  err << "tv: " << format_double(clock.seconds()) << " s\n";
  out << t.to_csv();
  o.files.emplace_back("tv" + ext(c), render(t, c));
  o.exit_code = ok ? kExitOk : kExitFailure;
  return o;
}

// ---------------------------------------------------------------- arm

struct ArmFlags {
  std::string kind = "white";
  int k = 1;
  int m = 2;
  std::uint64_t trials = 100'000;
};

Outcome cmd_arm(const ArmFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  const Color kind = f.kind == "black" ? Color::Black : Color::White;
  const Stopwatch clock;
  const ArmStats s = estimate_arm(kind, f.k, f.m, f.trials, c.p, c.seed, 0, worker_count());
  err << "arm: " << format_double(clock.seconds()) << " s\n";
  Table t{{"kind", "k", "m", "p", "trials", "hits", "p_hat", "ci_halfwidth"}, {}};
  t.add({f.kind, std::int64_t{f.k}, std::int64_t{f.m}, c.p, s.trials, s.hits, s.p_hat(),
         s.ci_halfwidth()});
  out << t.to_csv();
  Outcome o;
  o.flags["kind"] = f.kind;
  o.flags["k"] = f.k;
  o.flags["m"] = f.m;
  o.flags["trials"] = f.trials;
  common_flags(o.flags, c);
  o.replicas = Replicas{0, f.trials};
  o.files.emplace_back("arm" + ext(c), render(t, c));
  return o;
}

// ---------------------------------------------------------------- exponent

struct ExponentFlags {
  int k = 1;
  std::string scales = "8,16,32,64,128,256,512";
  std::uint64_t trials = 100'000;
  double band_lo = 0.07;
  double band_hi = 0.15;
};

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad scale '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Outcome cmd_exponent(const ExponentFlags& f, const Common& c, std::ostream& out, std::ostream& err) {
  if (c.p != 0.5) throw std::invalid_argument("the exponent fit is defined at p = 1/2");
  const std::vector<int> scales = parse_scales(f.scales);
  const Stopwatch clock;
  std::vector<ArmStats> per_scale;
  const ExponentFit fit = fit_exponent(f.k, scales, f.trials, c.seed, worker_count(), &per_scale);
  err << "exponent: " << format_double(clock.seconds()) << " s\n";

  Table points{{"k", "m", "trials", "hits", "p_hat", "ci_halfwidth"}, {}};
  bool monotone = true;
  for (std::size_t i = 0; i < per_scale.size(); ++i) {
    const ArmStats& s = per_scale[i];
    points.add({std::int64_t{f.k}, std::int64_t{s.m}, s.trials, s.hits, s.p_hat(), s.ci_halfwidth()});
    if (i > 0) {
      const ArmStats& prev = per_scale[i - 1];
      monotone = monotone && s.p_hat() - s.ci_halfwidth() <= prev.p_hat() + prev.ci_halfwidth();
    }
  }
  const bool in_band = fit.exponent >= f.band_lo && fit.exponent <= f.band_hi;
  Table summary{{"k", "scales", "trials", "exponent", "stderr", "slope", "intercept", "band_lo",
                 "band_hi", "in_band", "monotone"},
                {}};
  summary.add({std::int64_t{f.k}, f.scales, f.trials, fit.exponent, fit.stderr_, fit.slope,
               fit.intercept, f.band_lo, f.band_hi, in_band, monotone});
  out << points.to_csv() << summary.to_csv();

  Outcome o;
  o.flags["k"] = f.k;
  o.flags["scales"] = f.scales;
  o.flags["trials"] = f.trials;
  o.flags["band-lo"] = f.band_lo;
  o.flags["band-hi"] = f.band_hi;
  common_flags(o.flags, c);
  o.replicas = Replicas{0, f.trials};
  o.files.emplace_back("exponent" + ext(c), render(points, c));
  o.files.emplace_back("exponent_fit" + ext(c), render(summary, c));
  o.exit_code = in_band && monotone ? kExitOk : kExitFailure;
  if (!in_band) err << "exponent: estimate outside [" << f.band_lo << ", " << f.band_hi << "]\n";
  if (!monotone) err << "exponent: crossing probability increases with m beyond its CI\n";
  return o;
}

// ---------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  const fs::path path(manifest_path);
  const ojson manifest = ojson::parse(read_file(path));
  const std::string command = manifest.at("command").get<std::string>();
  std::vector<std::string> args{command};
  for (const auto& [name, value] : manifest.at("flags").items()) {
    args.push_back("--" + name);
    args.push_back(flag_text(value));
  }
  args.push_back("--out-dir");
  args.push_back(out_dir);
  std::ostringstream sink;
  const int code = run(args, sink, err);
  bool same = code == manifest.at("exit_code").get<int>();
  if (!same) err << "replay: exit code " << code << " differs from recorded\n";
  for (const auto& name : manifest.at("outputs")) {
    const std::string file = name.get<std::string>();
    const bool equal = read_file(path.parent_path() / file) == read_file(fs::path(out_dir) / file);
    out << file << "," << (equal ? "identical" : "differs") << "\n";
    same = same && equal;
  }
  return same ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Site-by-site coupling of one-arm conditioned percolation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(IIC_VERSION));

  Common common;
  VerifyFlags verify;
  CoupleFlags couple;
  TvFlags tv;
  ArmFlags arm;
  ExponentFlags exponent;
  std::string manifest, replay_dir = "replay";

  auto* v = app.add_subcommand("verify", "Exact Markov, coupling-law and proof-step checks");
  v->add_option("--n", verify.n, "Outer radius of the exact suites");
  v->add_option("--samples", verify.samples, "Sampled (Gamma, S, eta) triples");
  v->add_option("--replicas", verify.replicas, "Coupling replicas for the law check");
  v->add_option("--proof-replicas", verify.proof_replicas, "Replicas per proof-step triple");
  v->add_option("--backend", verify.backend)->check(CLI::IsMember({"exact", "mc", "auto"}));
  add_common(v, common);

  auto* c = app.add_subcommand("couple", "Run the coupling over many replicas");
  c->add_option("--k", couple.k);
  c->add_option("--m", couple.m);
  c->add_option("--n", couple.n);
  c->add_option("--replicas", couple.replicas);
  c->add_option("--first-replica", couple.first_replica);
  c->add_option("--backend", couple.backend)->check(CLI::IsMember({"exact", "mc", "auto"}));
  c->add_option("--trace", couple.trace, "JSONL trace file name (inside --out-dir)");
  c->add_option("--trace-replicas", couple.trace_replicas, "Replicas written to the trace");
  add_common(c, common);

  auto* t = app.add_subcommand("tv", "Total variation between conditioned marginals");
  t->add_option("--k", tv.k);
  t->add_option("--m", tv.m);
  t->add_option("--n", tv.n);
  t->add_option("--mode", tv.mode)->check(CLI::IsMember({"exact", "empirical"}));
  t->add_option("--region", tv.region)->check(CLI::IsMember({"ball", "ring1"}));
  t->add_option("--samples", tv.samples);
  add_common(t, common);

  auto* a = app.add_subcommand("arm", "Arm / dual-arm crossing probability");
  a->add_option("--kind", arm.kind)->check(CLI::IsMember({"black", "white"}));
  a->add_option("--k", arm.k);
  a->add_option("--m", arm.m);
  a->add_option("--trials", arm.trials);
  add_common(a, common);

  auto* e = app.add_subcommand("exponent", "Log-log fit of the dual-arm probability");
  e->add_option("--k", exponent.k);
  e->add_option("--scales", exponent.scales, "Comma-separated outer radii");
  e->add_option("--trials", exponent.trials);
  e->add_option("--band-lo", exponent.band_lo);
  e->add_option("--band-hi", exponent.band_hi);
  add_common(e, common);

  auto* r = app.add_subcommand("replay", "Re-run a manifest and compare outputs byte for byte");
  r->add_option("--manifest", manifest)->required();
  r->add_option("--out-dir", replay_dir);

  std::vector<std::string> argv_storage{"iic"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (r->parsed()) return cmd_replay(manifest, replay_dir, out, err);
    std::string name;
    Outcome o;
    if (v->parsed()) {
      name = "verify";
      o = cmd_verify(verify, common, out, err);
    } else if (c->parsed()) {
      name = "couple";
      o = cmd_couple(couple, common, out, err);
    } else if (t->parsed()) {
      name = "tv";
      o = cmd_tv(tv, common, out, err);
    } else if (a->parsed()) {
      name = "arm";
      o = cmd_arm(arm, common, out, err);
    } else {
      name = "exponent";
      o = cmd_exponent(exponent, common, out, err);
    }
    persist(name, common, o);
    return o.exit_code;
  } catch (const CapacityExceeded& ex) {
    err << "capacity exceeded: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    err << "usage: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& ex) {
    // InvariantViolation and friends.
    err << "assertion failed: " << ex.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace iic::cli
