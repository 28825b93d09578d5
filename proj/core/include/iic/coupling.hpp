#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "iic/configuration.hpp"
#include "iic/lattice.hpp"
#include "iic/oracle.hpp"
#include "iic/uniform_field.hpp"

namespace iic {

struct TraceEntry {
  std::size_t step = 0;  // 1-based: X(step) = site
  Site site;
  double u = 0.0;
  double thr_m = 0.0;
  double thr_n = 0.0;
  State omega = State::Unrevealed;
  State omega_m = State::Unrevealed;
  State omega_n = State::Unrevealed;
  bool exact = true;
};

/// Site-by-site exploration of Lambda_m carrying the coupled triple
/// (omega, omega_m, omega_n) driven by one uniform per site.
///
/// The next site is the canonically smallest site of the white frontier E
/// (unrevealed sites white-connected to dLambda_m in omega) when E is
/// non-empty, and the canonically smallest unrevealed site otherwise.
class ExplorationState {
 public:
  ExplorationState(int m, int n, double p, UniformField field);

  const Ball& ball() const { return omega_.ball(); }
  int m() const { return m_; }
  int n() const { return n_; }
  double p() const { return p_; }
  const UniformField& field() const { return field_; }

  const std::vector<Site>& order() const { return order_; }
  const PartialConfig& omega() const { return omega_; }
  const PartialConfig& omega_m() const { return omega_m_; }
  const PartialConfig& omega_n() const { return omega_n_; }
  /// Current frontier E_i as ball indices, canonical order.
  const std::vector<std::size_t>& frontier() const { return frontier_; }
  /// First i with E_i empty, once reached.
  std::optional<std::size_t> tau() const { return tau_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  bool exhausted() const { return order_.size() == omega_.size(); }
  /// True once any threshold came from the Monte Carlo backend.
  bool approximate() const { return approximate_; }

  Site next_site() const;
  void reveal_step(ConditionalOracle& oracle, const OracleBackend& backend);

 private:
  int m_;
  int n_;
  double p_;
  UniformField field_;
  PartialConfig omega_;
  PartialConfig omega_m_;
  PartialConfig omega_n_;
  std::vector<Site> order_;
  std::vector<std::size_t> frontier_;
  std::optional<std::size_t> tau_;
  std::vector<TraceEntry> trace_;
  bool approximate_ = false;
};

struct CouplingOutcome {
  int k = 0;
  int m = 0;
  int n = 0;
  PartialConfig omega;
  PartialConfig omega_m;
  PartialConfig omega_n;
  std::vector<Site> order;
  std::size_t tau = 0;
  bool hit = false;    // X_[tau] meets Lambda_k
  bool dual = false;   // Lambda_k <-*> dLambda_m in omega
  bool agree = false;  // omega_m == omega_n on Lambda_k
  std::optional<Circuit> gamma;  // boundary of the unexplored island, when !hit
  bool approximate = false;
  /// Post-tau steps inside the island and how many had unequal thresholds.
  std::size_t markov_checked = 0;
  std::size_t markov_mismatches = 0;
  std::vector<TraceEntry> trace;
};

/// Gamma = dC where C is the component of the origin in Lambda_m \ X_[tau].
/// Throws CircuitInvariantViolation if Gamma fails to be a Black circuit
/// around Lambda_k; requires the exploration to have avoided Lambda_k up to tau.
Circuit extract_circuit(const ExplorationState& s, int k);

CouplingOutcome run_coupling(int k, int m, int n, const UniformField& field,
                             ConditionalOracle& oracle, const OracleBackend& backend);

/// Counters merged over many replicas. All fields are integers so the merge
/// is exact and order independent.
struct CouplingSummary {
  std::uint64_t replicas = 0;
  std::uint64_t hits = 0;
  std::uint64_t duals = 0;
  std::uint64_t agrees = 0;
  std::uint64_t event_mismatches = 0;  // hit != dual
  std::uint64_t violations = 0;        // !hit && !agree
  std::uint64_t circuits = 0;          // Gamma extracted and verified
  std::uint64_t markov_checked = 0;
  std::uint64_t markov_mismatches = 0;
  std::uint64_t approximate_replicas = 0;
  std::optional<std::uint64_t> first_bad_replica;
  /// Atom counts of omega, omega_m, omega_n on the histogram region.
  std::vector<std::uint64_t> omega_atoms;
  std::vector<std::uint64_t> omega_m_atoms;
  std::vector<std::uint64_t> omega_n_atoms;

  void merge(const CouplingSummary& other);
};

struct CouplingBatch {
  int k = 0;
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t first_replica = 0;
  std::uint64_t replicas = 0;
  OracleBackend backend;
  /// Sites whose joint law is histogrammed (at most 20 sites, within Lambda_m).
  std::vector<Site> histogram_region;
};

/// Runs replicas first_replica .. first_replica + replicas - 1 in parallel.
CouplingSummary run_coupling_batch(const CouplingBatch& batch, ConditionalOracle& oracle,
                                   int workers);

/// One JSON object per trace entry: {replica, step, site:[q,r], u, thr_m,
/// thr_n, omega, omega_m, omega_n}.
void write_trace_jsonl(std::ostream& out, std::uint64_t replica,
                       std::span<const TraceEntry> trace);

}  // namespace iic
