#include "iic/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "iic/connectivity.hpp"
#include "iic/errors.hpp"
#include "iic/parallel.hpp"
#include "json.hpp"

namespace iic {

namespace {

constexpr double kMarkovTolerance = 1e-12;
constexpr std::uint64_t kQueryStreamKey = 0x5bd1e9955bd1e995ULL;

State threshold_state(double u, double threshold) {
  return u <= threshold ? State::Black : State::White;
}

std::string replica_label(const UniformField& f) {
  return " (seed " + std::to_string(f.seed()) + ", replica " + std::to_string(f.replica()) + ")";
}

}  // namespace

ExplorationState::ExplorationState(int m, int n, double p, UniformField field)
    : m_(m),
      n_(n),
      p_(p),
      field_(field),
      omega_(shared_ball(m)),
      omega_m_(shared_ball(m)),
      omega_n_(shared_ball(m)) {
  if (m < 0 || m > n) throw std::invalid_argument("exploration needs 0 <= m <= n");
  frontier_ = white_reachable_unrevealed(omega_, m_);
}

Site ExplorationState::next_site() const {
  if (exhausted()) throw Exhausted("every site of Lambda_m is revealed");
  if (!frontier_.empty()) return ball().site(frontier_.front());
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!omega_.revealed(i)) return ball().site(i);
  }
  throw Exhausted("every site of Lambda_m is revealed");
}

void ExplorationState::reveal_step(ConditionalOracle& oracle, const OracleBackend& backend) {
  const Site x = next_site();
  const std::size_t step = order_.size() + 1;
  const double u = field_(x);

  StreamRng stream_m =
      StreamRng(field_.seed() ^ kQueryStreamKey, field_.replica()).split(2 * step);
  StreamRng stream_n =
      StreamRng(field_.seed() ^ kQueryStreamKey, field_.replica()).split(2 * step + 1);
  const CondResult thr_m = oracle.cond_prob(CondQuery{x, omega_m_, m_}, backend, &stream_m);
  const CondResult thr_n = oracle.cond_prob(CondQuery{x, omega_n_, n_}, backend, &stream_n);

  const State w = u <= p_ ? State::Black : State::White;
  const State wm = threshold_state(u, thr_m.probability);
  const State wn = threshold_state(u, thr_n.probability);
  if (w == State::Black && (wm != State::Black || wn != State::Black)) {
    throw InvariantViolation("conditioned configuration below omega at step " +
                             std::to_string(step) + replica_label(field_));
  }
  const std::size_t i = ball().index_unchecked(x);
  omega_.set(i, w);
  omega_m_.set(i, wm);
  omega_n_.set(i, wn);
  order_.push_back(x);
  approximate_ = approximate_ || !thr_m.exact || !thr_n.exact;
  trace_.push_back(TraceEntry{step, x, u, thr_m.probability, thr_n.probability, w, wm, wn,
                              thr_m.exact && thr_n.exact});

  frontier_ = white_reachable_unrevealed(omega_, m_);
  if (frontier_.empty()) {
    if (!tau_) tau_ = step;
  } else if (tau_) {
    throw InvariantViolation("white frontier reopened after tau at step " +
                             std::to_string(step) + replica_label(field_));
  }
}

Circuit extract_circuit(const ExplorationState& s, int k) {
  if (!s.tau()) throw std::invalid_argument("exploration has not reached tau");
  const std::size_t tau = *s.tau();
  if (s.order().size() < tau) throw std::invalid_argument("trace shorter than tau");
  const Ball& ball = s.ball();
  std::vector<char> explored(ball.size(), 0);
  for (std::size_t i = 0; i < tau; ++i) explored[ball.index_unchecked(s.order()[i])] = 1;
  const std::size_t origin = ball.origin_index();
  if (explored[origin]) throw std::invalid_argument("exploration reached the origin before tau");

  std::vector<char> island(ball.size(), 0);
  std::vector<std::size_t> stack{origin};
  island[origin] = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::int32_t j : ball.neighbor_indices(i)) {
      if (j == Ball::kOutside) continue;
      const auto ju = static_cast<std::size_t>(j);
      if (island[ju] || explored[ju]) continue;
      island[ju] = 1;
      stack.push_back(ju);
    }
  }

  std::vector<Site> gamma;
  std::vector<Site> inside;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (island[i]) {
      inside.push_back(ball.site(i));
      continue;
    }
    const auto nb = ball.neighbor_indices(i);
    const bool touches = std::any_of(nb.begin(), nb.end(), [&](std::int32_t j) {
      return j != Ball::kOutside && island[static_cast<std::size_t>(j)];
    });
    if (!touches) continue;
    if (!explored[i]) throw CircuitInvariantViolation("island boundary site not yet explored");
    if (s.omega().at(i) != State::Black || s.omega_m().at(i) != State::Black ||
        s.omega_n().at(i) != State::Black) {
      throw CircuitInvariantViolation("island boundary site not Black in all three configurations");
    }
    gamma.push_back(ball.site(i));
  }
  if (std::any_of(inside.begin(), inside.end(), [&](Site x) { return norm(x) >= s.m(); })) {
    throw CircuitInvariantViolation("island reaches ring m");
  }

  Circuit c;
  try {
    c = verify_circuit(gamma, s.m() + 2);
  } catch (const NotACircuit& e) {
    throw CircuitInvariantViolation(std::string("boundary of the island: ") + e.what());
  }
  if (c.interior != inside) throw CircuitInvariantViolation("circuit interior differs from island");
  const auto disk = shared_ball(k);
  if (!circles_around(c, disk->sites())) {
    throw CircuitInvariantViolation("circuit does not surround Lambda_k");
  }
  return c;
}

CouplingOutcome run_coupling(int k, int m, int n, const UniformField& field,
                             ConditionalOracle& oracle, const OracleBackend& backend) {
  if (k < 0 || k > m || m > n) throw std::invalid_argument("coupling needs 0 <= k <= m <= n");
  ExplorationState state(m, n, oracle.p(), field);
  while (!state.exhausted()) state.reveal_step(oracle, backend);

  CouplingOutcome out{.k = k,
                      .m = m,
                      .n = n,
                      .omega = state.omega(),
                      .omega_m = state.omega_m(),
                      .omega_n = state.omega_n(),
                      .order = state.order(),
                      .tau = state.tau().value(),
                      .hit = false,
                      .dual = false,
                      .agree = true,
                      .gamma = std::nullopt,
                      .approximate = state.approximate(),
                      .markov_checked = 0,
                      .markov_mismatches = 0,
                      .trace = {}};
  out.hit = std::any_of(out.order.begin(), out.order.begin() + static_cast<std::ptrdiff_t>(out.tau),
                        [&](Site x) { return norm(x) <= k; });
  out.dual = dual_arm(state.omega(), k, m);
  for (std::size_t i = 0; i < state.ball().size(); ++i) {
    if (state.ball().distance(i) <= k && state.omega_m().at(i) != state.omega_n().at(i)) {
      out.agree = false;
    }
  }
  if (!out.hit) {
    out.gamma = extract_circuit(state, k);
    for (std::size_t i = out.tau; i < state.trace().size(); ++i) {
      const TraceEntry& e = state.trace()[i];
      if (!e.exact || !out.gamma->in_interior(e.site)) continue;
      ++out.markov_checked;
      if (std::abs(e.thr_m - e.thr_n) > kMarkovTolerance) ++out.markov_mismatches;
    }
  }
  out.trace = state.trace();
  return out;
}

void CouplingSummary::merge(const CouplingSummary& o) {
  replicas += o.replicas;
  hits += o.hits;
  duals += o.duals;
  agrees += o.agrees;
  event_mismatches += o.event_mismatches;
  violations += o.violations;
  circuits += o.circuits;
  markov_checked += o.markov_checked;
  markov_mismatches += o.markov_mismatches;
  approximate_replicas += o.approximate_replicas;
  if (o.first_bad_replica && (!first_bad_replica || *o.first_bad_replica < *first_bad_replica)) {
    first_bad_replica = o.first_bad_replica;
  }
  auto add = [](std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
  };
  add(omega_atoms, o.omega_atoms);
  add(omega_m_atoms, o.omega_m_atoms);
  add(omega_n_atoms, o.omega_n_atoms);
}

CouplingSummary run_coupling_batch(const CouplingBatch& batch, ConditionalOracle& oracle,
                                   int workers) {
  if (batch.histogram_region.size() > 20) throw std::invalid_argument("histogram region too large");
  MarginalTable atoms;  // only for atom indexing
  atoms.region = batch.histogram_region;
  std::sort(atoms.region.begin(), atoms.region.end());
  const std::size_t atom_count = batch.histogram_region.empty() ? 0 : std::size_t{1} << atoms.region.size();

  auto shard = [&](std::uint64_t begin, std::uint64_t end) {
    CouplingSummary s;
    s.omega_atoms.assign(atom_count, 0);
    s.omega_m_atoms.assign(atom_count, 0);
    s.omega_n_atoms.assign(atom_count, 0);
    for (std::uint64_t r = begin; r < end; ++r) {
      const std::uint64_t replica = batch.first_replica + r;
      const CouplingOutcome o = run_coupling(batch.k, batch.m, batch.n,
                                             UniformField(batch.seed, replica), oracle, batch.backend);
      ++s.replicas;
      s.hits += o.hit;
      s.duals += o.dual;
      s.agrees += o.agree;
      const bool mismatch = o.hit != o.dual;
      const bool violation = !o.hit && !o.agree;
      s.event_mismatches += mismatch;
      s.violations += violation;
      s.circuits += o.gamma.has_value();
      s.markov_checked += o.markov_checked;
      s.markov_mismatches += o.markov_mismatches;
      s.approximate_replicas += o.approximate;
      if ((mismatch || violation || o.markov_mismatches > 0) && !s.first_bad_replica) {
        s.first_bad_replica = replica;
      }
      if (atom_count > 0) {
        ++s.omega_atoms[atoms.atom_of(o.omega)];
        ++s.omega_m_atoms[atoms.atom_of(o.omega_m)];
        ++s.omega_n_atoms[atoms.atom_of(o.omega_n)];
      }
    }
    return s;
  };
  const auto parts = run_sharded<CouplingSummary>(batch.replicas, 1024, workers, shard);
  CouplingSummary total;
  total.omega_atoms.assign(atom_count, 0);
  total.omega_m_atoms.assign(atom_count, 0);
  total.omega_n_atoms.assign(atom_count, 0);
  for (const auto& part : parts) total.merge(part);
  return total;
}

void write_trace_jsonl(std::ostream& out, std::uint64_t replica, std::span<const TraceEntry> trace) {
  for (const TraceEntry& e : trace) {
    nlohmann::ordered_json j;
    j["replica"] = replica;
    j["step"] = e.step;
    j["site"] = {e.site.q, e.site.r};
    j["u"] = e.u;
    j["thr_m"] = e.thr_m;
    j["thr_n"] = e.thr_n;
    j["omega"] = std::string(1, to_char(e.omega));
    j["omega_m"] = std::string(1, to_char(e.omega_m));
    j["omega_n"] = std::string(1, to_char(e.omega_n));
    j["exact"] = e.exact;
    out << j.dump() << '\n';
  }
}

}  // namespace iic
