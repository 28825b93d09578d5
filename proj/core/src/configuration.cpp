#include "iic/configuration.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "iic/connectivity.hpp"

namespace iic {

char to_char(State s) {
  switch (s) {
    case State::Black:
      return 'B';
    case State::White:
      return 'W';
    case State::Unrevealed:
      return 'U';
  }
  return '?';
}

State state_from_char(char c) {
  switch (c) {
    case 'B':
      return State::Black;
    case 'W':
      return State::White;
    case 'U':
      return State::Unrevealed;
    default:
      throw std::invalid_argument(std::string("invalid state character '") + c + "'");
  }
}

PartialConfig::PartialConfig(std::shared_ptr<const Ball> ball, State fill)
    : ball_(std::move(ball)), states_(ball_->size(), fill) {}

PartialConfig PartialConfig::from_string(std::shared_ptr<const Ball> ball, std::string_view text) {
  if (text.size() != ball->size()) {
    throw std::invalid_argument("configuration string has " + std::to_string(text.size()) +
                                " characters, ball has " + std::to_string(ball->size()) + " sites");
  }
  PartialConfig c(std::move(ball));
  for (std::size_t i = 0; i < text.size(); ++i) c.states_[i] = state_from_char(text[i]);
  return c;
}

State PartialConfig::at(Site s) const {
  auto i = ball_->index_of(s);
  return i ? states_[*i] : State::Unrevealed;
}

void PartialConfig::set(Site s, State v) {
  auto i = ball_->index_of(s);
  if (!i) throw std::out_of_range("site outside ball");
  states_[*i] = v;
}

std::vector<std::size_t> PartialConfig::revealed_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i] != State::Unrevealed) out.push_back(i);
  }
  return out;
}

std::size_t PartialConfig::unrevealed_count() const {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), State::Unrevealed));
}

std::string PartialConfig::to_string() const {
  std::string out(states_.size(), 'U');
  for (std::size_t i = 0; i < states_.size(); ++i) out[i] = to_char(states_[i]);
  return out;
}

PartialConfig PartialConfig::embed(std::shared_ptr<const Ball> larger) const {
  if (larger->radius() < ball_->radius()) throw std::invalid_argument("embed into a smaller ball");
  PartialConfig out(std::move(larger));
  for (std::size_t i = 0; i < states_.size(); ++i) {
    out.states_[out.ball_->index_unchecked(ball_->site(i))] = states_[i];
  }
  return out;
}

PartialConfig full_random(std::shared_ptr<const Ball> ball, double p, const UniformField& field) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  PartialConfig c(std::move(ball));
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.set(i, field(c.ball().site(i)) <= p ? State::Black : State::White);
  }
  return c;
}

PartialConfig restrict(const PartialConfig& c, std::span<const Site> region) {
  PartialConfig out(c.ball_ptr());
  for (const Site& s : region) {
    auto i = c.ball().index_of(s);
    if (!i) throw std::invalid_argument("restriction region leaves the ball");
    out.set(*i, c.at(*i));
  }
  return out;
}

bool compatible_with_arm(const PartialConfig& c, int n) {
  if (n > c.ball().radius()) throw std::invalid_argument("arm radius exceeds configuration ball");
  PartialConfig maximal = c;
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    if (!maximal.revealed(i)) maximal.set(i, State::Black);
  }
  return one_arm(maximal, n);
}

bool dominated_by(const PartialConfig& a, const PartialConfig& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const State x = a.at(i);
    const State y = b.at(a.ball().site(i));
    if (x == State::Unrevealed || y == State::Unrevealed) continue;
    if (x == State::Black && y == State::White) return false;
  }
  return true;
}

bool EpsEvent::well_formed() const {
  if (!arm_radius) return true;
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const auto& c) { return norm(c.first) <= *arm_radius; });
}

bool EpsEvent::holds(const PartialConfig& c) const {
  for (const auto& [site, state] : constraints) {
    const State actual = c.at(site);
    if (actual == State::Unrevealed) throw std::invalid_argument("event evaluated on unrevealed site");
    if (actual != state) return false;
  }
  return !arm_radius || one_arm(c, *arm_radius);
}

PartialConfig EpsEvent::as_partial(std::shared_ptr<const Ball> ball) const {
  PartialConfig out(std::move(ball));
  for (const auto& [site, state] : constraints) out.set(site, state);
  return out;
}

}  // namespace iic
