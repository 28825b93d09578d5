#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iic/lattice.hpp"
#include "iic/uniform_field.hpp"

namespace iic {

enum class State : std::uint8_t { White = 0, Black = 1, Unrevealed = 2 };

char to_char(State s);
State state_from_char(char c);

/// Colouring of a ball with Black / White / Unrevealed per site.
///
/// Sites outside the ball read as Unrevealed.
class PartialConfig {
 public:
  explicit PartialConfig(std::shared_ptr<const Ball> ball, State fill = State::Unrevealed);

  static PartialConfig from_string(std::shared_ptr<const Ball> ball, std::string_view text);

  const Ball& ball() const { return *ball_; }
  const std::shared_ptr<const Ball>& ball_ptr() const { return ball_; }
  std::size_t size() const { return states_.size(); }

  State at(std::size_t i) const { return states_[i]; }
  State at(Site s) const;
  void set(std::size_t i, State v) { states_[i] = v; }
  void set(Site s, State v);

  bool revealed(std::size_t i) const { return states_[i] != State::Unrevealed; }
  std::vector<std::size_t> revealed_indices() const;
  std::size_t unrevealed_count() const;
  std::span<const State> states() const { return states_; }

  /// Compact string over {B, W, U} in canonical site order.
  std::string to_string() const;

  /// Same colouring viewed on a ball that contains this one; new sites are
  /// Unrevealed.
  PartialConfig embed(std::shared_ptr<const Ball> larger) const;

  friend bool operator==(const PartialConfig& a, const PartialConfig& b) {
    return a.ball_->radius() == b.ball_->radius() && a.states_ == b.states_;
  }

 private:
  std::shared_ptr<const Ball> ball_;
  std::vector<State> states_;
};

/// Every site Black iff U_x <= p, with U from the shared uniform field.
PartialConfig full_random(std::shared_ptr<const Ball> ball, double p, const UniformField& field);

/// Sites outside region become Unrevealed.
PartialConfig restrict(const PartialConfig& c, std::span<const Site> region);

/// True iff some completion of the Unrevealed sites realises {0 <-> dLambda_n}.
/// The event is increasing, so it suffices to try the all-Black completion.
bool compatible_with_arm(const PartialConfig& c, int n);

/// Sitewise a <= b with White < Black, compared on sites revealed in both.
bool dominated_by(const PartialConfig& a, const PartialConfig& b);

/// Cylinder event {eps_S = eta}, optionally intersected with a one-arm event.
struct EpsEvent {
  std::vector<std::pair<Site, State>> constraints;
  std::optional<int> arm_radius;

  /// Whether the constraints fit inside Ball(arm_radius) when an arm is present.
  bool well_formed() const;
  /// Evaluate on a configuration that reveals every constrained site.
  bool holds(const PartialConfig& c) const;
  /// The constrained sites as a partial configuration on `ball`.
  PartialConfig as_partial(std::shared_ptr<const Ball> ball) const;
};

}  // namespace iic
