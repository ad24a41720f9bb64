#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace vessel::tdsim {

enum class ControllerMode { PeakShave, DpFailover };

struct ControllerConfig {
  std::string id;
  ControllerMode mode = ControllerMode::PeakShave;
  std::string inverter;              ///< converter id driven by this controller
  std::vector<std::string> watched;  ///< generator ids
  double p_threshold_kw = 0.0;       ///< per watched generator
  double q_threshold_kvar = 0.0;     ///< per watched generator
  double p_rating_kw = 0.0;
  double q_rating_kvar = 0.0;
  double dp_delay = 0.1;  ///< s

  /// Throws InputError on non-positive ratings or delay.
  void validate() const;
};

/// Default Q threshold for a fixture-fleet generator: 1 Mvar for the 2395 kVA
/// sets, 1.5 Mvar for the 3213 kVA sets.
double default_q_threshold_kvar(double rated_kva);

struct Setpoint {
  double p_kw = 0.0;
  double q_kvar = 0.0;

  bool operator==(const Setpoint&) const = default;
};

/// clamp(measured - threshold, 0, rating) for P and Q.
Setpoint peak_shave_setpoint(const ControllerConfig& cfg, double p_kw, double q_kvar);

/// Delay buffer of watched-generator power plus the failover latch.
class ControllerState {
 public:
  struct Sample {
    double t;
    double p_kw;
    double q_kvar;
  };

  explicit ControllerState(double span) : span_(span) {}

  /// Appends a sample (times must increase) and drops samples older than the span needs.
  void record(double t, double p_kw, double q_kvar);

  /// True once the buffer reaches back to t - span.
  bool warm(double t) const;

  /// Sample at time t, linearly interpolated. Throws InputError when t is outside the buffer.
  Sample at(double t) const;

  const std::optional<Setpoint>& latched() const { return latched_; }
  void latch(Setpoint s) { latched_ = s; }
  void reset() { latched_.reset(); }
  const std::deque<Sample>& samples() const { return buf_; }

 private:
  double span_;
  std::deque<Sample> buf_;
  std::optional<Setpoint> latched_;
};

/// On a loss event at `loss_time`, latches the sample taken dp_delay earlier,
/// clamped to the ratings; holds the latch until `state.reset()`. No event and
/// no latch gives zero. Throws InputError when the buffer is not warm.
Setpoint dp_failover_setpoint(ControllerState& state, const ControllerConfig& cfg,
                              std::optional<double> loss_time);

}  // namespace vessel::tdsim
