#include "vessel/tdsim/controllers.hpp"

#include <algorithm>

#include "vessel/error.hpp"

namespace vessel::tdsim {

void ControllerConfig::validate() const {
  if (inverter.empty()) throw InputError("controller '" + id + "' names no inverter");
  if (watched.empty()) throw InputError("controller '" + id + "' watches no generator");
  if (!(p_rating_kw > 0.0 && q_rating_kvar > 0.0)) throw InputError("controller '" + id + "' needs ratings > 0");
  if (!(dp_delay > 0.0)) throw InputError("controller '" + id + "' needs dp_delay > 0");
  if (p_threshold_kw < 0.0 || q_threshold_kvar < 0.0) throw InputError("controller '" + id + "' thresholds must be >= 0");
}

double default_q_threshold_kvar(double rated_kva) { return rated_kva > 3000.0 ? 1500.0 : 1000.0; }

Setpoint peak_shave_setpoint(const ControllerConfig& cfg, double p_kw, double q_kvar) {
  return {std::clamp(p_kw - cfg.p_threshold_kw, 0.0, cfg.p_rating_kw),
          std::clamp(q_kvar - cfg.q_threshold_kvar, 0.0, cfg.q_rating_kvar)};
}

void ControllerState::record(double t, double p_kw, double q_kvar) {
  if (!buf_.empty() && !(t > buf_.back().t)) throw InputError("controller samples must advance in time");
  buf_.push_back({t, p_kw, q_kvar});
  // Keep one sample at or before t - span so interpolation stays possible.
  while (buf_.size() > 2 && buf_[1].t <= t - span_) buf_.pop_front();
}

bool ControllerState::warm(double t) const {
  return !buf_.empty() && buf_.front().t <= t - span_ + 1e-12;
}

ControllerState::Sample ControllerState::at(double t) const {
  if (buf_.empty() || t < buf_.front().t - 1e-12 || t > buf_.back().t + 1e-12) {
    throw InputError("controller buffer does not cover the requested time");
  }
  for (std::size_t k = 1; k < buf_.size(); ++k) {
    if (buf_[k].t >= t) {
      const auto& a = buf_[k - 1];
      const auto& b = buf_[k];
      const double w = (t - a.t) / (b.t - a.t);
      if (w <= 0.0) return a;
      if (w >= 1.0) return b;
      return {t, a.p_kw + w * (b.p_kw - a.p_kw), a.q_kvar + w * (b.q_kvar - a.q_kvar)};
    }
  }
  return buf_.back();
}

Setpoint dp_failover_setpoint(ControllerState& state, const ControllerConfig& cfg, std::optional<double> loss_time) {
  if (loss_time && !state.latched()) {
    if (!state.warm(*loss_time)) {
      throw InputError("controller '" + cfg.id + "': delay buffer not warm at the loss event");
    }
    auto s = state.at(*loss_time - cfg.dp_delay);
    state.latch({std::clamp(s.p_kw, 0.0, cfg.p_rating_kw), std::clamp(s.q_kvar, 0.0, cfg.q_rating_kvar)});
  }
  return state.latched() ? *state.latched() : Setpoint{};
}

}  // namespace vessel::tdsim
