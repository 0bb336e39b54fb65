#include "dsm/schedule.hpp"

#include <cmath>
#include <string>

#include "dsm/errors.hpp"

namespace dsm {
namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

Schedule::Schedule(double c0, double c1, double b, std::optional<InitialOverride> initial)
    : c0_(c0), c1_(c1), b_(b), initial_(initial) {
  if (!finite_positive(c0_) || !finite_positive(c1_)) {
    throw Error(ErrorKind::Input, "schedule requires c0 > 0 and c1 > 0");
  }
  if (!(b_ > 0.0 && b_ < 1.0)) {
    throw Error(ErrorKind::Input, "schedule exponent b must lie in (0, 1), got " + std::to_string(b_));
  }
  if (initial_) {
    if (!(initial_->t_switch >= 0.0) || !std::isfinite(initial_->t_switch) ||
        !finite_positive(initial_->exponent)) {
      throw Error(ErrorKind::Input, "initial override requires t_switch >= 0 and exponent > 0");
    }
  }
}

Schedule Schedule::parse(std::string_view text) {
  double c0 = 1.0, c1 = 1.0, b = 0.5;
  std::optional<double> t_switch, fast;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::Input, "schedule item '" + std::string(item) + "' lacks '='");
      }
      const std::string key(item.substr(0, eq));
      const std::string raw(item.substr(eq + 1));
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Input, "schedule value '" + raw + "' is not a number");
      }
      if (key == "c0") c0 = value;
      else if (key == "c1") c1 = value;
      else if (key == "b") b = value;
      else if (key == "t_switch") t_switch = value;
      else if (key == "fast") fast = value;
      else throw Error(ErrorKind::Input, "unknown schedule key '" + key + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (t_switch.has_value() != fast.has_value()) {
    throw Error(ErrorKind::Input, "t_switch and fast must be given together");
  }
  std::optional<InitialOverride> initial;
  if (t_switch) initial = InitialOverride{*t_switch, *fast};
  return Schedule(c0, c1, b, initial);
}

ScheduleValue Schedule::eval(double t) const {
  if (!(t >= 0.0)) {
    throw Error(ErrorKind::Domain, "schedule evaluated at negative time " + std::to_string(t));
  }
  if (initial_ && t < initial_->t_switch) {
    const double ts = initial_->t_switch;
    const double p = initial_->exponent;
    const double a = tail(ts) * std::pow((c1_ + ts) / (c1_ + t), p);
    return {a, -p * a / (c1_ + t)};
  }
  const double a = tail(t);
  return {a, -b_ * a / (c1_ + t)};
}

double Schedule::inverse_time(double a_target) const {
  if (!(a_target > 0.0)) {
    throw Error(ErrorKind::Domain, "inverse_time requires a positive target");
  }
  const double a0 = eval(0.0).a;
  if (a_target > a0) {
    throw Error(ErrorKind::NoSolution, "target exceeds a(0); no nonnegative time solves a(t) = target");
  }
  if (a_target == a0) return 0.0;

  const double tail_time = std::pow(c0_ / a_target, 1.0 / b_) - c1_;
  if (!initial_) return std::max(0.0, tail_time);

  // Bisection on the monotone map t -> a(t).
  double lo = 0.0;
  double hi = std::max(initial_->t_switch, tail_time);
  while (eval(hi).a > a_target) hi = 2.0 * hi + 1.0;
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (eval(mid).a > a_target) lo = mid;
    else hi = mid;
  }
  const double a_lo = eval(lo).a;
  const double a_hi = eval(hi).a;
  return std::abs(a_lo - a_target) <= std::abs(a_hi - a_target) ? lo : hi;
}

ScheduleConditionReport Schedule::check_conditions(double horizon, int samples) const {
  if (!(horizon > 0.0) || samples < 2) {
    throw Error(ErrorKind::Input, "check_conditions requires horizon > 0 and samples >= 2");
  }
  ScheduleConditionReport report;
  const double start = std::min(1.0, horizon / 2.0);
  const double ratio = std::pow(horizon / start, 1.0 / (samples - 1));
  double t = start;
  for (int k = 0; k < samples; ++k, t *= ratio) {
    const double tk = (k == samples - 1) ? horizon : t;
    const auto [a, a_dot] = eval(tk);
    report.times.push_back(tk);
    report.rate.push_back(std::abs(a_dot) / a);
    report.rate_squared.push_back(std::abs(a_dot) / (a * a));
  }

  const double tail_start = initial_ ? initial_->t_switch : 0.0;
  auto decreasing = [&](const std::vector<double>& v) {
    bool ok = true;
    std::size_t counted = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (report.times[k - 1] < tail_start) continue;
      ++counted;
      ok = ok && v[k] < v[k - 1];
    }
    return ok && counted > 0;
  };
  report.rate_decreasing = decreasing(report.rate);
  report.rate_squared_decreasing = decreasing(report.rate_squared);
  return report;
}

}  // namespace dsm
