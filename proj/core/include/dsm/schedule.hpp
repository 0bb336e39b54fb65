#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

namespace dsm {

/// Faster power law used on the initial interval [0, t_switch]:
///   a(t) = a(t_switch) * ((c1 + t_switch) / (c1 + t))^exponent,
/// which joins the tail schedule continuously at t_switch.
struct InitialOverride {
  double t_switch = 0.0;
  double exponent = 1.0;
};

struct ScheduleValue {
  double a;
  double a_dot;
};

/// Sampled decay ratios of a schedule on a geometric time grid.
struct ScheduleConditionReport {
  std::vector<double> times;
  std::vector<double> rate;          // |a_dot| / a
  std::vector<double> rate_squared;  // |a_dot| / a^2
  bool rate_decreasing = false;
  bool rate_squared_decreasing = false;
};

/// Regularization schedule a(t) = c0 / (c1 + t)^b with 0 < b < 1, optionally
/// replaced on [0, t_switch] by a faster power law.
class Schedule {
 public:
  /// Throws dsm::Error(Input) unless c0 > 0, c1 > 0, 0 < b < 1 and the
  /// override (if any) has t_switch >= 0 and exponent > 0.
  Schedule(double c0, double c1, double b,
           std::optional<InitialOverride> initial = std::nullopt);

  /// c0 = c1 = 1, b = 0.5
  static Schedule standard() { return Schedule(1.0, 1.0, 0.5); }

  /// Parses "c0=<v>,c1=<v>,b=<v>" with optional "t_switch=<v>,fast=<v>".
  /// Missing keys take the standard values.
  static Schedule parse(std::string_view text);

  double c0() const noexcept { return c0_; }
  double c1() const noexcept { return c1_; }
  double b() const noexcept { return b_; }
  const std::optional<InitialOverride>& initial_override() const noexcept { return initial_; }

  /// a(t) and its analytic derivative. Throws Domain for t < 0.
  ScheduleValue eval(double t) const;
  double operator()(double t) const { return eval(t).a; }

  /// Solves a(t) = a_target. Throws Domain for a_target <= 0 and NoSolution
  /// for a_target > a(0).
  double inverse_time(double a_target) const;

  /// Samples |a_dot|/a and |a_dot|/a^2 on a geometric grid ending at
  /// `horizon`. The decreasing flags are judged beyond the initial override.
  ScheduleConditionReport check_conditions(double horizon, int samples) const;

 private:
  double tail(double t) const { return c0_ / std::pow(c1_ + t, b_); }

  double c0_;
  double c1_;
  double b_;
  std::optional<InitialOverride> initial_;
};

}  // namespace dsm
