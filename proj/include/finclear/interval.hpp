#pragma once

// Clamped interval arithmetic on closed subintervals of [0,1].
//
// The operations mirror a small formula language over recovery-rate ranges:
// an eps-ball around a number, ball widening, reflection 1 - x, addition, and
// scaling by l >= 1, each clamped back into [0,1]. Addition and scaling
// branch on the center of the operand's ball, so intervals carry their
// (center, radius) provenance when built by pm_number and preserved by the
// other operations. Centers are stored re-centered into [0,1]: a ball around
// x > 1 is the ball around 1, a ball around x < 0 the ball around 0.
//
// Everything is exact rational arithmetic; equality means endpoint equality.

#include <optional>
#include <string>

#include "finclear/numeric.hpp"

namespace finclear {

struct PmTag {
  Rational center;  // in [0,1]
  Rational radius;  // > 0
};

class UnitInterval {
 public:
  static UnitInterval empty() { return UnitInterval(); }

  static UnitInterval make(const Rational& lo, const Rational& hi) {
    if (lo < 0 || hi > 1 || lo > hi)
      throw input_error("interval [" + format_rational(lo) + ", " +
                        format_rational(hi) + "] is not a subinterval of [0,1]");
    UnitInterval x;
    x.empty_ = false;
    x.lo_ = lo;
    x.hi_ = hi;
    return x;
  }

  static UnitInterval point(const Rational& x) { return make(x, x); }

  bool is_empty() const { return empty_; }

  const Rational& lo() const {
    if (empty_) throw input_error("empty interval has no endpoints");
    return lo_;
  }
  const Rational& hi() const {
    if (empty_) throw input_error("empty interval has no endpoints");
    return hi_;
  }

  bool has_pm() const { return pm_.has_value(); }
  const PmTag& pm() const {
    if (!pm_) throw input_error("interval carries no ball provenance");
    return *pm_;
  }

  bool contains(const UnitInterval& other) const {
    if (other.empty_) return true;
    if (empty_) return false;
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  friend bool operator==(const UnitInterval& a, const UnitInterval& b) {
    if (a.empty_ != b.empty_) return false;
    if (a.empty_) return true;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  std::string str() const {
    if (empty_) return "(empty)";
    return "[" + format_rational(lo_) + ", " + format_rational(hi_) + "]";
  }

 private:
  friend UnitInterval pm_number(const Rational&, const Rational&);
  friend UnitInterval pm_interval(const UnitInterval&, const Rational&);
  friend UnitInterval one_minus(const UnitInterval&);
  friend UnitInterval add(const UnitInterval&, const UnitInterval&);
  friend UnitInterval scale(const Rational&, const UnitInterval&);

  bool empty_ = true;
  Rational lo_{0}, hi_{0};
  std::optional<PmTag> pm_;
};

namespace detail {
inline Rational clamp01(const Rational& x) {
  if (x < 0) return Rational(0);
  if (x > 1) return Rational(1);
  return x;
}
}  // namespace detail

// Closed eps-ball around x, clamped to [0,1]; the ball is re-centered to 1
// when x > 1 and to 0 when x < 0.
inline UnitInterval pm_number(const Rational& x, const Rational& eps) {
  if (eps <= 0) throw input_error("ball radius must be positive");
  const Rational center = detail::clamp01(x);
  UnitInterval out = UnitInterval::make(detail::clamp01(center - eps),
                                        detail::clamp01(center + eps));
  out.pm_ = PmTag{center, eps};
  return out;
}

// Widens both endpoints by eps, clamped.
inline UnitInterval pm_interval(const UnitInterval& x, const Rational& eps) {
  if (eps <= 0) throw input_error("ball radius must be positive");
  if (x.is_empty()) return UnitInterval::empty();
  UnitInterval out = UnitInterval::make(detail::clamp01(x.lo() - eps),
                                        detail::clamp01(x.hi() + eps));
  if (x.has_pm()) out.pm_ = PmTag{x.pm().center, x.pm().radius + eps};
  return out;
}

// Endpoint reflection [1 - hi, 1 - lo].
inline UnitInterval one_minus(const UnitInterval& x) {
  if (x.is_empty()) return UnitInterval::empty();
  UnitInterval out = UnitInterval::make(1 - x.hi(), 1 - x.lo());
  if (x.has_pm()) out.pm_ = PmTag{1 - x.pm().center, x.pm().radius};
  return out;
}

// Ball addition. Defined on ball-tagged operands only: the case split runs on
// the centers, which a bare interval does not determine.
inline UnitInterval add(const UnitInterval& x, const UnitInterval& y) {
  if (!x.has_pm() || !y.has_pm())
    throw input_error("interval addition requires ball-form operands");
  const Rational center = x.pm().center + y.pm().center;
  const Rational radius = x.pm().radius + y.pm().radius;
  UnitInterval out;
  if (center > 1) {
    out = UnitInterval::make(detail::clamp01(1 - radius), Rational(1));
  } else if (center < 0) {
    out = UnitInterval::make(Rational(0), detail::clamp01(radius));
  } else {
    out = UnitInterval::make(detail::clamp01(x.lo() + y.lo()),
                             detail::clamp01(x.hi() + y.hi()));
  }
  out.pm_ = PmTag{detail::clamp01(center), radius};
  return out;
}

// Scaling by l >= 1, branching on the scaled center.
inline UnitInterval scale(const Rational& l, const UnitInterval& x) {
  if (l < 1) throw input_error("scale factor must be at least 1");
  if (!x.has_pm())
    throw input_error("interval scaling requires a ball-form operand");
  const Rational center = l * x.pm().center;
  const Rational radius = l * x.pm().radius;
  UnitInterval out;
  if (center > 1) {
    out = UnitInterval::make(detail::clamp01(1 - radius), Rational(1));
  } else if (center < 0) {
    out = UnitInterval::make(Rational(0), detail::clamp01(radius));
  } else {
    out = UnitInterval::make(detail::clamp01(l * x.lo()),
                             detail::clamp01(l * x.hi()));
  }
  out.pm_ = PmTag{detail::clamp01(center), radius};
  return out;
}

// Componentwise order: inf and sup both no larger. Comparing an empty
// interval yields false and reports why through the optional out-parameter.
inline bool precedes(const UnitInterval& x, const UnitInterval& y,
                     std::string* warning = nullptr) {
  if (x.is_empty() || y.is_empty()) {
    if (warning) *warning = "precedes compared an empty interval";
    return false;
  }
  return x.lo() <= y.lo() && x.hi() <= y.hi();
}

}  // namespace finclear
