#include "ivgnn/interval.hpp"

#include <cmath>
#include <sstream>

namespace ivgnn {

std::string_view to_string(Aggregator variant) {
  switch (variant) {
    case Aggregator::Agr0:
      return "agr_0";
    case Aggregator::AgrE:
      return "agr_e";
    case Aggregator::AgrNew:
      return "agr_new";
  }
  return "unknown";
}

Aggregator parse_aggregator(std::string_view name) {
  if (name == "agr_0") return Aggregator::Agr0;
  if (name == "agr_e") return Aggregator::AgrE;
  if (name == "agr_new") return Aggregator::AgrNew;
  throw std::invalid_argument("unknown aggregator '" + std::string(name) +
                              "' (expected agr_0, agr_e or agr_new)");
}

bool is_valid(const UnitInterval& i) {
  return std::isfinite(i.lo) && std::isfinite(i.hi) && i.lo >= 0.0 && i.lo <= i.hi &&
         i.hi <= 1.0;
}

UnitInterval make_unit_interval(double lo, double hi) {
  UnitInterval i{lo, hi};
  if (!is_valid(i)) {
    throw std::invalid_argument("not a unit interval: " + format_interval(i));
  }
  return i;
}

std::string format_interval(const UnitInterval& i) {
  std::ostringstream os;
  os << '[' << i.lo << ',' << i.hi << ']';
  return os.str();
}

bool leq_new(const UnitInterval& a, const UnitInterval& b) {
  return b.lo < a.lo || (a.lo == b.lo && a.hi <= b.hi);
}

UnitInterval join_0(const UnitInterval& a, const UnitInterval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

UnitInterval join_e(const UnitInterval& a, const UnitInterval& b) {
  if (a.lo == a.hi && b.lo == b.hi) {
    const double m = std::max(a.hi, b.hi);
    return {m, m};
  }
  if (a.lo == a.hi && a.hi < b.lo && b.lo < b.hi) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
  }
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

UnitInterval join_new(const UnitInterval& a, const UnitInterval& b) {
  UnitInterval out;
  if (!detail::is_one(std::max(a.hi, b.hi))) {
    out = {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
  } else {
    out = {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
  }
  // The "otherwise" branch cannot invert endpoints on U (min lo is at most the
  // lo of the interval owning min hi), but keep the result inside U anyway.
  out.lo = std::min(out.lo, out.hi);
  return out;
}

UnitInterval join(Aggregator variant, const UnitInterval& a, const UnitInterval& b) {
  switch (variant) {
    case Aggregator::Agr0:
      return join_0(a, b);
    case Aggregator::AgrE:
      return join_e(a, b);
    case Aggregator::AgrNew:
      return join_new(a, b);
  }
  throw std::logic_error("unknown aggregator");
}

UnitInterval normalize(double raw_lo, double raw_hi, double stats_min, double stats_max) {
  if (!(stats_min < stats_max)) {
    throw std::invalid_argument("normalize: degenerate range (min >= max)");
  }
  if (raw_lo > raw_hi) {
    throw std::invalid_argument("normalize: raw interval has lo > hi");
  }
  const double span = stats_max - stats_min;
  auto map = [&](double x) { return std::clamp((x - stats_min) / span, 0.0, 1.0); };
  return {map(raw_lo), map(raw_hi)};
}

UnitInterval minimal_element(Aggregator variant) {
  return variant == Aggregator::AgrNew ? UnitInterval{1.0, 1.0} : UnitInterval{0.0, 0.0};
}

UnitInterval maximal_element(Aggregator variant) {
  return variant == Aggregator::AgrNew ? UnitInterval{0.0, 1.0} : UnitInterval{1.0, 1.0};
}

}  // namespace ivgnn
