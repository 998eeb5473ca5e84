#pragma once

// Interval lattice algebra on U = {[a,b] : 0 <= a <= b <= 1}.
//
// Three meet/join pairs are provided (coordinate-wise, the "e" lattice and the
// "new" lattice ordered by leq_new). The meets are written once as templates
// over an endpoint type so that the differentiable aggregation layer can run
// the exact same branch logic while tracking which input endpoint was chosen.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ivgnn {

enum class Aggregator { Agr0, AgrE, AgrNew };

std::string_view to_string(Aggregator variant);
/// Accepts "agr_0", "agr_e", "agr_new".
Aggregator parse_aggregator(std::string_view name);
inline constexpr Aggregator kAllAggregators[] = {Aggregator::Agr0, Aggregator::AgrE,
                                                  Aggregator::AgrNew};

/// Tolerance of the "max hi != 1" test in the new meet and join.
inline constexpr double kOneTolerance = 1e-12;

template <class E>
struct BasicInterval {
  E lo;
  E hi;
};

using UnitInterval = BasicInterval<double>;

inline bool operator==(const UnitInterval& a, const UnitInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

/// True when 0 <= lo <= hi <= 1 and both endpoints are finite.
bool is_valid(const UnitInterval& i);

/// Builds a UnitInterval, throwing std::invalid_argument when invalid.
UnitInterval make_unit_interval(double lo, double hi);

std::string format_interval(const UnitInterval& i);

/// Endpoint that remembers where its value came from. source < 0 marks a
/// constant emitted by an operator branch.
struct TracedEndpoint {
  double value = 0.0;
  std::int64_t source = -1;
};

inline double endpoint_value(double e) { return e; }
inline double endpoint_value(const TracedEndpoint& e) { return e.value; }

template <class E>
E endpoint_constant(double v);
template <>
inline double endpoint_constant<double>(double v) { return v; }
template <>
inline TracedEndpoint endpoint_constant<TracedEndpoint>(double v) { return {v, -1}; }

namespace detail {

// Ties resolve to the first argument.
template <class E>
E pick_min(const E& a, const E& b) {
  return endpoint_value(b) < endpoint_value(a) ? b : a;
}
template <class E>
E pick_max(const E& a, const E& b) {
  return endpoint_value(a) < endpoint_value(b) ? b : a;
}

inline bool is_one(double v) { return std::abs(v - 1.0) <= kOneTolerance; }

}  // namespace detail

/// [x1,x2] leq_new [y1,y2] iff y1 < x1, or x1 == y1 and x2 <= y2.
bool leq_new(const UnitInterval& a, const UnitInterval& b);

template <class E>
BasicInterval<E> meet_0(const BasicInterval<E>& a, const BasicInterval<E>& b) {
  return {detail::pick_min(a.lo, b.lo), detail::pick_min(a.hi, b.hi)};
}

template <class E>
BasicInterval<E> meet_e(const BasicInterval<E>& a, const BasicInterval<E>& b) {
  E lo = detail::pick_max(a.lo, b.lo);
  E hi = detail::pick_min(a.hi, b.hi);
  if (endpoint_value(lo) <= endpoint_value(hi)) return {lo, hi};
  return {hi, hi};
}

template <class E>
BasicInterval<E> meet_new(const BasicInterval<E>& a, const BasicInterval<E>& b) {
  E lo = detail::pick_max(a.lo, b.lo);
  E hi_min = detail::pick_min(a.hi, b.hi);
  E hi_max = detail::pick_max(a.hi, b.hi);
  if (endpoint_value(lo) <= endpoint_value(hi_min) &&
      endpoint_value(hi_min) <= endpoint_value(hi_max) &&
      !detail::is_one(endpoint_value(hi_max))) {
    return {lo, hi_min};
  }
  return {lo, endpoint_constant<E>(1.0)};
}

template <class E>
BasicInterval<E> meet(Aggregator variant, const BasicInterval<E>& a, const BasicInterval<E>& b) {
  switch (variant) {
    case Aggregator::Agr0:
      return meet_0(a, b);
    case Aggregator::AgrE:
      return meet_e(a, b);
    case Aggregator::AgrNew:
      return meet_new(a, b);
  }
  throw std::logic_error("unknown aggregator");
}

UnitInterval join_0(const UnitInterval& a, const UnitInterval& b);
UnitInterval join_e(const UnitInterval& a, const UnitInterval& b);
UnitInterval join_new(const UnitInterval& a, const UnitInterval& b);
UnitInterval join(Aggregator variant, const UnitInterval& a, const UnitInterval& b);

/// Canonical order used before folding: ascending lo, ties by ascending hi.
template <class E>
bool canonical_less(const BasicInterval<E>& a, const BasicInterval<E>& b) {
  const double alo = endpoint_value(a.lo), blo = endpoint_value(b.lo);
  if (alo != blo) return alo < blo;
  return endpoint_value(a.hi) < endpoint_value(b.hi);
}

/// N-ary aggregation: left fold of the variant's meet over the items sorted
/// canonically. Sorting is stable, so among equal intervals the earliest
/// input wins every tie.
template <class E>
BasicInterval<E> agr_in_place(Aggregator variant, std::span<BasicInterval<E>> items) {
  if (items.empty()) {
    throw std::invalid_argument("agr: empty multiset (node has no aggregands)");
  }
  if (items.size() <= 32) {
    // Insertion sort: stable and allocation-free for neighborhood-sized inputs.
    for (std::size_t i = 1; i < items.size(); ++i) {
      const BasicInterval<E> key = items[i];
      std::size_t j = i;
      for (; j > 0 && canonical_less(key, items[j - 1]); --j) items[j] = items[j - 1];
      items[j] = key;
    }
  } else {
    std::stable_sort(items.begin(), items.end(), canonical_less<E>);
  }
  BasicInterval<E> acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = meet(variant, acc, items[i]);
  return acc;
}

template <class E>
BasicInterval<E> agr(Aggregator variant, std::span<const BasicInterval<E>> items) {
  std::vector<BasicInterval<E>> sorted(items.begin(), items.end());
  return agr_in_place<E>(variant, sorted);
}

inline UnitInterval agr(Aggregator variant, std::initializer_list<UnitInterval> items) {
  return agr<double>(variant, std::span<const UnitInterval>(items.begin(), items.size()));
}

/// Affine map of a raw interval into U followed by clamping to [0,1].
UnitInterval normalize(double raw_lo, double raw_hi, double stats_min, double stats_max);

/// Least and greatest inputs of each lattice, used for boundary checks.
UnitInterval minimal_element(Aggregator variant);
UnitInterval maximal_element(Aggregator variant);

}  // namespace ivgnn
