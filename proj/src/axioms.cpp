#include "ivgnn/axioms.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ivgnn {
namespace {

constexpr double kEqTolerance = 1e-12;

bool same(const UnitInterval& a, const UnitInterval& b) {
  return std::abs(a.lo - b.lo) <= kEqTolerance && std::abs(a.hi - b.hi) <= kEqTolerance;
}

UnitInterval agr_of(Aggregator v, std::span<const UnitInterval> items) {
  return agr<double>(v, items);
}

UnitInterval agr_pair(Aggregator v, const UnitInterval& a, const UnitInterval& b) {
  const std::array<UnitInterval, 2> items{a, b};
  return agr_of(v, items);
}

// Lower-bound consistency is only meaningful where the lattice order is known.
bool lower_bound_violated(Aggregator v, const UnitInterval& a, const UnitInterval& b) {
  const UnitInterval m = meet(v, a, b);
  switch (v) {
    case Aggregator::AgrNew:
      return !(leq_new(m, a) && leq_new(m, b));
    case Aggregator::Agr0:
      return !(m.lo <= a.lo && m.hi <= a.hi && m.lo <= b.lo && m.hi <= b.hi);
    case Aggregator::AgrE:
      return false;
  }
  return false;
}

class Recorder {
 public:
  Recorder(AxiomReport& report, std::size_t cap) : report_(report), cap_(cap) {}

  void add(AxiomKind kind, std::vector<UnitInterval> items) {
    if (stored_[kind]++ < cap_) report_.counterexamples.push_back({kind, std::move(items)});
  }

 private:
  AxiomReport& report_;
  std::size_t cap_;
  std::map<AxiomKind, std::size_t> stored_;
};

}  // namespace

std::string_view to_string(AxiomKind kind) {
  switch (kind) {
    case AxiomKind::Closure:
      return "closure";
    case AxiomKind::Boundary:
      return "boundary";
    case AxiomKind::Idempotency:
      return "idempotency";
    case AxiomKind::Commutativity:
      return "commutativity";
    case AxiomKind::FoldSymmetry:
      return "fold_symmetry";
    case AxiomKind::Monotonicity:
      return "monotonicity";
    case AxiomKind::Associativity:
      return "associativity";
    case AxiomKind::Absorption:
      return "absorption";
    case AxiomKind::JoinCommutativity:
      return "join_commutativity";
    case AxiomKind::JoinIdempotency:
      return "join_idempotency";
    case AxiomKind::LowerBound:
      return "lower_bound";
  }
  return "unknown";
}

std::vector<UnitInterval> grid_intervals(double step) {
  if (!(step > 0.0 && step <= 0.25)) {
    throw std::invalid_argument("grid step must satisfy 0 < step <= 0.25");
  }
  // k / n is exact at both ends when 1/step is an integer.
  const double inv = 1.0 / step;
  const auto n = static_cast<int>(std::llround(inv));
  std::vector<double> points;
  if (std::abs(inv - n) < 1e-9) {
    for (int k = 0; k <= n; ++k) points.push_back(static_cast<double>(k) / n);
  } else {
    for (int k = 0; k * step <= 1.0 + 1e-12; ++k) points.push_back(std::min(1.0, k * step));
  }
  std::vector<UnitInterval> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i; j < points.size(); ++j) out.push_back({points[i], points[j]});
  }
  return out;
}

AxiomReport check_axioms(Aggregator v, double grid_step, std::size_t max_counterexamples) {
  AxiomReport r;
  r.variant = v;
  r.grid_step = grid_step;
  const std::vector<UnitInterval> grid = grid_intervals(grid_step);
  r.grid_intervals = grid.size();
  Recorder rec(r, max_counterexamples);
  const std::size_t n = grid.size();

  for (const auto extreme : {minimal_element(v), maximal_element(v)}) {
    for (std::size_t copies : {1u, 2u, 5u}) {
      std::vector<UnitInterval> items(copies, extreme);
      if (!same(agr_of(v, items), extreme)) {
        r.boundary_ok = false;
        rec.add(AxiomKind::Boundary, items);
      }
    }
  }

  for (const auto& i : grid) {
    const std::array<UnitInterval, 3> triple{i, i, i};
    if (!same(meet(v, i, i), i) || !same(agr_of(v, triple), i)) {
      r.idempotency_ok = false;
      rec.add(AxiomKind::Idempotency, {i});
    }
    if (!same(join(v, i, i), i)) {
      ++r.lattice_law_violations;
      rec.add(AxiomKind::JoinIdempotency, {i});
    }
  }

  for (const auto& a : grid) {
    for (const auto& b : grid) {
      const UnitInterval m = meet(v, a, b);
      const UnitInterval j = join(v, a, b);
      if (!is_valid(m) || !is_valid(j)) {
        r.closure_ok = false;
        rec.add(AxiomKind::Closure, {a, b});
      }
      if (!same(m, meet(v, b, a))) {
        r.commutativity_ok = false;
        rec.add(AxiomKind::Commutativity, {a, b});
      }
      if (!same(j, join(v, b, a))) {
        ++r.lattice_law_violations;
        rec.add(AxiomKind::JoinCommutativity, {a, b});
      }
      if (!same(meet(v, a, j), a) || !same(join(v, a, m), a)) {
        ++r.lattice_law_violations;
        rec.add(AxiomKind::Absorption, {a, b});
      }
      if (lower_bound_violated(v, a, b)) {
        ++r.lattice_law_violations;
        rec.add(AxiomKind::LowerBound, {a, b});
      }
    }
  }

  for (std::size_t ia = 0; ia < n; ++ia) {
    const auto& a = grid[ia];
    for (std::size_t ib = 0; ib < n; ++ib) {
      const auto& b = grid[ib];
      const UnitInterval ab = meet(v, a, b);
      const UnitInterval agr_ab = agr_pair(v, a, b);
      for (std::size_t ic = 0; ic < n; ++ic) {
        const auto& c = grid[ic];
        if (!same(meet(v, ab, c), meet(v, a, meet(v, b, c)))) {
          ++r.lattice_law_violations;
          rec.add(AxiomKind::Associativity, {a, b, c});
        }
        // Monotone in the first argument (c plays A'); the second follows by
        // commutativity of the binary aggregate.
        if (ia != ic && leq_new(a, c) && !leq_new(agr_ab, agr_pair(v, c, b))) {
          ++r.monotonicity_violations;
          rec.add(AxiomKind::Monotonicity, {a, c, b});
        }
      }
    }
  }

  // Every multiset of three grid intervals under all six orderings.
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        const std::array<UnitInterval, 3> base{grid[i], grid[j], grid[k]};
        const UnitInterval ref = agr_of(v, base);
        for (const auto& p : kPerms) {
          const std::array<UnitInterval, 3> perm{base[p[0]], base[p[1]], base[p[2]]};
          if (!same(agr_of(v, perm), ref)) {
            r.fold_symmetry_ok = false;
            rec.add(AxiomKind::FoldSymmetry,
                    {base[0], base[1], base[2], perm[0], perm[1], perm[2]});
          }
        }
      }
    }
  }
  return r;
}

bool replay_counterexample(Aggregator v, const Counterexample& c) {
  const auto& it = c.items;
  switch (c.kind) {
    case AxiomKind::Closure:
      return !is_valid(meet(v, it[0], it[1])) || !is_valid(join(v, it[0], it[1]));
    case AxiomKind::Boundary:
      return !same(agr_of(v, it), it[0]);
    case AxiomKind::Idempotency: {
      const std::array<UnitInterval, 3> triple{it[0], it[0], it[0]};
      return !same(meet(v, it[0], it[0]), it[0]) || !same(agr_of(v, triple), it[0]);
    }
    case AxiomKind::Commutativity:
      return !same(meet(v, it[0], it[1]), meet(v, it[1], it[0]));
    case AxiomKind::FoldSymmetry:
      return !same(agr_of(v, std::span(it).first(3)), agr_of(v, std::span(it).subspan(3, 3)));
    case AxiomKind::Monotonicity:
      return leq_new(it[0], it[1]) &&
             !leq_new(agr_pair(v, it[0], it[2]), agr_pair(v, it[1], it[2]));
    case AxiomKind::Associativity:
      return !same(meet(v, meet(v, it[0], it[1]), it[2]),
                   meet(v, it[0], meet(v, it[1], it[2])));
    case AxiomKind::Absorption:
      return !same(meet(v, it[0], join(v, it[0], it[1])), it[0]) ||
             !same(join(v, it[0], meet(v, it[0], it[1])), it[0]);
    case AxiomKind::JoinCommutativity:
      return !same(join(v, it[0], it[1]), join(v, it[1], it[0]));
    case AxiomKind::JoinIdempotency:
      return !same(join(v, it[0], it[0]), it[0]);
    case AxiomKind::LowerBound:
      return lower_bound_violated(v, it[0], it[1]);
  }
  return false;
}

std::string format_report(const AxiomReport& r) {
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::ostringstream os;
  os << "variant: " << to_string(r.variant) << '\n'
     << "grid_step: " << r.grid_step << '\n'
     << "grid_intervals: " << r.grid_intervals << '\n'
     << "closure: " << verdict(r.closure_ok) << '\n'
     << "boundary: " << verdict(r.boundary_ok) << '\n'
     << "idempotency: " << verdict(r.idempotency_ok) << '\n'
     << "commutativity: " << verdict(r.commutativity_ok) << '\n'
     << "fold_symmetry: " << verdict(r.fold_symmetry_ok) << '\n'
     << "monotonicity_violations (leq_new, reported): " << r.monotonicity_violations << '\n'
     << "lattice_law_violations (reported): " << r.lattice_law_violations << '\n';
  for (const auto& c : r.counterexamples) {
    os << "  counterexample " << to_string(c.kind) << ':';
    for (const auto& i : c.items) os << ' ' << format_interval(i);
    os << '\n';
  }
  return os.str();
}

OrderReport check_leq_new_order(double grid_step) {
  const auto grid = grid_intervals(grid_step);
  OrderReport r;
  const UnitInterval bottom{1.0, 1.0}, top{0.0, 1.0};
  for (const auto& a : grid) {
    if (!leq_new(a, a)) ++r.reflexivity_violations;
    if (!leq_new(bottom, a) || !leq_new(a, top)) ++r.bound_violations;
    for (const auto& b : grid) {
      const bool ab = leq_new(a, b), ba = leq_new(b, a);
      if (ab && ba && !(a == b)) ++r.antisymmetry_violations;
      if (!ab && !ba) ++r.totality_violations;
      if (!ab) continue;
      for (const auto& c : grid) {
        if (leq_new(b, c) && !leq_new(a, c)) ++r.transitivity_violations;
      }
    }
  }
  return r;
}

}  // namespace ivgnn
