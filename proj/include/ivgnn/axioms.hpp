#pragma once

// Exhaustive grid checker for the aggregation axioms and lattice laws.

#include <cstddef>
#include <string>
#include <vector>

#include "ivgnn/interval.hpp"

namespace ivgnn {

enum class AxiomKind {
  Closure,
  Boundary,
  Idempotency,
  Commutativity,
  FoldSymmetry,
  Monotonicity,
  Associativity,
  Absorption,
  JoinCommutativity,
  JoinIdempotency,
  LowerBound,
};

std::string_view to_string(AxiomKind kind);

/// A recorded violation. `items` holds the intervals needed to replay it; the
/// meaning depends on `kind` (see replay_counterexample).
struct Counterexample {
  AxiomKind kind;
  std::vector<UnitInterval> items;
};

struct AxiomReport {
  Aggregator variant = Aggregator::AgrNew;
  double grid_step = 0.0;
  std::size_t grid_intervals = 0;
  bool closure_ok = true;
  bool boundary_ok = true;
  bool idempotency_ok = true;
  bool commutativity_ok = true;
  bool fold_symmetry_ok = true;
  std::size_t monotonicity_violations = 0;
  std::size_t lattice_law_violations = 0;
  std::vector<Counterexample> counterexamples;
};

/// All intervals of U whose endpoints lie on {0, step, 2 step, ..., 1}.
/// Requires 0 < step <= 0.25.
std::vector<UnitInterval> grid_intervals(double step);

/// Runs every check over the grid. Hard axioms (closure, boundary,
/// idempotency, commutativity, fold symmetry) set the *_ok flags; monotonicity
/// with respect to leq_new and the lattice laws are counted only.
/// At most `max_counterexamples` are stored per kind.
AxiomReport check_axioms(Aggregator variant, double grid_step,
                         std::size_t max_counterexamples = 8);

/// Re-evaluates a stored counterexample; true when it is still a violation.
bool replay_counterexample(Aggregator variant, const Counterexample& c);

/// Plain-text rendering used by the CLI.
std::string format_report(const AxiomReport& report);

/// Checks reflexivity, antisymmetry, transitivity and totality of leq_new on
/// the grid together with the global bounds [1,1] and [0,1].
struct OrderReport {
  std::size_t reflexivity_violations = 0;
  std::size_t antisymmetry_violations = 0;
  std::size_t transitivity_violations = 0;
  std::size_t totality_violations = 0;
  std::size_t bound_violations = 0;
  bool ok() const {
    return reflexivity_violations + antisymmetry_violations + transitivity_violations +
               totality_violations + bound_violations ==
           0;
  }
};

OrderReport check_leq_new_order(double grid_step);

}  // namespace ivgnn
