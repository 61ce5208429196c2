#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "star/pddl.hpp"

namespace star {

class PlanningError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GroundedAction {
    std::string name;  // "(verb arg ...)"
    std::vector<int> pre;
    std::vector<int> add;
    std::vector<int> del;
};

/// Exhaustively instantiated STRIPS task over an indexed fact universe.
struct GroundedPlanningTask {
    std::vector<std::string> facts;
    std::vector<GroundedAction> actions;
    std::vector<int> init;
    std::vector<int> goal;
};

struct Plan {
    std::vector<std::string> steps;

    /// One action per line, `(name arg ...)`.
    std::string to_text() const;
};

struct PlanValidation {
    bool valid = false;
    std::size_t first_violated_step = 0;  // meaningful when !valid
    std::string message;
};

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Typed instantiation with static-unreachability pruning: an action
/// whose precondition appears in neither init nor any add list is
/// dropped. Throws PlanningError past `action_cap` grounded actions.
GroundedPlanningTask ground(const StripsDomain& domain, const StripsProblem& problem,
                            std::size_t action_cap = 1000000);

/// Relaxed-plan length from the delete relaxation (h_FF);
/// kUnreachable when the goal cannot be reached even ignoring deletes.
int relaxed_plan_length(const GroundedPlanningTask& task, const std::vector<bool>& state);
int relaxed_plan_length(const GroundedPlanningTask& task);  // from init

/// Greedy best-first search on h_FF, ties by insertion order, with a
/// breadth-first fallback when the heuristic is dead at the root, and a
/// validity-preserving redundant-step elimination pass on the result.
/// nullopt = exhaustively unsolvable; PlanningError past `node_budget`.
std::optional<Plan> solve(const GroundedPlanningTask& task, std::size_t node_budget = 1000000);

/// Simulates add/delete semantics from init.
PlanValidation validate_plan(const Plan& plan, const GroundedPlanningTask& task);

struct CompiledUnit {
    std::string unit_id;
    std::string domain_text;
    std::string problem_text;
    Plan plan;
};

/// Per-unit emission and solve, threading each unit's outputs into the
/// next problem's init. Throws PlanningError naming the offending unit.
std::vector<CompiledUnit> compile_tree(const TaskTree& tree, const KitchenState& kitchen);

}  // namespace star
