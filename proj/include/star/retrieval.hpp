#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "star/foon.hpp"
#include "star/store.hpp"
#include "star/taxonomy.hpp"

namespace star {

/// Objects currently observed in the environment.
struct KitchenState {
    std::vector<ObjectNode> objects;

    static KitchenState from_text(const std::string& text);
    static KitchenState load(const std::string& path);
};

/// candidate satisfies required iff names match and every required
/// state is present on the candidate.
bool satisfies(const ObjectNode& required, const ObjectNode& candidate);
bool kitchen_satisfies(const KitchenState& kitchen, const ObjectNode& required);

enum class RetrievalCase { NoMatch, CategoryMatch, ExactMatch };

std::string retrieval_case_name(RetrievalCase c);

struct RetrievalOutcome {
    RetrievalCase kase = RetrievalCase::NoMatch;
    std::optional<TaskTree> tree;
    std::optional<std::string> partial_source;
};

class RetrievalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Backward chaining from the goal over the section's output index.
/// Producer ties prefer the fewest unsatisfied inputs against the
/// kitchen, then ascending unit_id. Returned units are dependency
/// ordered and the tree is guaranteed executable from the kitchen.
/// Absent when nothing in the section reaches the goal.
std::optional<TaskTree> search_exact(const KnowledgeStore& store, const ObjectNode& goal,
                                     const KitchenState& kitchen,
                                     Section section = Section::foon);

/// Three-case KG search: exact tree, a same-class neighbor's tree, or
/// no match.
RetrievalOutcome retrieve(const KnowledgeStore& store, const std::string& request_goal,
                          const KitchenState& kitchen, const DishTaxonomy& taxonomy);

}  // namespace star
