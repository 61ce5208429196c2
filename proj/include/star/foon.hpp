#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace star {

/// Error from the line-oriented FOON-text reader. `line` is 1-based.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::string message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// An object together with the states it is observed or required in.
struct ObjectNode {
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> contains;

    bool operator==(const ObjectNode&) const = default;
};

struct MotionNode {
    std::string verb;
    std::map<std::string, std::string> parameters;

    bool operator==(const MotionNode&) const = default;
};

/// Failure context under which a FailNet unit applies.
struct RecoveryTrigger {
    std::string failure_type;
    std::vector<std::string> objects;

    bool operator==(const RecoveryTrigger&) const = default;
    auto operator<=>(const RecoveryTrigger&) const = default;
};

/// One action: input objects are transformed through a motion into
/// output objects. Triggers are FailNet metadata and do not take part
/// in identity.
struct FunctionalUnit {
    std::vector<ObjectNode> inputs;
    MotionNode motion;
    std::vector<ObjectNode> outputs;
    std::vector<RecoveryTrigger> triggers;

    /// Content-derived id: sha256 of the canonical serialization,
    /// truncated to 16 hex chars. Reordering inputs, outputs or states
    /// does not change it.
    std::string unit_id() const;

    /// True when the input object is transformed away: no output
    /// carries its name.
    bool consumes(const std::string& input_name) const;
};

struct TaskTree {
    std::vector<FunctionalUnit> units;
    ObjectNode goal;
};

struct Violation {
    std::string field;
    std::string rule;
};

/// Lowercases ASCII; FOON-text is case-insensitive by construction.
std::string to_lower(std::string s);

/// Sorted states/contains/inputs/outputs and motion params by key.
ObjectNode canonical_object(ObjectNode o);
FunctionalUnit canonical_unit(FunctionalUnit u);
std::vector<FunctionalUnit> canonicalize(std::vector<FunctionalUnit> units);

/// Canonical single-unit block, one tag per line, without the trailing
/// blank separator. Trigger lines precede the `U` line.
std::string serialize_unit(const FunctionalUnit& u);

/// Canonical FOON-text for a unit sequence: blocks in the given order,
/// separated by one blank line. Empty list yields the empty string.
std::string serialize_subgraph(const std::vector<FunctionalUnit>& units);

/// Parses headerless FOON-text into units in file order. Section
/// headers are rejected here; they belong to store files.
std::vector<FunctionalUnit> parse_subgraph(const std::string& text);

/// Invariant check; returns one entry per violated rule.
std::vector<Violation> validate_unit(const FunctionalUnit& u);

/// Identity up to input order, output order and state order.
bool unit_equals(const FunctionalUnit& a, const FunctionalUnit& b);

/// `name | state,state` or a bare name.
ObjectNode parse_object_spec(const std::string& spec);

}  // namespace star
