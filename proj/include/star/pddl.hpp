#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "star/foon.hpp"
#include "star/retrieval.hpp"

namespace star {

/// Parse/semantic error in PDDL text; positions are 1-based.
class PddlError : public std::runtime_error {
  public:
    PddlError(std::size_t line, std::size_t col, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + message),
          line_(line),
          col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

  private:
    std::size_t line_;
    std::size_t col_;
};

struct TypedName {
    std::string name;
    std::string type;
    bool operator==(const TypedName&) const = default;
};

struct Literal {
    std::string predicate;
    std::vector<std::string> args;
    bool operator==(const Literal&) const = default;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypedName> params;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> params;
    std::vector<Literal> preconditions;  // positive conjunction
    std::vector<Literal> add;
    std::vector<Literal> del;
};

struct StripsDomain {
    std::string name;
    std::vector<TypedName> types;  // name + parent ("" for root types)
    std::vector<TypedName> constants;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionSchema> actions;
};

struct StripsProblem {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::vector<Literal> init;
    std::vector<Literal> goal;
};

/// Canonical text form; parse(print(x)) then print again is byte-identical.
std::string print_domain(const StripsDomain& d);
std::string print_problem(const StripsProblem& p);

/// Accepts the `:strips :typing` subset; any other requirement flag is
/// rejected by name. Detects domain vs problem from the define header.
struct ParsedPddl {
    std::optional<StripsDomain> domain;
    std::optional<StripsProblem> problem;
};
ParsedPddl parse_pddl(const std::string& text);

/// PDDL-safe identifier: lowercased, whitespace collapsed to '-'.
std::string mangle_name(const std::string& name);

/// Assigns deterministic action names across a tree: first use of a
/// verb keeps the verb, later units with the same verb but a different
/// signature get `verb_2`, `verb_3`, ...
class ActionNameRegistry {
  public:
    std::string name_for(const std::string& verb, const std::string& unit_id);

  private:
    std::map<std::string, std::vector<std::string>> seen_;  // verb -> unit_ids
};

/// Template emission of one functional unit as a domain/problem pair:
/// inputs become preconditions, outputs add effects, consumed inputs
/// delete effects; the problem starts from the kitchen and its goal is
/// the unit's outputs.
std::pair<StripsDomain, StripsProblem> emit_strips(const FunctionalUnit& unit,
                                                   const KitchenState& kitchen,
                                                   ActionNameRegistry* registry = nullptr);

std::pair<std::string, std::string> emit_domain_problem(const FunctionalUnit& unit,
                                                        const KitchenState& kitchen,
                                                        ActionNameRegistry* registry = nullptr);

}  // namespace star
