#include "star/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace star {

namespace {

// ---- s-expression layer ----------------------------------------------

struct SExpr {
    bool is_atom = false;
    std::string atom;
    std::vector<SExpr> items;
    std::size_t line = 0;
    std::size_t col = 0;
};

struct Token {
    enum Kind { LParen, RParen, Atom } kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    std::size_t line = 1, col = 0;
    std::string atom;
    std::size_t atom_line = 0, atom_col = 0;
    auto flush = [&]() {
        if (!atom.empty()) {
            tokens.push_back({Token::Atom, to_lower(atom), atom_line, atom_col});
            atom.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        ++col;
        if (c == '\n') {
            flush();
            ++line;
            col = 0;
            continue;
        }
        if (c == ';') {
            flush();
            while (i + 1 < text.size() && text[i + 1] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (c == '(' || c == ')') {
            flush();
            tokens.push_back(
                {c == '(' ? Token::LParen : Token::RParen, std::string(1, c), line, col});
            continue;
        }
        if (atom.empty()) {
            atom_line = line;
            atom_col = col;
        }
        atom.push_back(c);
    }
    flush();
    return tokens;
}

SExpr read_sexpr(const std::vector<Token>& tokens, std::size_t& pos) {
    if (pos >= tokens.size()) {
        std::size_t l = tokens.empty() ? 1 : tokens.back().line;
        std::size_t c = tokens.empty() ? 1 : tokens.back().col;
        throw PddlError(l, c, "unexpected end of input (unbalanced parenthesis)");
    }
    const Token& t = tokens[pos];
    if (t.kind == Token::RParen) throw PddlError(t.line, t.col, "unexpected ')'");
    if (t.kind == Token::Atom) {
        ++pos;
        SExpr e;
        e.is_atom = true;
        e.atom = t.text;
        e.line = t.line;
        e.col = t.col;
        return e;
    }
    SExpr list;
    list.line = t.line;
    list.col = t.col;
    ++pos;  // consume '('
    while (true) {
        if (pos >= tokens.size())
            throw PddlError(t.line, t.col, "unbalanced parenthesis: '(' here is never closed");
        if (tokens[pos].kind == Token::RParen) {
            ++pos;
            return list;
        }
        list.items.push_back(read_sexpr(tokens, pos));
    }
}

const SExpr& expect_list(const SExpr& e, const std::string& what) {
    if (e.is_atom) throw PddlError(e.line, e.col, "expected a list for " + what);
    return e;
}

std::string expect_atom(const SExpr& e, const std::string& what) {
    if (!e.is_atom) throw PddlError(e.line, e.col, "expected an atom for " + what);
    return e.atom;
}

// `n1 n2 - t1 n3 - t2 n4` with untyped names defaulting to the fallback.
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                                        const std::string& fallback_type = "object") {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
        std::string a = expect_atom(items[i], "typed list entry");
        if (a == "-") {
            if (i + 1 >= items.size())
                throw PddlError(items[i].line, items[i].col, "dangling '-' in typed list");
            std::string type = expect_atom(items[i + 1], "type name");
            for (const auto& n : pending) out.push_back({n, type});
            pending.clear();
            ++i;
        } else {
            pending.push_back(a);
        }
    }
    for (const auto& n : pending) out.push_back({n, fallback_type});
    return out;
}

Literal parse_literal(const SExpr& e) {
    const SExpr& l = expect_list(e, "literal");
    if (l.items.empty()) throw PddlError(e.line, e.col, "empty literal");
    Literal lit;
    lit.predicate = expect_atom(l.items[0], "predicate name");
    for (std::size_t i = 1; i < l.items.size(); ++i)
        lit.args.push_back(expect_atom(l.items[i], "literal argument"));
    return lit;
}

// (and lit...) | lit | ()
std::vector<Literal> parse_conjunction(const SExpr& e, bool allow_not,
                                       std::vector<Literal>* negated) {
    std::vector<Literal> out;
    const SExpr& l = expect_list(e, "condition");
    if (l.items.empty()) return out;
    auto handle = [&](const SExpr& item) {
        const SExpr& il = expect_list(item, "literal");
        if (!il.items.empty() && il.items[0].is_atom && il.items[0].atom == "not") {
            if (!allow_not || !negated)
                throw PddlError(item.line, item.col,
                                "negative preconditions are outside the :strips subset");
            if (il.items.size() != 2)
                throw PddlError(item.line, item.col, "(not ...) takes exactly one literal");
            negated->push_back(parse_literal(il.items[1]));
            return;
        }
        out.push_back(parse_literal(item));
    };
    if (l.items[0].is_atom && l.items[0].atom == "and") {
        for (std::size_t i = 1; i < l.items.size(); ++i) handle(l.items[i]);
    } else {
        handle(e);
    }
    return out;
}

void check_literals(const std::vector<Literal>& lits,
                    const std::map<std::string, std::size_t>& arity, std::size_t line,
                    std::size_t col) {
    for (const auto& lit : lits) {
        auto it = arity.find(lit.predicate);
        if (it == arity.end())
            throw PddlError(line, col, "unknown predicate '" + lit.predicate + "'");
        if (it->second != lit.args.size())
            throw PddlError(line, col, "predicate '" + lit.predicate + "' expects " +
                                           std::to_string(it->second) + " arguments, got " +
                                           std::to_string(lit.args.size()));
    }
}

StripsDomain parse_domain(const SExpr& top) {
    StripsDomain d;
    d.name = expect_atom(expect_list(top.items[1], "domain header").items[1], "domain name");
    std::map<std::string, std::size_t> arity;
    for (std::size_t i = 2; i < top.items.size(); ++i) {
        const SExpr& sec = expect_list(top.items[i], "domain section");
        if (sec.items.empty()) throw PddlError(sec.line, sec.col, "empty domain section");
        std::string head = expect_atom(sec.items[0], "section keyword");
        if (head == ":requirements") {
            for (std::size_t k = 1; k < sec.items.size(); ++k) {
                std::string flag = expect_atom(sec.items[k], "requirement flag");
                if (flag != ":strips" && flag != ":typing")
                    throw PddlError(sec.items[k].line, sec.items[k].col,
                                    "unsupported requirement flag " + flag);
            }
        } else if (head == ":types") {
            d.types = parse_typed_list(sec.items, 1, "");
        } else if (head == ":constants") {
            d.constants = parse_typed_list(sec.items, 1);
        } else if (head == ":predicates") {
            for (std::size_t k = 1; k < sec.items.size(); ++k) {
                const SExpr& p = expect_list(sec.items[k], "predicate declaration");
                if (p.items.empty()) throw PddlError(p.line, p.col, "empty predicate declaration");
                PredicateDecl decl;
                decl.name = expect_atom(p.items[0], "predicate name");
                decl.params = parse_typed_list(p.items, 1);
                if (arity.count(decl.name))
                    throw PddlError(p.line, p.col, "duplicate predicate '" + decl.name + "'");
                arity[decl.name] = decl.params.size();
                d.predicates.push_back(std::move(decl));
            }
        } else if (head == ":action") {
            if (sec.items.size() < 2)
                throw PddlError(sec.line, sec.col, "action is missing its name");
            ActionSchema a;
            a.name = expect_atom(sec.items[1], "action name");
            for (std::size_t k = 2; k + 1 < sec.items.size(); k += 2) {
                std::string key = expect_atom(sec.items[k], "action keyword");
                const SExpr& val = sec.items[k + 1];
                if (key == ":parameters") {
                    a.params = parse_typed_list(expect_list(val, ":parameters").items, 0);
                    for (const auto& p : a.params) {
                        if (p.name.empty() || p.name[0] != '?')
                            throw PddlError(val.line, val.col,
                                            "action parameters must be ?variables");
                    }
                } else if (key == ":precondition") {
                    a.preconditions = parse_conjunction(val, false, nullptr);
                } else if (key == ":effect") {
                    std::vector<Literal> dels;
                    a.add = parse_conjunction(val, true, &dels);
                    a.del = std::move(dels);
                } else {
                    throw PddlError(sec.items[k].line, sec.items[k].col,
                                    "unsupported action keyword " + key);
                }
            }
            for (const auto& other : d.actions) {
                if (other.name == a.name)
                    throw PddlError(sec.line, sec.col, "duplicate action name '" + a.name + "'");
            }
            check_literals(a.preconditions, arity, sec.line, sec.col);
            check_literals(a.add, arity, sec.line, sec.col);
            check_literals(a.del, arity, sec.line, sec.col);
            d.actions.push_back(std::move(a));
        } else {
            throw PddlError(sec.line, sec.col, "unsupported domain section " + head);
        }
    }
    return d;
}

StripsProblem parse_problem(const SExpr& top) {
    StripsProblem p;
    p.name = expect_atom(expect_list(top.items[1], "problem header").items[1], "problem name");
    for (std::size_t i = 2; i < top.items.size(); ++i) {
        const SExpr& sec = expect_list(top.items[i], "problem section");
        if (sec.items.empty()) throw PddlError(sec.line, sec.col, "empty problem section");
        std::string head = expect_atom(sec.items[0], "section keyword");
        if (head == ":domain") {
            p.domain_name = expect_atom(sec.items[1], "domain reference");
        } else if (head == ":objects") {
            p.objects = parse_typed_list(sec.items, 1);
        } else if (head == ":init") {
            for (std::size_t k = 1; k < sec.items.size(); ++k)
                p.init.push_back(parse_literal(sec.items[k]));
        } else if (head == ":goal") {
            if (sec.items.size() != 2)
                throw PddlError(sec.line, sec.col, ":goal takes exactly one condition");
            p.goal = parse_conjunction(sec.items[1], false, nullptr);
        } else {
            throw PddlError(sec.line, sec.col, "unsupported problem section " + head);
        }
    }
    return p;
}

// ---- printing ---------------------------------------------------------

std::string literal_text(const Literal& l) {
    std::string out = "(" + l.predicate;
    for (const auto& a : l.args) out += " " + a;
    return out + ")";
}

// `a b - t c - u`, grouping consecutive names of equal type.
std::string typed_list_text(const std::vector<TypedName>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += " ";
        out += names[i].name;
        bool last_of_type = i + 1 == names.size() || names[i + 1].type != names[i].type;
        if (last_of_type && !names[i].type.empty()) out += " - " + names[i].type;
    }
    return out;
}

std::string conjunction_text(const std::vector<Literal>& pos, const std::vector<Literal>& neg) {
    std::string out = "(and";
    for (const auto& l : pos) out += " " + literal_text(l);
    for (const auto& l : neg) out += " (not " + literal_text(l) + ")";
    return out + ")";
}

}  // namespace

std::string print_domain(const StripsDomain& d) {
    std::ostringstream out;
    out << "(define (domain " << d.name << ")\n";
    out << "  (:requirements :strips :typing)\n";
    if (!d.types.empty()) out << "  (:types " << typed_list_text(d.types) << ")\n";
    if (!d.constants.empty()) out << "  (:constants " << typed_list_text(d.constants) << ")\n";
    out << "  (:predicates\n";
    for (const auto& p : d.predicates) {
        out << "    (" << p.name;
        if (!p.params.empty()) out << " " << typed_list_text(p.params);
        out << ")\n";
    }
    out << "  )\n";
    for (const auto& a : d.actions) {
        out << "  (:action " << a.name << "\n";
        out << "    :parameters (" << typed_list_text(a.params) << ")\n";
        out << "    :precondition " << conjunction_text(a.preconditions, {}) << "\n";
        out << "    :effect " << conjunction_text(a.add, a.del) << "\n";
        out << "  )\n";
    }
    out << ")\n";
    return out.str();
}

std::string print_problem(const StripsProblem& p) {
    std::ostringstream out;
    out << "(define (problem " << p.name << ")\n";
    out << "  (:domain " << p.domain_name << ")\n";
    if (!p.objects.empty()) out << "  (:objects " << typed_list_text(p.objects) << ")\n";
    out << "  (:init\n";
    for (const auto& l : p.init) out << "    " << literal_text(l) << "\n";
    out << "  )\n";
    out << "  (:goal " << conjunction_text(p.goal, {}) << ")\n";
    out << ")\n";
    return out.str();
}

ParsedPddl parse_pddl(const std::string& text) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw PddlError(1, 1, "empty input");
    std::size_t pos = 0;
    SExpr top = read_sexpr(tokens, pos);
    if (pos != tokens.size())
        throw PddlError(tokens[pos].line, tokens[pos].col, "trailing tokens after top-level form");
    if (top.is_atom || top.items.size() < 2 || !top.items[0].is_atom ||
        top.items[0].atom != "define") {
        throw PddlError(top.line, top.col,
                        "expected (define (domain ...) ...) or (define (problem ...) ...)");
    }
    const SExpr& header = expect_list(top.items[1], "define header");
    if (header.items.size() != 2)
        throw PddlError(header.line, header.col,
                        "define header must be (domain NAME) or (problem NAME)");
    std::string kind = expect_atom(header.items[0], "define kind");
    ParsedPddl result;
    if (kind == "domain") {
        result.domain = parse_domain(top);
    } else if (kind == "problem") {
        result.problem = parse_problem(top);
    } else {
        throw PddlError(header.line, header.col, "unknown define kind '" + kind + "'");
    }
    return result;
}

// ---- emission ---------------------------------------------------------

std::string mangle_name(const std::string& name) {
    std::string out;
    for (unsigned char c : to_lower(name)) {
        if (std::isalnum(c) || c == '-' || c == '_') {
            out.push_back(static_cast<char>(c));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "x" + out;
    return out;
}

std::string ActionNameRegistry::name_for(const std::string& verb, const std::string& unit_id) {
    auto& ids = seen_[verb];
    auto it = std::find(ids.begin(), ids.end(), unit_id);
    std::size_t index;
    if (it == ids.end()) {
        ids.push_back(unit_id);
        index = ids.size() - 1;
    } else {
        index = static_cast<std::size_t>(it - ids.begin());
    }
    return index == 0 ? verb : verb + "_" + std::to_string(index + 1);
}

std::pair<StripsDomain, StripsProblem> emit_strips(const FunctionalUnit& raw,
                                                   const KitchenState& kitchen,
                                                   ActionNameRegistry* registry) {
    static const std::set<std::string> kReserved{"exists", "at-hand", "is-state"};
    const FunctionalUnit unit = canonical_unit(raw);
    const std::string verb = mangle_name(unit.motion.verb);
    if (kReserved.count(verb))
        throw std::invalid_argument("motion verb '" + unit.motion.verb +
                                    "' collides with a reserved predicate name");
    const std::string action_name = registry ? registry->name_for(verb, unit.unit_id()) : verb;

    // Distinct input objects in canonical order; same-named inputs merge
    // their required states.
    std::vector<std::string> input_names;
    std::map<std::string, std::set<std::string>> required;
    for (const auto& in : unit.inputs) {
        std::string n = mangle_name(in.name);
        if (!required.count(n)) input_names.push_back(n);
        for (const auto& s : in.states) required[n].insert(mangle_name(s));
        required.try_emplace(n);
    }
    std::vector<std::string> output_names;
    std::map<std::string, std::set<std::string>> produced;
    for (const auto& out : unit.outputs) {
        std::string n = mangle_name(out.name);
        if (!produced.count(n)) output_names.push_back(n);
        for (const auto& s : out.states) produced[n].insert(mangle_name(s));
        produced.try_emplace(n);
    }

    std::map<std::string, std::string> var_of;
    for (std::size_t i = 0; i < input_names.size(); ++i)
        var_of[input_names[i]] = "?x" + std::to_string(i);
    auto term = [&](const std::string& name) {
        auto it = var_of.find(name);
        return it == var_of.end() ? name : it->second;
    };

    ActionSchema action;
    action.name = action_name;
    for (const auto& n : input_names) action.params.push_back({var_of[n], "obj"});

    std::set<std::string> action_states;
    for (const auto& n : input_names) {
        action.preconditions.push_back({"exists", {term(n)}});
        action.preconditions.push_back({"at-hand", {term(n)}});
        for (const auto& s : required[n]) {
            action.preconditions.push_back({"is-state", {term(n), s}});
            action_states.insert(s);
        }
    }
    // Consumed inputs vanish; transformed inputs swap states; fresh
    // outputs come into existence.
    for (const auto& n : input_names) {
        if (!produced.count(n)) {
            action.del.push_back({"exists", {term(n)}});
            action.del.push_back({"at-hand", {term(n)}});
            for (const auto& s : required[n]) action.del.push_back({"is-state", {term(n), s}});
        }
    }
    for (const auto& n : output_names) {
        bool fresh = !required.count(n);
        if (fresh) {
            action.add.push_back({"exists", {n}});
            action.add.push_back({"at-hand", {n}});
        }
        for (const auto& s : produced[n]) {
            action.add.push_back({"is-state", {term(n), s}});
            action_states.insert(s);
        }
        if (!fresh) {
            for (const auto& s : required[n]) {
                if (!produced[n].count(s)) action.del.push_back({"is-state", {term(n), s}});
            }
        }
    }

    StripsDomain domain;
    domain.name = "star-" + action_name;
    domain.types = {{"obj", ""}, {"state", ""}};
    for (const auto& n : output_names) {
        if (!required.count(n)) domain.constants.push_back({n, "obj"});
    }
    for (const auto& s : action_states) domain.constants.push_back({s, "state"});
    domain.predicates = {{"at-hand", {{"?o", "obj"}}},
                         {"exists", {{"?o", "obj"}}},
                         {"is-state", {{"?o", "obj"}, {"?s", "state"}}}};
    domain.actions.push_back(std::move(action));

    std::set<std::string> constant_names;
    for (const auto& c : domain.constants) constant_names.insert(c.name);

    StripsProblem problem;
    problem.name = action_name + "-task";
    problem.domain_name = domain.name;

    std::vector<ObjectNode> env;
    for (const auto& o : kitchen.objects) env.push_back(canonical_object(o));
    std::sort(env.begin(), env.end(),
              [](const ObjectNode& a, const ObjectNode& b) { return a.name < b.name; });

    std::set<std::string> object_names;
    std::set<std::string> state_names;
    for (const auto& o : env) {
        std::string n = mangle_name(o.name);
        if (object_names.count(n)) continue;
        object_names.insert(n);
        problem.init.push_back({"exists", {n}});
        problem.init.push_back({"at-hand", {n}});
        for (const auto& s : o.states) {
            std::string ms = mangle_name(s);
            problem.init.push_back({"is-state", {n, ms}});
            state_names.insert(ms);
        }
    }
    for (const auto& n : object_names) {
        if (!constant_names.count(n)) problem.objects.push_back({n, "obj"});
    }
    for (const auto& s : state_names) {
        if (!constant_names.count(s)) problem.objects.push_back({s, "state"});
    }
    std::sort(problem.objects.begin(), problem.objects.end(),
              [](const TypedName& a, const TypedName& b) {
                  return std::tie(a.type, a.name) < std::tie(b.type, b.name);
              });

    for (const auto& n : output_names) {
        problem.goal.push_back({"exists", {n}});
        for (const auto& s : produced[n]) problem.goal.push_back({"is-state", {n, s}});
    }
    return {std::move(domain), std::move(problem)};
}

std::pair<std::string, std::string> emit_domain_problem(const FunctionalUnit& unit,
                                                        const KitchenState& kitchen,
                                                        ActionNameRegistry* registry) {
    auto [d, p] = emit_strips(unit, kitchen, registry);
    return {print_domain(d), print_problem(p)};
}

}  // namespace star
