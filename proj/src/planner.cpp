#include "star/planner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>

namespace star {

namespace {

std::string ground_name(const std::string& action, const std::vector<std::string>& args) {
    std::string out = "(" + action;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

std::string ground_fact(const Literal& lit, const std::map<std::string, std::string>& binding) {
    std::string out = "(" + lit.predicate;
    for (const auto& a : lit.args) {
        auto it = binding.find(a);
        out += " " + (it == binding.end() ? a : it->second);
    }
    return out + ")";
}

struct FactTable {
    std::vector<std::string> facts;
    std::map<std::string, int> index;

    int intern(const std::string& f) {
        auto it = index.find(f);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(facts.size());
        facts.push_back(f);
        index.emplace(f, id);
        return id;
    }
};

bool state_has_all(const std::vector<bool>& state, const std::vector<int>& facts) {
    return std::all_of(facts.begin(), facts.end(), [&](int f) { return state[f]; });
}

void apply_action(std::vector<bool>& state, const GroundedAction& a) {
    for (int f : a.del) state[f] = false;
    for (int f : a.add) state[f] = true;
}

std::vector<bool> init_state(const GroundedPlanningTask& task) {
    std::vector<bool> s(task.facts.size(), false);
    for (int f : task.init) s[f] = true;
    return s;
}

std::optional<Plan> breadth_first(const GroundedPlanningTask& task, std::size_t budget) {
    struct Node {
        std::vector<bool> state;
        int parent;
        int action;
    };
    std::vector<Node> nodes;
    nodes.push_back({init_state(task), -1, -1});
    if (state_has_all(nodes[0].state, task.goal)) return Plan{};
    std::set<std::vector<bool>> seen{nodes[0].state};
    std::deque<int> queue{0};
    while (!queue.empty()) {
        if (budget-- == 0) throw PlanningError("search node budget exceeded");
        int cur = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < task.actions.size(); ++i) {
            const auto& a = task.actions[i];
            if (!state_has_all(nodes[cur].state, a.pre)) continue;
            std::vector<bool> next = nodes[cur].state;
            apply_action(next, a);
            if (!seen.insert(next).second) continue;
            nodes.push_back({std::move(next), cur, static_cast<int>(i)});
            int idx = static_cast<int>(nodes.size()) - 1;
            if (state_has_all(nodes[idx].state, task.goal)) {
                Plan plan;
                for (int n = idx; nodes[n].parent >= 0; n = nodes[n].parent)
                    plan.steps.push_back(task.actions[nodes[n].action].name);
                std::reverse(plan.steps.begin(), plan.steps.end());
                return plan;
            }
            queue.push_back(idx);
        }
    }
    return std::nullopt;
}

// Removes steps whose absence keeps the plan valid. Deterministic:
// front-to-back sweeps until a fixed point.
Plan eliminate_redundant_steps(Plan plan, const GroundedPlanningTask& task) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            Plan candidate = plan;
            candidate.steps.erase(candidate.steps.begin() + static_cast<long>(i));
            if (validate_plan(candidate, task).valid) {
                plan = std::move(candidate);
                changed = true;
                break;
            }
        }
    }
    return plan;
}

}  // namespace

std::string Plan::to_text() const {
    std::string out;
    for (const auto& s : steps) out += s + "\n";
    return out;
}

GroundedPlanningTask ground(const StripsDomain& domain, const StripsProblem& problem,
                            std::size_t action_cap) {
    // type -> parent chain
    std::map<std::string, std::string> parent;
    parent["object"] = "";
    for (const auto& t : domain.types) parent[t.name] = t.type;
    auto is_subtype = [&](std::string t, const std::string& target) {
        while (true) {
            if (t == target) return true;
            auto it = parent.find(t);
            if (it == parent.end() || it->second.empty()) return false;
            t = it->second;
        }
    };

    std::vector<TypedName> constants = domain.constants;
    constants.insert(constants.end(), problem.objects.begin(), problem.objects.end());
    for (const auto& c : constants) {
        if (!parent.count(c.type))
            throw PlanningError("constant '" + c.name + "' has undeclared type '" + c.type + "'");
    }

    std::map<std::string, std::size_t> arity;
    for (const auto& p : domain.predicates) arity[p.name] = p.params.size();
    auto check_ground = [&](const Literal& lit, const std::string& where) {
        auto it = arity.find(lit.predicate);
        if (it == arity.end())
            throw PlanningError(where + ": unknown predicate '" + lit.predicate + "'");
        if (it->second != lit.args.size())
            throw PlanningError(where + ": predicate '" + lit.predicate + "' arity mismatch");
    };
    for (const auto& l : problem.init) check_ground(l, "init");
    for (const auto& l : problem.goal) check_ground(l, "goal");

    // Candidate grounded actions via an odometer over typed constants.
    struct Candidate {
        std::string name;
        std::vector<std::string> pre, add, del;
    };
    std::vector<Candidate> candidates;
    for (const auto& schema : domain.actions) {
        std::vector<std::vector<std::string>> choices(schema.params.size());
        for (std::size_t p = 0; p < schema.params.size(); ++p) {
            for (const auto& c : constants) {
                if (is_subtype(c.type, schema.params[p].type)) choices[p].push_back(c.name);
            }
        }
        std::vector<std::size_t> idx(schema.params.size(), 0);
        bool exhausted =
            std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); }) &&
            !schema.params.empty();
        while (!exhausted) {
            std::map<std::string, std::string> binding;
            std::vector<std::string> args;
            for (std::size_t p = 0; p < schema.params.size(); ++p) {
                binding[schema.params[p].name] = choices[p][idx[p]];
                args.push_back(choices[p][idx[p]]);
            }
            Candidate cand;
            cand.name = ground_name(schema.name, args);
            for (const auto& l : schema.preconditions) cand.pre.push_back(ground_fact(l, binding));
            for (const auto& l : schema.add) cand.add.push_back(ground_fact(l, binding));
            for (const auto& l : schema.del) cand.del.push_back(ground_fact(l, binding));
            candidates.push_back(std::move(cand));
            if (candidates.size() > action_cap)
                throw PlanningError("grounding cap exceeded (" + std::to_string(action_cap) +
                                    " grounded actions)");
            // odometer
            std::size_t p = 0;
            for (; p < idx.size(); ++p) {
                if (++idx[p] < choices[p].size()) break;
                idx[p] = 0;
            }
            if (p == idx.size()) exhausted = true;
        }
    }

    // Static reachability: a precondition must appear in init or some add.
    std::set<std::string> addable;
    for (const auto& l : problem.init) {
        std::map<std::string, std::string> empty;
        addable.insert(ground_fact(l, empty));
    }
    for (const auto& c : candidates) addable.insert(c.add.begin(), c.add.end());

    GroundedPlanningTask task;
    FactTable table;
    for (const auto& l : problem.init) {
        std::map<std::string, std::string> empty;
        task.init.push_back(table.intern(ground_fact(l, empty)));
    }
    std::sort(task.init.begin(), task.init.end());
    task.init.erase(std::unique(task.init.begin(), task.init.end()), task.init.end());

    for (const auto& cand : candidates) {
        bool reachable = std::all_of(cand.pre.begin(), cand.pre.end(),
                                     [&](const std::string& f) { return addable.count(f); });
        if (!reachable) continue;
        GroundedAction a;
        a.name = cand.name;
        for (const auto& f : cand.pre) a.pre.push_back(table.intern(f));
        for (const auto& f : cand.add) a.add.push_back(table.intern(f));
        for (const auto& f : cand.del) a.del.push_back(table.intern(f));
        task.actions.push_back(std::move(a));
    }
    for (const auto& l : problem.goal) {
        std::map<std::string, std::string> empty;
        task.goal.push_back(table.intern(ground_fact(l, empty)));
    }
    std::sort(task.goal.begin(), task.goal.end());
    task.goal.erase(std::unique(task.goal.begin(), task.goal.end()), task.goal.end());
    task.facts = std::move(table.facts);
    return task;
}

int relaxed_plan_length(const GroundedPlanningTask& task, const std::vector<bool>& state) {
    const int n = static_cast<int>(task.facts.size());
    std::vector<int> fact_level(n, kUnreachable);
    std::vector<int> achiever(n, -1);
    for (int f = 0; f < n; ++f) {
        if (state[f]) fact_level[f] = 0;
    }
    std::vector<int> action_level(task.actions.size(), kUnreachable);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < task.actions.size(); ++i) {
            if (action_level[i] != kUnreachable) continue;
            const auto& a = task.actions[i];
            int level = 0;
            bool ready = true;
            for (int f : a.pre) {
                if (fact_level[f] == kUnreachable) {
                    ready = false;
                    break;
                }
                level = std::max(level, fact_level[f]);
            }
            if (!ready) continue;
            action_level[i] = level;
            for (int f : a.add) {
                if (fact_level[f] > level + 1) {
                    fact_level[f] = level + 1;
                    achiever[f] = static_cast<int>(i);
                    changed = true;
                }
            }
        }
    }

    for (int g : task.goal) {
        if (fact_level[g] == kUnreachable) return kUnreachable;
    }

    // Relaxed plan extraction: walk achievers backwards, marking every
    // add of a selected action as achieved so it is not re-derived.
    std::set<int> selected;
    std::vector<char> achieved(n, 0);
    for (int f = 0; f < n; ++f) {
        if (state[f]) achieved[f] = 1;
    }
    std::vector<int> pending(task.goal.begin(), task.goal.end());
    while (!pending.empty()) {
        int f = pending.back();
        pending.pop_back();
        if (achieved[f]) continue;
        int a = achiever[f];
        achieved[f] = 1;
        if (a < 0) continue;
        if (selected.insert(a).second) {
            for (int g : task.actions[a].add) achieved[g] = 1;
            for (int p : task.actions[a].pre) {
                if (!achieved[p]) pending.push_back(p);
            }
        }
    }
    return static_cast<int>(selected.size());
}

int relaxed_plan_length(const GroundedPlanningTask& task) {
    return relaxed_plan_length(task, init_state(task));
}

std::optional<Plan> solve(const GroundedPlanningTask& task, std::size_t node_budget) {
    std::vector<bool> start = init_state(task);
    if (state_has_all(start, task.goal)) return Plan{};

    int h0 = relaxed_plan_length(task, start);
    if (h0 == kUnreachable) {
        // Heuristic says dead end at the root; fall back to blind search
        // so unsolvability is decided by exhaustion, not the relaxation.
        return breadth_first(task, node_budget);
    }

    struct Node {
        std::vector<bool> state;
        int parent;
        int action;
    };
    std::vector<Node> nodes;
    nodes.push_back({std::move(start), -1, -1});
    using Entry = std::pair<int, std::size_t>;  // (h, insertion seq) min-first
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::map<std::size_t, int> seq_to_node;
    std::size_t seq = 0;
    open.emplace(h0, seq);
    seq_to_node[seq++] = 0;
    std::set<std::vector<bool>> closed{nodes[0].state};

    std::size_t expansions = 0;
    while (!open.empty()) {
        if (++expansions > node_budget) throw PlanningError("search node budget exceeded");
        auto [h, s] = open.top();
        open.pop();
        int cur = seq_to_node[s];
        for (std::size_t i = 0; i < task.actions.size(); ++i) {
            const auto& a = task.actions[i];
            if (!state_has_all(nodes[cur].state, a.pre)) continue;
            std::vector<bool> next = nodes[cur].state;
            apply_action(next, a);
            if (closed.count(next)) continue;
            if (state_has_all(next, task.goal)) {
                Plan plan;
                plan.steps.push_back(a.name);
                for (int nidx = cur; nodes[nidx].parent >= 0; nidx = nodes[nidx].parent)
                    plan.steps.push_back(task.actions[nodes[nidx].action].name);
                std::reverse(plan.steps.begin(), plan.steps.end());
                return eliminate_redundant_steps(std::move(plan), task);
            }
            int hc = relaxed_plan_length(task, next);
            if (hc == kUnreachable) continue;  // the relaxation proves this a dead end
            closed.insert(next);
            nodes.push_back({std::move(next), cur, static_cast<int>(i)});
            open.emplace(hc, seq);
            seq_to_node[seq++] = static_cast<int>(nodes.size()) - 1;
        }
    }
    return std::nullopt;
}

PlanValidation validate_plan(const Plan& plan, const GroundedPlanningTask& task) {
    std::map<std::string, const GroundedAction*> by_name;
    for (const auto& a : task.actions) by_name[a.name] = &a;

    std::vector<bool> state = init_state(task);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        auto it = by_name.find(plan.steps[i]);
        if (it == by_name.end())
            return {false, i, "unknown grounded action " + plan.steps[i]};
        if (!state_has_all(state, it->second->pre))
            return {false, i, "precondition violated at step " + std::to_string(i)};
        apply_action(state, *it->second);
    }
    if (!state_has_all(state, task.goal))
        return {false, plan.steps.size(), "goal not satisfied after final step"};
    return {true, 0, ""};
}

std::vector<CompiledUnit> compile_tree(const TaskTree& tree, const KitchenState& kitchen) {
    std::vector<CompiledUnit> out;
    ActionNameRegistry registry;
    std::vector<ObjectNode> env;
    for (const auto& o : kitchen.objects) env.push_back(canonical_object(o));

    for (const auto& unit : tree.units) {
        KitchenState current{env};
        auto [domain, problem] = emit_strips(unit, current, &registry);
        GroundedPlanningTask task = ground(domain, problem);
        std::optional<Plan> plan;
        try {
            plan = solve(task);
        } catch (const PlanningError& e) {
            throw PlanningError("unit " + unit.unit_id() + ": " + e.what());
        }
        if (!plan) throw PlanningError("unit " + unit.unit_id() + ": no plan reaches its outputs");
        out.push_back({unit.unit_id(), print_domain(domain), print_problem(problem), *plan});

        // thread the unit's effect into the next problem's init
        for (const auto& in : unit.inputs) {
            if (unit.consumes(in.name)) {
                env.erase(std::remove_if(env.begin(), env.end(),
                                         [&](const ObjectNode& o) { return o.name == in.name; }),
                          env.end());
            }
        }
        for (const auto& o : unit.outputs) {
            env.erase(std::remove_if(env.begin(), env.end(),
                                     [&](const ObjectNode& e) { return e.name == o.name; }),
                      env.end());
            env.push_back(canonical_object(o));
        }
    }
    return out;
}

}  // namespace star
