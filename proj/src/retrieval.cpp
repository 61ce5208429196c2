#include "star/retrieval.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace star {

namespace {

constexpr int kDepthCap = 64;
constexpr std::size_t kSearchBudget = 250000;

std::string object_key(const ObjectNode& o) {
    std::string key = o.name;
    for (const auto& s : o.states) key += "|" + s;
    return key;
}

std::vector<ObjectNode> canonical_objects(const KitchenState& kitchen) {
    std::vector<ObjectNode> objs;
    objs.reserve(kitchen.objects.size());
    for (const auto& o : kitchen.objects) objs.push_back(canonical_object(o));
    return objs;
}

bool any_satisfies(const std::vector<ObjectNode>& objs, const ObjectNode& req) {
    return std::any_of(objs.begin(), objs.end(),
                       [&](const ObjectNode& o) { return satisfies(req, o); });
}

void erase_by_name(std::vector<ObjectNode>& objs, const std::string& name) {
    objs.erase(std::remove_if(objs.begin(), objs.end(),
                              [&](const ObjectNode& o) { return o.name == name; }),
               objs.end());
}

bool unit_applicable(const std::vector<ObjectNode>& objs, const FunctionalUnit& u) {
    return std::all_of(u.inputs.begin(), u.inputs.end(),
                       [&](const ObjectNode& in) { return any_satisfies(objs, in); });
}

void apply_unit_to(std::vector<ObjectNode>& objs, const FunctionalUnit& u) {
    for (const auto& in : u.inputs) {
        if (u.consumes(in.name)) erase_by_name(objs, in.name);
    }
    for (const auto& out : u.outputs) {
        erase_by_name(objs, out.name);
        objs.push_back(canonical_object(out));
    }
}

bool tree_executes(const std::vector<FunctionalUnit>& units, const KitchenState& kitchen,
                   const ObjectNode& goal) {
    auto objs = canonical_objects(kitchen);
    for (const auto& u : units) {
        if (!unit_applicable(objs, u)) return false;
        apply_unit_to(objs, u);
    }
    return any_satisfies(objs, goal);
}

std::string world_key(std::vector<ObjectNode> objs) {
    std::sort(objs.begin(), objs.end(), [](const ObjectNode& a, const ObjectNode& b) {
        return object_key(a) < object_key(b);
    });
    std::string key;
    for (const auto& o : objs) {
        key += object_key(o);
        key.push_back(';');
        for (const auto& c : o.contains) key += c + ",";
        key.push_back('\n');
    }
    return key;
}

// Goal-directed chaining over the output index. Cycles along the
// current resolution path are treated as dead branches; producer
// preference is fewest unsatisfied inputs against the kitchen, then
// ascending unit_id.
class Chainer {
  public:
    Chainer(const KnowledgeStore& store, Section section, const KitchenState& kitchen)
        : store_(store), section_(section), kitchen_(kitchen) {
        for (const auto& [id, u] : store.units(section)) {
            int unsat = 0;
            for (const auto& in : u.inputs) {
                if (!kitchen_satisfies(kitchen, in)) ++unsat;
            }
            unsat_[id] = unsat;
        }
    }

    std::optional<std::vector<std::string>> resolve(const ObjectNode& req, int depth) {
        if (kitchen_satisfies(kitchen_, req)) return std::vector<std::string>{};
        if (depth > kDepthCap) {
            throw RetrievalError("recursion depth cap (" + std::to_string(kDepthCap) +
                                 ") exceeded while resolving '" + req.name + "'");
        }
        const std::string key = object_key(canonical_object(req));
        if (std::find(stack_.begin(), stack_.end(), key) != stack_.end()) return std::nullopt;

        std::vector<std::string> producers;
        const auto& index = store_.output_index(section_);
        if (auto it = index.find(req.name); it != index.end()) {
            for (const auto& id : it->second) {
                const FunctionalUnit& u = store_.units(section_).at(id);
                if (std::any_of(u.outputs.begin(), u.outputs.end(),
                                [&](const ObjectNode& o) { return satisfies(req, o); })) {
                    producers.push_back(id);
                }
            }
        }
        std::sort(producers.begin(), producers.end(), [&](const auto& a, const auto& b) {
            if (unsat_[a] != unsat_[b]) return unsat_[a] < unsat_[b];
            return a < b;
        });

        stack_.push_back(key);
        for (const auto& id : producers) {
            const FunctionalUnit& u = store_.units(section_).at(id);
            std::vector<std::string> combined;
            bool ok = true;
            for (const auto& in : u.inputs) {
                auto sub = resolve(in, depth + 1);
                if (!sub) {
                    ok = false;
                    break;
                }
                for (const auto& sid : *sub) {
                    if (std::find(combined.begin(), combined.end(), sid) == combined.end())
                        combined.push_back(sid);
                }
            }
            if (!ok) continue;
            if (std::find(combined.begin(), combined.end(), id) == combined.end())
                combined.push_back(id);
            stack_.pop_back();
            return combined;
        }
        stack_.pop_back();
        return std::nullopt;
    }

  private:
    const KnowledgeStore& store_;
    Section section_;
    const KitchenState& kitchen_;
    std::map<std::string, int> unsat_;
    std::vector<std::string> stack_;
};

// Exhaustive forward search over unit subsets, shortest first. Covers
// orderings the goal-directed pass cannot reach (an object consumed by
// one unit while another still needs it). Deterministic: units expand
// in ascending unit_id order.
std::optional<std::vector<FunctionalUnit>> forward_search(const KnowledgeStore& store,
                                                          Section section,
                                                          const KitchenState& kitchen,
                                                          const ObjectNode& goal) {
    std::vector<FunctionalUnit> units;
    for (const auto& [id, u] : store.units(section)) units.push_back(u);

    struct Node {
        std::vector<ObjectNode> objs;
        std::vector<bool> used;
        int parent = -1;
        int via = -1;
    };
    std::vector<Node> nodes;
    nodes.push_back({canonical_objects(kitchen), std::vector<bool>(units.size(), false)});
    std::set<std::string> visited;
    auto node_key = [](const Node& n) {
        std::string key = world_key(n.objs) + "#";
        for (bool b : n.used) key.push_back(b ? '1' : '0');
        return key;
    };
    visited.insert(node_key(nodes[0]));

    auto reconstruct = [&](int idx) {
        std::vector<FunctionalUnit> seq;
        while (nodes[idx].parent >= 0) {
            seq.push_back(units[nodes[idx].via]);
            idx = nodes[idx].parent;
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
    };

    std::deque<int> queue{0};
    std::size_t budget = kSearchBudget;
    while (!queue.empty()) {
        if (budget-- == 0) throw RetrievalError("retrieval search budget exceeded");
        int cur = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (nodes[cur].used[i] || !unit_applicable(nodes[cur].objs, units[i])) continue;
            Node next = nodes[cur];
            next.parent = cur;
            next.via = static_cast<int>(i);
            next.used[i] = true;
            apply_unit_to(next.objs, units[i]);
            if (!visited.insert(node_key(next)).second) continue;
            nodes.push_back(std::move(next));
            int idx = static_cast<int>(nodes.size()) - 1;
            if (any_satisfies(nodes[idx].objs, goal)) return reconstruct(idx);
            queue.push_back(idx);
        }
    }
    return std::nullopt;
}

}  // namespace

KitchenState KitchenState::from_text(const std::string& text) {
    KitchenState k;
    std::stringstream ss(text);
    std::string raw;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ObjectNode o = canonical_object(parse_object_spec(line));
        if (o.name.empty()) throw ParseError(lineno, "kitchen object is missing a name");
        if (!seen.insert(object_key(o)).second)
            throw ParseError(lineno, "duplicate kitchen entry '" + o.name + "'");
        k.objects.push_back(std::move(o));
    }
    return k;
}

KitchenState KitchenState::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read kitchen file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

bool satisfies(const ObjectNode& required, const ObjectNode& candidate) {
    if (required.name != candidate.name) return false;
    return std::all_of(required.states.begin(), required.states.end(), [&](const auto& s) {
        return std::find(candidate.states.begin(), candidate.states.end(), s) !=
               candidate.states.end();
    });
}

bool kitchen_satisfies(const KitchenState& kitchen, const ObjectNode& required) {
    return std::any_of(kitchen.objects.begin(), kitchen.objects.end(),
                       [&](const ObjectNode& o) { return satisfies(required, o); });
}

std::string retrieval_case_name(RetrievalCase c) {
    switch (c) {
        case RetrievalCase::NoMatch: return "Case 1";
        case RetrievalCase::CategoryMatch: return "Case 2";
        case RetrievalCase::ExactMatch: return "Case 3";
    }
    return "?";
}

std::optional<TaskTree> search_exact(const KnowledgeStore& store, const ObjectNode& goal,
                                     const KitchenState& kitchen, Section section) {
    ObjectNode goal_c = canonical_object(goal);
    if (kitchen_satisfies(kitchen, goal_c)) return TaskTree{{}, goal_c};

    Chainer chainer(store, section, kitchen);
    if (auto ids = chainer.resolve(goal_c, 0)) {
        std::vector<FunctionalUnit> units;
        units.reserve(ids->size());
        for (const auto& id : *ids) units.push_back(store.units(section).at(id));
        if (tree_executes(units, kitchen, goal_c)) return TaskTree{std::move(units), goal_c};
    }
    if (auto seq = forward_search(store, section, kitchen, goal_c)) {
        return TaskTree{std::move(*seq), goal_c};
    }
    return std::nullopt;
}

RetrievalOutcome retrieve(const KnowledgeStore& store, const std::string& request_goal,
                          const KitchenState& kitchen, const DishTaxonomy& taxonomy) {
    ObjectNode goal = parse_object_spec(request_goal);
    if (goal.name.empty()) throw std::invalid_argument("request goal is empty");

    if (auto tree = search_exact(store, goal, kitchen)) {
        return {RetrievalCase::ExactMatch, std::move(tree), std::nullopt};
    }

    DishClass cls = taxonomy.classify(goal.name);
    if (cls.class_id != DishTaxonomy::kOtherClassId) {
        for (const auto& name : store.producible_names(Section::foon)) {
            if (name == goal.name) continue;
            if (!(taxonomy.classify(name) == cls)) continue;
            ObjectNode neighbor{name, {}, {}};
            if (auto tree = search_exact(store, neighbor, kitchen)) {
                return {RetrievalCase::CategoryMatch, std::move(tree), name};
            }
        }
    }
    return {RetrievalCase::NoMatch, std::nullopt, std::nullopt};
}

}  // namespace star
