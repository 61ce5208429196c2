#include "star/fm.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace star {

namespace {

const char* kGrammarNote =
    "Task trees are written as functional units in a line format:\n"
    "  U                 starts a unit\n"
    "  I name | state,state | ingredient;ingredient   one input object\n"
    "  M verb | key=value;key=value                   the motion\n"
    "  O name | state,state | ingredient;ingredient   one output object\n"
    "A blank line ends a unit. States and ingredients are optional.\n"
    "Units execute in order from the kitchen state to the goal.\n";

std::string kitchen_listing(const KitchenState& kitchen) {
    std::vector<ObjectNode> objs;
    for (const auto& o : kitchen.objects) objs.push_back(canonical_object(o));
    std::sort(objs.begin(), objs.end(),
              [](const ObjectNode& a, const ObjectNode& b) { return a.name < b.name; });
    std::string out;
    for (const auto& o : objs) {
        out += "- " + o.name;
        if (!o.states.empty()) {
            out += " | ";
            for (std::size_t i = 0; i < o.states.size(); ++i) {
                if (i) out += ",";
                out += o.states[i];
            }
        }
        out += "\n";
    }
    return out;
}

bool foonish_line(const std::string& trimmed) {
    if (trimmed.empty() || trimmed[0] == '#') return true;
    if (trimmed == "u" || trimmed == "U") return true;
    if (trimmed.size() >= 2 && (trimmed[1] == ' ' || trimmed[1] == '\t')) {
        char t = static_cast<char>(std::tolower(static_cast<unsigned char>(trimmed[0])));
        return t == 'i' || t == 'm' || t == 'o' || t == 't';
    }
    return false;
}

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string PromptText::render() const {
    std::string out = "[SYSTEM]\n" + system + "\n";
    for (std::size_t i = 0; i < few_shot.size(); ++i) {
        out += "[EXAMPLE " + std::to_string(i + 1) + "] " + few_shot[i].first + "\n";
        out += few_shot[i].second;
        if (!few_shot[i].second.empty() && few_shot[i].second.back() != '\n') out += "\n";
    }
    out += "[USER]\n" + user + "\n";
    for (std::size_t i = 0; i < images.size(); ++i) {
        out += "[image " + std::to_string(i + 1) + " sha256=" + images[i].sha256 + "]\n";
    }
    return out;
}

std::string MockProvider::do_complete(const PromptText& prompt, int) {
    const std::string rendered = prompt.render();
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < script_.size(); ++i) {
        if (used_[i]) continue;
        if (script_[i].match.empty() || rendered.find(script_[i].match) != std::string::npos) {
            used_[i] = true;
            return script_[i].response;
        }
    }
    throw ProviderError("mock script exhausted: no entry matches the prompt");
}

MockProvider MockProvider::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<ScriptEntry> script;
    for (const auto& e : j) {
        script.push_back({e.value("match", std::string{}), e.at("response").get<std::string>()});
    }
    return MockProvider(std::move(script));
}

MockProvider MockProvider::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read provider script: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

ExampleCorpus ExampleCorpus::from_text(const std::string& text) {
    ExampleCorpus corpus;
    std::stringstream ss(text);
    std::string line;
    std::string request;
    std::string body;
    auto flush = [&]() {
        if (!request.empty()) corpus.examples.emplace_back(request, body);
        body.clear();
    };
    while (std::getline(ss, line)) {
        if (line.rfind("===", 0) == 0) {
            flush();
            request = trim_copy(line.substr(3));
        } else if (!request.empty()) {
            body += line;
            body += "\n";
        }
    }
    flush();
    return corpus;
}

ExampleCorpus ExampleCorpus::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read example corpus: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string VerificationReport::summary() const {
    if (valid) return "tree verified";
    std::string out;
    if (!syntax_violations.empty()) {
        out += "syntax violations:\n";
        for (const auto& v : syntax_violations) out += "  " + v + "\n";
    }
    if (!missing_objects.empty()) {
        out += "objects required but neither in the kitchen nor produced earlier:";
        for (const auto& m : missing_objects) out += " " + m;
        out += "\n";
    }
    if (unreachable_goal) out += "the goal object is not reached by the final state\n";
    return out;
}

PromptText build_generation_prompt(const std::string& request_goal, const KitchenState& kitchen,
                                   const ExampleCorpus& corpus, std::size_t example_count) {
    if (corpus.examples.size() < example_count) {
        throw std::invalid_argument("example corpus has " +
                                    std::to_string(corpus.examples.size()) +
                                    " entries, need " + std::to_string(example_count));
    }
    PromptText p;
    p.system = std::string("You plan cooking tasks for a robot as FOON task trees.\n") +
               kGrammarNote +
               "Use only objects available in the kitchen or produced by earlier units.";
    for (std::size_t i = 0; i < example_count; ++i) p.few_shot.push_back(corpus.examples[i]);
    p.user = "Kitchen objects:\n" + kitchen_listing(kitchen) + "Request: " + request_goal +
             "\nWrite one task tree in the unit line format that prepares the request.";
    return p;
}

PromptText build_modification_prompt(const std::string& request_goal, const TaskTree& partial,
                                     const KitchenState& kitchen, const ExampleCorpus* corpus,
                                     std::size_t example_count) {
    if (partial.units.empty()) {
        if (corpus) return build_generation_prompt(request_goal, kitchen, *corpus, example_count);
        throw std::invalid_argument("partial tree is empty and no corpus was supplied");
    }
    PromptText p;
    p.system = std::string("You adapt existing FOON task trees for a cooking robot.\n") +
               kGrammarNote +
               "Modify the given tree as little as possible while meeting the request.";
    p.user = "Kitchen objects:\n" + kitchen_listing(kitchen) +
             "Existing task tree (for a related dish):\n" + serialize_subgraph(partial.units) +
             "Request: " + request_goal +
             "\nRewrite the tree so it prepares the request, in the same line format.";
    return p;
}

TreeResponse parse_tree_response(const std::string& text) {
    std::string block;
    auto fence = text.find("```");
    if (fence != std::string::npos) {
        auto body_start = text.find('\n', fence);
        auto close = text.find("```", fence + 3);
        if (body_start != std::string::npos && close != std::string::npos && body_start < close) {
            block = text.substr(body_start + 1, close - body_start - 1);
        }
    }
    if (block.empty()) {
        // raw extraction: from the first U (or trigger) line, keep
        // consecutive unit-format lines
        std::stringstream ss(text);
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(ss, line)) lines.push_back(line);
        std::size_t start = lines.size();
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string t = trim_copy(lines[i]);
            if (t == "U" || t == "u" || t.rfind("T ", 0) == 0 || t.rfind("t ", 0) == 0) {
                start = i;
                break;
            }
        }
        for (std::size_t i = start; i < lines.size(); ++i) {
            std::string t = trim_copy(lines[i]);
            if (!foonish_line(t)) break;
            block += lines[i];
            block += "\n";
        }
    }
    if (trim_copy(block).empty()) {
        return {std::nullopt, {"no FOON-text block found in the response"}};
    }
    try {
        return {parse_subgraph(block), {}};
    } catch (const ParseError& e) {
        return {std::nullopt, {e.what()}};
    }
}

VerificationReport verify_tree(const TaskTree& tree, const KitchenState& kitchen,
                               const ObjectNode& goal) {
    VerificationReport report;
    std::vector<ObjectNode> world;
    for (const auto& o : kitchen.objects) world.push_back(canonical_object(o));

    auto find_sat = [&](const ObjectNode& req) {
        return std::any_of(world.begin(), world.end(),
                           [&](const ObjectNode& o) { return satisfies(req, o); });
    };
    for (const auto& unit : tree.units) {
        for (const auto& v : validate_unit(unit)) {
            report.syntax_violations.push_back(v.field + ": " + v.rule);
        }
        for (const auto& in : unit.inputs) {
            if (!find_sat(in)) report.missing_objects.insert(in.name);
        }
        // optimistic propagation so later problems are still reported
        for (const auto& in : unit.inputs) {
            if (unit.consumes(in.name)) {
                world.erase(std::remove_if(world.begin(), world.end(),
                                           [&](const ObjectNode& o) { return o.name == in.name; }),
                            world.end());
            }
        }
        for (const auto& out : unit.outputs) {
            world.erase(std::remove_if(world.begin(), world.end(),
                                       [&](const ObjectNode& o) { return o.name == out.name; }),
                        world.end());
            world.push_back(canonical_object(out));
        }
    }
    report.unreachable_goal = !find_sat(canonical_object(goal));
    report.valid = report.missing_objects.empty() && !report.unreachable_goal &&
                   report.syntax_violations.empty();
    return report;
}

TaskTree generate_or_repair(CompletionProvider& provider, const RetrievalOutcome& outcome,
                            const std::string& request_goal, const KitchenState& kitchen,
                            const ExampleCorpus& corpus, std::size_t retry_limit) {
    if (outcome.kase == RetrievalCase::ExactMatch) {
        throw std::invalid_argument("exact matches need no generation");
    }
    ObjectNode goal = canonical_object(parse_object_spec(request_goal));

    PromptText base;
    if (outcome.kase == RetrievalCase::CategoryMatch && outcome.tree) {
        base = build_modification_prompt(request_goal, *outcome.tree, kitchen, &corpus);
    } else {
        base = build_generation_prompt(request_goal, kitchen, corpus);
    }

    VerificationReport last;
    std::string feedback;
    for (std::size_t attempt = 0; attempt < retry_limit; ++attempt) {
        PromptText prompt = base;
        if (!feedback.empty()) {
            prompt.user += "\n\nYour previous tree was rejected:\n" + feedback +
                           "Produce a corrected tree.";
        }
        std::string response = provider.complete(prompt);
        TreeResponse parsed = parse_tree_response(response);
        if (!parsed.units) {
            last = VerificationReport{};
            last.syntax_violations = parsed.violations;
            feedback = last.summary();
            continue;
        }
        TaskTree candidate{*parsed.units, goal};
        last = verify_tree(candidate, kitchen, goal);
        if (last.valid) return candidate;
        feedback = last.summary();
    }
    throw GenerationError("no verified tree after " + std::to_string(retry_limit) + " attempts",
                          last);
}

std::string extract_goal(CompletionProvider* provider, const std::string& utterance) {
    if (provider) {
        PromptText p;
        p.system = "Extract the requested dish from the user's message. "
                   "Answer with exactly one line: name | state,state (states optional).";
        p.user = utterance;
        std::string line = provider->complete(p, 64);
        auto nl = line.find('\n');
        if (nl != std::string::npos) line = line.substr(0, nl);
        ObjectNode o = parse_object_spec(line);
        if (!o.name.empty()) {
            std::string out = o.name;
            if (!o.states.empty()) {
                out += " | ";
                for (std::size_t i = 0; i < o.states.size(); ++i) {
                    if (i) out += ",";
                    out += o.states[i];
                }
            }
            return out;
        }
    }
    static const std::regex kMakePattern(
        R"((?:make|prepare|cook)\s+(?:me\s+|a\s+|an\s+|some\s+)?([a-zA-Z][a-zA-Z \-]*))",
        std::regex::icase);
    std::smatch m;
    if (std::regex_search(utterance, m, kMakePattern)) {
        std::string dish = trim_copy(m[1].str());
        while (!dish.empty() && (dish.back() == '.' || dish.back() == '!')) dish.pop_back();
        return to_lower(trim_copy(dish));
    }
    throw std::invalid_argument("cannot extract a goal from: " + utterance);
}

}  // namespace star
