#include "star/foon.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "star/digest.hpp"
#include "foon_detail.hpp"

namespace star {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(to_lower(tok));
    }
    return out;
}

// Splits "name | a,b | x;y" into at most three trimmed fields.
std::vector<std::string> split_fields(const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : s) {
        if (c == '|') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

std::string object_sort_key(const ObjectNode& o) {
    std::string key = o.name;
    key.push_back('\x01');
    for (const auto& s : o.states) {
        key += s;
        key.push_back('\x02');
    }
    key.push_back('\x01');
    for (const auto& c : o.contains) {
        key += c;
        key.push_back('\x02');
    }
    return key;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

void append_object_line(std::string& out, char tag, const ObjectNode& o) {
    out.push_back(tag);
    out.push_back(' ');
    std::vector<std::string> fields{o.name};
    if (!o.states.empty() || !o.contains.empty()) fields.push_back(join(o.states, ","));
    if (!o.contains.empty()) fields.push_back(join(o.contains, ";"));
    out += join(fields, " | ");
    out.push_back('\n');
}

bool has_forbidden_chars(const std::string& name) {
    return std::any_of(name.begin(), name.end(), [](unsigned char c) {
        return c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
               std::iscntrl(c);
    });
}

template <typename T>
void check_duplicates(const std::vector<T>& xs, const std::string& field,
                      std::vector<Violation>& out) {
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            out.push_back({field, "duplicate label"});
            return;
        }
    }
}

}  // namespace

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

ObjectNode canonical_object(ObjectNode o) {
    std::sort(o.states.begin(), o.states.end());
    std::sort(o.contains.begin(), o.contains.end());
    return o;
}

FunctionalUnit canonical_unit(FunctionalUnit u) {
    for (auto& o : u.inputs) o = canonical_object(std::move(o));
    for (auto& o : u.outputs) o = canonical_object(std::move(o));
    std::sort(u.inputs.begin(), u.inputs.end(),
              [](const ObjectNode& a, const ObjectNode& b) {
                  return object_sort_key(a) < object_sort_key(b);
              });
    std::sort(u.outputs.begin(), u.outputs.end(),
              [](const ObjectNode& a, const ObjectNode& b) {
                  return object_sort_key(a) < object_sort_key(b);
              });
    std::sort(u.triggers.begin(), u.triggers.end());
    u.triggers.erase(std::unique(u.triggers.begin(), u.triggers.end()), u.triggers.end());
    return u;
}

std::vector<FunctionalUnit> canonicalize(std::vector<FunctionalUnit> units) {
    for (auto& u : units) u = canonical_unit(std::move(u));
    return units;
}

std::string serialize_unit(const FunctionalUnit& u) {
    std::string out;
    for (const auto& t : u.triggers) {
        out += "T " + t.failure_type;
        if (!t.objects.empty()) out += " | " + join(t.objects, ",");
        out.push_back('\n');
    }
    out += "U\n";
    for (const auto& o : u.inputs) append_object_line(out, 'I', o);
    out += "M " + u.motion.verb;
    if (!u.motion.parameters.empty()) {
        std::vector<std::string> kv;
        for (const auto& [k, v] : u.motion.parameters) kv.push_back(k + "=" + v);
        out += " | " + join(kv, ";");
    }
    out.push_back('\n');
    for (const auto& o : u.outputs) append_object_line(out, 'O', o);
    return out;
}

std::string serialize_subgraph(const std::vector<FunctionalUnit>& units) {
    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i) out.push_back('\n');
        out += serialize_unit(canonical_unit(units[i]));
    }
    return out;
}

std::string FunctionalUnit::unit_id() const {
    FunctionalUnit bare = *this;
    bare.triggers.clear();
    return sha256_hex(serialize_unit(canonical_unit(std::move(bare)))).substr(0, 16);
}

bool FunctionalUnit::consumes(const std::string& input_name) const {
    return std::none_of(outputs.begin(), outputs.end(),
                        [&](const ObjectNode& o) { return o.name == input_name; });
}

bool unit_equals(const FunctionalUnit& a, const FunctionalUnit& b) {
    FunctionalUnit ca = a, cb = b;
    ca.triggers.clear();
    cb.triggers.clear();
    return serialize_unit(canonical_unit(std::move(ca))) ==
           serialize_unit(canonical_unit(std::move(cb)));
}

ObjectNode parse_object_spec(const std::string& spec) {
    auto fields = split_fields(spec);
    ObjectNode o;
    o.name = to_lower(fields[0]);
    if (fields.size() > 1) o.states = split_list(fields[1], ',');
    if (fields.size() > 2) o.contains = split_list(fields[2], ';');
    return o;
}

namespace detail {

void parse_foon_lines(const std::string& text,
                      const std::function<void(std::size_t, const std::string&)>* on_section,
                      const std::function<void(const FunctionalUnit&)>& on_unit) {
    std::optional<FunctionalUnit> current;
    std::vector<RecoveryTrigger> pending_triggers;
    bool saw_motion = false;
    std::size_t unit_line = 0;

    auto flush = [&]() {
        if (!current) return;
        if (!saw_motion) throw ParseError(unit_line, "unit is missing its M (motion) line");
        on_unit(*current);
        current.reset();
        saw_motion = false;
    };

    std::stringstream ss(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            flush();
            if (!pending_triggers.empty())
                throw ParseError(lineno, "trigger line is not followed by a unit");
            if (!on_section) throw ParseError(lineno, "unexpected section header '" + line +
                                                          "' (section files go through the store loader)");
            (*on_section)(lineno, to_lower(line.substr(1, line.size() - 2)));
            continue;
        }

        std::string tag = line.substr(0, line.find(' '));
        std::string rest = trim(line.size() > tag.size() ? line.substr(tag.size() + 1) : "");
        tag = to_lower(tag);

        if (tag == "u") {
            flush();
            current = FunctionalUnit{};
            current->triggers = std::move(pending_triggers);
            pending_triggers.clear();
            unit_line = lineno;
            if (!rest.empty()) throw ParseError(lineno, "unexpected token after 'U': " + rest);
            continue;
        }
        if (tag == "t") {
            if (current) throw ParseError(lineno, "trigger line inside a unit block");
            auto fields = split_fields(rest);
            if (fields[0].empty()) throw ParseError(lineno, "trigger is missing a failure type");
            RecoveryTrigger t;
            t.failure_type = to_lower(fields[0]);
            if (fields.size() > 1) t.objects = split_list(fields[1], ',');
            std::sort(t.objects.begin(), t.objects.end());
            pending_triggers.push_back(std::move(t));
            continue;
        }
        if (tag == "i" || tag == "o") {
            if (!current) throw ParseError(lineno, "object line outside a unit block (missing 'U')");
            ObjectNode o = parse_object_spec(rest);
            if (o.name.empty()) throw ParseError(lineno, "object line is missing a name");
            (tag == "i" ? current->inputs : current->outputs).push_back(std::move(o));
            continue;
        }
        if (tag == "m") {
            if (!current) throw ParseError(lineno, "motion line outside a unit block (missing 'U')");
            if (saw_motion) throw ParseError(lineno, "duplicate M line in one unit");
            auto fields = split_fields(rest);
            if (fields[0].empty()) throw ParseError(lineno, "motion line is missing a verb");
            current->motion.verb = to_lower(fields[0]);
            if (fields.size() > 1) {
                for (const auto& kv : split_list(fields[1], ';')) {
                    auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw ParseError(lineno, "motion parameter is not of the form k=v: " + kv);
                    current->motion.parameters[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
                }
            }
            saw_motion = true;
            continue;
        }
        throw ParseError(lineno, "unknown line tag '" + tag + "'");
    }
    flush();
    if (!pending_triggers.empty())
        throw ParseError(lineno, "trigger line is not followed by a unit");
}

}  // namespace detail

std::vector<FunctionalUnit> parse_subgraph(const std::string& text) {
    std::vector<FunctionalUnit> units;
    detail::parse_foon_lines(text, nullptr,
                             [&](const FunctionalUnit& u) { units.push_back(u); });
    if (units.empty()) throw ParseError(1, "empty input: no functional units found");
    return units;
}

std::vector<Violation> validate_unit(const FunctionalUnit& u) {
    std::vector<Violation> out;
    if (u.inputs.empty()) out.push_back({"inputs", "non-empty required"});
    if (u.outputs.empty()) out.push_back({"outputs", "non-empty required"});
    if (u.motion.verb.empty()) out.push_back({"motion.verb", "non-empty required"});
    auto check_objects = [&](const std::vector<ObjectNode>& objs, const std::string& field) {
        for (std::size_t i = 0; i < objs.size(); ++i) {
            const auto& o = objs[i];
            std::string where = field + "[" + std::to_string(i) + "]";
            if (o.name.empty()) out.push_back({where + ".name", "non-empty required"});
            if (has_forbidden_chars(o.name))
                out.push_back({where + ".name", "control characters not allowed"});
            check_duplicates(o.states, where + ".states", out);
            check_duplicates(o.contains, where + ".contains", out);
        }
    };
    check_objects(u.inputs, "inputs");
    check_objects(u.outputs, "outputs");
    for (const auto& t : u.triggers) {
        if (t.failure_type.empty()) out.push_back({"triggers", "failure type required"});
    }
    return out;
}

}  // namespace star
