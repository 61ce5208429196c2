#include "star/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "foon_detail.hpp"

namespace star {

std::string section_name(Section s) {
    return s == Section::foon ? "foon" : "failnet";
}

Section section_from_name(const std::string& name) {
    std::string n = to_lower(name);
    if (n == "foon") return Section::foon;
    if (n == "failnet") return Section::failnet;
    throw std::invalid_argument("unknown section '" + name + "' (expected foon or failnet)");
}

void KnowledgeStore::index_unit(Section s, const std::string& id, const FunctionalUnit& u) {
    auto& index = s == Section::foon ? foon_outputs_ : failnet_outputs_;
    for (const auto& o : u.outputs) {
        auto& ids = index[o.name];
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            ids.push_back(id);
            std::sort(ids.begin(), ids.end());
        }
    }
}

MergeReport KnowledgeStore::merge(const std::vector<FunctionalUnit>& units, Section section) {
    MergeReport report;
    auto& tab = table(section);
    for (const auto& raw : units) {
        FunctionalUnit u = canonical_unit(raw);
        std::string id = u.unit_id();
        auto it = tab.find(id);
        if (it != tab.end()) {
            ++report.skipped_duplicates;
            // Triggers are metadata, not identity: union them.
            for (const auto& t : u.triggers) {
                auto& ts = it->second.triggers;
                if (std::find(ts.begin(), ts.end(), t) == ts.end()) ts.push_back(t);
            }
            std::sort(it->second.triggers.begin(), it->second.triggers.end());
            continue;
        }
        tab.emplace(id, u);
        index_unit(section, id, u);
        ++report.added;
    }
    return report;
}

void KnowledgeStore::add_trigger(Section section, const std::string& unit_id,
                                 const RecoveryTrigger& t) {
    auto& tab = table(section);
    auto it = tab.find(unit_id);
    if (it == tab.end()) return;
    auto& ts = it->second.triggers;
    if (std::find(ts.begin(), ts.end(), t) == ts.end()) {
        ts.push_back(t);
        std::sort(ts.begin(), ts.end());
    }
}

const std::map<std::string, FunctionalUnit>& KnowledgeStore::units(Section section) const {
    return table(section);
}

std::optional<FunctionalUnit> KnowledgeStore::find(Section section,
                                                   const std::string& unit_id) const {
    auto& tab = table(section);
    auto it = tab.find(unit_id);
    if (it == tab.end()) return std::nullopt;
    return it->second;
}

const std::map<std::string, std::vector<std::string>>& KnowledgeStore::output_index(
    Section section) const {
    return section == Section::foon ? foon_outputs_ : failnet_outputs_;
}

std::vector<std::string> KnowledgeStore::producible_names(Section section) const {
    std::vector<std::string> names;
    for (const auto& [name, ids] : output_index(section)) names.push_back(name);
    return names;
}

void KnowledgeStore::rebuild_category_index(
    const std::function<std::string(const std::string&)>& classify) {
    category_index_.clear();
    for (const auto& [name, ids] : foon_outputs_) {
        category_index_[classify(name)].insert(name);
    }
}

std::string KnowledgeStore::to_text() const {
    auto section_text = [](const std::map<std::string, FunctionalUnit>& tab) {
        std::vector<FunctionalUnit> units;
        units.reserve(tab.size());
        for (const auto& [id, u] : tab) units.push_back(u);
        return serialize_subgraph(units);
    };
    return "[FOON]\n" + section_text(foon_) + "\n[FAILNET]\n" + section_text(failnet_);
}

KnowledgeStore KnowledgeStore::from_text(const std::string& text) {
    KnowledgeStore store;
    std::optional<Section> current;
    std::function<void(std::size_t, const std::string&)> on_section =
        [&](std::size_t line, const std::string& name) {
            if (name != "foon" && name != "failnet")
                throw ParseError(line, "unknown section [" + name + "]");
            current = section_from_name(name);
        };
    detail::parse_foon_lines(text, &on_section, [&](const FunctionalUnit& u) {
        if (!current) throw ParseError(1, "unit appears before any [FOON]/[FAILNET] header");
        store.merge({u}, *current);
    });
    return store;
}

void KnowledgeStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write store file: " + path);
    out << to_text();
}

KnowledgeStore KnowledgeStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read store file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

}  // namespace star
