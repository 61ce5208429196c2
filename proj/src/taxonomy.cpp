#include "star/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "star/foon.hpp"

namespace star {

DishTaxonomy DishTaxonomy::from_text(const std::string& text) {
    DishTaxonomy tax;
    std::stringstream ss(text);
    std::string raw;
    std::size_t lineno = 0;
    std::set<std::string> seen_labels;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError(lineno, "taxonomy line has no ':' separator");
        std::string label = to_lower(line.substr(0, colon));
        label.erase(label.find_last_not_of(" \t\r") + 1);
        label.erase(0, label.find_first_not_of(" \t\r"));
        if (label.empty()) throw ParseError(lineno, "taxonomy class label is empty");
        if (!seen_labels.insert(label).second)
            throw ParseError(lineno, "duplicate taxonomy class label '" + label + "'");
        int class_id = static_cast<int>(tax.classes_.size());
        tax.classes_.push_back({class_id, label});
        tax.keywords_.emplace_back(label, class_id);
        std::stringstream kws(line.substr(colon + 1));
        std::string kw;
        while (std::getline(kws, kw, ',')) {
            kw = to_lower(kw);
            kw.erase(kw.find_last_not_of(" \t\r") + 1);
            kw.erase(0, kw.find_first_not_of(" \t\r"));
            if (!kw.empty()) tax.keywords_.emplace_back(kw, class_id);
        }
    }
    if (tax.classes_.size() != 30) {
        throw std::runtime_error("taxonomy must define exactly 30 dish classes, got " +
                                 std::to_string(tax.classes_.size()));
    }
    std::sort(tax.keywords_.begin(), tax.keywords_.end());
    tax.keywords_.erase(std::unique(tax.keywords_.begin(), tax.keywords_.end()),
                        tax.keywords_.end());
    return tax;
}

DishTaxonomy DishTaxonomy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read taxonomy file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

DishClass DishTaxonomy::classify(const std::string& goal_name) const {
    if (goal_name.empty()) throw std::invalid_argument("goal name is empty");
    const std::string name = to_lower(goal_name);
    const DishClass* best = nullptr;
    std::size_t best_len = 0;
    std::string best_kw;
    for (const auto& [kw, class_id] : keywords_) {
        if (name.find(kw) == std::string::npos) continue;
        bool better = kw.size() > best_len;
        if (!better && kw.size() == best_len && best) {
            better = class_id < best->class_id ||
                     (class_id == best->class_id && kw < best_kw);
        }
        if (better || !best) {
            best = &classes_[class_id];
            best_len = kw.size();
            best_kw = kw;
        }
    }
    if (best) return *best;
    return DishClass{kOtherClassId, "other"};
}

DishClass classify_dish(const std::string& goal_name, const DishTaxonomy& taxonomy) {
    return taxonomy.classify(goal_name);
}

}  // namespace star
