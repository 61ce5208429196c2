#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "star/foon.hpp"

namespace star {

enum class Section { foon, failnet };

std::string section_name(Section s);
Section section_from_name(const std::string& name);

struct MergeReport {
    std::size_t added = 0;
    std::size_t skipped_duplicates = 0;
};

/// Indexed container for one FOON graph and one FailNet graph. The two
/// sections share a file but never mix: FailNet holds only recovery
/// units and is searched on its own.
///
/// Thread model: any number of concurrent readers; merge and trigger
/// mutation need exclusive access.
class KnowledgeStore {
  public:
    KnowledgeStore() = default;

    /// Deduplicating union. A duplicate (unit_equals with a stored
    /// unit) is skipped but its triggers are unioned into the stored
    /// copy. added + skipped == units.size().
    MergeReport merge(const std::vector<FunctionalUnit>& units, Section section);

    /// Attaches a trigger to an already-stored unit. No-op on unknown id.
    void add_trigger(Section section, const std::string& unit_id, const RecoveryTrigger& t);

    const std::map<std::string, FunctionalUnit>& units(Section section) const;
    std::optional<FunctionalUnit> find(Section section, const std::string& unit_id) const;

    /// object name -> sorted unit_ids whose outputs include that name.
    const std::map<std::string, std::vector<std::string>>& output_index(Section section) const;

    /// Names this section can produce, sorted.
    std::vector<std::string> producible_names(Section section) const;

    bool empty() const { return foon_.empty() && failnet_.empty(); }
    std::size_t size(Section section) const { return table(section).size(); }

    /// class label -> producible FOON goal names in that class.
    /// Rebuilt on demand from the caller's classifier.
    void rebuild_category_index(const std::function<std::string(const std::string&)>& classify);
    const std::map<std::string, std::set<std::string>>& category_index() const {
        return category_index_;
    }

    /// Canonical [FOON]/[FAILNET] file body, LF newlines, units in
    /// ascending unit_id order.
    std::string to_text() const;
    static KnowledgeStore from_text(const std::string& text);

    void save(const std::string& path) const;
    static KnowledgeStore load(const std::string& path);

  private:
    std::map<std::string, FunctionalUnit>& table(Section s) {
        return s == Section::foon ? foon_ : failnet_;
    }
    const std::map<std::string, FunctionalUnit>& table(Section s) const {
        return s == Section::foon ? foon_ : failnet_;
    }
    void index_unit(Section s, const std::string& id, const FunctionalUnit& u);

    std::map<std::string, FunctionalUnit> foon_;
    std::map<std::string, FunctionalUnit> failnet_;
    std::map<std::string, std::vector<std::string>> foon_outputs_;
    std::map<std::string, std::vector<std::string>> failnet_outputs_;
    std::map<std::string, std::set<std::string>> category_index_;
};

}  // namespace star
