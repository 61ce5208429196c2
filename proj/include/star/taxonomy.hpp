#pragma once

#include <string>
#include <vector>

namespace star {

struct DishClass {
    int class_id = 0;
    std::string label;

    bool operator==(const DishClass&) const = default;
};

/// Keyword taxonomy over dish names. The file carries exactly 30 class
/// lines of the form `class_label: keyword, keyword, ...`; the label
/// itself counts as a keyword. Anything unmatched falls back to the
/// implicit "other" class.
class DishTaxonomy {
  public:
    static constexpr int kOtherClassId = 30;

    static DishTaxonomy from_text(const std::string& text);
    static DishTaxonomy load(const std::string& path);

    /// Longest matching keyword wins; ties break toward the lowest
    /// class_id, then the lexicographically smallest keyword.
    DishClass classify(const std::string& goal_name) const;

    const std::vector<DishClass>& classes() const { return classes_; }

  private:
    std::vector<DishClass> classes_;
    std::vector<std::pair<std::string, int>> keywords_;  // keyword -> class_id
};

DishClass classify_dish(const std::string& goal_name, const DishTaxonomy& taxonomy);

}  // namespace star
