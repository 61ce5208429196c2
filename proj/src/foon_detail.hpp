#pragma once

#include <functional>
#include <string>

#include "star/foon.hpp"

namespace star::detail {

// Shared line reader for subgraph and store files. `on_section` is null
// when section headers are not allowed in this context.
void parse_foon_lines(const std::string& text,
                      const std::function<void(std::size_t, const std::string&)>* on_section,
                      const std::function<void(const FunctionalUnit&)>& on_unit);

}  // namespace star::detail
