#pragma once

// Figure configurations shipped with the library (examples/*.ini).

#include <string>
#include <string_view>
#include <vector>

#include "qdgain/config.hpp"
#include "qdgain/figures_data.hpp"

namespace qdgain {

inline std::vector<std::string> figure_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : figures_data::kFigures) names.emplace_back(name);
    return names;
}

inline std::string_view figure_text(std::string_view name) {
    for (const auto& [n, text] : figures_data::kFigures)
        if (n == name) return text;
    std::string known;
    for (const auto& [n, text] : figures_data::kFigures) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("unknown figure '" + std::string(name) + "' (available: " + known + ")");
}

inline RunConfig figure_config(std::string_view name) { return parse_config(figure_text(name)); }

}  // namespace qdgain
