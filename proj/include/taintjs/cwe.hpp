#pragma once

#include <string>
#include <vector>

namespace taintjs {

// Structured weakness context handed to the oracle roles.
struct CweContext {
    int id = 0;
    std::string name;
    std::string description;
    std::vector<std::string> common_consequences;
    std::string source_notes;  // characteristic source patterns
    std::string sink_notes;    // characteristic sink patterns
};

// Catalog of the supported weakness classes. Throws Error for unknown ids.
const CweContext& cwe_context(int id);
std::vector<int> cwe_catalog_ids();

}  // namespace taintjs
