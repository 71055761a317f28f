#pragma once

#include <string>
#include <utility>
#include <vector>

#include "taintjs/index.hpp"

namespace taintjs::testing {

inline ProgramIndex make_index(
    const std::vector<std::pair<std::string, std::string>>& sources,
    IndexOptions options = {},
    std::vector<std::string> third_party_files = {}) {
    std::vector<ParsedFile> files;
    for (const auto& [path, text] : sources) {
        SourceFile src = SourceFile::load(path, text);
        files.push_back(ParsedFile{std::move(src), nullptr});
        files.back().ast = parse_source(files.back().src);
    }
    return build_program_index(".", std::move(files), std::move(options),
                               std::move(third_party_files));
}

// First node with the given kind and snippet; -1 when absent.
inline int find_node(const ProgramIndex& idx, FlowKind kind,
                     const std::string& snippet) {
    for (const auto& n : idx.nodes)
        if (n.kind == kind && n.snippet == snippet) return n.id;
    return -1;
}

// First invocation whose callee name matches; nullptr when absent.
inline const InvocationEntry* find_invocation(const ProgramIndex& idx,
                                              const std::string& callee) {
    for (const auto& inv : idx.invocations)
        if (inv.callee_name == callee) return &inv;
    return nullptr;
}

inline bool contains(const std::vector<int>& xs, int x) {
    for (int v : xs)
        if (v == x) return true;
    return false;
}

}  // namespace taintjs::testing
