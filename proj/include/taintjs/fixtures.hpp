#pragma once

#include <string>
#include <vector>

#include "taintjs/engine.hpp"
#include "taintjs/index.hpp"

namespace taintjs {

struct FixtureFile {
    std::string path;  // package-relative, forward slashes
    std::string text;
};

// A generated analysis package: source files, an optional mini node_modules
// tree, and ground-truth annotations for its planted findings.
struct GeneratedFixture {
    std::string pattern;
    unsigned seed = 0;
    int cwe = 0;
    int noise_calls = 0;
    std::vector<FixtureFile> files;        // includes node_modules entries
    std::vector<std::string> third_party;  // paths under node_modules
    std::vector<Annotation> annotations;
};

// The supported generator patterns, in a stable order.
const std::vector<std::string>& fixture_patterns();

// Deterministic per (pattern, seed). noise_calls only affects patterns that
// plant off-path unresolved calls. Throws Error on an unknown pattern.
GeneratedFixture generate_fixture(const std::string& pattern, unsigned seed,
                                  int noise_calls = 50);

// Materializes the fixture under dir: source files plus annotations.json.
void write_fixture(const GeneratedFixture& fixture, const std::string& dir);

std::string annotations_json(const std::vector<Annotation>& annotations);
std::vector<Annotation> parse_annotations(const std::string& text);
// Reads <dir>/annotations.json; missing file yields an empty list.
std::vector<Annotation> load_annotations(const std::string& dir);

// Builds a ProgramIndex from the in-memory fixture without touching disk.
ProgramIndex index_fixture(const GeneratedFixture& fixture,
                           IndexOptions options = {});

}  // namespace taintjs
