#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "taintjs/ast.hpp"
#include "taintjs/common.hpp"

namespace taintjs {

enum class FlowKind {
    Expression,
    Parameter,
    Invocation,
    Function,
    PropertyWrite,
    ObjectLiteral,
};

const char* flow_kind_name(FlowKind k);

struct FlowNode {
    int id = -1;
    std::string file;
    Span span;
    std::string snippet;  // verbatim source slice
    FlowKind kind = FlowKind::Expression;
    const AstNode* ast = nullptr;
};

struct FunctionEntry {
    int index = -1;         // stable key, file-path then span order
    std::string name;       // empty for anonymous
    std::string file;
    Span span;              // full definition span
    std::vector<int> params;   // parameter FlowNode ids, in order
    std::vector<int> returns;  // return-expression FlowNode ids
    int node = -1;             // the function FlowNode id
    const AstNode* ast = nullptr;
};

enum class Boundary { First, Third, Unknown };

const char* boundary_name(Boundary b);

// Where a third-party classification came from: the require() call traced to.
struct ImportWitness {
    std::string file;
    int line = 0;
    std::string specifier;
};

struct InvocationEntry {
    int node = -1;             // invocation FlowNode id
    std::string callee_name;   // identifier or property name, may be empty
    std::vector<int> args;     // argument FlowNode ids, in order
    bool in_test_dir = false;
    Boundary boundary_hint = Boundary::Unknown;
    std::optional<ImportWitness> witness;  // set iff boundary_hint == Third
    std::string file;
    const AstNode* ast = nullptr;
};

struct ParsedFile {
    SourceFile src;
    AstNodePtr ast;
};

struct IndexOptions {
    // Path components that mark a test directory; filenames matching
    // *.test.js / *.spec.js are always treated as tests.
    std::vector<std::string> test_dirs = {"test", "tests", "__tests__"};
};

struct ProgramIndex {
    std::string package_root;
    IndexOptions options;
    std::vector<ParsedFile> files;  // sorted by path
    std::vector<FlowNode> nodes;    // nodes[id].id == id
    std::vector<FunctionEntry> functions;
    std::vector<InvocationEntry> invocations;

    // node_modules .js paths (relative to package root) for oracle browsing.
    std::vector<std::string> third_party_files;

    std::unordered_map<const AstNode*, int> node_of_ast;
    std::unordered_map<const AstNode*, int> function_of_ast;
    std::unordered_map<int, int> invocation_of_node;  // FlowNode id -> idx
    // Identifier use -> its declaration site (VarDecl Ident, Param,
    // FunctionDecl, or for-of Ident), per function-level lexical scoping.
    std::unordered_map<const AstNode*, const AstNode*> decl_of;
    // Declaration site -> every value ever bound to it in its file
    // (initializer plus right-hand sides of assignments to the name).
    std::unordered_map<const AstNode*, std::vector<const AstNode*>> values_of;
    // Declaration identifier -> the VarDecl/ForOf statement that declared it.
    std::unordered_map<const AstNode*, const AstNode*> decl_stmt_of;

    const FlowNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    int id_of(const AstNode* ast) const {
        auto it = node_of_ast.find(ast);
        return it == node_of_ast.end() ? -1 : it->second;
    }
    const FunctionEntry* function_at(const AstNode* ast) const {
        auto it = function_of_ast.find(ast);
        return it == function_of_ast.end() ? nullptr : &functions[static_cast<std::size_t>(it->second)];
    }
    const InvocationEntry* invocation_at(int node_id) const {
        auto it = invocation_of_node.find(node_id);
        return it == invocation_of_node.end() ? nullptr : &invocations[static_cast<std::size_t>(it->second)];
    }
};

// True when the path (relative, forward slashes) lies in a test directory.
bool in_test_dir(const std::string& path, const IndexOptions& options);

// Matches require("<literal>") calls; fills the specifier when asked.
bool is_require_call(const AstNode& n, std::string* specifier = nullptr);

// Parses every first-party .js file under root (skipping node_modules) and
// builds the registries. node_modules .js files are listed but not parsed.
ProgramIndex load_package(const std::string& root, IndexOptions options = {});

// Builds an index from already-parsed files (used by tests and fixtures).
ProgramIndex build_program_index(std::string package_root,
                                 std::vector<ParsedFile> files,
                                 IndexOptions options = {},
                                 std::vector<std::string> third_party_files = {});

// Case-insensitive substring match over function names and file paths,
// exact-name matches ranked first. Throws EmptyQuery when no filter is given.
std::vector<const FunctionEntry*> lookup_functions(
    const ProgramIndex& index, const std::optional<std::string>& name,
    const std::optional<std::string>& file);

// Traces the invocation's callee access path to a require() or a first-party
// function definition. Fills the witness for third-party classifications.
Boundary classify_boundary(const InvocationEntry& invocation,
                           const ProgramIndex& index,
                           std::optional<ImportWitness>* witness = nullptr);

// One JSON object per FlowNode, one per line: id, kind, file, span, snippet
// (single-line rendering).
std::string dump_index(const ProgramIndex& index);

}  // namespace taintjs
