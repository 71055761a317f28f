#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "taintjs/index.hpp"

using namespace taintjs;

namespace {

ProgramIndex make_index(
    const std::vector<std::pair<std::string, std::string>>& sources,
    IndexOptions options = {}) {
    std::vector<ParsedFile> files;
    for (const auto& [path, text] : sources) {
        SourceFile src = SourceFile::load(path, text);
        files.push_back(ParsedFile{std::move(src), nullptr});
        files.back().ast = parse_source(files.back().src);
    }
    return build_program_index(".", std::move(files), std::move(options));
}

}  // namespace

TEST_CASE("index: single declaration yields one function, no invocations") {
    auto idx = make_index({{"a.js", "function f(){}"}});
    CHECK(idx.functions.size() == 1);
    CHECK(idx.functions[0].name == "f");
    CHECK(idx.invocations.empty());
}

TEST_CASE("index: every listed construct gets exactly one FlowNode") {
    auto idx = make_index({{"a.js",
                            "function f(p) { return p; }\n"
                            "const o = {run: function(x){ return x; }};\n"
                            "o.cache = f(1);\n"}});
    int functions = 0, params = 0, invocations = 0, writes = 0, objects = 0;
    for (const auto& n : idx.nodes) {
        switch (n.kind) {
            case FlowKind::Function: ++functions; break;
            case FlowKind::Parameter: ++params; break;
            case FlowKind::Invocation: ++invocations; break;
            case FlowKind::PropertyWrite: ++writes; break;
            case FlowKind::ObjectLiteral: ++objects; break;
            default: break;
        }
    }
    CHECK(functions == 2);
    CHECK(params == 2);
    CHECK(invocations == 1);
    CHECK(writes == 1);
    CHECK(objects == 1);
}

TEST_CASE("index: (file, span, kind) unique and snippets verbatim") {
    auto idx = make_index(
        {{"a.js", "const msg = `v ${x + y}`;\nconst n = {a: x, b: x};\n"},
         {"b.js", "function g(a, b) { return a + b; }\ng(1, 2);\n"}});
    std::set<std::tuple<std::string, int, int, int, int, int>> seen;
    for (const auto& n : idx.nodes) {
        auto key = std::make_tuple(n.file, n.span.start_line, n.span.start_col,
                                   n.span.end_line, n.span.end_col,
                                   static_cast<int>(n.kind));
        CHECK(seen.insert(key).second);
        for (const auto& f : idx.files)
            if (f.src.path == n.file) CHECK(f.src.slice(n.span) == n.snippet);
    }
}

TEST_CASE("index: ids are dense and ordered by file path then span") {
    auto idx = make_index({{"b.js", "const x = 1;"}, {"a.js", "const y = 2;"}});
    for (std::size_t i = 0; i < idx.nodes.size(); ++i)
        CHECK(idx.nodes[i].id == static_cast<int>(i));
    // All a.js nodes precede all b.js nodes.
    bool seen_b = false;
    for (const auto& n : idx.nodes) {
        if (n.file == "b.js") seen_b = true;
        if (seen_b) CHECK(n.file == "b.js");
    }
}

TEST_CASE("index: determinism across rebuilds") {
    const std::vector<std::pair<std::string, std::string>> sources = {
        {"lib/core.js",
         "function run(cmd) { return exec(cmd); }\nmodule.exports = run;\n"},
        {"app.js",
         "const run = require('./lib/core');\nrun(process.argv[2]);\n"}};
    auto a = make_index(sources);
    auto b = make_index(sources);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].id == b.nodes[i].id);
        CHECK(a.nodes[i].file == b.nodes[i].file);
        CHECK(a.nodes[i].span == b.nodes[i].span);
        CHECK(a.nodes[i].kind == b.nodes[i].kind);
    }
    REQUIRE(a.functions.size() == b.functions.size());
    for (std::size_t i = 0; i < a.functions.size(); ++i)
        CHECK(a.functions[i].index == b.functions[i].index);
}

TEST_CASE("index: every invocation argument is a FlowNode") {
    auto idx = make_index({{"a.js",
                            "send(a, b.c, {k: 1}, `t ${x}`, f(1));\n"
                            "obj[key](p + q);\n"}});
    for (const auto& inv : idx.invocations)
        for (int arg : inv.args) {
            CHECK(arg >= 0);
            CHECK(arg < static_cast<int>(idx.nodes.size()));
        }
}

TEST_CASE("index: test-directory detection") {
    IndexOptions opts;
    CHECK(in_test_dir("test/a.js", opts));
    CHECK(in_test_dir("src/__tests__/a.js", opts));
    CHECK(in_test_dir("src/a.test.js", opts));
    CHECK(in_test_dir("src/a.spec.js", opts));
    CHECK(!in_test_dir("src/a.js", opts));
    CHECK(!in_test_dir("contest/a.js", opts));
    CHECK(!in_test_dir("src/test.js", opts));  // filename, not a directory
    IndexOptions custom;
    custom.test_dirs = {"checks"};
    CHECK(in_test_dir("checks/a.js", custom));
    CHECK(!in_test_dir("test/a.js", custom));

    auto idx = make_index({{"__tests__/a.js", "probe(1);"}});
    REQUIRE(idx.invocations.size() == 1);
    CHECK(idx.invocations[0].in_test_dir);
}

TEST_CASE("index: lookup_functions filters and ranking") {
    auto idx = make_index({{"mrk.js",
                            "function link(t){ return t; }\n"
                            "function linkify(t){ return t; }\n"},
                           {"other.js", "function fn(){}"}});
    auto hits = lookup_functions(idx, std::string("link"), std::string("mrk.js"));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0]->name == "link");  // exact name first
    CHECK(hits[1]->name == "linkify");

    CHECK(lookup_functions(idx, std::string("nosuchfn"), std::nullopt).empty());
    // Case-insensitive match.
    auto caps = lookup_functions(idx, std::string("FN"), std::nullopt);
    REQUIRE(caps.size() == 1);
    CHECK(caps[0]->name == "fn");
    CHECK_THROWS_AS(lookup_functions(idx, std::nullopt, std::nullopt),
                    EmptyQuery);
}

TEST_CASE("index: classify_boundary third via require trace") {
    auto idx = make_index(
        {{"app.js", "const md = require('markdown-it');\nmd.render(x);\n"}});
    REQUIRE(idx.invocations.size() == 2);  // require(...) and md.render(...)
    const InvocationEntry* render = nullptr;
    for (const auto& inv : idx.invocations)
        if (inv.callee_name == "render") render = &inv;
    REQUIRE(render != nullptr);
    CHECK(render->boundary_hint == Boundary::Third);
    REQUIRE(render->witness.has_value());
    CHECK(render->witness->file == "app.js");
    CHECK(render->witness->line == 1);
    CHECK(render->witness->specifier == "markdown-it");
}

TEST_CASE("index: classify_boundary first for direct lexical call") {
    auto idx = make_index({{"a.js", "function g(){}\ng();\n"}});
    REQUIRE(idx.invocations.size() == 1);
    CHECK(idx.invocations[0].boundary_hint == Boundary::First);
    CHECK(!idx.invocations[0].witness.has_value());
}

TEST_CASE("index: classify_boundary unknown for dynamic table") {
    auto idx = make_index({{"a.js",
                            "function run(cb) {\n"
                            "  const callbacks = {};\n"
                            "  callbacks['first'] = cb;\n"
                            "  callbacks['first'](x);\n"
                            "}\n"}});
    const InvocationEntry* call = nullptr;
    for (const auto& inv : idx.invocations)
        if (inv.callee_name == "first") call = &inv;
    REQUIRE(call != nullptr);
    CHECK(call->boundary_hint == Boundary::Unknown);
}

TEST_CASE("index: classify_boundary first via relative require") {
    auto idx = make_index(
        {{"app.js", "const core = require('./lib/core');\ncore(x);\n"},
         {"lib/core.js", "module.exports = function(v){ return v; };\n"}});
    const InvocationEntry* call = nullptr;
    for (const auto& inv : idx.invocations)
        if (inv.callee_name == "core") call = &inv;
    REQUIRE(call != nullptr);
    CHECK(call->boundary_hint == Boundary::First);
}

TEST_CASE("index: classify_boundary through aliasing and object tables") {
    auto idx = make_index({{"a.js",
                            "const lib = require('left-pad');\n"
                            "const alias = lib;\n"
                            "alias.pad(x);\n"
                            "const table = {go: function(v){ return v; }};\n"
                            "table.go(1);\n"}});
    const InvocationEntry *pad = nullptr, *go = nullptr;
    for (const auto& inv : idx.invocations) {
        if (inv.callee_name == "pad") pad = &inv;
        if (inv.callee_name == "go") go = &inv;
    }
    REQUIRE(pad != nullptr);
    CHECK(pad->boundary_hint == Boundary::Third);
    REQUIRE(go != nullptr);
    CHECK(go->boundary_hint == Boundary::First);
}

TEST_CASE("index: function entry params and returns") {
    auto idx = make_index({{"a.js",
                            "function f(a, b) {\n"
                            "  if (a) { return a; }\n"
                            "  const g = function(){ return b; };\n"
                            "  return g();\n"
                            "}\n"}});
    const FunctionEntry* f = nullptr;
    for (const auto& fe : idx.functions)
        if (fe.name == "f") f = &fe;
    REQUIRE(f != nullptr);
    CHECK(f->params.size() == 2);
    // Nested function's return does not leak into f's returns.
    CHECK(f->returns.size() == 2);
    for (int r : f->returns) CHECK(idx.node(r).file == "a.js");
}

TEST_CASE("index: dump is one JSON record per node") {
    auto idx = make_index({{"a.js", "const x = f(1);\n"}});
    std::string dump = dump_index(idx);
    std::size_t lines = 0;
    for (char c : dump)
        if (c == '\n') ++lines;
    CHECK(lines == idx.nodes.size());
    CHECK(dump.find("\"kind\":\"invocation\"") != std::string::npos);
}
