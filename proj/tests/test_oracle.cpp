#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "taintjs/oracle.hpp"

using namespace taintjs;
using namespace taintjs::testing;
namespace fs = std::filesystem;

namespace {

EndpointProposal prop(const std::string& file, int line, int col,
                      const std::string& snippet, int confidence) {
    return {{file, line, col, snippet}, confidence, "r"};
}

ResolutionRun rr(ResolutionVerdict v, std::vector<FpCandidate> fps = {}) {
    ResolutionRun r;
    r.verdict = v;
    r.fp_candidates = std::move(fps);
    if (v == ResolutionVerdict::Third)
        r.tp_metadata = TpMetadata{"lib", "node_modules/lib/index.js", "imp"};
    return r;
}

SummaryRun sr(SummaryClass c, int confidence) {
    SummaryRun r;
    r.classification = c;
    r.confidence = confidence;
    r.trace = {std::string("trace-") + summary_class_name(c)};
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("oracle-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("union: duplicates collapse and max confidence wins") {
    auto facts = aggregate_union({
        {prop("a.js", 3, 5, "location.hash", 4)},
        {prop("a.js", 3, 5, "location.hash", 5)},
        {prop("a.js", 3, 5, "location.hash", 3)},
    });
    REQUIRE(facts.size() == 1);
    CHECK(facts[0].id == 1);
    CHECK(facts[0].confidence == 5);
    CHECK(facts[0].loc.snippet == "location.hash");
}

TEST_CASE("union: identity ignores the column") {
    auto facts = aggregate_union({
        {prop("a.js", 3, 5, "x", 2)},
        {prop("a.js", 3, 9, "x", 4)},
    });
    REQUIRE(facts.size() == 1);
    CHECK(facts[0].confidence == 4);
    CHECK(facts[0].loc.col == 5);  // first occurrence keeps its column
}

TEST_CASE("union: differing file, line, or snippet stay distinct") {
    auto facts = aggregate_union({
        {prop("a.js", 3, 1, "x", 2), prop("b.js", 3, 1, "x", 2),
         prop("a.js", 4, 1, "x", 2), prop("a.js", 3, 1, "y", 2)},
    });
    CHECK(facts.size() == 4);
    for (std::size_t i = 0; i < facts.size(); ++i)
        CHECK(facts[i].id == static_cast<int>(i) + 1);
}

TEST_CASE("union: idempotent and order-insensitive") {
    std::vector<EndpointProposal> a = {prop("a.js", 1, 1, "p", 3),
                                       prop("b.js", 2, 2, "q", 4)};
    std::vector<EndpointProposal> b = {prop("b.js", 2, 2, "q", 2),
                                       prop("c.js", 5, 1, "r", 5)};
    auto once = aggregate_union({a, b});
    auto twice = aggregate_union({a, b, a, b});
    auto swapped = aggregate_union({b, a});
    auto same = [](const std::vector<EndpointFact>& x,
                   const std::vector<EndpointFact>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].id != y[i].id || x[i].confidence != y[i].confidence)
                return false;
            if (x[i].loc.file != y[i].loc.file || x[i].loc.line != y[i].loc.line ||
                x[i].loc.snippet != y[i].loc.snippet)
                return false;
        }
        return true;
    };
    CHECK(same(once, twice));
    CHECK(same(once, swapped));
    // Ordered by file then line.
    REQUIRE(once.size() == 3);
    CHECK(once[0].loc.file == "a.js");
    CHECK(once[2].loc.file == "c.js");
}

TEST_CASE("union: randomized merge agrees with a brute-force oracle") {
    std::mt19937 rng(20240811);
    for (int round = 0; round < 50; ++round) {
        std::vector<std::vector<EndpointProposal>> runs(3);
        for (auto& run : runs) {
            int n = static_cast<int>(rng() % 6);
            for (int i = 0; i < n; ++i)
                run.push_back(prop("f" + std::to_string(rng() % 2) + ".js",
                                   static_cast<int>(rng() % 3) + 1,
                                   static_cast<int>(rng() % 4) + 1,
                                   std::string(1, 'a' + rng() % 2),
                                   static_cast<int>(rng() % 5) + 1));
        }
        // Brute force: map keyed on (file, line, snippet) with max confidence.
        std::map<std::tuple<std::string, int, std::string>, int> expect;
        for (const auto& run : runs)
            for (const auto& p : run) {
                auto key =
                    std::make_tuple(p.loc.file, p.loc.line, p.loc.snippet);
                auto it = expect.find(key);
                if (it == expect.end())
                    expect[key] = p.confidence;
                else
                    it->second = std::max(it->second, p.confidence);
            }
        auto got = aggregate_union(runs);
        REQUIRE(got.size() == expect.size());
        for (const auto& f : got) {
            auto key =
                std::make_tuple(f.loc.file, f.loc.line, f.loc.snippet);
            REQUIRE(expect.count(key) == 1);
            CHECK(f.confidence == expect[key]);
        }
    }
}

TEST_CASE("stratified: all twenty-seven three-run verdict combinations") {
    const ResolutionVerdict vs[] = {ResolutionVerdict::First,
                                    ResolutionVerdict::Third,
                                    ResolutionVerdict::Unresolvable};
    for (ResolutionVerdict a : vs)
        for (ResolutionVerdict b : vs)
            for (ResolutionVerdict c : vs) {
                auto result = aggregate_stratified({rr(a), rr(b), rr(c)});
                int first = (a == vs[0]) + (b == vs[0]) + (c == vs[0]);
                int third = (a == vs[1]) + (b == vs[1]) + (c == vs[1]);
                int unres = (a == vs[2]) + (b == vs[2]) + (c == vs[2]);
                ResolutionVerdict want = ResolutionVerdict::Unresolvable;
                if (first >= 2 && first > third && first > unres)
                    want = ResolutionVerdict::First;
                else if (third >= 2 && third > first && third > unres)
                    want = ResolutionVerdict::Third;
                CAPTURE(first);
                CAPTURE(third);
                CHECK(result.verdict == want);
                if (want == ResolutionVerdict::Third)
                    CHECK(result.tp_metadata.has_value());
            }
}

TEST_CASE("stratified: candidates union only over majority-side runs") {
    FpCandidate f1{1, {"t"}, 3}, f1b{1, {"t"}, 5}, f2{2, {"t"}, 4},
        f9{9, {"t"}, 5};
    auto result = aggregate_stratified({
        rr(ResolutionVerdict::First, {f1, f2}),
        rr(ResolutionVerdict::First, {f1b}),
        rr(ResolutionVerdict::Unresolvable, {f9}),
    });
    REQUIRE(result.verdict == ResolutionVerdict::First);
    REQUIRE(result.fp_candidates.size() == 2);
    CHECK(result.fp_candidates[0].function_index == 1);
    CHECK(result.fp_candidates[0].confidence == 5);  // max across runs
    CHECK(result.fp_candidates[1].function_index == 2);
    // The dissenting run's proposal never leaks in.
    for (const auto& fp : result.fp_candidates)
        CHECK(fp.function_index != 9);
}

TEST_CASE("stratified: failed runs are excluded from the vote") {
    ResolutionRun failed = rr(ResolutionVerdict::First, {{1, {}, 5}});
    failed.failed = true;
    auto result = aggregate_stratified(
        {failed, rr(ResolutionVerdict::Third), rr(ResolutionVerdict::Third)});
    CHECK(result.verdict == ResolutionVerdict::Third);

    auto none = aggregate_stratified({failed, failed});
    CHECK(none.verdict == ResolutionVerdict::Unresolvable);
    CHECK(none.fp_candidates.empty());
}

TEST_CASE("summary: strict majority wins") {
    auto v = aggregate_summary(7, {sr(SummaryClass::Sanitizes, 5),
                                   sr(SummaryClass::Sanitizes, 4),
                                   sr(SummaryClass::Propagates, 5)});
    CHECK(v.edge_id == 7);
    CHECK(v.classification == SummaryClass::Sanitizes);
    CHECK(v.confidence == 5);  // rounded mean of 5 and 4 on the winning side
    CHECK(v.run_verdicts.size() == 3);
    REQUIRE(!v.trace.empty());
    CHECK(v.trace[0] == "trace-sanitizes");
}

TEST_CASE("summary: count ties break by mean confidence") {
    auto v = aggregate_summary(1, {sr(SummaryClass::Sanitizes, 2),
                                   sr(SummaryClass::Propagates, 5)});
    CHECK(v.classification == SummaryClass::Propagates);
    CHECK(v.confidence == 5);
}

TEST_CASE("summary: full ties resolve conservatively") {
    auto both = aggregate_summary(1, {sr(SummaryClass::Sanitizes, 4),
                                      sr(SummaryClass::Propagates, 4)});
    CHECK(both.classification == SummaryClass::Propagates);
    auto unknowns = aggregate_summary(1, {sr(SummaryClass::Sanitizes, 4),
                                          sr(SummaryClass::Unknown, 4)});
    CHECK(unknowns.classification == SummaryClass::Unknown);
    auto empty = aggregate_summary(1, {});
    CHECK(empty.classification == SummaryClass::Unknown);
    CHECK(empty.run_verdicts.empty());
}

// --- deterministic backend ---

TEST_CASE("backend: discovery finds environment reads and markup sinks") {
    auto idx = make_index({{"app.js",
                            "function render(input) {\n"
                            "  const user = location.hash;\n"
                            "  const q = req.query.term;\n"
                            "  return `<div>${user}</div>`;\n"
                            "}\n"
                            "module.exports = render;\n"}});
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->discover(idx, cwe_context(79), 1, t);

    auto has = [&](const std::vector<EndpointProposal>& xs,
                   const std::string& snippet) {
        for (const auto& p : xs)
            if (p.loc.snippet == snippet) return true;
        return false;
    };
    CHECK(has(run.sources, "location.hash"));
    CHECK(has(run.sources, "req.query.term"));
    CHECK(has(run.sources, "input"));  // exported entry-point parameter
    CHECK(has(run.sinks, "user"));     // interpolation into markup
    CHECK(!t.tool_calls.empty());

    // Pure function of the package: a second run proposes the same facts.
    Transcript t2;
    auto again = backend->discover(idx, cwe_context(79), 2, t2);
    REQUIRE(again.sources.size() == run.sources.size());
    for (std::size_t i = 0; i < run.sources.size(); ++i)
        CHECK(again.sources[i].loc.snippet == run.sources[i].loc.snippet);
}

TEST_CASE("backend: code-evaluation sinks and factory exports") {
    auto idx = make_index({{"app.js",
                            "function make() {\n"
                            "  return function handler(payload) {\n"
                            "    eval(payload);\n"
                            "    return 0;\n"
                            "  };\n"
                            "}\n"
                            "module.exports = make();\n"}});
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->discover(idx, cwe_context(94), 1, t);
    REQUIRE(run.sinks.size() == 1);
    CHECK(run.sinks[0].loc.snippet == "payload");
    CHECK(run.sinks[0].confidence == 5);
    bool entry_param = false;
    for (const auto& s : run.sources)
        if (s.loc.snippet == "payload" && s.reason.find("entry") !=
                                              std::string::npos)
            entry_param = true;
    CHECK(entry_param);  // factory-returned function is part of the surface
}

TEST_CASE("backend: constant key over an object table resolves first-party") {
    auto idx = make_index({{"app.js",
                            "function runIt(x) { return x; }\n"
                            "function stopIt(x) { return 0; }\n"
                            "const handlers = { run: runIt, stop: stopIt };\n"
                            "const key = 'run';\n"
                            "handlers[key](1);\n"}});
    int call = find_node(idx, FlowKind::Invocation, "handlers[key](1)");
    REQUIRE(call >= 0);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {call, "t1"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    REQUIRE(run.fp_candidates.size() == 1);
    const FunctionEntry& fe = idx.functions[run.fp_candidates[0].function_index];
    CHECK(fe.name == "runIt");
    CHECK(!run.fp_candidates[0].trace.empty());
}

TEST_CASE("backend: dynamic key proposes every function-valued property") {
    auto idx = make_index({{"app.js",
                            "function a(x) { return x; }\n"
                            "function b(x) { return x; }\n"
                            "const table = { one: a, two: b, label: 'hi' };\n"
                            "function pick(k) { return table[k](0); }\n"
                            "pick('one');\n"}});
    int call = find_node(idx, FlowKind::Invocation, "table[k](0)");
    REQUIRE(call >= 0);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {call, "t"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    std::vector<std::string> names;
    for (const auto& fp : run.fp_candidates)
        names.push_back(idx.functions[fp.function_index].name);
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("backend: property-write registration feeds the table") {
    auto idx = make_index({{"app.js",
                            "function doRun(x) { return x; }\n"
                            "const handlers = {};\n"
                            "handlers['run'] = doRun;\n"
                            "const key = 'run';\n"
                            "handlers[key](1);\n"}});
    int call = find_node(idx, FlowKind::Invocation, "handlers[key](1)");
    REQUIRE(call >= 0);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {call, "t"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    REQUIRE(run.fp_candidates.size() == 1);
    CHECK(idx.functions[run.fp_candidates[0].function_index].name == "doRun");
}

TEST_CASE("backend: pair elements over listed entries reach all values") {
    auto idx = make_index({{"app.js",
                            "function em(s) { return s; }\n"
                            "function strong(s) { return s; }\n"
                            "const patterns = { em: em, strong: strong };\n"
                            "function applyAll(src) {\n"
                            "  for (const entry of Object.entries(patterns)) {\n"
                            "    const fn = entry[1];\n"
                            "    src = fn(src);\n"
                            "  }\n"
                            "  return src;\n"
                            "}\n"
                            "applyAll('x');\n"}});
    const InvocationEntry* inv = find_invocation(idx, "fn");
    REQUIRE(inv != nullptr);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {inv->node, "t"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    std::vector<std::string> names;
    for (const auto& fp : run.fp_candidates)
        names.push_back(idx.functions[fp.function_index].name);
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"em", "strong"});
}

TEST_CASE("backend: callback parameters trace through their callers") {
    auto idx = make_index({{"app.js",
                            "function worker(v) { return v; }\n"
                            "function apply(cb, v) { return cb(v); }\n"
                            "apply(worker, 3);\n"}});
    const InvocationEntry* inv = find_invocation(idx, "cb");
    REQUIRE(inv != nullptr);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {inv->node, "t"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    REQUIRE(run.fp_candidates.size() == 1);
    CHECK(idx.functions[run.fp_candidates[0].function_index].name == "worker");
}

TEST_CASE("backend: builtins are unresolvable with a reason") {
    auto idx = make_index({{"app.js", "eval('1 + 1');\n"}});
    const InvocationEntry* inv = find_invocation(idx, "eval");
    REQUIRE(inv != nullptr);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {inv->node, "t"}, 1, t);
    CHECK(run.verdict == ResolutionVerdict::Unresolvable);
    CHECK(run.reason.find("builtin") != std::string::npos);
}

TEST_CASE("backend: imported callees classify as third-party with metadata") {
    auto idx = make_index(
        {{"app.js",
          "const lib = require('markdown-lib');\n"
          "lib.render('x');\n"}},
        {}, {"node_modules/markdown-lib/index.js"});
    const InvocationEntry* inv = find_invocation(idx, "render");
    REQUIRE(inv != nullptr);
    auto backend = make_deterministic_backend();
    Transcript t;
    auto run = backend->resolve(idx, {inv->node, "t"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::Third);
    REQUIRE(run.tp_metadata.has_value());
    CHECK(run.tp_metadata->library == "markdown-lib");
    CHECK(run.tp_metadata->module_path == "node_modules/markdown-lib/index.js");
    CHECK(run.tp_metadata->import_statement.find("app.js:1") !=
          std::string::npos);
}

TEST_CASE("backend: flow summaries read the library entry point") {
    TempDir dir;
    fs::create_directories(dir.path / "node_modules" / "esc-lib");
    fs::create_directories(dir.path / "node_modules" / "raw-lib");
    std::ofstream(dir.path / "node_modules" / "esc-lib" / "index.js")
        << "function escapeHtml(s) { return s; }\n"
           "module.exports = { render: escapeHtml };\n";
    std::ofstream(dir.path / "node_modules" / "raw-lib" / "index.js")
        << "module.exports = { render: function (s) { return s; } };\n";

    std::vector<ParsedFile> files;
    SourceFile src = SourceFile::load("app.js", "const x = 1;\n");
    files.push_back(ParsedFile{std::move(src), nullptr});
    files.back().ast = parse_source(files.back().src);
    auto idx = build_program_index(
        dir.path.string(), std::move(files), {},
        {"node_modules/esc-lib/index.js", "node_modules/raw-lib/index.js"});

    auto backend = make_deterministic_backend();
    Transcript t;
    auto esc = backend->summarize(idx, {1, -1, "esc-lib", "s1"},
                                  cwe_context(79), 1, t);
    CHECK(esc.classification == SummaryClass::Sanitizes);
    CHECK(esc.confidence == 5);
    REQUIRE(!esc.trace.empty());
    CHECK(esc.trace[0].find("escapeHtml") != std::string::npos);

    auto raw = backend->summarize(idx, {2, -1, "raw-lib", "s2"},
                                  cwe_context(79), 1, t);
    CHECK(raw.classification == SummaryClass::Propagates);

    auto missing = backend->summarize(idx, {3, -1, "ghost-lib", "s3"},
                                      cwe_context(79), 1, t);
    CHECK(missing.classification == SummaryClass::Unknown);
}

TEST_CASE("backend: package-side renderer overrides defeat library escaping") {
    TempDir dir;
    fs::create_directories(dir.path / "node_modules" / "esc-lib");
    std::ofstream(dir.path / "node_modules" / "esc-lib" / "index.js")
        << "function escapeHtml(s) { return s; }\n"
           "module.exports = { render: escapeHtml };\n";
    std::vector<ParsedFile> files;
    SourceFile src = SourceFile::load(
        "app.js",
        "const md = require('esc-lib');\n"
        "md.renderer.rules = function (s) { return s; };\n");
    files.push_back(ParsedFile{std::move(src), nullptr});
    files.back().ast = parse_source(files.back().src);
    auto idx = build_program_index(dir.path.string(), std::move(files), {},
                                   {"node_modules/esc-lib/index.js"});
    auto backend = make_deterministic_backend();
    Transcript t;
    auto v = backend->summarize(idx, {1, -1, "esc-lib", "s"}, cwe_context(79),
                                1, t);
    CHECK(v.classification == SummaryClass::Propagates);
    REQUIRE(v.trace.size() >= 2);
}

// --- driver ---

TEST_CASE("oracle: multi-run discovery is stable and persists transcripts") {
    TempDir dir;
    auto idx = make_index({{"app.js",
                            "const u = location.hash;\n"
                            "const out = `<p>${u}</p>`;\n"}});
    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {3, (dir.path / "transcripts").string()}};
    auto [sources, sinks] = oracle.run_source_sink(idx, cwe_context(79));
    REQUIRE(!sources.empty());
    REQUIRE(!sinks.empty());
    // Identical runs collapse: ids are dense from 1.
    for (std::size_t i = 0; i < sources.size(); ++i)
        CHECK(sources[i].id == static_cast<int>(i) + 1);

    int transcript_files = 0;
    for ([[maybe_unused]] const auto& e :
         fs::directory_iterator(dir.path / "transcripts"))
        ++transcript_files;
    CHECK(transcript_files == 3);
}

TEST_CASE("oracle: flow-summary validation rejects even run counts") {
    auto idx = make_index({{"app.js", "const x = 1;\n"}});
    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {2, ""}};
    CHECK_THROWS_AS(oracle.run_flowsummary(idx, {}, cwe_context(79)), Error);
}

TEST_CASE("oracle: callgraph votes over three runs of a pure backend") {
    auto idx = make_index({{"app.js",
                            "function f(x) { return x; }\n"
                            "const g = f;\n"
                            "g(1);\n"}});
    const InvocationEntry* inv = find_invocation(idx, "g");
    REQUIRE(inv != nullptr);
    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {3, ""}};
    auto result = oracle.run_callgraph(idx, {inv->node, "t"});
    REQUIRE(result.verdict == ResolutionVerdict::First);
    REQUIRE(result.fp_candidates.size() == 1);
    CHECK(idx.functions[result.fp_candidates[0].function_index].name == "f");
}

// --- toolbelt ---

TEST_CASE("toolbelt: namespaced browsing") {
    TempDir dir;
    fs::create_directories(dir.path / "node_modules" / "lib");
    std::ofstream(dir.path / "node_modules" / "lib" / "index.js")
        << "const needle_here = 1;\n";
    std::vector<ParsedFile> files;
    SourceFile src = SourceFile::load("src/app.js", "const a = 1;\n");
    files.push_back(ParsedFile{std::move(src), nullptr});
    files.back().ast = parse_source(files.back().src);
    auto idx = build_program_index(dir.path.string(), std::move(files), {},
                                   {"node_modules/lib/index.js"});
    Toolbelt tools(idx);

    CHECK(tools.view_src("source/src/app.js") == "const a = 1;\n");
    CHECK(tools.view_src("npm/lib/index.js") == "const needle_here = 1;\n");
    CHECK(tools.view_src("builtin/eval").find("code") != std::string::npos);
    CHECK_THROWS_AS(tools.view_src("source/nope.js"), Error);
    CHECK_THROWS_AS(tools.view_src("elsewhere/x"), Error);

    CHECK(tools.view_dir("source") == "src/\n");
    CHECK(tools.view_dir("source/src") == "app.js\n");
    CHECK(tools.view_dir("npm") == "lib/\n");

    auto hits = tools.find_string("needle_here");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].rfind("npm/lib/index.js:1:", 0) == 0);
}

TEST_CASE("toolbelt: line-ranged views") {
    auto idx = make_index({{"a.js", "const a = 1;\nconst b = 2;\nconst c = 3;\n"}});
    Toolbelt tools(idx);
    CHECK(tools.view_src("source/a.js", 2, 2) == "const b = 2;\n");
    CHECK(tools.view_src("source/a.js", 2, 0) ==
          "const b = 2;\nconst c = 3;\n");
}

TEST_CASE("catalog and rubric text are populated") {
    CHECK(builtin_catalog().size() >= 40);
    for (const auto& role : {"source-sink", "callgraph", "flowsummary"}) {
        std::string r = confidence_rubric(role);
        CHECK(r.find("Reserve 5") != std::string::npos);
    }
    CHECK(cwe_context(79).name.find("Web Page") != std::string::npos);
    CHECK_THROWS_AS(cwe_context(12345), Error);
    CHECK(cwe_catalog_ids().size() == 7);
}
