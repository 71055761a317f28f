#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "taintjs/fixtures.hpp"
#include "taintjs/ticr.hpp"

using namespace taintjs;
using namespace taintjs::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fixture-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

QueryInputs ticr_inputs(const ProgramIndex& idx, const BoundSpecs& specs,
                        int access_path_limit = 2) {
    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {3, ""}};
    GraphOptions base;
    base.access_path_limit = access_path_limit;
    TicrState state = run_ticr(idx, specs, oracle, {}, base);
    QueryInputs inputs;
    inputs.specs = specs;
    inputs.asserted_edges = state.asserted_edges;
    inputs.summaries = state.summaries;
    inputs.access_path_limit = access_path_limit;
    return inputs;
}

BoundSpecs discovered_specs(const ProgramIndex& idx, int cwe) {
    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {3, ""}};
    auto [sources, sinks] = oracle.run_source_sink(idx, cwe_context(cwe));
    return validate_facts(sources, sinks, {}, idx);
}

}  // namespace

TEST_CASE("fixtures: deterministic per pattern and seed, distinct per seed") {
    for (const auto& pattern : fixture_patterns()) {
        auto a = generate_fixture(pattern, 3);
        auto b = generate_fixture(pattern, 3);
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t i = 0; i < a.files.size(); ++i) {
            CHECK(a.files[i].path == b.files[i].path);
            CHECK(a.files[i].text == b.files[i].text);
        }
        auto c = generate_fixture(pattern, 4);
        CHECK(c.files[0].text != a.files[0].text);
    }
    CHECK_THROWS_AS(generate_fixture("mystery", 1), Error);
}

TEST_CASE("fixtures: every annotation binds against its own index") {
    for (const auto& pattern : fixture_patterns()) {
        auto fx = generate_fixture(pattern, 1, 5);
        auto idx = index_fixture(fx);
        for (const auto& ann : fx.annotations) {
            CHECK(ann.cwe == fx.cwe);
            CHECK(bind_endpoint(ann.source, idx).has_value());
            CHECK(bind_endpoint(ann.sink, idx).has_value());
        }
    }
}

TEST_CASE("fixtures: annotation serialization round-trips") {
    auto fx = generate_fixture("enum-dispatch", 2);
    std::string doc = annotations_json(fx.annotations);
    auto back = parse_annotations(doc);
    REQUIRE(back.size() == fx.annotations.size());
    CHECK(back[0].finding_id == fx.annotations[0].finding_id);
    CHECK(back[0].source.snippet == fx.annotations[0].source.snippet);
    CHECK(back[0].sink.line == fx.annotations[0].sink.line);
    CHECK(back[0].notes == fx.annotations[0].notes);
    CHECK(annotations_json(back) == doc);
    CHECK_THROWS_AS(parse_annotations("not json"), FormatError);
}

TEST_CASE("fixtures: write_fixture materializes files and annotations") {
    TempDir dir;
    auto fx = generate_fixture("third-party-renderer", 1);
    write_fixture(fx, dir.path.string());
    CHECK(fs::exists(dir.path / "app.js"));
    CHECK(fs::exists(dir.path / "node_modules" / "render-step-0" /
                     "index.js"));
    auto anns = load_annotations(dir.path.string());
    REQUIRE(anns.size() == 1);
    CHECK(anns[0].cwe == 79);
    auto idx = load_package((dir.path).string());
    CHECK(idx.third_party_files.size() == 5);
    CHECK(bind_endpoint(anns[0].source, idx).has_value());
}

TEST_CASE("fixtures: dispatch patterns are missed at R1 and found repaired") {
    for (const char* pattern : {"enum-dispatch", "closure-callback"}) {
        auto fx = generate_fixture(pattern, 1);
        auto idx = index_fixture(fx);
        auto ep = base_endpoints(idx, cwe_context(94));
        BoundSpecs specs;
        specs.sources = ep.sources;
        specs.sinks = ep.sinks;
        QueryInputs inputs = ticr_inputs(idx, specs);
        auto rows = ablate(idx, cwe_context(94), inputs, fx.annotations);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].first_ruleset == "R2");
        CHECK(rows[0].category == MatchCategory::Exact);
    }
}

TEST_CASE("fixtures: computed dispatch needs endpoints and repairs") {
    auto fx = generate_fixture("computed-dispatch", 1);
    auto idx = index_fixture(fx);
    BoundSpecs specs = discovered_specs(idx, 79);
    REQUIRE(!specs.sources.empty());
    REQUIRE(!specs.sinks.empty());
    QueryInputs inputs = ticr_inputs(idx, specs);
    auto rows = ablate(idx, cwe_context(79), inputs, fx.annotations);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].first_ruleset == "R4");
    CHECK(rows[0].category == MatchCategory::Exact);
}

TEST_CASE("fixtures: factory package resolves in few passes at depth three") {
    auto fx = generate_fixture("iife-factory", 1);
    auto idx = index_fixture(fx);
    BoundSpecs specs = discovered_specs(idx, 79);
    REQUIRE(!specs.sources.empty());
    REQUIRE(!specs.sinks.empty());

    auto backend = make_deterministic_backend();
    Oracle oracle{*backend, {3, ""}};
    GraphOptions base;
    base.access_path_limit = 3;
    TicrState state = run_ticr(idx, specs, oracle, {}, base);
    CHECK(state.iteration <= 3);
    REQUIRE(!state.asserted_edges.empty());

    QueryInputs inputs;
    inputs.specs = specs;
    inputs.asserted_edges = state.asserted_edges;
    inputs.access_path_limit = 3;
    CHECK(run_query(idx, cwe_context(79), ruleset_by_name("R1"), {}).empty());
    auto alerts =
        run_query(idx, cwe_context(79), ruleset_by_name("R4"), inputs);
    REQUIRE(!alerts.empty());
    bool exact = false;
    for (const auto& alert : alerts)
        if (match_ground_truth(alert, fx.annotations[0], idx) ==
            MatchCategory::Exact)
            exact = true;
    CHECK(exact);
}

TEST_CASE("fixtures: noise calls inflate M but never the candidate pool") {
    auto quiet = generate_fixture("off-path-noise", 1, 0);
    auto noisy = generate_fixture("off-path-noise", 1, 50);
    auto qidx = index_fixture(quiet);
    auto nidx = index_fixture(noisy);
    GraphOptions o;
    auto qm = unresolved_calls(qidx);
    auto nm = unresolved_calls(nidx);
    CHECK(nm.filtered.size() == qm.filtered.size() + 50);

    auto ep = base_endpoints(nidx, cwe_context(94));
    FlowGraph graph = build_flow_graph(nidx, o);
    auto picked = select_candidates(nidx, nm, ep.sources, ep.sinks, graph);
    REQUIRE(picked.combined.size() == 1);
    CHECK(nidx.node(picked.combined[0]).snippet.find("payload") !=
          std::string::npos);
}

TEST_CASE("fixtures: renderer chain carries exactly five on-path summaries") {
    TempDir dir;
    auto fx = generate_fixture("third-party-renderer", 1);
    write_fixture(fx, dir.path.string());
    auto idx = load_package(dir.path.string());
    auto ep = base_endpoints(idx, cwe_context(79));
    BoundSpecs specs;
    specs.sources = ep.sources;
    specs.sinks = ep.sinks;

    GraphOptions o;
    auto m = unresolved_calls(idx);
    // 25 renderer-library calls plus the unresolvable document.write call.
    CHECK(m.filtered.size() == 26);

    struct Counting : Backend {
        Backend& inner;
        int resolves = 0;
        explicit Counting(Backend& b) : inner(b) {}
        DiscoveryRun discover(const ProgramIndex& i, const CweContext& c,
                              int r, Transcript& t) override {
            return inner.discover(i, c, r, t);
        }
        ResolutionRun resolve(const ProgramIndex& i, const ResolutionTask& k,
                              int r, Transcript& t) override {
            ++resolves;
            return inner.resolve(i, k, r, t);
        }
        SummaryRun summarize(const ProgramIndex& i, const SummaryTask& k,
                             const CweContext& c, int r,
                             Transcript& t) override {
            return inner.summarize(i, k, c, r, t);
        }
    };
    auto det = make_deterministic_backend();
    Counting counting{*det};
    Oracle oracle{counting, {3, ""}};
    TicrState state = run_ticr(idx, specs, oracle);
    CHECK(state.summaries.size() == 5);  // the import-boundary chain only
    // Import-boundary calls skip the oracle; only document.write is queried
    // (one task, three runs) and lands in the ignored set.
    CHECK(counting.resolves == 3);

    QueryInputs inputs;
    inputs.specs = specs;
    inputs.summaries = state.summaries;
    auto alerts =
        run_query(idx, cwe_context(79), ruleset_by_name("R2"), inputs);
    REQUIRE(!alerts.empty());
    auto validation = validate_summaries(idx, alerts, oracle, cwe_context(79));
    CHECK(validation.tasks == 5);
    bool exact = false;
    for (const auto& alert : alerts)
        if (match_ground_truth(alert, fx.annotations[0], idx) ==
            MatchCategory::Exact)
            exact = true;
    CHECK(exact);
}
