#include <atomic>
#include <mutex>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "helpers.hpp"
#include "taintjs/remote.hpp"

using namespace taintjs;
using namespace taintjs::testing;
using nlohmann::json;

namespace {

json tool_call(const std::string& name, const json& args,
               const std::string& id = "call-1") {
    return {{"id", id},
            {"type", "function"},
            {"function", {{"name", name}, {"arguments", args.dump()}}}};
}

json assistant(std::vector<json> calls) {
    return {{"role", "assistant"},
            {"content", nullptr},
            {"tool_calls", calls}};
}

json assistant_text(const std::string& text) {
    return {{"role", "assistant"}, {"content", text}};
}

// Serves a fixed sequence of assistant messages; repeats the last one when
// the script runs out. Records every request body for assertions.
struct ScriptedServer {
    httplib::Server server;
    std::vector<json> replies;
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::vector<json> requests;
    int status = 200;
    int port = 0;
    std::thread thread;

    explicit ScriptedServer(std::vector<json> script)
        : replies(std::move(script)) {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            {
                std::lock_guard<std::mutex> lock(mu);
                requests.push_back(json::parse(req.body));
            }
            if (status != 200) {
                res.status = status;
                return;
            }
            std::size_t i = next++;
            if (i >= replies.size()) i = replies.size() - 1;
            json body = {{"choices", json::array({{{"message", replies[i]}}})},
                         {"usage", {{"total_tokens", 7}}}};
            res.set_content(body.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~ScriptedServer() {
        server.stop();
        thread.join();
    }

    RemoteConfig config() const {
        RemoteConfig c;
        c.host = "127.0.0.1";
        c.port = port;
        return c;
    }

    json request(std::size_t i) {
        std::lock_guard<std::mutex> lock(mu);
        return requests.at(i);
    }
    std::size_t request_count() {
        std::lock_guard<std::mutex> lock(mu);
        return requests.size();
    }
};

ProgramIndex small_index() {
    return make_index({{"app.js",
                        "function render(input) {\n"
                        "  return `<b>${input}</b>`;\n"
                        "}\n"
                        "module.exports = render;\n"}});
}

}  // namespace

TEST_CASE("remote: discovery session with tool loop and completion") {
    ScriptedServer server({
        assistant({tool_call("view_src", {{"file_path", "source/app.js"}})}),
        assistant({tool_call(
            "propose_source",
            {{"location",
              {{"file", "app.js"}, {"line", 1}, {"col", 17}, {"snippet", "input"}}},
             {"description", "entry parameter"},
             {"confidence", 4}})}),
        assistant({tool_call(
            "propose_sink",
            {{"location",
              {{"file", "app.js"}, {"line", 2}, {"col", 15}, {"snippet", "input"}}},
             {"description", "markup interpolation"},
             {"confidence", 5}})}),
        assistant({tool_call("complete_discovery",
                             {{"justification", "scanned the file"},
                              {"summary", "one source, one sink"}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->discover(idx, cwe_context(79), 1, t);
    CHECK(!run.failed);
    REQUIRE(run.sources.size() == 1);
    CHECK(run.sources[0].loc.snippet == "input");
    CHECK(run.sources[0].confidence == 4);
    REQUIRE(run.sinks.size() == 1);
    CHECK(run.sinks[0].confidence == 5);
    CHECK(t.tool_calls.size() == 4);
    CHECK(t.tokens == 4 * 7);

    // The second request must carry the numbered view_src result back.
    json second = server.request(1);
    std::string last_content =
        second["messages"].back()["content"].get<std::string>();
    CHECK(last_content.find("1: function render(input) {") !=
          std::string::npos);
    // The first request advertises the role tools.
    bool has_propose = false;
    json first = server.request(0);
    for (const auto& tool : first["tools"])
        if (tool["function"]["name"] == "propose_source") has_propose = true;
    CHECK(has_propose);
}

TEST_CASE("remote: resolution session resolves first-party candidates") {
    ScriptedServer server({
        assistant({tool_call("search_functions", {{"file_path", "app.js"}})}),
        assistant({tool_call(
            "propose_fp",
            {{"candidates",
              json::array({{{"function_index", 0},
                            {"trace", json::array({"call site", "definition"})},
                            {"confidence", 5}}})}})}),
        assistant({tool_call("complete_resolution",
                             {{"status", "resolved"},
                              {"summary", "traced to render"}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->resolve(idx, {0, "task"}, 1, t);
    CHECK(!run.failed);
    REQUIRE(run.verdict == ResolutionVerdict::First);
    REQUIRE(run.fp_candidates.size() == 1);
    CHECK(run.fp_candidates[0].function_index == 0);
    CHECK(run.fp_candidates[0].trace.size() == 2);
    CHECK(run.reason == "traced to render");

    // search_functions returned the function index listing.
    std::string listing =
        server.request(1)["messages"].back()["content"].get<std::string>();
    CHECK(listing.find("render") != std::string::npos);
}

TEST_CASE("remote: unindexed proposals are rejected with the fallback path") {
    ScriptedServer server({
        assistant({tool_call(
            "propose_fp",
            {{"candidates", json::array({{{"function_index", 99},
                                          {"trace", json::array({"x"})},
                                          {"confidence", 3}}})}})}),
        assistant({tool_call("mark_target_not_indexed",
                             {{"target_file", "app.js"},
                              {"target_line", 9},
                              {"target_name", "ghost"},
                              {"explanation", "extraction gap"}})}),
        assistant({tool_call("complete_resolution",
                             {{"status", "unresolvable"},
                              {"summary", "target not indexed"}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->resolve(idx, {0, "task"}, 1, t);
    CHECK(run.verdict == ResolutionVerdict::Unresolvable);
    std::string reply =
        server.request(1)["messages"].back()["content"].get<std::string>();
    CHECK(reply.find("mark_target_not_indexed") != std::string::npos);
}

TEST_CASE("remote: oversized candidate batches must be split") {
    json big = json::array();
    for (int i = 0; i < 6; ++i)
        big.push_back({{"function_index", 0},
                       {"trace", json::array({"s"})},
                       {"confidence", 3}});
    ScriptedServer server({
        assistant({tool_call("propose_fp", {{"candidates", big}})}),
        assistant({tool_call("complete_resolution",
                             {{"status", "unresolvable"},
                              {"summary", "gave up"}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->resolve(idx, {0, "task"}, 1, t);
    CHECK(run.verdict == ResolutionVerdict::Unresolvable);
    CHECK(run.fp_candidates.empty());
    std::string reply =
        server.request(1)["messages"].back()["content"].get<std::string>();
    CHECK(reply.find("split the batch") != std::string::npos);
}

TEST_CASE("remote: third-party verdict carries the structured metadata") {
    ScriptedServer server({
        assistant({tool_call(
            "propose_tp",
            {{"library_name", "markdown-lib"},
             {"metadata",
              {{"module_path", "node_modules/markdown-lib/index.js"},
               {"import_statement", "require('markdown-lib')"}}},
             {"confidence", 5},
             {"reasoning", "traced through the import"}})}),
        assistant({tool_call("complete_resolution",
                             {{"status", "resolved"},
                              {"summary", "third-party"}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->resolve(idx, {0, "task"}, 1, t);
    REQUIRE(run.verdict == ResolutionVerdict::Third);
    REQUIRE(run.tp_metadata.has_value());
    CHECK(run.tp_metadata->library == "markdown-lib");
}

TEST_CASE("remote: one malformed argument set is retried, two fail the run") {
    SUBCASE("single malformed call recovers") {
        ScriptedServer server({
            assistant({tool_call("propose_fp", {{"wrong", 1}})}),
            assistant({tool_call("complete_resolution",
                                 {{"status", "unresolvable"},
                                  {"summary", "done"}})}),
        });
        auto idx = small_index();
        auto backend = make_remote_backend(server.config());
        Transcript t;
        auto run = backend->resolve(idx, {0, "task"}, 1, t);
        CHECK(!run.failed);
        std::string reply =
            server.request(1)["messages"].back()["content"].get<std::string>();
        CHECK(reply.find("error:") != std::string::npos);
    }
    SUBCASE("repeated malformed calls mark the run failed") {
        ScriptedServer server({
            assistant({tool_call("propose_fp", {{"wrong", 1}})}),
            assistant({tool_call("propose_fp", {{"still_wrong", 2}})}),
        });
        auto idx = small_index();
        auto backend = make_remote_backend(server.config());
        Transcript t;
        auto run = backend->resolve(idx, {0, "task"}, 1, t);
        CHECK(run.failed);
        CHECK(t.failed);
    }
}

TEST_CASE("remote: exceeding the iteration cap fails the run") {
    ScriptedServer server(std::vector<json>{assistant_text("thinking out loud")});
    auto idx = small_index();
    RemoteConfig config = server.config();
    config.max_tool_iterations = 3;
    auto backend = make_remote_backend(config);
    Transcript t;
    auto run = backend->discover(idx, cwe_context(79), 1, t);
    CHECK(run.failed);
    CHECK(t.failed);
    CHECK(server.request_count() == 3);
}

TEST_CASE("remote: flow summaries parse the classification trace") {
    ScriptedServer server({
        assistant({tool_call("view_src", {{"file_path", "source/app.js"}})}),
        assistant({tool_call(
            "classify_edge",
            {{"flow_trace",
              {{"classification", "sanitizes-taint"},
               {"steps", json::array({"enter render", "escaped via "
                                                      "escapeHtml"})},
               {"confidence", 5}}}})}),
    });
    auto idx = small_index();
    auto backend = make_remote_backend(server.config());
    Transcript t;
    auto run = backend->summarize(idx, {1, -1, "markdown-lib", "s"},
                                  cwe_context(79), 1, t);
    CHECK(!run.failed);
    CHECK(run.classification == SummaryClass::Sanitizes);
    CHECK(run.confidence == 5);
    CHECK(run.trace.size() == 2);
}

TEST_CASE("remote: transport failures surface as backend unavailability") {
    auto idx = small_index();
    SUBCASE("no listener") {
        RemoteConfig config;
        config.host = "127.0.0.1";
        config.port = 1;  // nothing listens here
        config.timeout_seconds = 1;
        auto backend = make_remote_backend(config);
        Transcript t;
        CHECK_THROWS_AS(backend->discover(idx, cwe_context(79), 1, t),
                        BackendUnavailable);
    }
    SUBCASE("non-200 status") {
        ScriptedServer server(std::vector<json>{assistant_text("x")});
        server.status = 503;
        auto backend = make_remote_backend(server.config());
        Transcript t;
        CHECK_THROWS_AS(backend->discover(idx, cwe_context(79), 1, t),
                        BackendUnavailable);
    }
}
