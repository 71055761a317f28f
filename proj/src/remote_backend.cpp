#include <optional>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "taintjs/remote.hpp"

using nlohmann::json;

namespace taintjs {

namespace {

json tool_schema(const std::string& name, const std::string& description,
                 json properties, json required) {
    return {{"type", "function"},
            {"function",
             {{"name", name},
              {"description", description},
              {"parameters",
               {{"type", "object"},
                {"properties", std::move(properties)},
                {"required", std::move(required)}}}}}};
}

json str_prop(const std::string& description) {
    return {{"type", "string"}, {"description", description}};
}

json int_prop(const std::string& description) {
    return {{"type", "integer"}, {"description", description}};
}

json traversal_schemas() {
    return json::array({
        tool_schema("view_src",
                    "Retrieve source code lines (with line numbers) from an "
                    "indexed file. Paths are namespaced: source/, npm/, "
                    "builtin/.",
                    {{"file_path", str_prop("namespaced file path")},
                     {"start_line", int_prop("1-based first line, optional")},
                     {"end_line", int_prop("1-based last line, optional")}},
                    json::array({"file_path"})),
        tool_schema("view_dir",
                    "List one level of the project tree, optionally scoped "
                    "to a subdirectory.",
                    {{"path", str_prop("namespaced directory path")}},
                    json::array({"path"})),
        tool_schema("find_string",
                    "Search for string occurrences across all indexed files "
                    "with pagination support.",
                    {{"search", str_prop("exact substring to find")},
                     {"max_results", int_prop("page size, optional")},
                     {"start_index", int_prop("pagination offset, optional")}},
                    json::array({"search"})),
    });
}

json discovery_schemas() {
    json location = {
        {"type", "object"},
        {"properties",
         {{"file", str_prop("package-relative file path")},
          {"line", int_prop("1-based start line")},
          {"col", int_prop("1-based start column")},
          {"snippet", str_prop("single-line snippet at the location")}}},
        {"required", json::array({"file", "line", "col", "snippet"})}};
    json tools = traversal_schemas();
    tools.push_back(tool_schema(
        "propose_source",
        "Propose a code location where untrusted input enters the "
        "application.",
        {{"location", location},
         {"description", str_prop("why this is a source")},
         {"confidence", int_prop("1-5 per the rubric")}},
        json::array({"location", "description", "confidence"})));
    tools.push_back(tool_schema(
        "propose_sink",
        "Propose a code location where a dangerous operation occurs.",
        {{"location", location},
         {"description", str_prop("why this is a sink")},
         {"confidence", int_prop("1-5 per the rubric")}},
        json::array({"location", "description", "confidence"})));
    tools.push_back(tool_schema(
        "view_proposed_sources_sinks",
        "Review already-proposed sources and sinks to avoid duplicates and "
        "assess coverage.",
        {{"verbose", {{"type", "boolean"}}},
         {"item_type", str_prop("sources | sinks | both")}},
        json::array()));
    tools.push_back(tool_schema(
        "complete_discovery",
        "Signal discovery completion with an explanation of the search "
        "strategies used.",
        {{"justification", str_prop("search strategies used")},
         {"summary", str_prop("what was found")},
         {"confidence", int_prop("overall confidence 1-5")}},
        json::array({"justification", "summary"})));
    return tools;
}

json callgraph_schemas() {
    json tools = traversal_schemas();
    tools.push_back(tool_schema(
        "search_functions",
        "Search the extracted function index by name or file path with "
        "fuzzy matching, returning the function indices required for "
        "proposals.",
        {{"function_name", str_prop("name fragment, optional")},
         {"file_path", str_prop("file filter, optional")}},
        json::array()));
    json candidate = {
        {"type", "object"},
        {"properties",
         {{"function_index", int_prop("index from search_functions")},
          {"trace",
           {{"type", "array"},
            {"items", str_prop("one traced step")},
            {"description",
             "traced path from call site to target, including intermediate "
             "steps through imports, assignments, and lookups"}}},
          {"confidence", int_prop("1-5 per the rubric")}}},
        {"required", json::array({"function_index", "trace", "confidence"})}};
    tools.push_back(tool_schema(
        "propose_fp",
        "Propose one or more first-party callees (at most 5 per call) with "
        "a traced path from call site to target.",
        {{"candidates", {{"type", "array"}, {"items", candidate}}}},
        json::array({"candidates"})));
    tools.push_back(tool_schema(
        "propose_tp",
        "Mark the call as targeting a third-party library with structured "
        "metadata.",
        {{"library_name", str_prop("npm package name")},
         {"metadata",
          {{"type", "object"},
           {"properties",
            {{"module_path", str_prop("entry file under node_modules")},
             {"import_statement", str_prop("the witnessing import")}}},
           {"required",
            json::array({"module_path", "import_statement"})}}},
         {"confidence", int_prop("1-5 per the rubric")},
         {"reasoning", str_prop("why the callee is third-party")}},
        json::array({"library_name", "metadata", "confidence", "reasoning"})));
    tools.push_back(tool_schema(
        "mark_target_not_indexed",
        "Record a target found in source code but missing from the function "
        "index.",
        {{"target_file", str_prop("file containing the target")},
         {"target_line", int_prop("1-based line of the target")},
         {"target_name", str_prop("target function name")},
         {"explanation", str_prop("why it is missing")}},
        json::array(
            {"target_file", "target_line", "target_name", "explanation"})));
    tools.push_back(tool_schema(
        "view_proposed_callees",
        "Review already-proposed callees to avoid duplicates.",
        {{"verbose", {{"type", "boolean"}}}}, json::array()));
    tools.push_back(tool_schema(
        "complete_resolution",
        "Signal resolution completion as either resolved or unresolvable.",
        {{"status", str_prop("resolved | unresolvable")},
         {"summary", str_prop("how the verdict was reached")}},
        json::array({"status", "summary"})));
    return tools;
}

json flowsummary_schemas() {
    json tools = traversal_schemas();
    tools.push_back(tool_schema(
        "classify_edge",
        "Classify a third-party edge as propagates-taint, sanitizes-taint, "
        "or unknown with a complete data flow trace through the library "
        "code, including sanitization points and a confidence score.",
        {{"flow_trace",
          {{"type", "object"},
           {"properties",
            {{"classification",
              str_prop("propagates-taint | sanitizes-taint | unknown")},
             {"steps",
              {{"type", "array"}, {"items", str_prop("one flow step")}}},
             {"confidence", int_prop("1-5 per the rubric")}}},
           {"required",
            json::array({"classification", "steps", "confidence"})}}}},
        json::array({"flow_trace"})));
    return tools;
}

struct MalformedArgs {
    std::string message;
};

json parse_args(const json& tool_call) {
    const auto& fn = tool_call.at("function");
    std::string raw = fn.value("arguments", "{}");
    json args = json::parse(raw, nullptr, false);
    if (args.is_discarded() || !args.is_object())
        throw MalformedArgs{"arguments are not a JSON object"};
    return args;
}

template <typename T>
T require_field(const json& args, const std::string& key) {
    if (!args.contains(key))
        throw MalformedArgs{"missing required field: " + key};
    try {
        return args.at(key).get<T>();
    } catch (const json::exception&) {
        throw MalformedArgs{"field has the wrong type: " + key};
    }
}

// One chat session: message accumulation, HTTP exchange, tool dispatch.
class Session {
  public:
    Session(const RemoteConfig& config, const ProgramIndex& index,
            Transcript& transcript)
        : config_(config), tools_(index), t_(transcript) {}

    void start(const std::string& system_prompt, const std::string& user_prompt,
               json schemas) {
        schemas_ = std::move(schemas);
        messages_ = json::array();
        messages_.push_back({{"role", "system"}, {"content", system_prompt}});
        messages_.push_back({{"role", "user"}, {"content", user_prompt}});
    }

    // Drives the loop; dispatch returns the tool-result text or nullopt when
    // the completion tool fired. Returns false when the run failed (cap or
    // repeated malformed arguments).
    template <typename Dispatch>
    bool drive(Dispatch&& dispatch) {
        bool warned_malformed = false;
        for (int turn = 0; turn < config_.max_tool_iterations; ++turn) {
            json message = exchange();
            messages_.push_back(message);
            if (!message.contains("tool_calls") ||
                message["tool_calls"].empty()) {
                // A plain text reply never completes a task.
                messages_.push_back(
                    {{"role", "user"},
                     {"content",
                      "Use the provided tools; call the completion tool when "
                      "done."}});
                continue;
            }
            for (const auto& call : message["tool_calls"]) {
                std::string call_id = call.value("id", "");
                std::string name =
                    call.at("function").value("name", "");
                std::string result;
                bool done = false;
                try {
                    auto out = dispatch(name, call);
                    if (out)
                        result = *out;
                    else
                        done = true;
                } catch (const MalformedArgs& m) {
                    if (warned_malformed) {
                        t_.failed = true;
                        return false;
                    }
                    warned_malformed = true;
                    result = "error: " + m.message + " (one retry allowed)";
                } catch (const Error& e) {
                    result = std::string("error: ") + e.what();
                }
                t_.tool_calls.push_back(
                    {name, call.at("function").value("arguments", "{}"),
                     done ? "(completion)" : result});
                if (done) return true;
                messages_.push_back({{"role", "tool"},
                                     {"tool_call_id", call_id},
                                     {"content", result}});
            }
        }
        t_.failed = true;  // iteration cap reached without completion
        return false;
    }

    // Traversal tools shared by every role.
    std::optional<std::string> traverse(const std::string& name,
                                        const json& call) {
        json args = parse_args(call);
        if (name == "view_src") {
            auto path = require_field<std::string>(args, "file_path");
            int from = args.value("start_line", 0);
            int to = args.value("end_line", 0);
            std::string text = tools_.view_src(path, from, to);
            std::ostringstream out;
            std::istringstream in(text);
            std::string line;
            int n = from > 0 ? from : 1;
            while (std::getline(in, line)) out << n++ << ": " << line << "\n";
            return out.str();
        }
        if (name == "view_dir")
            return tools_.view_dir(require_field<std::string>(args, "path"));
        if (name == "find_string") {
            auto hits =
                tools_.find_string(require_field<std::string>(args, "search"));
            int max_results = args.value("max_results", 50);
            int start = args.value("start_index", 0);
            std::ostringstream out;
            for (int i = start;
                 i < static_cast<int>(hits.size()) && i < start + max_results;
                 ++i)
                out << hits[i] << "\n";
            out << "(total " << hits.size() << " hits)\n";
            return out.str();
        }
        return std::nullopt;  // not a traversal tool
    }

    long long tokens() const { return tokens_; }
    const Toolbelt& toolbelt() const { return tools_; }

  private:
    json exchange() {
        httplib::Client client(config_.host, config_.port);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        json body = {{"model", config_.model},
                     {"messages", messages_},
                     {"tools", schemas_}};
        auto res = client.Post(config_.path, headers, body.dump(),
                               "application/json");
        if (!res)
            throw BackendUnavailable("no response from " + config_.host + ":" +
                                     std::to_string(config_.port));
        if (res->status != 200)
            throw BackendUnavailable("remote status " +
                                     std::to_string(res->status));
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded())
            throw BackendUnavailable("remote reply is not JSON");
        if (reply.contains("usage"))
            tokens_ += reply["usage"].value("total_tokens", 0);
        try {
            return reply.at("choices").at(0).at("message");
        } catch (const json::exception&) {
            throw BackendUnavailable("remote reply missing choices[0].message");
        }
    }

    const RemoteConfig& config_;
    Toolbelt tools_;
    Transcript& t_;
    json messages_;
    json schemas_;
    long long tokens_ = 0;
};

std::string cwe_block(const CweContext& cwe) {
    std::ostringstream out;
    out << "Weakness: CWE-" << cwe.id << " (" << cwe.name << ")\n"
        << cwe.description << "\nTypical sources: " << cwe.source_notes
        << "\nTypical sinks: " << cwe.sink_notes << "\n";
    return out.str();
}

class RemoteBackend : public Backend {
  public:
    explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

    DiscoveryRun discover(const ProgramIndex& index, const CweContext& cwe,
                          int run, Transcript& t) override {
        (void)run;
        DiscoveryRun out;
        Session session(config_, index, t);
        session.start(
            "You are a taint-specification discovery agent for a JavaScript "
            "package. Explore the code with the traversal tools, then "
            "propose sources and sinks for the given weakness class. " +
                confidence_rubric("source-sink"),
            cwe_block(cwe) +
                "Propose sources and sinks, then call complete_discovery.",
            discovery_schemas());

        std::vector<EndpointProposal> sources, sinks;
        bool completed = session.drive([&](const std::string& name,
                                           const json& call)
                                           -> std::optional<std::string> {
            if (auto r = session.traverse(name, call)) return r;
            json args = parse_args(call);
            auto read_proposal = [&]() {
                json loc = args.contains("location") &&
                                   args["location"].is_object()
                               ? args["location"]
                               : throw MalformedArgs{"missing location"};
                EndpointProposal p;
                p.loc.file = require_field<std::string>(loc, "file");
                p.loc.line = require_field<int>(loc, "line");
                p.loc.col = require_field<int>(loc, "col");
                p.loc.snippet = require_field<std::string>(loc, "snippet");
                p.confidence = require_field<int>(args, "confidence");
                p.reason = require_field<std::string>(args, "description");
                return p;
            };
            if (name == "propose_source") {
                sources.push_back(read_proposal());
                return std::string("recorded source #") +
                       std::to_string(sources.size());
            }
            if (name == "propose_sink") {
                sinks.push_back(read_proposal());
                return std::string("recorded sink #") +
                       std::to_string(sinks.size());
            }
            if (name == "view_proposed_sources_sinks") {
                std::ostringstream o;
                o << sources.size() << " sources, " << sinks.size()
                  << " sinks proposed so far\n";
                for (const auto& p : sources)
                    o << "source " << p.loc.file << ":" << p.loc.line << " "
                      << p.loc.snippet << "\n";
                for (const auto& p : sinks)
                    o << "sink " << p.loc.file << ":" << p.loc.line << " "
                      << p.loc.snippet << "\n";
                return o.str();
            }
            if (name == "complete_discovery") return std::nullopt;
            throw MalformedArgs{"unknown tool: " + name};
        });
        t.tokens = session.tokens();
        if (!completed) {
            out.failed = true;
            return out;
        }
        out.sources = std::move(sources);
        out.sinks = std::move(sinks);
        t.proposals = std::to_string(out.sources.size()) + " sources, " +
                      std::to_string(out.sinks.size()) + " sinks";
        return out;
    }

    ResolutionRun resolve(const ProgramIndex& index, const ResolutionTask& task,
                          int run, Transcript& t) override {
        (void)run;
        ResolutionRun out;
        const FlowNode& node = index.node(task.invocation_node);
        Session session(config_, index, t);
        session.start(
            "You are a call-graph resolution agent. Trace the call site to "
            "its callee(s) using the traversal tools and the function "
            "index. Propose at most 5 first-party candidates per propose_fp "
            "call. " +
                confidence_rubric("callgraph"),
            "Resolve the call at " + node.file + ":" +
                std::to_string(node.span.start_line) + ":" +
                std::to_string(node.span.start_col) + "\n  " +
                endpoint_text(node.snippet) +
                "\nFinish with complete_resolution.",
            callgraph_schemas());

        std::vector<FpCandidate> fps;
        std::optional<TpMetadata> tp;
        std::string status, summary;
        bool completed = session.drive([&](const std::string& name,
                                           const json& call)
                                           -> std::optional<std::string> {
            if (auto r = session.traverse(name, call)) return r;
            json args = parse_args(call);
            if (name == "search_functions") {
                std::string fn = args.value("function_name", "");
                std::string file = args.value("file_path", "");
                std::ostringstream o;
                int shown = 0;
                for (const auto& fe : index.functions) {
                    if (!fn.empty() &&
                        fe.name.find(fn) == std::string::npos)
                        continue;
                    if (!file.empty() &&
                        fe.file.find(file) == std::string::npos)
                        continue;
                    o << fe.index << ": " << (fe.name.empty() ? "(anonymous)"
                                                              : fe.name)
                      << " at " << fe.file << ":" << fe.span.start_line
                      << "\n";
                    ++shown;
                }
                if (shown == 0) o << "(no matches)\n";
                return o.str();
            }
            if (name == "propose_fp") {
                if (!args.contains("candidates") ||
                    !args["candidates"].is_array())
                    throw MalformedArgs{"candidates must be an array"};
                if (args["candidates"].size() > 5)
                    return std::string(
                        "error: at most 5 candidates per call; split the "
                        "batch");
                std::ostringstream o;
                for (const auto& c : args["candidates"]) {
                    int fi = require_field<int>(c, "function_index");
                    if (fi < 0 ||
                        fi >= static_cast<int>(index.functions.size())) {
                        o << "rejected index " << fi
                          << ": not in the function index; if the target "
                             "exists in source, use mark_target_not_indexed\n";
                        continue;
                    }
                    FpCandidate fp;
                    fp.function_index = fi;
                    fp.trace =
                        require_field<std::vector<std::string>>(c, "trace");
                    fp.confidence = require_field<int>(c, "confidence");
                    fps.push_back(std::move(fp));
                    o << "recorded candidate " << fi << "\n";
                }
                return o.str();
            }
            if (name == "propose_tp") {
                json meta = args.contains("metadata") &&
                                    args["metadata"].is_object()
                                ? args["metadata"]
                                : throw MalformedArgs{"missing metadata"};
                TpMetadata m;
                m.library = require_field<std::string>(args, "library_name");
                m.module_path =
                    require_field<std::string>(meta, "module_path");
                m.import_statement =
                    require_field<std::string>(meta, "import_statement");
                (void)require_field<int>(args, "confidence");
                (void)require_field<std::string>(args, "reasoning");
                tp = std::move(m);
                return std::string("recorded third-party target");
            }
            if (name == "mark_target_not_indexed") {
                (void)require_field<std::string>(args, "target_file");
                (void)require_field<int>(args, "target_line");
                (void)require_field<std::string>(args, "target_name");
                (void)require_field<std::string>(args, "explanation");
                return std::string("recorded unindexed target");
            }
            if (name == "view_proposed_callees") {
                std::ostringstream o;
                o << fps.size() << " first-party candidates";
                if (tp) o << ", third-party " << tp->library;
                o << "\n";
                return o.str();
            }
            if (name == "complete_resolution") {
                status = require_field<std::string>(args, "status");
                summary = require_field<std::string>(args, "summary");
                return std::nullopt;
            }
            throw MalformedArgs{"unknown tool: " + name};
        });
        t.tokens = session.tokens();
        if (!completed) {
            out.failed = true;
            return out;
        }
        out.reason = summary;
        if (status == "resolved" && tp) {
            out.verdict = ResolutionVerdict::Third;
            out.tp_metadata = tp;
        } else if (status == "resolved" && !fps.empty()) {
            out.verdict = ResolutionVerdict::First;
            out.fp_candidates = std::move(fps);
        } else {
            out.verdict = ResolutionVerdict::Unresolvable;
        }
        return out;
    }

    SummaryRun summarize(const ProgramIndex& index, const SummaryTask& task,
                         const CweContext& cwe, int run,
                         Transcript& t) override {
        (void)run;
        SummaryRun out;
        Session session(config_, index, t);
        session.start(
            "You are a flow-summary validation agent. Follow the tainted "
            "value through the named library's code and classify the edge. " +
                confidence_rubric("flowsummary"),
            cwe_block(cwe) + "Library: " + task.library +
                "\nClassify the edge with classify_edge.",
            flowsummary_schemas());

        bool classified = false;
        bool completed = session.drive([&](const std::string& name,
                                           const json& call)
                                           -> std::optional<std::string> {
            if (auto r = session.traverse(name, call)) return r;
            json args = parse_args(call);
            if (name == "classify_edge") {
                json trace = args.contains("flow_trace") &&
                                     args["flow_trace"].is_object()
                                 ? args["flow_trace"]
                                 : throw MalformedArgs{"missing flow_trace"};
                std::string cls =
                    require_field<std::string>(trace, "classification");
                if (cls == "propagates-taint")
                    out.classification = SummaryClass::Propagates;
                else if (cls == "sanitizes-taint")
                    out.classification = SummaryClass::Sanitizes;
                else if (cls == "unknown")
                    out.classification = SummaryClass::Unknown;
                else
                    throw MalformedArgs{"unknown classification: " + cls};
                out.trace =
                    require_field<std::vector<std::string>>(trace, "steps");
                out.confidence = require_field<int>(trace, "confidence");
                classified = true;
                return std::nullopt;
            }
            throw MalformedArgs{"unknown tool: " + name};
        });
        t.tokens = session.tokens();
        if (!completed || !classified) {
            out.failed = true;
            out.classification = SummaryClass::Unknown;
        }
        return out;
    }

  private:
    RemoteConfig config_;
};

}  // namespace

std::unique_ptr<Backend> make_remote_backend(RemoteConfig config) {
    return std::make_unique<RemoteBackend>(std::move(config));
}

}  // namespace taintjs
