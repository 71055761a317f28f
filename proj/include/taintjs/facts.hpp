#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "taintjs/index.hpp"

namespace taintjs {

// A snippet occurrence: file, 1-based start position, and the single-line
// snippet text at that position.
struct EndpointLocation {
    std::string file;
    int line = 0;
    int col = 0;
    std::string snippet;
};

// A contiguous region of code; "-"/zeros is the sentinel used as the target
// of third-party call edges.
struct SpanLocation {
    std::string file;
    int start_line = 0, start_col = 0, end_line = 0, end_col = 0;

    bool is_sentinel() const { return file == "-"; }
    static SpanLocation sentinel() { return {"-", 0, 0, 0, 0}; }
    Span span() const { return {start_line, start_col, end_line, end_col}; }

    friend bool operator==(const SpanLocation& a, const SpanLocation& b) {
        return a.file == b.file && a.span() == b.span();
    }
};

// Source and sink facts share one shape; confidence is an integer in 1..5.
struct EndpointFact {
    int id = 0;
    EndpointLocation loc;
    int confidence = 0;
};
using SourceFact = EndpointFact;
using SinkFact = EndpointFact;

enum class EdgeKind { First, Third };
enum class EdgeStatus { Active, Ignored };

struct CallEdgeFact {
    int id = 0;
    SpanLocation call;
    SpanLocation target;  // sentinel allowed only for kind == Third
    EdgeKind kind = EdgeKind::First;
    int confidence = 0;
    EdgeStatus status = EdgeStatus::Active;
};

struct Rejection {
    std::string set;  // "sources" | "sinks" | "calledges"
    int fact_id = 0;
    std::string reason;
    std::string raw_location;  // human-readable rendering of the input
};

struct BoundSpecs {
    std::vector<int> sources;  // FlowNode ids
    std::vector<int> sinks;
    // (invocation node id, function node id) for bound first-party edges.
    std::vector<std::pair<int, int>> first_edges;
    std::vector<int> third_edges;  // invocation node ids
    std::vector<Rejection> rejections;
};

// Resolves an endpoint location to the FlowNode matching file, start line,
// start column, and single-line snippet exactly; kinds considered are
// expression, parameter, and invocation. On overlap the innermost
// (smallest-span) node wins, expressions preferred. nullopt on no match.
std::optional<int> bind_endpoint(const EndpointLocation& loc,
                                 const ProgramIndex& index);

// Exact five-coordinate match against invocation or function nodes.
std::optional<int> bind_span(const SpanLocation& loc, FlowKind want,
                             const ProgramIndex& index);

// Binds all facts; unbindable or test-directory facts land in rejections.
// Edge facts with status ignored are skipped entirely. Throws DuplicateId on
// a repeated id within one fact set.
BoundSpecs validate_facts(const std::vector<SourceFact>& sources,
                          const std::vector<SinkFact>& sinks,
                          const std::vector<CallEdgeFact>& edges,
                          const ProgramIndex& index);

// Writes sources.csv, sinks.csv, calledges.csv into dir (created if absent).
void export_csv(const std::string& dir, const std::vector<SourceFact>& sources,
                const std::vector<SinkFact>& sinks,
                const std::vector<CallEdgeFact>& edges);

std::tuple<std::vector<SourceFact>, std::vector<SinkFact>,
           std::vector<CallEdgeFact>>
import_csv(const std::string& dir);

// One JSON object per rejection, newline-delimited.
std::string rejections_jsonl(const std::vector<Rejection>& rejections);

}  // namespace taintjs
