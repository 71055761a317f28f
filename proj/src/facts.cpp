#include "taintjs/facts.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace taintjs {

namespace {

// --- RFC-4180 CSV, canonical form: quote only when necessary, LF endings ---

bool needs_quotes(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& field) {
    if (!needs_quotes(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
    return out;
}

// Parses one CSV record starting at `pos`; advances past the record's line
// terminator. Throws FormatError on malformed quoting.
std::vector<std::string> csv_parse_row(const std::string& text,
                                       std::size_t& pos, int row) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool quoted_field = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    cur += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                cur += c;
                ++pos;
            }
            continue;
        }
        if (c == '"') {
            if (!cur.empty())
                throw FormatError("quote inside unquoted field", row);
            in_quotes = true;
            quoted_field = true;
            ++pos;
            continue;
        }
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
            quoted_field = false;
            ++pos;
            continue;
        }
        if (c == '\n' || c == '\r') {
            ++pos;
            if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
            fields.push_back(cur);
            return fields;
        }
        if (quoted_field)
            throw FormatError("text after closing quote", row);
        cur += c;
        ++pos;
    }
    if (in_quotes) throw FormatError("unterminated quoted field", row);
    fields.push_back(cur);
    return fields;
}

int parse_int(const std::string& s, int row, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError(std::string("invalid ") + what + ": '" + s + "'", row);
    return value;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::string& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("missing file: " + path.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::size_t pos = 0;
    int row = 1;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    while (pos < text.size()) {
        auto fields = csv_parse_row(text, pos, row);
        if (first) {
            std::string joined;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) joined += ',';
                joined += fields[i];
            }
            if (joined != header)
                throw FormatError("unexpected header: " + joined, row);
            first = false;
        } else {
            rows.push_back(std::move(fields));
        }
        ++row;
    }
    if (first) throw FormatError("empty file: " + path.string(), 0);
    return rows;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const char* kEndpointHeader = "id,file,start_line,start_col,snippet,confidence";
const char* kEdgeHeader =
    "id,call_file,call_sl,call_sc,call_el,call_ec,target_file,target_sl,"
    "target_sc,target_el,target_ec,kind,confidence,status";

std::string endpoint_csv(const std::vector<EndpointFact>& facts) {
    std::string out = std::string(kEndpointHeader) + "\n";
    for (const auto& f : facts)
        out += csv_row({std::to_string(f.id), f.loc.file,
                        std::to_string(f.loc.line), std::to_string(f.loc.col),
                        f.loc.snippet, std::to_string(f.confidence)});
    return out;
}

std::vector<EndpointFact> endpoint_facts(
    const std::vector<std::vector<std::string>>& rows) {
    std::vector<EndpointFact> out;
    int row = 2;
    for (const auto& r : rows) {
        if (r.size() != 6) throw FormatError("expected 6 fields", row);
        EndpointFact f;
        f.id = parse_int(r[0], row, "id");
        f.loc = {r[1], parse_int(r[2], row, "start_line"),
                 parse_int(r[3], row, "start_col"), r[4]};
        f.confidence = parse_int(r[5], row, "confidence");
        out.push_back(std::move(f));
        ++row;
    }
    return out;
}

void check_unique_ids(const std::vector<int>& ids, const char* set) {
    std::set<int> seen;
    for (int id : ids)
        if (!seen.insert(id).second)
            throw DuplicateId(std::string(set) + ": duplicate id " +
                              std::to_string(id));
}

std::string render_endpoint(const EndpointLocation& loc) {
    return loc.file + ":" + std::to_string(loc.line) + ":" +
           std::to_string(loc.col) + " '" + loc.snippet + "'";
}

std::string render_span(const SpanLocation& s) {
    return s.file + ":" + std::to_string(s.start_line) + ":" +
           std::to_string(s.start_col) + "-" + std::to_string(s.end_line) +
           ":" + std::to_string(s.end_col);
}

}  // namespace

std::optional<int> bind_endpoint(const EndpointLocation& loc,
                                 const ProgramIndex& index) {
    const FlowNode* best = nullptr;
    for (const FlowNode& n : index.nodes) {
        if (n.kind != FlowKind::Expression && n.kind != FlowKind::Parameter &&
            n.kind != FlowKind::Invocation)
            continue;
        if (n.file != loc.file || n.span.start_line != loc.line ||
            n.span.start_col != loc.col)
            continue;
        if (endpoint_text(n.snippet) != loc.snippet) continue;
        if (!best) {
            best = &n;
            continue;
        }
        // Innermost (smallest-span) wins; expressions break remaining ties.
        auto end_of = [](const FlowNode& m) {
            return std::tie(m.span.end_line, m.span.end_col);
        };
        if (end_of(n) < end_of(*best) ||
            (end_of(n) == end_of(*best) && n.kind == FlowKind::Expression))
            best = &n;
    }
    if (!best) return std::nullopt;
    return best->id;
}

std::optional<int> bind_span(const SpanLocation& loc, FlowKind want,
                             const ProgramIndex& index) {
    for (const FlowNode& n : index.nodes)
        if (n.kind == want && n.file == loc.file && n.span == loc.span())
            return n.id;
    return std::nullopt;
}

BoundSpecs validate_facts(const std::vector<SourceFact>& sources,
                          const std::vector<SinkFact>& sinks,
                          const std::vector<CallEdgeFact>& edges,
                          const ProgramIndex& index) {
    {
        std::vector<int> ids;
        for (const auto& f : sources) ids.push_back(f.id);
        check_unique_ids(ids, "sources");
        ids.clear();
        for (const auto& f : sinks) ids.push_back(f.id);
        check_unique_ids(ids, "sinks");
        ids.clear();
        for (const auto& f : edges) ids.push_back(f.id);
        check_unique_ids(ids, "calledges");
    }
    BoundSpecs out;
    auto bind_set = [&](const std::vector<EndpointFact>& facts,
                        const char* set, std::vector<int>& bound) {
        for (const auto& f : facts) {
            if (in_test_dir(f.loc.file, index.options)) {
                out.rejections.push_back(
                    {set, f.id, "test-directory location",
                     render_endpoint(f.loc)});
                continue;
            }
            if (auto id = bind_endpoint(f.loc, index))
                bound.push_back(*id);
            else
                out.rejections.push_back(
                    {set, f.id, "no matching node", render_endpoint(f.loc)});
        }
    };
    bind_set(sources, "sources", out.sources);
    bind_set(sinks, "sinks", out.sinks);
    for (const auto& e : edges) {
        if (e.status == EdgeStatus::Ignored) continue;
        auto call = bind_span(e.call, FlowKind::Invocation, index);
        if (!call) {
            out.rejections.push_back({"calledges", e.id,
                                      "call site does not bind",
                                      render_span(e.call)});
            continue;
        }
        if (e.kind == EdgeKind::Third) {
            out.third_edges.push_back(*call);
            continue;
        }
        auto target = bind_span(e.target, FlowKind::Function, index);
        if (!target) {
            out.rejections.push_back({"calledges", e.id,
                                      "target does not bind",
                                      render_span(e.target)});
            continue;
        }
        out.first_edges.emplace_back(*call, *target);
    }
    return out;
}

void export_csv(const std::string& dir, const std::vector<SourceFact>& sources,
                const std::vector<SinkFact>& sinks,
                const std::vector<CallEdgeFact>& edges) {
    fs::create_directories(dir);
    write_file(fs::path(dir) / "sources.csv", endpoint_csv(sources));
    write_file(fs::path(dir) / "sinks.csv", endpoint_csv(sinks));
    std::string out = std::string(kEdgeHeader) + "\n";
    for (const auto& e : edges) {
        out += csv_row({std::to_string(e.id),
                        e.call.file,
                        std::to_string(e.call.start_line),
                        std::to_string(e.call.start_col),
                        std::to_string(e.call.end_line),
                        std::to_string(e.call.end_col),
                        e.target.file,
                        std::to_string(e.target.start_line),
                        std::to_string(e.target.start_col),
                        std::to_string(e.target.end_line),
                        std::to_string(e.target.end_col),
                        e.kind == EdgeKind::First ? "first" : "third",
                        std::to_string(e.confidence),
                        e.status == EdgeStatus::Active ? "active" : "ignored"});
    }
    write_file(fs::path(dir) / "calledges.csv", out);
}

std::tuple<std::vector<SourceFact>, std::vector<SinkFact>,
           std::vector<CallEdgeFact>>
import_csv(const std::string& dir) {
    auto sources =
        endpoint_facts(read_csv(fs::path(dir) / "sources.csv", kEndpointHeader));
    auto sinks =
        endpoint_facts(read_csv(fs::path(dir) / "sinks.csv", kEndpointHeader));
    std::vector<CallEdgeFact> edges;
    int row = 2;
    for (const auto& r : read_csv(fs::path(dir) / "calledges.csv", kEdgeHeader)) {
        if (r.size() != 14) throw FormatError("expected 14 fields", row);
        CallEdgeFact e;
        e.id = parse_int(r[0], row, "id");
        e.call = {r[1], parse_int(r[2], row, "call_sl"),
                  parse_int(r[3], row, "call_sc"),
                  parse_int(r[4], row, "call_el"),
                  parse_int(r[5], row, "call_ec")};
        e.target = {r[6], parse_int(r[7], row, "target_sl"),
                    parse_int(r[8], row, "target_sc"),
                    parse_int(r[9], row, "target_el"),
                    parse_int(r[10], row, "target_ec")};
        if (r[11] == "first") e.kind = EdgeKind::First;
        else if (r[11] == "third") e.kind = EdgeKind::Third;
        else throw FormatError("invalid kind: '" + r[11] + "'", row);
        e.confidence = parse_int(r[12], row, "confidence");
        if (r[13] == "active") e.status = EdgeStatus::Active;
        else if (r[13] == "ignored") e.status = EdgeStatus::Ignored;
        else throw FormatError("invalid status: '" + r[13] + "'", row);
        edges.push_back(std::move(e));
        ++row;
    }
    return {std::move(sources), std::move(sinks), std::move(edges)};
}

std::string rejections_jsonl(const std::vector<Rejection>& rejections) {
    std::string out;
    for (const auto& r : rejections) {
        nlohmann::ordered_json j;
        j["set"] = r.set;
        j["id"] = r.fact_id;
        j["reason"] = r.reason;
        j["location"] = r.raw_location;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace taintjs
