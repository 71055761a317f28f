#include "taintjs/fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "taintjs/ast.hpp"

namespace taintjs {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Seeded identifier tag so distinct seeds yield distinct but deterministic
// packages. Fixture text is ASCII, so annotation columns are byte columns.
std::string seed_tag(unsigned seed) {
    std::mt19937 rng(seed);
    std::string tag(1, static_cast<char>('a' + rng() % 26));
    tag += static_cast<char>('a' + rng() % 26);
    return tag + std::to_string(seed % 97);
}

std::pair<int, int> locate(const std::string& text, const std::string& context,
                           std::size_t inner) {
    std::size_t pos = text.find(context);
    if (pos == std::string::npos)
        throw Error("fixture snippet not found: " + context);
    pos += inner;
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

EndpointLocation endpoint(const std::string& file, const std::string& text,
                          const std::string& context, std::size_t inner,
                          const std::string& snippet) {
    auto [line, col] = locate(text, context, inner);
    return {file, line, col, snippet};
}

GeneratedFixture iife_factory(unsigned seed) {
    std::string tag = seed_tag(seed);
    std::string text =
        "function linkTag" + tag + "(tok) {\n"
        "  const href = tok.meta.attrs.href;\n"
        "  return `<a href=\"${href}\">link</a>`;\n"
        "}\n"
        "function textTag" + tag + "(tok) {\n"
        "  const body = tok.body;\n"
        "  return `<span>${body}</span>`;\n"
        "}\n"
        "module.exports = (function () {\n"
        "  const htmlify = { link: linkTag" + tag + ", text: textTag" + tag +
        " };\n"
        "  function renderToken(tok) {\n"
        "    const fn = htmlify[tok.kind];\n"
        "    return fn(tok);\n"
        "  }\n"
        "  function render(input) {\n"
        "    const tok = { kind: 'link', body: input, meta: { attrs: { href: "
        "input } } };\n"
        "    return renderToken(tok);\n"
        "  }\n"
        "  return { render: render };\n"
        "})();\n";
    GeneratedFixture fx;
    fx.pattern = "iife-factory";
    fx.seed = seed;
    fx.cwe = 79;
    fx.files.push_back({"app.js", text});
    Annotation ann;
    ann.finding_id = "iife-factory-" + std::to_string(seed);
    ann.cwe = 79;
    ann.source = endpoint("app.js", text, "function render(input)",
                          sizeof("function render(") - 1, "input");
    ann.sink = endpoint("app.js", text, "${href}", 2, "href");
    ann.notes = "markup attribute built from the exported render input";
    fx.annotations.push_back(ann);
    return fx;
}

std::string enum_dispatch_text(const std::string& tag) {
    return "function dangerous" + tag + "(cmd) {\n"
           "  eval(cmd);\n"
           "  return 0;\n"
           "}\n"
           "const actions" + tag + " = { danger: dangerous" + tag + " };\n"
           "const pick" + tag + " = 'danger';\n"
           "const payload" + tag + " = location.hash;\n"
           "actions" + tag + "[pick" + tag + "](payload" + tag + ");\n";
}

Annotation enum_dispatch_annotation(const std::string& id,
                                    const std::string& text) {
    Annotation ann;
    ann.finding_id = id;
    ann.cwe = 94;
    ann.source = endpoint("app.js", text, "location.hash", 0, "location.hash");
    ann.sink = endpoint("app.js", text, "eval(cmd)", sizeof("eval(") - 1,
                        "cmd");
    ann.notes = "fragment evaluated after a string-keyed dispatch";
    return ann;
}

GeneratedFixture enum_dispatch(unsigned seed) {
    std::string text = enum_dispatch_text(seed_tag(seed));
    GeneratedFixture fx;
    fx.pattern = "enum-dispatch";
    fx.seed = seed;
    fx.cwe = 94;
    fx.files.push_back({"app.js", text});
    fx.annotations.push_back(enum_dispatch_annotation(
        "enum-dispatch-" + std::to_string(seed), text));
    return fx;
}

GeneratedFixture closure_callback(unsigned seed) {
    std::string tag = seed_tag(seed);
    std::string text =
        "function runWorker" + tag + "(cb) {\n"
        "  const data = location.hash;\n"
        "  cb(data);\n"
        "  return 0;\n"
        "}\n"
        "function handler" + tag + "(payload) {\n"
        "  eval(payload);\n"
        "  return 0;\n"
        "}\n"
        "runWorker" + tag + "(handler" + tag + ");\n";
    GeneratedFixture fx;
    fx.pattern = "closure-callback";
    fx.seed = seed;
    fx.cwe = 94;
    fx.files.push_back({"app.js", text});
    Annotation ann;
    ann.finding_id = "closure-callback-" + std::to_string(seed);
    ann.cwe = 94;
    ann.source = endpoint("app.js", text, "location.hash", 0, "location.hash");
    ann.sink = endpoint("app.js", text, "eval(payload)", sizeof("eval(") - 1,
                        "payload");
    ann.notes = "environment read handed to a callback invoked indirectly";
    fx.annotations.push_back(ann);
    return fx;
}

GeneratedFixture computed_dispatch(unsigned seed) {
    std::string tag = seed_tag(seed);
    std::string text =
        "function emphasis" + tag + "(token) {\n"
        "  const text = token.text;\n"
        "  return `<em>${text}</em>`;\n"
        "}\n"
        "function strong" + tag + "(token) {\n"
        "  const text = token.text;\n"
        "  return `<strong>${text}</strong>`;\n"
        "}\n"
        "const htmlify = { emphasis: emphasis" + tag + ", strong: strong" +
        tag + " };\n"
        "function render(token) {\n"
        "  const fn = htmlify[token.name];\n"
        "  return fn(token);\n"
        "}\n"
        "module.exports = render;\n";
    GeneratedFixture fx;
    fx.pattern = "computed-dispatch";
    fx.seed = seed;
    fx.cwe = 79;
    fx.files.push_back({"app.js", text});
    Annotation ann;
    ann.finding_id = "computed-dispatch-" + std::to_string(seed);
    ann.cwe = 79;
    ann.source = endpoint("app.js", text, "function render(token)",
                          sizeof("function render(") - 1, "token");
    ann.sink = endpoint("app.js", text, "`<em>${text}", sizeof("`<em>${") - 1,
                        "text");
    ann.notes = "token text interpolated after name-keyed dispatch";
    fx.annotations.push_back(ann);
    return fx;
}

GeneratedFixture third_party_renderer(unsigned seed) {
    const int libs = 5;
    const char* methods[] = {"step", "pad", "tint", "wrap", "mark"};
    std::ostringstream app;
    GeneratedFixture fx;
    fx.pattern = "third-party-renderer";
    fx.seed = seed;
    fx.cwe = 79;
    for (int i = 0; i < libs; ++i) {
        std::string name = "render-step-" + std::to_string(i);
        app << "const lib" << i << " = require('" << name << "');\n";
        std::ostringstream lib;
        lib << "module.exports = {\n";
        for (int m = 0; m < 5; ++m)
            lib << "  " << methods[m] << ": function (s) { return s; }"
                << (m + 1 < 5 ? "," : "") << "\n";
        lib << "};\n";
        std::string path = "node_modules/" + name + "/index.js";
        fx.files.push_back({path, lib.str()});
        fx.third_party.push_back(path);
    }
    app << "const raw = location.hash;\n";
    app << "const v0 = lib0.step(raw);\n";
    for (int i = 1; i < libs; ++i)
        app << "const v" << i << " = lib" << i << ".step(v" << i - 1 << ");\n";
    app << "document.write(v4);\n";
    // Twenty off-path third-party calls whose results go nowhere.
    std::mt19937 rng(seed);
    for (int i = 0; i < 20; ++i)
        app << "const off" << i << " = lib" << i % libs << "."
            << methods[1 + rng() % 4] << "('x" << i << "');\n";
    std::string text = app.str();
    fx.files.insert(fx.files.begin(), {"app.js", text});
    Annotation ann;
    ann.finding_id = "third-party-renderer-" + std::to_string(seed);
    ann.cwe = 79;
    ann.source = endpoint("app.js", text, "location.hash", 0, "location.hash");
    ann.sink = endpoint("app.js", text, "document.write(v4)",
                        sizeof("document.write(") - 1, "v4");
    ann.notes = "taint crosses five renderer-library calls before the write";
    fx.annotations.push_back(ann);
    return fx;
}

GeneratedFixture off_path_noise(unsigned seed, int noise_calls) {
    std::string tag = seed_tag(seed);
    std::string text = enum_dispatch_text(tag);
    for (int i = 0; i < noise_calls; ++i) {
        std::string n = std::to_string(i);
        text += "function noise" + tag + n + "(k) {\n"
                "  const table = { go: function (x) { return x + " + n +
                "; } };\n"
                "  const fn = table[k];\n"
                "  return fn(" + n + ");\n"
                "}\n";
    }
    GeneratedFixture fx;
    fx.pattern = "off-path-noise";
    fx.seed = seed;
    fx.cwe = 94;
    fx.noise_calls = noise_calls;
    fx.files.push_back({"app.js", text});
    fx.annotations.push_back(enum_dispatch_annotation(
        "off-path-noise-" + std::to_string(seed), text));
    return fx;
}

}  // namespace

const std::vector<std::string>& fixture_patterns() {
    static const std::vector<std::string> patterns = {
        "iife-factory",   "enum-dispatch",        "closure-callback",
        "computed-dispatch", "third-party-renderer", "off-path-noise",
    };
    return patterns;
}

GeneratedFixture generate_fixture(const std::string& pattern, unsigned seed,
                                  int noise_calls) {
    if (pattern == "iife-factory") return iife_factory(seed);
    if (pattern == "enum-dispatch") return enum_dispatch(seed);
    if (pattern == "closure-callback") return closure_callback(seed);
    if (pattern == "computed-dispatch") return computed_dispatch(seed);
    if (pattern == "third-party-renderer") return third_party_renderer(seed);
    if (pattern == "off-path-noise") return off_path_noise(seed, noise_calls);
    throw Error("unknown fixture pattern: " + pattern);
}

std::string annotations_json(const std::vector<Annotation>& annotations) {
    ordered_json docs = ordered_json::array();
    for (const auto& a : annotations) {
        docs.push_back({{"finding_id", a.finding_id},
                        {"cwe", a.cwe},
                        {"source",
                         {{"file", a.source.file},
                          {"line", a.source.line},
                          {"col", a.source.col},
                          {"snippet", a.source.snippet}}},
                        {"sink",
                         {{"file", a.sink.file},
                          {"line", a.sink.line},
                          {"col", a.sink.col},
                          {"snippet", a.sink.snippet}}},
                        {"notes", a.notes}});
    }
    return docs.dump(2) + "\n";
}

std::vector<Annotation> parse_annotations(const std::string& text) {
    ordered_json docs;
    try {
        docs = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw FormatError(std::string("bad annotations document: ") + e.what(),
                          0);
    }
    std::vector<Annotation> out;
    for (const auto& d : docs) {
        Annotation a;
        a.finding_id = d.at("finding_id").get<std::string>();
        a.cwe = d.at("cwe").get<int>();
        for (const char* side : {"source", "sink"}) {
            const auto& loc = d.at(side);
            EndpointLocation e{loc.at("file").get<std::string>(),
                               loc.at("line").get<int>(),
                               loc.at("col").get<int>(),
                               loc.at("snippet").get<std::string>()};
            (side == std::string("source") ? a.source : a.sink) = e;
        }
        if (d.contains("notes")) a.notes = d.at("notes").get<std::string>();
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Annotation> load_annotations(const std::string& dir) {
    fs::path path = fs::path(dir) / "annotations.json";
    std::ifstream in(path);
    if (!in) return {};
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_annotations(buf.str());
}

void write_fixture(const GeneratedFixture& fixture, const std::string& dir) {
    for (const auto& file : fixture.files) {
        fs::path target = fs::path(dir) / file.path;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        out << file.text;
    }
    std::ofstream out(fs::path(dir) / "annotations.json", std::ios::binary);
    out << annotations_json(fixture.annotations);
}

ProgramIndex index_fixture(const GeneratedFixture& fixture,
                           IndexOptions options) {
    std::vector<ParsedFile> files;
    for (const auto& file : fixture.files) {
        if (file.path.rfind("node_modules/", 0) == 0) continue;
        SourceFile src = SourceFile::load(file.path, file.text);
        files.push_back(ParsedFile{std::move(src), nullptr});
        files.back().ast = parse_source(files.back().src);
    }
    return build_program_index(".", std::move(files), options,
                               fixture.third_party);
}

}  // namespace taintjs
