#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace taintjs {

// Base class for all analysis errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LexError : Error {
    int line = 0, col = 0;
    LexError(const std::string& msg, int line_, int col_)
        : Error(msg), line(line_), col(col_) {}
};

struct ParseError : Error {
    int line = 0, col = 0;
    std::vector<std::string> expected;
    ParseError(const std::string& msg, int line_, int col_,
               std::vector<std::string> expected_ = {})
        : Error(msg), line(line_), col(col_), expected(std::move(expected_)) {}
};

struct FormatError : Error {
    int row = 0;
    FormatError(const std::string& msg, int row_) : Error(msg), row(row_) {}
};

struct DuplicateId : Error {
    using Error::Error;
};
struct DanglingEdge : Error {
    using Error::Error;
};
struct EmptyQuery : Error {
    using Error::Error;
};
struct BackendUnavailable : Error {
    using Error::Error;
};
struct OracleFailure : Error {
    using Error::Error;
};
struct UnboundSpecs : Error {
    using Error::Error;
};
struct AnnotationUnbindable : Error {
    using Error::Error;
};
struct StaleArtifacts : Error {
    using Error::Error;
};

// 1-based inclusive source span. Columns count Unicode scalar values.
struct Span {
    int start_line = 0;
    int start_col = 0;
    int end_line = 0;
    int end_col = 0;

    friend bool operator==(const Span& a, const Span& b) {
        return a.start_line == b.start_line && a.start_col == b.start_col &&
               a.end_line == b.end_line && a.end_col == b.end_col;
    }
    friend bool operator!=(const Span& a, const Span& b) { return !(a == b); }
    friend bool operator<(const Span& a, const Span& b) {
        return std::tie(a.start_line, a.start_col, a.end_line, a.end_col) <
               std::tie(b.start_line, b.start_col, b.end_line, b.end_col);
    }
    bool contains(const Span& inner) const {
        bool start_ok = std::tie(start_line, start_col) <=
                        std::tie(inner.start_line, inner.start_col);
        bool end_ok = std::tie(inner.end_line, inner.end_col) <=
                      std::tie(end_line, end_col);
        return start_ok && end_ok;
    }
};

// Number of bytes in the UTF-8 sequence starting at text[pos]; 1 on malformed input.
std::size_t utf8_len(const std::string& text, std::size_t pos);

// A source file with a line index that maps 1-based (line, col) pairs back to
// byte offsets. Paths use forward slashes and are relative to the package root.
struct SourceFile {
    std::string path;
    std::string text;
    std::vector<std::size_t> line_index;  // byte offset of each line start

    static SourceFile load(std::string path, std::string text);

    // Byte offset of the first byte of the scalar at (line, col).
    std::size_t offset_of(int line, int col) const;
    // Verbatim source between the span endpoints, both inclusive.
    std::string slice(const Span& span) const;
};

// Single-line rendering of a snippet: multi-line text collapses to its first
// line plus a "+N" line-count marker. Used wherever a snippet must fit one
// CSV/JSON field and for endpoint binding.
std::string endpoint_text(const std::string& snippet);

}  // namespace taintjs
