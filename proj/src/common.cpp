#include "taintjs/common.hpp"

namespace taintjs {

std::size_t utf8_len(const std::string& text, std::size_t pos) {
    unsigned char c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) return 1;
    if ((c >> 5) == 0x6) return 2;
    if ((c >> 4) == 0xe) return 3;
    if ((c >> 3) == 0x1e) return 4;
    return 1;
}

SourceFile SourceFile::load(std::string path, std::string text) {
    SourceFile f;
    f.path = std::move(path);
    for (auto& ch : f.path)
        if (ch == '\\') ch = '/';
    f.text = std::move(text);
    f.line_index.push_back(0);
    for (std::size_t i = 0; i < f.text.size(); ++i)
        if (f.text[i] == '\n') f.line_index.push_back(i + 1);
    return f;
}

std::size_t SourceFile::offset_of(int line, int col) const {
    if (line < 1 || static_cast<std::size_t>(line) > line_index.size())
        throw Error("line out of range: " + std::to_string(line));
    std::size_t off = line_index[static_cast<std::size_t>(line) - 1];
    for (int c = 1; c < col && off < text.size() && text[off] != '\n'; ++c)
        off += utf8_len(text, off);
    return off;
}

std::string SourceFile::slice(const Span& span) const {
    std::size_t begin = offset_of(span.start_line, span.start_col);
    std::size_t last = offset_of(span.end_line, span.end_col);
    std::size_t end = last < text.size() ? last + utf8_len(text, last) : last;
    return text.substr(begin, end - begin);
}

std::string endpoint_text(const std::string& snippet) {
    auto nl = snippet.find('\n');
    if (nl == std::string::npos) return snippet;
    int extra = 0;
    for (char c : snippet)
        if (c == '\n') ++extra;
    std::string first = snippet.substr(0, nl);
    while (!first.empty() && (first.back() == '\r' || first.back() == ' '))
        first.pop_back();
    return first + " ...+" + std::to_string(extra);
}

}  // namespace taintjs
