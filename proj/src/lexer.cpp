#include "taintjs/lexer.hpp"

#include <array>
#include <cctype>

namespace taintjs {

namespace {

const std::array<const char*, 12> kKeywords = {
    "function", "var", "let", "const", "if",     "else",
    "while",    "for", "of",  "return", "true", "false",
};

struct Lexer {
    const SourceFile& file;
    const std::string& src;
    std::size_t pos = 0;
    int line = 1, col = 1;
    int brace_depth = 0;
    std::vector<int> template_stack;  // brace depth at each open template
    std::vector<Token> out;

    explicit Lexer(const SourceFile& f) : file(f), src(f.text) {}

    [[noreturn]] void fail(const std::string& msg) { throw LexError(msg, line, col); }

    bool eof() const { return pos >= src.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }

    void advance() {
        if (src[pos] == '\n') {
            ++line;
            col = 1;
            ++pos;
        } else {
            pos += utf8_len(src, pos);
            ++col;
        }
    }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance();
                advance();
                while (!eof() && !(peek() == '*' && peek(1) == '/')) advance();
                if (eof()) fail("unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token make(Tok kind, std::size_t begin, int bl, int bc, std::string value = "") {
        Token t;
        t.kind = kind;
        t.text = src.substr(begin, pos - begin);
        t.value = std::move(value);
        t.span = {bl, bc, line, col > 1 ? col - 1 : 1};
        // end coordinates: the last consumed scalar sits on the previous column
        if (col == 1 && line > bl) {
            // token ended exactly at a line break; not reachable for our tokens
            t.span.end_line = line - 1;
        }
        return t;
    }

    void lex_string() {
        std::size_t begin = pos;
        int bl = line, bc = col;
        char quote = peek();
        advance();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '\n') fail("unterminated string literal");
            if (peek() == '\\') {
                advance();
                if (eof()) fail("unterminated string literal");
                char e = peek();
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default: value += e; break;
                }
                advance();
            } else {
                std::size_t n = utf8_len(src, pos);
                value.append(src, pos, n);
                advance();
            }
        }
        if (eof()) fail("unterminated string literal");
        advance();  // closing quote
        out.push_back(make(Tok::String, begin, bl, bc, value));
    }

    // Scans a template chunk starting at `pos` (just past `, } ) until a
    // backtick or `${`. `opening` tells which delimiter preceded the chunk.
    void lex_template_chunk(bool opening) {
        std::size_t begin = pos;
        int bl = line, bc = col;
        if (opening) {
            advance();  // backtick
        } else {
            advance();  // closing brace of the interpolation
        }
        std::string value;
        while (!eof()) {
            if (peek() == '`') {
                advance();
                out.push_back(make(opening ? Tok::TemplateFull : Tok::TemplateTail,
                                   begin, bl, bc, value));
                if (!opening) template_stack.pop_back();
                return;
            }
            if (peek() == '$' && peek(1) == '{') {
                advance();
                advance();
                out.push_back(make(opening ? Tok::TemplateHead : Tok::TemplateMiddle,
                                   begin, bl, bc, value));
                if (opening) template_stack.push_back(brace_depth);
                return;
            }
            if (peek() == '\\') {
                advance();
                if (eof()) break;
                char e = peek();
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    default: value += e; break;
                }
                advance();
                continue;
            }
            std::size_t n = utf8_len(src, pos);
            value.append(src, pos, n);
            advance();
        }
        fail("unterminated template literal");
    }

    void lex_punct() {
        std::size_t begin = pos;
        int bl = line, bc = col;
        static const std::array<const char*, 4> three = {"==="};
        static const std::array<const char*, 5> two = {"!==", "=>", "<=", ">="};
        (void)three;
        (void)two;
        auto starts = [&](const char* s) {
            std::size_t n = std::char_traits<char>::length(s);
            return src.compare(pos, n, s) == 0;
        };
        std::size_t n = 1;
        if (starts("===") || starts("!==")) n = 3;
        else if (starts("=>") || starts("<=") || starts(">=")) n = 2;
        for (std::size_t i = 0; i < n; ++i) advance();
        Token t = make(Tok::Punct, begin, bl, bc);
        if (t.text == "{") ++brace_depth;
        if (t.text == "}") --brace_depth;
        out.push_back(t);
    }

    void run() {
        while (true) {
            skip_trivia();
            if (eof()) break;
            char c = peek();
            if (c == '}' && !template_stack.empty() &&
                brace_depth == template_stack.back()) {
                lex_template_chunk(false);
                continue;
            }
            if (c == '`') {
                lex_template_chunk(true);
                continue;
            }
            if (c == '\'' || c == '"') {
                lex_string();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t begin = pos;
                int bl = line, bc = col;
                while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
                    advance();
                if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    advance();
                    while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
                        advance();
                }
                out.push_back(make(Tok::Number, begin, bl, bc));
                continue;
            }
            auto is_ident_start = [](char ch) {
                unsigned char u = static_cast<unsigned char>(ch);
                return std::isalpha(u) || ch == '_' || ch == '$' || u >= 0x80;
            };
            if (is_ident_start(c)) {
                std::size_t begin = pos;
                int bl = line, bc = col;
                while (!eof()) {
                    char k = peek();
                    if (std::isalnum(static_cast<unsigned char>(k)) ||
                        is_ident_start(k))
                        advance();
                    else
                        break;
                }
                Token t = make(Tok::Ident, begin, bl, bc);
                if (is_keyword(t.text)) t.kind = Tok::Keyword;
                out.push_back(t);
                continue;
            }
            static const std::string kPunctStart = "(){}[];,.=<>+!?:";
            if (kPunctStart.find(c) != std::string::npos) {
                lex_punct();
                continue;
            }
            fail("illegal character");
        }
        Token e;
        e.kind = Tok::Eof;
        e.span = {line, col, line, col};
        out.push_back(e);
    }
};

}  // namespace

bool is_keyword(const std::string& word) {
    for (const char* k : kKeywords)
        if (word == k) return true;
    return false;
}

std::vector<Token> tokenize(const SourceFile& file) {
    Lexer lx(file);
    lx.run();
    return lx.out;
}

}  // namespace taintjs
