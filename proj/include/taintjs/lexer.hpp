#pragma once

#include <string>
#include <vector>

#include "taintjs/common.hpp"

namespace taintjs {

enum class Tok {
    Ident,
    Keyword,
    Number,
    String,
    TemplateFull,  // `...` with no interpolation
    TemplateHead,  // `...${
    TemplateMiddle,  // }...${
    TemplateTail,  // }...`
    Punct,
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;   // raw lexeme, verbatim
    std::string value;  // cooked value for strings / template chunks
    Span span;
};

// Tokenizes MiniJS source. Skipped whitespace/comments plus token texts
// reproduce the input exactly. Throws LexError on illegal characters.
std::vector<Token> tokenize(const SourceFile& file);

bool is_keyword(const std::string& word);

}  // namespace taintjs
