#include "taintjs/ast.hpp"

#include <algorithm>

namespace taintjs {

namespace {

struct Parser {
    const SourceFile& file;
    const std::vector<Token>& toks;
    std::size_t pos = 0;

    Parser(const SourceFile& f, const std::vector<Token>& t) : file(f), toks(t) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos + ahead, toks.size() - 1);
        return toks[i];
    }
    const Token& cur() const { return peek(0); }
    const Token& next() { return toks[pos++]; }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) {
        throw ParseError(msg + " at " + std::to_string(cur().span.start_line) + ":" +
                             std::to_string(cur().span.start_col),
                         cur().span.start_line, cur().span.start_col,
                         std::move(expected));
    }

    bool at_punct(const char* p) const {
        return cur().kind == Tok::Punct && cur().text == p;
    }
    bool at_keyword(const char* k) const {
        return cur().kind == Tok::Keyword && cur().text == k;
    }
    bool eat_punct(const char* p) {
        if (at_punct(p)) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect_punct(const char* p) {
        if (!eat_punct(p)) fail(std::string("expected '") + p + "'", {p});
    }
    void expect_keyword(const char* k) {
        if (!at_keyword(k)) fail(std::string("expected '") + k + "'", {k});
        ++pos;
    }
    std::string expect_ident() {
        if (cur().kind != Tok::Ident) fail("expected identifier", {"identifier"});
        return next().text;
    }

    AstNodePtr mk(NodeKind k, const Span& span, std::string text = "") {
        auto n = std::make_unique<AstNode>(k, std::move(text));
        n->span = span;
        return n;
    }
    void finish(AstNode& n, const Span& begin) {
        const Span& prev = toks[pos > 0 ? pos - 1 : 0].span;
        n.span = {begin.start_line, begin.start_col, prev.end_line, prev.end_col};
        n.snippet = file.slice(n.span);
    }

    // --- statements ---

    AstNodePtr parse_program() {
        auto prog = std::make_unique<AstNode>(NodeKind::Program);
        Span begin = cur().span;
        while (cur().kind != Tok::Eof) prog->children.push_back(parse_statement());
        if (prog->children.empty()) begin = Span{1, 1, 1, 1};
        finish(*prog, begin);
        return prog;
    }

    AstNodePtr parse_statement() {
        if (at_keyword("function")) return parse_function(NodeKind::FunctionDecl);
        if (at_keyword("var") || at_keyword("let") || at_keyword("const")) {
            auto d = parse_var_decl();
            expect_punct(";");
            finish(*d, d->span);
            return d;
        }
        if (at_keyword("if")) return parse_if();
        if (at_keyword("while")) return parse_while();
        if (at_keyword("for")) return parse_for();
        if (at_keyword("return")) return parse_return();
        if (at_punct("{")) return parse_block();
        Span begin = cur().span;
        auto stmt = std::make_unique<AstNode>(NodeKind::ExprStmt);
        stmt->children.push_back(parse_expression());
        expect_punct(";");
        finish(*stmt, begin);
        return stmt;
    }

    AstNodePtr parse_function(NodeKind kind) {
        Span begin = cur().span;
        expect_keyword("function");
        auto fn = std::make_unique<AstNode>(kind);
        if (cur().kind == Tok::Ident) fn->text = next().text;
        if (kind == NodeKind::FunctionDecl && fn->text.empty())
            fail("function declarations require a name", {"identifier"});
        parse_params(*fn);
        fn->children.push_back(parse_block());
        finish(*fn, begin);
        return fn;
    }

    void parse_params(AstNode& fn) {
        expect_punct("(");
        bool first = true;
        while (!at_punct(")")) {
            if (!first) expect_punct(",");
            first = false;
            Span begin = cur().span;
            auto p = std::make_unique<AstNode>(NodeKind::Param, expect_ident());
            finish(*p, begin);
            fn.children.push_back(std::move(p));
        }
        expect_punct(")");
    }

    AstNodePtr parse_block() {
        Span begin = cur().span;
        expect_punct("{");
        auto blk = std::make_unique<AstNode>(NodeKind::Block);
        while (!at_punct("}")) {
            if (cur().kind == Tok::Eof) fail("unterminated block", {"}"});
            blk->children.push_back(parse_statement());
        }
        expect_punct("}");
        finish(*blk, begin);
        return blk;
    }

    // Declaration without the trailing semicolon (shared with for-headers).
    AstNodePtr parse_var_decl() {
        Span begin = cur().span;
        std::string kind = next().text;
        auto d = std::make_unique<AstNode>(NodeKind::VarDecl, kind);
        Span id_begin = cur().span;
        auto id = std::make_unique<AstNode>(NodeKind::Ident, expect_ident());
        finish(*id, id_begin);
        d->children.push_back(std::move(id));
        if (eat_punct("=")) d->children.push_back(parse_assignment());
        finish(*d, begin);
        return d;
    }

    AstNodePtr parse_if() {
        Span begin = cur().span;
        expect_keyword("if");
        expect_punct("(");
        auto n = std::make_unique<AstNode>(NodeKind::If);
        n->children.push_back(parse_expression());
        expect_punct(")");
        n->children.push_back(parse_statement());
        if (at_keyword("else")) {
            ++pos;
            n->children.push_back(parse_statement());
        }
        finish(*n, begin);
        return n;
    }

    AstNodePtr parse_while() {
        Span begin = cur().span;
        expect_keyword("while");
        expect_punct("(");
        auto n = std::make_unique<AstNode>(NodeKind::While);
        n->children.push_back(parse_expression());
        expect_punct(")");
        n->children.push_back(parse_statement());
        finish(*n, begin);
        return n;
    }

    AstNodePtr parse_for() {
        Span begin = cur().span;
        expect_keyword("for");
        expect_punct("(");
        bool decl_head = at_keyword("var") || at_keyword("let") || at_keyword("const");
        if (decl_head && peek(2).kind == Tok::Keyword && peek(2).text == "of") {
            auto n = std::make_unique<AstNode>(NodeKind::ForOf, next().text);
            Span id_begin = cur().span;
            auto id = std::make_unique<AstNode>(NodeKind::Ident, expect_ident());
            finish(*id, id_begin);
            n->children.push_back(std::move(id));
            expect_keyword("of");
            n->children.push_back(parse_expression());
            expect_punct(")");
            n->children.push_back(parse_statement());
            finish(*n, begin);
            return n;
        }
        auto n = std::make_unique<AstNode>(NodeKind::For);
        if (!at_punct(";")) {
            if (decl_head)
                n->children.push_back(parse_var_decl());
            else
                n->children.push_back(parse_expression());
        }
        expect_punct(";");
        if (!at_punct(";")) n->children.push_back(parse_expression());
        expect_punct(";");
        if (!at_punct(")")) n->children.push_back(parse_expression());
        expect_punct(")");
        n->children.push_back(parse_statement());
        finish(*n, begin);
        return n;
    }

    AstNodePtr parse_return() {
        Span begin = cur().span;
        expect_keyword("return");
        auto n = std::make_unique<AstNode>(NodeKind::Return);
        if (!at_punct(";")) n->children.push_back(parse_expression());
        expect_punct(";");
        finish(*n, begin);
        return n;
    }

    // --- expressions ---

    AstNodePtr parse_expression() { return parse_assignment(); }

    AstNodePtr parse_assignment() {
        Span begin = cur().span;
        auto lhs = parse_equality();
        if (at_punct("=")) {
            if (lhs->kind != NodeKind::Ident && lhs->kind != NodeKind::Member &&
                lhs->kind != NodeKind::ComputedMember)
                fail("invalid assignment target");
            ++pos;
            auto n = std::make_unique<AstNode>(NodeKind::Assign);
            n->children.push_back(std::move(lhs));
            n->children.push_back(parse_assignment());
            finish(*n, begin);
            return n;
        }
        return lhs;
    }

    AstNodePtr parse_equality() {
        Span begin = cur().span;
        auto lhs = parse_additive();
        while (at_punct("===") || at_punct("!==") || at_punct("<") || at_punct(">") ||
               at_punct("<=") || at_punct(">=")) {
            std::string op = next().text;
            auto n = std::make_unique<AstNode>(NodeKind::Binary, op);
            n->children.push_back(std::move(lhs));
            n->children.push_back(parse_additive());
            finish(*n, begin);
            lhs = std::move(n);
        }
        return lhs;
    }

    AstNodePtr parse_additive() {
        Span begin = cur().span;
        auto lhs = parse_postfix();
        while (at_punct("+")) {
            ++pos;
            auto n = std::make_unique<AstNode>(NodeKind::Binary, "+");
            n->children.push_back(std::move(lhs));
            n->children.push_back(parse_postfix());
            finish(*n, begin);
            lhs = std::move(n);
        }
        return lhs;
    }

    AstNodePtr parse_postfix() {
        Span begin = cur().span;
        auto expr = parse_primary();
        while (true) {
            if (at_punct(".")) {
                ++pos;
                auto n = std::make_unique<AstNode>(NodeKind::Member, expect_ident());
                n->children.push_back(std::move(expr));
                finish(*n, begin);
                expr = std::move(n);
            } else if (at_punct("[")) {
                ++pos;
                auto n = std::make_unique<AstNode>(NodeKind::ComputedMember);
                n->children.push_back(std::move(expr));
                n->children.push_back(parse_expression());
                expect_punct("]");
                finish(*n, begin);
                expr = std::move(n);
            } else if (at_punct("(")) {
                ++pos;
                auto n = std::make_unique<AstNode>(NodeKind::Call);
                n->children.push_back(std::move(expr));
                bool first = true;
                while (!at_punct(")")) {
                    if (!first) expect_punct(",");
                    first = false;
                    n->children.push_back(parse_assignment());
                }
                expect_punct(")");
                finish(*n, begin);
                expr = std::move(n);
            } else {
                return expr;
            }
        }
    }

    // Lookahead: does an arrow parameter list start at the current '('?
    bool arrow_ahead() const {
        if (!at_punct("(")) return false;
        std::size_t i = pos + 1;
        int depth = 1;
        while (i < toks.size() && depth > 0) {
            const Token& t = toks[i];
            if (t.kind == Tok::Punct && t.text == "(") ++depth;
            if (t.kind == Tok::Punct && t.text == ")") --depth;
            ++i;
        }
        return i < toks.size() && toks[i].kind == Tok::Punct && toks[i].text == "=>";
    }

    AstNodePtr parse_arrow_body(AstNode& fn) {
        if (at_punct("{")) return parse_block();
        // Expression body desugars to a single-return block for uniformity.
        Span begin = cur().span;
        auto blk = std::make_unique<AstNode>(NodeKind::Block);
        auto ret = std::make_unique<AstNode>(NodeKind::Return);
        ret->children.push_back(parse_assignment());
        finish(*ret, begin);
        blk->children.push_back(std::move(ret));
        finish(*blk, begin);
        (void)fn;
        return blk;
    }

    AstNodePtr parse_primary() {
        Span begin = cur().span;
        const Token& t = cur();
        if (t.kind == Tok::Number) {
            ++pos;
            auto n = mk(NodeKind::NumberLit, t.span, t.text);
            finish(*n, begin);
            return n;
        }
        if (t.kind == Tok::String) {
            ++pos;
            auto n = mk(NodeKind::StringLit, t.span, t.value);
            finish(*n, begin);
            return n;
        }
        if (at_keyword("true") || at_keyword("false")) {
            ++pos;
            auto n = mk(NodeKind::BoolLit, t.span, t.text);
            finish(*n, begin);
            return n;
        }
        if (t.kind == Tok::TemplateFull || t.kind == Tok::TemplateHead)
            return parse_template();
        if (at_keyword("function")) return parse_function(NodeKind::FunctionExpr);
        if (t.kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == "=>") {
            auto fn = std::make_unique<AstNode>(NodeKind::ArrowFn);
            auto p = std::make_unique<AstNode>(NodeKind::Param, next().text);
            p->span = t.span;
            p->snippet = file.slice(t.span);
            fn->children.push_back(std::move(p));
            expect_punct("=>");
            fn->children.push_back(parse_arrow_body(*fn));
            finish(*fn, begin);
            return fn;
        }
        if (arrow_ahead()) {
            auto fn = std::make_unique<AstNode>(NodeKind::ArrowFn);
            parse_params(*fn);
            expect_punct("=>");
            fn->children.push_back(parse_arrow_body(*fn));
            finish(*fn, begin);
            return fn;
        }
        if (at_punct("(")) {
            ++pos;
            auto inner = parse_expression();
            expect_punct(")");
            return inner;  // parentheses are span-transparent
        }
        if (at_punct("{")) return parse_object_literal();
        if (t.kind == Tok::Ident) {
            ++pos;
            auto n = mk(NodeKind::Ident, t.span, t.text);
            finish(*n, begin);
            return n;
        }
        fail("expected expression", {"expression"});
    }

    AstNodePtr parse_object_literal() {
        Span begin = cur().span;
        expect_punct("{");
        auto obj = std::make_unique<AstNode>(NodeKind::ObjectLit);
        bool first = true;
        while (!at_punct("}")) {
            if (!first) {
                expect_punct(",");
                if (at_punct("}")) break;  // trailing comma
            }
            first = false;
            Span pb = cur().span;
            std::string key;
            if (cur().kind == Tok::Ident || cur().kind == Tok::Keyword)
                key = next().text;
            else if (cur().kind == Tok::String)
                key = next().value;
            else if (cur().kind == Tok::Number)
                key = next().text;
            else
                fail("expected property key", {"identifier", "string"});
            expect_punct(":");
            auto prop = std::make_unique<AstNode>(NodeKind::Property, key);
            prop->children.push_back(parse_assignment());
            finish(*prop, pb);
            obj->children.push_back(std::move(prop));
        }
        expect_punct("}");
        finish(*obj, begin);
        return obj;
    }

    AstNodePtr parse_template() {
        Span begin = cur().span;
        auto tpl = std::make_unique<AstNode>(NodeKind::TemplateLit);
        auto push_chunk = [&](const Token& tok) {
            auto c = std::make_unique<AstNode>(NodeKind::TemplateChunk, tok.value);
            c->span = tok.span;
            c->snippet = file.slice(tok.span);
            tpl->children.push_back(std::move(c));
        };
        if (cur().kind == Tok::TemplateFull) {
            push_chunk(next());
            finish(*tpl, begin);
            return tpl;
        }
        if (cur().kind != Tok::TemplateHead) fail("expected template literal");
        push_chunk(next());
        while (true) {
            tpl->children.push_back(parse_expression());
            if (cur().kind == Tok::TemplateMiddle) {
                push_chunk(next());
                continue;
            }
            if (cur().kind == Tok::TemplateTail) {
                push_chunk(next());
                break;
            }
            fail("unterminated template literal");
        }
        finish(*tpl, begin);
        return tpl;
    }
};

}  // namespace

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Program: return "Program";
        case NodeKind::FunctionDecl: return "FunctionDecl";
        case NodeKind::FunctionExpr: return "FunctionExpr";
        case NodeKind::ArrowFn: return "ArrowFn";
        case NodeKind::Param: return "Param";
        case NodeKind::Block: return "Block";
        case NodeKind::VarDecl: return "VarDecl";
        case NodeKind::If: return "If";
        case NodeKind::While: return "While";
        case NodeKind::For: return "For";
        case NodeKind::ForOf: return "ForOf";
        case NodeKind::Return: return "Return";
        case NodeKind::ExprStmt: return "ExprStmt";
        case NodeKind::Assign: return "Assign";
        case NodeKind::Binary: return "Binary";
        case NodeKind::Call: return "Call";
        case NodeKind::Member: return "Member";
        case NodeKind::ComputedMember: return "ComputedMember";
        case NodeKind::Ident: return "Ident";
        case NodeKind::StringLit: return "StringLit";
        case NodeKind::NumberLit: return "NumberLit";
        case NodeKind::BoolLit: return "BoolLit";
        case NodeKind::TemplateLit: return "TemplateLit";
        case NodeKind::TemplateChunk: return "TemplateChunk";
        case NodeKind::ObjectLit: return "ObjectLit";
        case NodeKind::Property: return "Property";
    }
    return "?";
}

AstNodePtr parse(const SourceFile& file, const std::vector<Token>& tokens) {
    Parser p(file, tokens);
    return p.parse_program();
}

AstNodePtr parse_source(const SourceFile& file) {
    return parse(file, tokenize(file));
}

bool isomorphic(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.text != b.text ||
        a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!isomorphic(*a.children[i], *b.children[i])) return false;
    return true;
}

void walk(const AstNode& node, const std::function<void(const AstNode&)>& fn) {
    fn(node);
    for (const auto& c : node.children) walk(*c, fn);
}

}  // namespace taintjs
