#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "taintjs/common.hpp"
#include "taintjs/lexer.hpp"

namespace taintjs {

enum class NodeKind {
    Program,
    FunctionDecl,  // text = name; children: params..., Block
    FunctionExpr,  // text = optional name; children: params..., Block
    ArrowFn,       // children: params..., Block or expression body
    Param,         // text = name
    Block,
    VarDecl,   // text = "var"|"let"|"const"; children: Ident, [init]
    If,        // children: cond, then, [else]
    While,     // children: cond, body
    For,       // children: [init], [cond], [update], body (missing parts elided)
    ForOf,     // text = decl kind; children: Ident, iterable, body
    Return,    // children: [expr]
    ExprStmt,  // children: expr
    Assign,    // children: lhs, rhs
    Binary,    // text = operator; children: lhs, rhs
    Call,      // children: callee, args...
    Member,          // text = property name; children: base
    ComputedMember,  // children: base, key
    Ident,           // text = name
    StringLit,       // text = cooked value
    NumberLit,
    BoolLit,
    TemplateLit,    // children: alternating TemplateChunk / expressions
    TemplateChunk,  // text = cooked chunk value
    ObjectLit,      // children: Property...
    Property,       // text = key; children: value
};

const char* node_kind_name(NodeKind k);

inline bool is_function_kind(NodeKind k) {
    return k == NodeKind::FunctionDecl || k == NodeKind::FunctionExpr ||
           k == NodeKind::ArrowFn;
}

struct AstNode;
using AstNodePtr = std::unique_ptr<AstNode>;

struct AstNode {
    NodeKind kind;
    std::string text;
    std::vector<AstNodePtr> children;
    Span span;
    std::string snippet;  // verbatim source slice at span

    AstNode(NodeKind k, std::string t = "") : kind(k), text(std::move(t)) {}
    AstNode* child(std::size_t i) const {
        return i < children.size() ? children[i].get() : nullptr;
    }
};

// Parses a token stream into a Program node. Throws ParseError.
AstNodePtr parse(const SourceFile& file, const std::vector<Token>& tokens);

// Convenience: tokenize + parse.
AstNodePtr parse_source(const SourceFile& file);

// Structural equality ignoring spans/snippets (used by round-trip checks).
bool isomorphic(const AstNode& a, const AstNode& b);

// Depth-first visit, parents before children.
void walk(const AstNode& node, const std::function<void(const AstNode&)>& fn);

}  // namespace taintjs
