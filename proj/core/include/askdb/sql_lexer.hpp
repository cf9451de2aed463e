#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace askdb::sql {

// Token stream over the SQL superset the guardrail accepts (Postgres-style
// plus the warehouse constructs seen in generated queries). Comments never
// reach the classifier: line (--) and block (/* */, nesting tolerated)
// comments are dropped during lexing.
struct Token {
    enum class Kind {
        word,    // identifier or keyword; `upper` holds the folded spelling
        number,  // numeric literal, including decimals and exponents
        string,  // quoted string literal; `text` holds the unescaped body
        symbol,  // operator or punctuation, possibly multi-character
    };

    Kind kind = Kind::symbol;
    std::string text;
    std::string upper;   // uppercase form for unquoted words; empty otherwise
    bool quoted = false; // "ident", `ident`, or [ident]; never a keyword
    std::size_t offset = 0;

    bool is_word(std::string_view upper_spelling) const {
        return kind == Kind::word && !quoted && upper == upper_spelling;
    }
    bool is_symbol(std::string_view s) const {
        return kind == Kind::symbol && text == s;
    }
};

struct LexResult {
    std::vector<Token> tokens;
    bool ok = false;
    std::string error;  // unterminated string/comment, stray byte, ...
};

LexResult lex(std::string_view sql);

}  // namespace askdb::sql
