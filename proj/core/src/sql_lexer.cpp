#include "askdb/sql_lexer.hpp"

#include <cctype>

namespace askdb::sql {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Multi-character operators recognized as single tokens. Longest match wins.
constexpr std::string_view kOperators[] = {
    "->>", "::",  "->", "||", "<=", ">=", "<>", "!=", "~~*", "!~~", "~~", "!~",
};

}  // namespace

LexResult lex(std::string_view sql) {
    LexResult result;
    std::size_t i = 0;
    const std::size_t n = sql.size();

    while (i < n) {
        const char c = sql[i];

        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }

        // Line comment.
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
            while (i < n && sql[i] != '\n') ++i;
            continue;
        }

        // Block comment; nested opens are tracked so a smuggled close cannot
        // resurrect commented-out text.
        if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
            int depth = 1;
            i += 2;
            while (i < n && depth > 0) {
                if (sql[i] == '/' && i + 1 < n && sql[i + 1] == '*') {
                    ++depth;
                    i += 2;
                } else if (sql[i] == '*' && i + 1 < n && sql[i + 1] == '/') {
                    --depth;
                    i += 2;
                } else {
                    ++i;
                }
            }
            if (depth > 0) {
                result.error = "unterminated block comment";
                return result;
            }
            continue;
        }

        // String literal: '...' with '' escapes; E'...' adds backslash escapes.
        const bool escape_prefix =
            (c == 'E' || c == 'e' || c == 'N' || c == 'n') && i + 1 < n && sql[i + 1] == '\'' &&
            (i == 0 || !is_ident_char(sql[i - 1]));
        if (c == '\'' || escape_prefix) {
            Token tok;
            tok.kind = Token::Kind::string;
            tok.offset = i;
            const bool backslash = escape_prefix && (c == 'E' || c == 'e');
            std::size_t j = i + (escape_prefix ? 2 : 1);
            std::string body;
            bool closed = false;
            while (j < n) {
                if (backslash && sql[j] == '\\' && j + 1 < n) {
                    body.push_back(sql[j + 1]);
                    j += 2;
                    continue;
                }
                if (sql[j] == '\'') {
                    if (j + 1 < n && sql[j + 1] == '\'') {
                        body.push_back('\'');
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                body.push_back(sql[j]);
                ++j;
            }
            if (!closed) {
                result.error = "unterminated string literal";
                return result;
            }
            tok.text = std::move(body);
            result.tokens.push_back(std::move(tok));
            i = j;
            continue;
        }

        // Quoted identifier: "ident", `ident`, or [ident].
        if (c == '"' || c == '`' || c == '[') {
            const char closer = c == '[' ? ']' : c;
            Token tok;
            tok.kind = Token::Kind::word;
            tok.quoted = true;
            tok.offset = i;
            std::size_t j = i + 1;
            std::string body;
            bool closed = false;
            while (j < n) {
                if (sql[j] == closer) {
                    if (closer != ']' && j + 1 < n && sql[j + 1] == closer) {
                        body.push_back(closer);
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                body.push_back(sql[j]);
                ++j;
            }
            if (!closed) {
                result.error = "unterminated quoted identifier";
                return result;
            }
            tok.text = std::move(body);
            result.tokens.push_back(std::move(tok));
            i = j;
            continue;
        }

        // Number: digits, optional fraction and exponent. A leading dot
        // (".5") also counts when followed by a digit.
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
            Token tok;
            tok.kind = Token::Kind::number;
            tok.offset = i;
            std::size_t j = i;
            bool seen_dot = false;
            while (j < n) {
                if (std::isdigit(static_cast<unsigned char>(sql[j]))) {
                    ++j;
                } else if (sql[j] == '.' && !seen_dot && j + 1 < n &&
                           std::isdigit(static_cast<unsigned char>(sql[j + 1]))) {
                    seen_dot = true;
                    ++j;
                } else if ((sql[j] == 'e' || sql[j] == 'E') && j + 1 < n &&
                           (std::isdigit(static_cast<unsigned char>(sql[j + 1])) ||
                            ((sql[j + 1] == '+' || sql[j + 1] == '-') && j + 2 < n &&
                             std::isdigit(static_cast<unsigned char>(sql[j + 2]))))) {
                    j += (sql[j + 1] == '+' || sql[j + 1] == '-') ? 2 : 1;
                    while (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) ++j;
                    break;
                } else {
                    break;
                }
            }
            tok.text = std::string(sql.substr(i, j - i));
            result.tokens.push_back(std::move(tok));
            i = j;
            continue;
        }

        // Identifier / keyword.
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < n && is_ident_char(sql[j])) ++j;
            Token tok;
            tok.kind = Token::Kind::word;
            tok.offset = i;
            tok.text = std::string(sql.substr(i, j - i));
            tok.upper.reserve(tok.text.size());
            for (char ch : tok.text) {
                tok.upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
            }
            result.tokens.push_back(std::move(tok));
            i = j;
            continue;
        }

        // Multi-character operators.
        bool matched = false;
        for (std::string_view op : kOperators) {
            if (sql.substr(i, op.size()) == op) {
                Token tok;
                tok.kind = Token::Kind::symbol;
                tok.offset = i;
                tok.text = std::string(op);
                result.tokens.push_back(std::move(tok));
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;

        // Single-character symbols. Anything printable is accepted so that
        // classification (not lexing) decides whether the statement makes
        // sense; control bytes are rejected outright.
        if (std::isprint(static_cast<unsigned char>(c))) {
            Token tok;
            tok.kind = Token::Kind::symbol;
            tok.offset = i;
            tok.text = std::string(1, c);
            result.tokens.push_back(std::move(tok));
            ++i;
            continue;
        }

        result.error = "unexpected byte in statement";
        return result;
    }

    result.ok = true;
    return result;
}

}  // namespace askdb::sql
