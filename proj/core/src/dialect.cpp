#include "askdb/dialect.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

#include "askdb/sql_lexer.hpp"

namespace askdb::sql {

namespace {

using Tokens = std::vector<Token>;

Token word(std::string text) {
    Token t;
    t.kind = Token::Kind::word;
    t.upper.resize(text.size());
    std::transform(text.begin(), text.end(), t.upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    t.text = std::move(text);
    return t;
}

Token symbol(std::string text) {
    Token t;
    t.kind = Token::Kind::symbol;
    t.text = std::move(text);
    return t;
}

Token string_lit(std::string text) {
    Token t;
    t.kind = Token::Kind::string;
    t.text = std::move(text);
    return t;
}

std::size_t find_matching(const Tokens& toks, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < toks.size(); ++i) {
        if (toks[i].is_symbol("(")) ++depth;
        if (toks[i].is_symbol(")")) {
            --depth;
            if (depth == 0) return i;
        }
    }
    return toks.size();
}

// Index of the top-level comma inside the group (open..close).
std::optional<std::size_t> top_level_comma(const Tokens& toks, std::size_t open,
                                           std::size_t close) {
    int depth = 0;
    for (std::size_t i = open + 1; i < close; ++i) {
        if (toks[i].is_symbol("(")) ++depth;
        if (toks[i].is_symbol(")")) --depth;
        if (depth == 0 && toks[i].is_symbol(",")) return i;
    }
    return std::nullopt;
}

std::string strftime_format_for_trunc(std::string unit) {
    std::transform(unit.begin(), unit.end(), unit.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (unit == "year") return "%Y-01-01 00:00:00";
    if (unit == "month") return "%Y-%m-01 00:00:00";
    if (unit == "day") return "%Y-%m-%d 00:00:00";
    if (unit == "hour") return "%Y-%m-%d %H:00:00";
    if (unit == "minute") return "%Y-%m-%d %H:%M:00";
    return {};
}

// TO_CHAR template -> strftime template (longest token first).
std::string strftime_format_for_to_char(const std::string& fmt) {
    static const std::pair<std::string_view, std::string_view> kMap[] = {
        {"YYYY", "%Y"}, {"HH24", "%H"}, {"MM", "%m"}, {"DD", "%d"},
        {"HH", "%H"},   {"MI", "%M"},   {"SS", "%S"},
    };
    std::string out;
    std::size_t i = 0;
    while (i < fmt.size()) {
        bool matched = false;
        for (const auto& [from, to] : kMap) {
            if (fmt.compare(i, from.size(), from) == 0) {
                out += to;
                i += from.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back(fmt[i]);
            ++i;
        }
    }
    return out;
}

std::string plural_unit(std::string unit) {
    std::transform(unit.begin(), unit.end(), unit.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!unit.empty() && unit.back() != 's') unit.push_back('s');
    return unit;
}

// Start index of the primary expression ending just before `end` (exclusive):
// a parenthesized group with an optional function-name head, or a dotted
// identifier chain, or a single literal.
std::size_t primary_start(const Tokens& toks, std::size_t end) {
    if (end == 0) return 0;
    std::size_t i = end - 1;
    if (toks[i].is_symbol(")")) {
        int depth = 0;
        while (true) {
            if (toks[i].is_symbol(")")) ++depth;
            if (toks[i].is_symbol("(")) {
                --depth;
                if (depth == 0) break;
            }
            if (i == 0) break;
            --i;
        }
        if (i > 0 && toks[i - 1].kind == Token::Kind::word) --i;
        return i;
    }
    if (toks[i].kind == Token::Kind::word || toks[i].kind == Token::Kind::number ||
        toks[i].kind == Token::Kind::string) {
        while (i >= 2 && toks[i - 1].is_symbol(".") && toks[i - 2].kind == Token::Kind::word) {
            i -= 2;
        }
        return i;
    }
    return end - 1;
}

void append_range(Tokens& out, const Tokens& src, std::size_t begin, std::size_t end) {
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(begin),
               src.begin() + static_cast<std::ptrdiff_t>(end));
}

std::string render(const Tokens& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        std::string piece;
        switch (t.kind) {
            case Token::Kind::word:
                if (t.quoted) {
                    piece = "\"";
                    for (char c : t.text) {
                        piece.push_back(c);
                        if (c == '"') piece.push_back('"');
                    }
                    piece += "\"";
                } else {
                    piece = t.text;
                }
                break;
            case Token::Kind::string: {
                piece = "'";
                for (char c : t.text) {
                    piece.push_back(c);
                    if (c == '\'') piece.push_back('\'');
                }
                piece += "'";
                break;
            }
            default:
                piece = t.text;
                break;
        }
        if (!out.empty()) {
            const char last = out.back();
            const bool no_space = piece == "," || piece == ")" || piece == "." ||
                                  piece == ";" || last == '(' || last == '.';
            if (!no_space) out.push_back(' ');
        }
        out += piece;
    }
    return out;
}

// One rewrite pass; returns true when anything changed.
bool rewrite_once(Tokens& toks, Timestamp now) {
    const std::string now_ts = format_timestamp(now);
    const std::string now_date = format_date(now);

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind != Token::Kind::word || t.quoted) continue;
        const std::string& u = t.upper;

        if (u == "ILIKE") {
            Tokens out;
            append_range(out, toks, 0, i);
            out.push_back(word("LIKE"));
            append_range(out, toks, i + 1, toks.size());
            toks = std::move(out);
            return true;
        }

        if (u == "NOW" && i + 2 < toks.size() && toks[i + 1].is_symbol("(") &&
            toks[i + 2].is_symbol(")")) {
            Tokens out;
            append_range(out, toks, 0, i);
            out.push_back(string_lit(now_ts));
            append_range(out, toks, i + 3, toks.size());
            toks = std::move(out);
            return true;
        }

        if (u == "CURRENT_TIMESTAMP" || u == "CURRENT_DATE" || u == "CURRENT_TIME") {
            std::size_t next = i + 1;
            if (next + 1 < toks.size() && toks[next].is_symbol("(") &&
                toks[next + 1].is_symbol(")")) {
                next += 2;
            }
            Tokens out;
            append_range(out, toks, 0, i);
            if (u == "CURRENT_DATE") {
                out.push_back(string_lit(now_date));
            } else if (u == "CURRENT_TIME") {
                out.push_back(string_lit(now_ts.substr(11)));
            } else {
                out.push_back(string_lit(now_ts));
            }
            append_range(out, toks, next, toks.size());
            toks = std::move(out);
            return true;
        }

        // <primary> +/- INTERVAL 'n unit'  ->  datetime(<primary>, '+/-n unit')
        if (u == "INTERVAL" && i >= 2 && i + 1 < toks.size() &&
            toks[i + 1].kind == Token::Kind::string &&
            (toks[i - 1].is_symbol("-") || toks[i - 1].is_symbol("+"))) {
            const std::string sign = toks[i - 1].text;
            const std::size_t lo = primary_start(toks, i - 1);
            Tokens out;
            append_range(out, toks, 0, lo);
            out.push_back(word("datetime"));
            out.push_back(symbol("("));
            append_range(out, toks, lo, i - 1);
            out.push_back(symbol(","));
            out.push_back(string_lit(sign + toks[i + 1].text));
            out.push_back(symbol(")"));
            append_range(out, toks, i + 2, toks.size());
            toks = std::move(out);
            return true;
        }

        if (u == "DATE_TRUNC" && i + 1 < toks.size() && toks[i + 1].is_symbol("(")) {
            const std::size_t close = find_matching(toks, i + 1);
            const auto comma = top_level_comma(toks, i + 1, close);
            if (close < toks.size() && comma &&
                toks[i + 2].kind == Token::Kind::string) {
                const std::string fmt = strftime_format_for_trunc(toks[i + 2].text);
                if (!fmt.empty()) {
                    Tokens out;
                    append_range(out, toks, 0, i);
                    out.push_back(word("strftime"));
                    out.push_back(symbol("("));
                    out.push_back(string_lit(fmt));
                    out.push_back(symbol(","));
                    append_range(out, toks, *comma + 1, close);
                    out.push_back(symbol(")"));
                    append_range(out, toks, close + 1, toks.size());
                    toks = std::move(out);
                    return true;
                }
            }
        }

        if (u == "TO_CHAR" && i + 1 < toks.size() && toks[i + 1].is_symbol("(")) {
            const std::size_t close = find_matching(toks, i + 1);
            const auto comma = top_level_comma(toks, i + 1, close);
            if (close < toks.size() && comma && *comma + 1 < close &&
                toks[*comma + 1].kind == Token::Kind::string) {
                Tokens out;
                append_range(out, toks, 0, i);
                out.push_back(word("strftime"));
                out.push_back(symbol("("));
                out.push_back(string_lit(strftime_format_for_to_char(toks[*comma + 1].text)));
                out.push_back(symbol(","));
                append_range(out, toks, i + 2, *comma);
                out.push_back(symbol(")"));
                append_range(out, toks, close + 1, toks.size());
                toks = std::move(out);
                return true;
            }
        }

        // DATEADD(unit, n, expr) -> datetime(expr, 'n units')
        if (u == "DATEADD" && i + 1 < toks.size() && toks[i + 1].is_symbol("(")) {
            const std::size_t close = find_matching(toks, i + 1);
            const auto c1 = top_level_comma(toks, i + 1, close);
            if (close < toks.size() && c1 && toks[i + 2].kind == Token::Kind::word) {
                // Second top-level comma.
                std::optional<std::size_t> c2;
                int depth = 0;
                for (std::size_t j = *c1 + 1; j < close; ++j) {
                    if (toks[j].is_symbol("(")) ++depth;
                    if (toks[j].is_symbol(")")) --depth;
                    if (depth == 0 && toks[j].is_symbol(",")) {
                        c2 = j;
                        break;
                    }
                }
                if (c2) {
                    std::string amount;
                    for (std::size_t j = *c1 + 1; j < *c2; ++j) {
                        amount += toks[j].text;
                    }
                    Tokens out;
                    append_range(out, toks, 0, i);
                    out.push_back(word("datetime"));
                    out.push_back(symbol("("));
                    append_range(out, toks, *c2 + 1, close);
                    out.push_back(symbol(","));
                    const std::string sign = (!amount.empty() && amount[0] == '-') ? "" : "+";
                    out.push_back(string_lit(sign + amount + " " + plural_unit(toks[i + 2].text)));
                    out.push_back(symbol(")"));
                    append_range(out, toks, close + 1, toks.size());
                    toks = std::move(out);
                    return true;
                }
            }
        }

        // DATE_SUB(expr, n) -> datetime(expr, '-n days')
        if (u == "DATE_SUB" && i + 1 < toks.size() && toks[i + 1].is_symbol("(")) {
            const std::size_t close = find_matching(toks, i + 1);
            const auto comma = top_level_comma(toks, i + 1, close);
            if (close < toks.size() && comma) {
                std::string amount;
                for (std::size_t j = *comma + 1; j < close; ++j) {
                    amount += toks[j].text;
                }
                Tokens out;
                append_range(out, toks, 0, i);
                out.push_back(word("datetime"));
                out.push_back(symbol("("));
                append_range(out, toks, i + 2, *comma);
                out.push_back(symbol(","));
                out.push_back(string_lit("-" + amount + " days"));
                out.push_back(symbol(")"));
                append_range(out, toks, close + 1, toks.size());
                toks = std::move(out);
                return true;
            }
        }
    }

    // catalog.schema.table -> table (three plain words joined by dots).
    for (std::size_t i = 0; i + 4 < toks.size(); ++i) {
        if (toks[i].kind == Token::Kind::word && toks[i + 1].is_symbol(".") &&
            toks[i + 2].kind == Token::Kind::word && toks[i + 3].is_symbol(".") &&
            toks[i + 4].kind == Token::Kind::word) {
            Tokens out;
            append_range(out, toks, 0, i);
            append_range(out, toks, i + 4, toks.size());
            toks = std::move(out);
            return true;
        }
    }

    return false;
}

}  // namespace

std::string normalize_for_sqlite(std::string_view sql, Timestamp now) {
    LexResult lexed = lex(sql);
    if (!lexed.ok) return std::string(sql);  // guardrail already rejected it

    Tokens toks = std::move(lexed.tokens);
    // Drop a trailing semicolon; the executor runs exactly one statement.
    while (!toks.empty() && toks.back().is_symbol(";")) toks.pop_back();

    int guard = 0;
    while (rewrite_once(toks, now) && guard++ < 10000) {
    }
    return render(toks);
}

}  // namespace askdb::sql
