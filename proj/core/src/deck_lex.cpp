#include "siopt/deck.hpp"
#include "siopt/errors.hpp"

#include <cctype>

namespace siopt::deck {

namespace {

char first_nonspace(std::string_view line) {
    for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) return c;
    }
    return '\0';
}

bool word_start(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '%' ||
           c == '/' || c == '\\';
}

int paren_balance(std::string_view s) {
    int bal = 0;
    for (char c : s) {
        if (c == '(') ++bal;
        else if (c == ')') --bal;
    }
    return bal;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Tokenizes one (continuation-joined) line segment into `st`.
void lex_segment(std::string_view seg, int line, Statement& st, const TokenizeOptions& opts) {
    size_t i = 0;
    const size_t n = seg.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(seg[i]))) ++i;
    };

    auto read_quoted = [&](char open) -> std::string {
        const char close = open;   // ' or `
        ++i;                       // opening quote
        size_t start = i;
        while (i < n && seg[i] != close) ++i;
        if (i >= n) throw LexError("unterminated quote", line);
        std::string body(seg.substr(start, i - start));
        ++i;   // closing quote
        return body;
    };

    while (true) {
        skip_ws();
        if (i >= n) break;
        char c = seg[i];

        if (c == '\'' || c == '`') {
            st.tokens.push_back({TokKind::Expr, read_quoted(c), line});
            continue;
        }

        if (word_start(c) || ((c == '-' || c == '+') && i + 1 < n &&
                              (std::isdigit(static_cast<unsigned char>(seg[i + 1])) ||
                               seg[i + 1] == '.'))) {
            size_t start = i;
            if (c == '-' || c == '+') ++i;
            while (i < n && word_char(seg[i])) {
                // keep exponent signs attached: "1e-5"
                if ((seg[i] == 'e' || seg[i] == 'E') && i + 1 < n &&
                    (seg[i + 1] == '+' || seg[i + 1] == '-') && i + 2 < n &&
                    std::isdigit(static_cast<unsigned char>(seg[i + 2]))) {
                    i += 2;
                }
                ++i;
            }
            std::string word = lowercase(seg.substr(start, i - start));

            if (word == "par") {
                // par('expr'), par(`expr`), or the paper's par`(expr`) form.
                size_t save = i;
                skip_ws();
                bool opened = false;
                if (i < n && seg[i] == '(') {
                    ++i;
                    skip_ws();
                    opened = true;
                }
                if (i < n && (seg[i] == '\'' || seg[i] == '`')) {
                    std::string body = read_quoted(seg[i]);
                    int bal = paren_balance(body);
                    while (bal > 0) {
                        skip_ws();
                        if (i < n && seg[i] == ')') {
                            body += ')';
                            ++i;
                            --bal;
                        } else {
                            throw LexError("unbalanced parentheses in par(...) expression", line);
                        }
                    }
                    if (opened) {
                        skip_ws();
                        if (i < n && seg[i] == ')') ++i;
                        else throw LexError("missing ')' after par(...) expression", line);
                    }
                    st.tokens.push_back({TokKind::Word, "par", line});
                    st.tokens.push_back({TokKind::Expr, body, line});
                    continue;
                }
                i = save;   // bare identifier named "par"
            }

            st.tokens.push_back({TokKind::Word, word, line});
            continue;
        }

        if (c == '(' || c == ')' || c == ',' || c == '=') {
            st.tokens.push_back({TokKind::Punct, std::string(1, c), line});
            ++i;
            continue;
        }

        if (opts.strict) throw LexError(std::string("unexpected character '") + c + "'", line);
        ++i;   // lenient: drop it
    }
}

} // namespace

std::vector<Statement> tokenize(std::string_view text, const TokenizeOptions& opts) {
    std::vector<Statement> statements;
    bool have_current = false;

    size_t pos = 0;
    int line = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos)
                                   ? text.substr(pos)
                                   : text.substr(pos, eol - pos);
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        const char head = first_nonspace(raw);
        if (head == '\0' || head == '*') {
            // blank or comment
        } else if (head == '+') {
            size_t plus = raw.find('+');
            if (!have_current) {
                if (opts.strict) throw LexError("continuation line without a statement", line);
            } else {
                lex_segment(raw.substr(plus + 1), line, statements.back(), opts);
            }
        } else if (head == '.' || std::isalpha(static_cast<unsigned char>(head))) {
            statements.push_back({{}, line});
            lex_segment(raw, line, statements.back(), opts);
            have_current = true;
        } else {
            if (opts.strict) throw LexError("unrecognized line", line);
        }

        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }

    // drop statements that lexed to nothing
    std::vector<Statement> out;
    out.reserve(statements.size());
    for (auto& st : statements) {
        if (!st.tokens.empty()) out.push_back(std::move(st));
    }
    return out;
}

} // namespace siopt::deck
