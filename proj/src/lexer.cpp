#include "lexer.hpp"

#include <algorithm>
#include <string>

#include "remodyc/parser.hpp"
#include "remodyc/text.hpp"

namespace remodyc::detail {

namespace {

bool isIdentStart(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool isDigit(char c) { return c >= '0' && c <= '9'; }
bool isIdentChar(char c) { return isIdentStart(c) || isDigit(c); }

}  // namespace

LineMap::LineMap(std::string_view text) : size_(text.size()) {
    lineStarts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') lineStarts_.push_back(i + 1);
}

SourcePos LineMap::at(std::size_t offset) const {
    // Positions past the end are pulled back onto the last character so that
    // every reported position lies inside the text.
    if (size_ == 0) return {1, 1};
    offset = std::min(offset, size_ - 1);
    auto it = std::upper_bound(lineStarts_.begin(), lineStarts_.end(), offset);
    const auto line = static_cast<std::size_t>(it - lineStarts_.begin());
    const std::size_t col = offset - lineStarts_[line - 1] + 1;
    return {static_cast<std::uint32_t>(line), static_cast<std::uint32_t>(col)};
}

std::vector<Token> tokenize(std::string_view text) {
    const LineMap lines(text);
    auto fail = [&](const std::string& msg, std::size_t offset) -> SourceError {
        const SourcePos p = lines.at(offset);
        return SourceError(msg, p.line, p.column);
    };

    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto emit = [&](Tok kind, std::size_t start, std::size_t len) {
        out.push_back(Token{kind, text.substr(start, len), start, 0.0});
        i = start + len;
    };

    while (i < n) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i;

        if (c == 'd' && text.substr(i, 4) == "d/dt" && (i + 4 >= n || !isIdentChar(text[i + 4]))) {
            emit(Tok::ddt, start, 4);
            continue;
        }
        if (isIdentStart(c)) {
            while (i < n && isIdentChar(text[i])) ++i;
            emit(Tok::ident, start, i - start);
            continue;
        }
        if (isDigit(c)) {
            while (i < n && isDigit(text[i])) ++i;
            if (i + 1 < n && text[i] == '.' && isDigit(text[i + 1])) {
                ++i;
                while (i < n && isDigit(text[i])) ++i;
            }
            if (i < n && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < n && isDigit(text[j])) {
                    i = j;
                    while (i < n && isDigit(text[i])) ++i;
                }
            }
            const auto value = parseDouble(text.substr(start, i - start));
            if (!value) throw fail("number out of range", start);
            emit(Tok::number, start, i - start);
            out.back().number = *value;
            continue;
        }
        switch (c) {
            case '[': {
                std::size_t j = i + 1;
                while (j < n && text[j] != ']' && text[j] != '\n') ++j;
                if (j >= n || text[j] != ']') throw fail("unterminated unit, expected ']'", start);
                out.push_back(Token{Tok::unit, text.substr(i + 1, j - i - 1), start, 0.0});
                i = j + 1;
                continue;
            }
            case '\'':
                if (i + 1 < n && text[i + 1] == 's' && (i + 2 >= n || !isIdentChar(text[i + 2])))
                    emit(Tok::possessive, start, 2);
                else
                    emit(Tok::prime, start, 1);
                continue;
            case '-':
                if (i + 1 < n && text[i + 1] == '>')
                    emit(Tok::arrow, start, 2);
                else
                    emit(Tok::minus, start, 1);
                continue;
            case '<':
                if (i + 1 < n && text[i + 1] == '=')
                    emit(Tok::le, start, 2);
                else
                    emit(Tok::lt, start, 1);
                continue;
            case '>':
                if (i + 1 < n && text[i + 1] == '=')
                    emit(Tok::ge, start, 2);
                else
                    emit(Tok::gt, start, 1);
                continue;
            case '(': emit(Tok::lparen, start, 1); continue;
            case ')': emit(Tok::rparen, start, 1); continue;
            case ',': emit(Tok::comma, start, 1); continue;
            case '+': emit(Tok::plus, start, 1); continue;
            case '*': emit(Tok::star, start, 1); continue;
            case '/': emit(Tok::slash, start, 1); continue;
            case '^': emit(Tok::caret, start, 1); continue;
            case '=': emit(Tok::eq, start, 1); continue;
            case '.': emit(Tok::dot, start, 1); continue;
            default: break;
        }
        throw fail(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back(Token{Tok::end, {}, n, 0.0});
    return out;
}

std::string_view describe(const Token& t) {
    switch (t.kind) {
        case Tok::end: return "end of input";
        case Tok::unit: return "unit";
        case Tok::number: return "number";
        default: return t.text;
    }
}

}  // namespace remodyc::detail
