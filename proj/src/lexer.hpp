#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "remodyc/ast.hpp"

namespace remodyc::detail {

enum class Tok {
    ident,
    number,
    unit,        // bracketed unit text; `text` holds the content without brackets
    prime,       // '
    possessive,  // 's
    arrow,       // ->
    lparen,
    rparen,
    comma,
    plus,
    minus,
    star,
    slash,
    caret,
    eq,
    lt,
    le,
    gt,
    ge,
    dot,  // definition terminator
    ddt,  // d/dt
    end,
};

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    std::size_t offset = 0;
    double number = 0.0;
};

/// Maps byte offsets to 1-based line/column.
class LineMap {
public:
    explicit LineMap(std::string_view text);
    SourcePos at(std::size_t offset) const;

private:
    std::size_t size_;
    std::vector<std::size_t> lineStarts_;
};

/// Splits model text into tokens. '#' starts a comment running to the end
/// of the line. Throws SourceError on characters outside the language.
std::vector<Token> tokenize(std::string_view text);

std::string_view describe(const Token& t);

}  // namespace remodyc::detail
