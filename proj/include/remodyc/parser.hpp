#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "remodyc/ast.hpp"

namespace remodyc {

/// First syntax (or duplicate-name) error found in a model text.
class SourceError : public std::runtime_error {
public:
    SourceError(std::string message, std::uint32_t line, std::uint32_t column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          message_(std::move(message)),
          line_(line),
          column_(column) {}

    const std::string& message() const { return message_; }
    std::uint32_t line() const { return line_; }
    std::uint32_t column() const { return column_; }

private:
    std::string message_;
    std::uint32_t line_;
    std::uint32_t column_;
};

/// Parses a complete model. Throws SourceError.
Model parseModel(std::string_view text);

/// Parses a single expression, e.g. "10 [km] / 3 [h]". Throws SourceError.
Expression parseExpression(std::string_view text);

bool isReservedWord(std::string_view word);

}  // namespace remodyc
