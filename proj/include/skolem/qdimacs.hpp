#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "skolem/types.hpp"

namespace skolem {

enum class ParseErrorKind {
    MalformedHeader,
    LiteralOutOfRange,
    MissingTerminatingZero,
    ClauseCountMismatch,
    EmptyExistentialBlock,
    QuantifierOrder,
    DuplicateQuantified,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg),
          kind_(kind),
          line_(line) {}

    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }

private:
    ParseErrorKind kind_;
    int line_;
};

// QDIMACS per QBFLIB conventions: `c` comments, `p cnf <nvars> <nclauses>`
// header, `a`/`e` quantifier lines (universal block first), 0-terminated
// clauses. Variables declared in the header but listed in no quantifier
// line are treated as universal. Tautological clauses are dropped; the
// header clause count is validated against the raw clause count.
QbfSpec parse_qdimacs(std::istream& in);
QbfSpec parse_qdimacs(const std::string& text);
QbfSpec parse_qdimacs_file(const std::string& path);

void serialize_qdimacs(const QbfSpec& spec, std::ostream& out);
std::string serialize_qdimacs(const QbfSpec& spec);

}  // namespace skolem
