#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "skolem/expr.hpp"
#include "skolem/types.hpp"

namespace skolem {

// One function per line, `y<i> := <expr>`, expressions in parenthesized
// prefix notation over and/or/not/true/false/x<i>. Blank lines and lines
// starting with '#' are skipped on input. Grammar in docs/skolem-format.md.
void write_skolem(const QbfSpec& spec, const ExprArena& arena, const std::map<Var, ExprRef>& psi,
                  std::ostream& out);

class SkfFormatError : public std::runtime_error {
public:
    explicit SkfFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses and validates against the spec: every existential variable needs
// exactly one function, and bodies may reference universal variables only.
std::map<Var, ExprRef> parse_skolem(std::istream& in, const QbfSpec& spec, ExprArena& arena);

}  // namespace skolem
