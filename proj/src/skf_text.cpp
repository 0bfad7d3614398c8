#include "skolem/skf_text.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace skolem {

void write_skolem(const QbfSpec& spec, const ExprArena& arena, const std::map<Var, ExprRef>& psi,
                  std::ostream& out) {
    for (Var y : spec.y_vars) {
        out << 'y' << y << " := ";
        arena.print(psi.at(y), out);
        out << '\n';
    }
}

namespace {

struct ExprParser {
    ExprParser(const std::string& text, const QbfSpec& spec, ExprArena& arena, int line)
        : s(text), spec(spec), arena(arena), line(line) {}

    ExprRef parse() {
        ExprRef e = expr();
        skip_ws();
        if (pos != s.size()) fail("trailing characters after expression");
        return e;
    }

    ExprRef expr() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        if (s[pos] == '(') {
            ++pos;
            std::string op = word();
            std::vector<ExprRef> args;
            for (;;) {
                skip_ws();
                if (pos >= s.size()) fail("missing ')'");
                if (s[pos] == ')') {
                    ++pos;
                    break;
                }
                args.push_back(expr());
            }
            if (op == "not") {
                if (args.size() != 1) fail("'not' takes exactly one argument");
                return arena.negate(args[0]);
            }
            if (op == "and") {
                if (args.size() < 2) fail("'and' takes at least two arguments");
                return arena.mk_and(std::move(args));
            }
            if (op == "or") {
                if (args.size() < 2) fail("'or' takes at least two arguments");
                return arena.mk_or(std::move(args));
            }
            fail("unknown operator '" + op + "'");
        }
        std::string w = word();
        if (w == "true") return arena.const1();
        if (w == "false") return arena.const0();
        if (w.size() > 1 && w[0] == 'x') {
            Var v = 0;
            for (size_t i = 1; i < w.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(w[i]))) fail("bad variable token '" + w + "'");
                v = v * 10 + (w[i] - '0');
            }
            if (!spec.is_x(v))
                fail("variable x" + std::to_string(v) + " is not universal in the specification");
            return arena.var(v);
        }
        fail("bad token '" + w + "'");
        return 0;
    }

    std::string word() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' &&
               s[pos] != ')')
            ++pos;
        if (start == pos) fail("expected a token");
        return s.substr(start, pos - start);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw SkfFormatError("line " + std::to_string(line) + ": " + msg);
    }

    const std::string& s;
    const QbfSpec& spec;
    ExprArena& arena;
    int line;
    size_t pos = 0;
};

}  // namespace

std::map<Var, ExprRef> parse_skolem(std::istream& in, const QbfSpec& spec, ExprArena& arena) {
    std::map<Var, ExprRef> psi;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        size_t sep = line.find(":=");
        if (sep == std::string::npos)
            throw SkfFormatError("line " + std::to_string(lineno) + ": expected '<y-var> := <expr>'");
        std::string lhs = line.substr(i, sep - i);
        while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back()))) lhs.pop_back();
        if (lhs.size() < 2 || lhs[0] != 'y')
            throw SkfFormatError("line " + std::to_string(lineno) + ": bad left-hand side '" + lhs + "'");
        Var y = 0;
        for (size_t k = 1; k < lhs.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(lhs[k])))
                throw SkfFormatError("line " + std::to_string(lineno) + ": bad left-hand side '" + lhs + "'");
            y = y * 10 + (lhs[k] - '0');
        }
        if (!spec.is_y(y))
            throw SkfFormatError("line " + std::to_string(lineno) + ": y" + std::to_string(y) +
                                 " is not existential in the specification");
        if (psi.count(y))
            throw SkfFormatError("line " + std::to_string(lineno) + ": duplicate function for y" +
                                 std::to_string(y));
        psi[y] = ExprParser(line.substr(sep + 2), spec, arena, lineno).parse();
    }
    for (Var y : spec.y_vars)
        if (!psi.count(y))
            throw SkfFormatError("missing function for existential variable y" + std::to_string(y));
    return psi;
}

}  // namespace skolem
