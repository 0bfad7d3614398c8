#include "skolem/qdimacs.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace skolem {

QbfSpec parse_qdimacs(std::istream& in) {
    // Line-oriented scan: comments and the header are whole lines; quantifier
    // prefixes are whole lines; clause literals may span lines, so clauses are
    // read from a token stream fed by the remaining lines.
    std::string line;
    int lineno = 0;
    long nvars = -1, nclauses = -1;
    int header_line = 0;

    std::vector<Var> a_block;
    std::vector<Var> e_block;
    std::set<Var> quantified;
    bool seen_e = false;
    bool in_prefix = true;

    std::vector<std::vector<Lit>> raw_clauses;
    std::vector<Lit> cur;
    bool clause_open = false;
    int clause_open_line = 0;

    auto read_quant_line = [&](const std::string& body, bool existential) {
        std::istringstream ss(body);
        long v;
        bool terminated = false;
        while (ss >> v) {
            if (v == 0) { terminated = true; break; }
            if (v < 0 || v > nvars)
                throw ParseError(ParseErrorKind::LiteralOutOfRange, lineno,
                                 "quantified variable out of range: " + std::to_string(v));
            if (!quantified.insert(static_cast<Var>(v)).second)
                throw ParseError(ParseErrorKind::DuplicateQuantified, lineno,
                                 "variable quantified twice: " + std::to_string(v));
            (existential ? e_block : a_block).push_back(static_cast<Var>(v));
        }
        if (!terminated)
            throw ParseError(ParseErrorKind::MissingTerminatingZero, lineno,
                             "quantifier line lacks terminating 0");
    };

    while (std::getline(in, line)) {
        ++lineno;
        size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        char c0 = line[i];
        if (c0 == 'c') continue;
        if (c0 == 'p') {
            std::istringstream ss(line.substr(i));
            std::string p, fmt;
            if (!(ss >> p >> fmt >> nvars >> nclauses) || p != "p" || fmt != "cnf" || nvars < 0 || nclauses < 0)
                throw ParseError(ParseErrorKind::MalformedHeader, lineno, "malformed header: " + line);
            std::string rest;
            if (ss >> rest)
                throw ParseError(ParseErrorKind::MalformedHeader, lineno, "trailing tokens in header");
            header_line = lineno;
            continue;
        }
        if (nvars < 0)
            throw ParseError(ParseErrorKind::MalformedHeader, lineno, "content before 'p cnf' header");
        if (c0 == 'a' || c0 == 'e') {
            if (!in_prefix)
                throw ParseError(ParseErrorKind::QuantifierOrder, lineno, "quantifier line after clauses");
            if (c0 == 'a' && seen_e)
                throw ParseError(ParseErrorKind::QuantifierOrder, lineno,
                                 "universal block after existential block");
            if (c0 == 'e') seen_e = true;
            read_quant_line(line.substr(i + 1), c0 == 'e');
            continue;
        }
        // Clause data; may span several lines until its 0.
        in_prefix = false;
        std::istringstream ss(line.substr(i));
        long v;
        while (ss >> v) {
            if (!clause_open) {
                clause_open = true;
                clause_open_line = lineno;
                cur.clear();
            }
            if (v == 0) {
                raw_clauses.push_back(cur);
                clause_open = false;
                continue;
            }
            long av = v < 0 ? -v : v;
            if (av > nvars)
                throw ParseError(ParseErrorKind::LiteralOutOfRange, lineno,
                                 "literal out of range: " + std::to_string(v));
            cur.push_back(Lit::from_dimacs(static_cast<int>(v)));
        }
        if (!ss.eof()) {
            ss.clear();
            std::string bad;
            ss >> bad;
            throw ParseError(ParseErrorKind::LiteralOutOfRange, lineno, "bad literal token: '" + bad + "'");
        }
    }

    if (nvars < 0) throw ParseError(ParseErrorKind::MalformedHeader, lineno, "missing 'p cnf' header");
    if (clause_open)
        throw ParseError(ParseErrorKind::MissingTerminatingZero, clause_open_line,
                         "clause lacks terminating 0");
    if (static_cast<long>(raw_clauses.size()) != nclauses)
        throw ParseError(ParseErrorKind::ClauseCountMismatch, lineno,
                         "header declares " + std::to_string(nclauses) + " clauses, found " +
                             std::to_string(raw_clauses.size()));
    if (e_block.empty())
        throw ParseError(ParseErrorKind::EmptyExistentialBlock, header_line ? header_line : lineno,
                         "no existential variables declared");

    QbfSpec spec;
    spec.matrix.num_vars = static_cast<Var>(nvars);
    for (auto& lits : raw_clauses) spec.matrix.add_clause(std::move(lits));

    // Free variables (in the header range but in no quantifier line) are
    // universal: the synthesized functions must work for every value.
    for (Var v = 1; v <= static_cast<Var>(nvars); ++v)
        if (!quantified.count(v)) a_block.push_back(v);
    std::sort(a_block.begin(), a_block.end());
    spec.x_vars = std::move(a_block);
    spec.y_vars = std::move(e_block);
    return spec;
}

QbfSpec parse_qdimacs(const std::string& text) {
    std::istringstream ss(text);
    return parse_qdimacs(ss);
}

QbfSpec parse_qdimacs_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return parse_qdimacs(f);
}

void serialize_qdimacs(const QbfSpec& spec, std::ostream& out) {
    out << "p cnf " << spec.matrix.num_vars << ' ' << spec.matrix.clauses.size() << '\n';
    if (!spec.x_vars.empty()) {
        out << 'a';
        for (Var v : spec.x_vars) out << ' ' << v;
        out << " 0\n";
    }
    out << 'e';
    for (Var v : spec.y_vars) out << ' ' << v;
    out << " 0\n";
    for (const Clause& c : spec.matrix.clauses) {
        for (Lit l : c.lits()) out << l.to_dimacs() << ' ';
        out << "0\n";
    }
}

std::string serialize_qdimacs(const QbfSpec& spec) {
    std::ostringstream ss;
    serialize_qdimacs(spec, ss);
    return ss.str();
}

}  // namespace skolem
