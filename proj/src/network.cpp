#include "dynjt/network.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dynjt {

BeliefNetwork::BeliefNetwork(std::vector<Variable> variables, std::vector<Cpt> cpts)
    : vars_(std::move(variables)), cpts_(std::move(cpts)) {
    const int n = static_cast<int>(vars_.size());
    if (static_cast<int>(cpts_.size()) != n)
        throw std::invalid_argument("belief network needs exactly one CPT per variable");
    for (int i = 0; i < n; ++i) {
        vars_[static_cast<std::size_t>(i)].id = i;
        const Cpt& c = cpts_[static_cast<std::size_t>(i)];
        if (c.child != i) throw std::invalid_argument("CPT list must be ordered by child id");
        for (VarId p : c.parents)
            if (p < 0 || p >= n) throw std::invalid_argument("CPT parent id out of range");
    }
    children_.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (VarId p : cpts_[static_cast<std::size_t>(i)].parents)
            children_[static_cast<std::size_t>(p)].push_back(i);
    for (auto& c : children_) canonicalize(c);
}

std::optional<VarId> BeliefNetwork::find(const std::string& name) const {
    for (const auto& v : vars_)
        if (v.name == name) return v.id;
    return std::nullopt;
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// whitespace-separated tokens per line; '[' ']' ':' are their own tokens and
// '#' kills the rest of the line
std::vector<std::vector<Token>> tokenize(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::vector<Token> cur;
    int line = 1, col = 1;
    std::string tok;
    int tokCol = 0;
    auto flush = [&] {
        if (!tok.empty()) {
            cur.push_back({tok, line, tokCol});
            tok.clear();
        }
    };
    auto endline = [&] {
        flush();
        if (!cur.empty()) lines.push_back(std::move(cur));
        cur.clear();
        ++line;
        col = 1;
    };
    bool comment = false;
    for (char ch : text) {
        if (ch == '\n') {
            comment = false;
            endline();
            continue;
        }
        if (comment) {
            ++col;
            continue;
        }
        if (ch == '#') {
            comment = true;
            flush();
            ++col;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            flush();
        } else if (ch == '[' || ch == ']' || ch == ':') {
            flush();
            cur.push_back({std::string(1, ch), line, col});
        } else {
            if (tok.empty()) tokCol = col;
            tok += ch;
        }
        ++col;
    }
    endline();
    return lines;
}

double parse_probability(const Token& t) {
    const char* s = t.text.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ParseError("expected a probability, got '" + t.text + "'", t.line, t.col);
    if (!(v >= 0.0 && v <= 1.0))
        throw ParseError("probability out of [0, 1]: '" + t.text + "'", t.line, t.col);
    return v;
}

long parse_integer(const Token& t) {
    const char* s = t.text.c_str();
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0')
        throw ParseError("expected an integer, got '" + t.text + "'", t.line, t.col);
    return v;
}

constexpr double kRowTolerance = 1e-9;

}  // namespace

BeliefNetwork parse_network(const std::string& text) {
    const auto lines = tokenize(text);

    std::vector<Variable> vars;
    std::unordered_map<std::string, VarId> ids;
    std::vector<Cpt> cpts;
    std::vector<int> cptLine;   // declaration line per child, 0 = missing
    bool sawCpt = false;
    int lastLine = 1;

    for (const auto& ln : lines) {
        const Token& kw = ln[0];
        lastLine = kw.line;
        if (kw.text == "var") {
            if (sawCpt) throw ParseError("var lines must precede all cpt lines", kw.line, kw.col);
            if (ln.size() != 3) throw ParseError("expected: var <name> <cardinality>", kw.line, kw.col);
            if (!valid_name(ln[1].text))
                throw ParseError("invalid variable name '" + ln[1].text + "'", ln[1].line, ln[1].col);
            if (ids.count(ln[1].text))
                throw ParseError("duplicate variable '" + ln[1].text + "'", ln[1].line, ln[1].col);
            const long card = parse_integer(ln[2]);
            if (card < 2) throw ParseError("cardinality must be at least 2", ln[2].line, ln[2].col);
            const VarId id = static_cast<VarId>(vars.size());
            ids.emplace(ln[1].text, id);
            vars.push_back({id, ln[1].text, static_cast<int>(card)});
        } else if (kw.text == "cpt") {
            if (!sawCpt) {
                sawCpt = true;
                cpts.assign(vars.size(), {});
                cptLine.assign(vars.size(), 0);
                for (std::size_t i = 0; i < vars.size(); ++i) cpts[i].child = static_cast<VarId>(i);
            }
            if (ln.size() < 4) throw ParseError("expected: cpt <child> [<parents>] : <probabilities>", kw.line, kw.col);
            auto lookup = [&](const Token& t) -> VarId {
                auto it = ids.find(t.text);
                if (it == ids.end())
                    throw ParseError("unknown variable '" + t.text + "'", t.line, t.col);
                return it->second;
            };
            const VarId child = lookup(ln[1]);
            if (cptLine[static_cast<std::size_t>(child)] != 0)
                throw ParseError("duplicate cpt for '" + ln[1].text + "'", ln[1].line, ln[1].col);
            std::size_t k = 2;
            if (ln[k].text != "[") throw ParseError("expected '['", ln[k].line, ln[k].col);
            ++k;
            std::vector<VarId> parents;
            while (k < ln.size() && ln[k].text != "]") {
                const VarId p = lookup(ln[k]);
                if (p == child) throw ParseError("variable cannot be its own parent", ln[k].line, ln[k].col);
                for (VarId q : parents)
                    if (q == p) throw ParseError("duplicate parent '" + ln[k].text + "'", ln[k].line, ln[k].col);
                parents.push_back(p);
                ++k;
            }
            if (k >= ln.size()) throw ParseError("missing ']'", kw.line, kw.col);
            ++k;
            if (k >= ln.size() || ln[k].text != ":")
                throw ParseError("expected ':' after parent list", kw.line, kw.col);
            ++k;

            std::size_t expected = static_cast<std::size_t>(vars[static_cast<std::size_t>(child)].cardinality);
            for (VarId p : parents) {
                expected *= static_cast<std::size_t>(vars[static_cast<std::size_t>(p)].cardinality);
                if (expected > (std::size_t{1} << 28))
                    throw ParseError("CPT too large", kw.line, kw.col);
            }
            std::vector<double> table;
            table.reserve(expected);
            for (; k < ln.size(); ++k) table.push_back(parse_probability(ln[k]));
            if (table.size() != expected)
                throw ParseError("cpt for '" + ln[1].text + "' has " + std::to_string(table.size()) +
                                     " entries, expected " + std::to_string(expected),
                                 kw.line, kw.col);

            const std::size_t cc = static_cast<std::size_t>(vars[static_cast<std::size_t>(child)].cardinality);
            for (std::size_t row = 0; row * cc < table.size(); ++row) {
                double sum = 0.0;
                for (std::size_t s = 0; s < cc; ++s) sum += table[row * cc + s];
                if (std::fabs(sum - 1.0) > kRowTolerance)
                    throw ParseError("cpt row " + std::to_string(row) + " of '" + ln[1].text +
                                         "' sums to " + std::to_string(sum),
                                     kw.line, kw.col);
            }
            cpts[static_cast<std::size_t>(child)].parents = std::move(parents);
            cpts[static_cast<std::size_t>(child)].table = std::move(table);
            cptLine[static_cast<std::size_t>(child)] = kw.line;
        } else {
            throw ParseError("unknown directive '" + kw.text + "'", kw.line, kw.col);
        }
    }

    if (!sawCpt && !vars.empty())
        throw ParseError("missing cpt for '" + vars[0].name + "'", lastLine, 1);
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (cptLine[i] == 0)
            throw ParseError("missing cpt for '" + vars[i].name + "'", lastLine, 1);

    // acyclicity (Kahn); report some variable on a cycle
    {
        const int n = static_cast<int>(vars.size());
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (const auto& c : cpts) indeg[static_cast<std::size_t>(c.child)] = static_cast<int>(c.parents.size());
        std::vector<VarId> stack;
        for (int i = 0; i < n; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
        int seen = 0;
        std::vector<std::vector<VarId>> kids(static_cast<std::size_t>(n));
        for (const auto& c : cpts)
            for (VarId p : c.parents) kids[static_cast<std::size_t>(p)].push_back(c.child);
        while (!stack.empty()) {
            const VarId v = stack.back();
            stack.pop_back();
            ++seen;
            for (VarId c : kids[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
        }
        if (seen != n) {
            for (int i = 0; i < n; ++i)
                if (indeg[static_cast<std::size_t>(i)] > 0)
                    throw ParseError("cycle detected involving '" + vars[static_cast<std::size_t>(i)].name + "'",
                                     cptLine[static_cast<std::size_t>(i)], 1);
        }
    }

    return BeliefNetwork(std::move(vars), std::move(cpts));
}

BeliefNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

std::string serialize_network(const BeliefNetwork& net) {
    std::string out;
    char buf[64];
    for (const auto& v : net.variables()) {
        out += "var ";
        out += v.name;
        std::snprintf(buf, sizeof buf, " %d\n", v.cardinality);
        out += buf;
    }
    for (const auto& c : net.cpts()) {
        out += "cpt ";
        out += net.variable(c.child).name;
        out += " [";
        for (std::size_t k = 0; k < c.parents.size(); ++k) {
            if (k) out += ' ';
            out += net.variable(c.parents[k]).name;
        }
        out += "] :";
        for (double p : c.table) {
            std::snprintf(buf, sizeof buf, " %.17g", p);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void save_network(const BeliefNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << serialize_network(net);
}

IdSet family(const BeliefNetwork& net, VarId i) {
    IdSet f = net.cpt(i).parents;  // .at inside cpt() throws on bad id
    f.push_back(i);
    canonicalize(f);
    return f;
}

std::vector<std::string> validate_network(const BeliefNetwork& net) {
    std::vector<std::string> out;
    const int n = net.num_vars();

    std::unordered_map<std::string, int> names;
    for (const auto& v : net.variables()) {
        if (v.cardinality < 2)
            out.push_back("variable '" + v.name + "' has cardinality " + std::to_string(v.cardinality));
        if (!valid_name(v.name)) out.push_back("invalid variable name '" + v.name + "'");
        if (++names[v.name] == 2) out.push_back("duplicate variable name '" + v.name + "'");
    }

    for (const auto& c : net.cpts()) {
        const std::string& cn = net.variable(c.child).name;
        std::size_t expected = static_cast<std::size_t>(net.cardinality(c.child));
        bool parentsOk = true;
        IdSet seen;
        for (VarId p : c.parents) {
            if (p == c.child) {
                out.push_back("variable '" + cn + "' lists itself as a parent");
                parentsOk = false;
            }
            if (contains(seen, p)) {
                out.push_back("cpt of '" + cn + "' has duplicate parent '" + net.variable(p).name + "'");
                parentsOk = false;
            }
            seen.push_back(p);
            canonicalize(seen);
            expected *= static_cast<std::size_t>(net.cardinality(p));
        }
        if (c.table.size() != expected) {
            out.push_back("cpt of '" + cn + "' has " + std::to_string(c.table.size()) +
                          " entries, expected " + std::to_string(expected));
            continue;
        }
        for (std::size_t k = 0; k < c.table.size(); ++k) {
            if (!(c.table[k] >= 0.0 && c.table[k] <= 1.0)) {
                out.push_back("cpt of '" + cn + "' entry " + std::to_string(k) + " is out of [0, 1]");
                break;
            }
        }
        if (parentsOk) {
            const std::size_t cc = static_cast<std::size_t>(net.cardinality(c.child));
            for (std::size_t row = 0; row * cc < c.table.size(); ++row) {
                double sum = 0.0;
                for (std::size_t s = 0; s < cc; ++s) sum += c.table[row * cc + s];
                if (std::fabs(sum - 1.0) > kRowTolerance) {
                    out.push_back("cpt of '" + cn + "' row " + std::to_string(row) + " sums to " +
                                  std::to_string(sum));
                    break;
                }
            }
        }
    }

    // acyclicity (distinct parents only, so a duplicate-parent defect does not
    // masquerade as a cycle)
    {
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (const auto& c : net.cpts()) {
            IdSet distinct = c.parents;
            canonicalize(distinct);
            indeg[static_cast<std::size_t>(c.child)] = static_cast<int>(distinct.size());
        }
        std::vector<VarId> stack;
        for (int i = 0; i < n; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
        int seen = 0;
        while (!stack.empty()) {
            const VarId v = stack.back();
            stack.pop_back();
            ++seen;
            for (VarId c : net.children(v))
                if (--indeg[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
        }
        if (seen != n) {
            std::string cyc = "parent relation has a cycle involving:";
            for (int i = 0; i < n; ++i)
                if (indeg[static_cast<std::size_t>(i)] > 0) cyc += " " + net.variable(i).name;
            out.push_back(cyc);
        }
    }

    return out;
}

}  // namespace dynjt
