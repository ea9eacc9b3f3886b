#include <fraisse/formulas.hpp>

#include <fraisse/field_class.hpp>

#include <algorithm>

namespace fraisse {

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& expected) const {
        throw UsageError("parse error at position " + std::to_string(pos) + ": expected " +
                         expected);
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        if (pos >= text.size()) fail("more input");
        return text[pos];
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("'") + c + "'");
        ++pos;
    }
    std::string token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (pos == start) fail("a token");
        return text.substr(start, pos - start);
    }
    Label number() {
        std::string t = token();
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                pos -= t.size();
                fail("a constant label");
            }
        return std::stoull(t);
    }

    QfSentence sentence() {
        if (peek() != '(') fail("'('");
        ++pos;
        std::size_t head_pos = pos;
        std::string head = token();
        QfSentence node;
        if (head == "not" || head == "and" || head == "or") {
            node.kind = head == "not"   ? QfSentence::Kind::neg
                        : head == "and" ? QfSentence::Kind::conj
                                        : QfSentence::Kind::disj;
            while (peek() != ')') node.children.push_back(sentence());
            if (node.children.empty()) fail("at least one operand of " + head);
            if (head == "not" && node.children.size() != 1) {
                pos = head_pos;
                fail("exactly one operand of not");
            }
        } else {
            node.kind = QfSentence::Kind::atom;
            node.symbol = head;
            std::size_t arity;
            if (head == "=" || head == "E" || head == "<")
                arity = 2;
            else if (head == "sum" || head == "add" || head == "mul")
                arity = 3;
            else if (head == "d") {
                arity = 2;
                std::size_t frac_pos = pos;
                try {
                    node.value = frac_from_string(token());
                } catch (const std::exception&) {
                    pos = frac_pos;
                    fail("a distance num/den");
                }
            } else {
                pos = head_pos;
                fail("a known symbol (=, E, <, d, sum, add, mul, not, and, or)");
            }
            for (std::size_t i = 0; i < arity; ++i) node.args.push_back(number());
        }
        expect(')');
        return node;
    }
};

void collect_constants(const QfSentence& s, std::set<Label>& out) {
    for (Label l : s.args) out.insert(l);
    for (const auto& c : s.children) collect_constants(c, out);
}

bool eval_atom(const Structure& s, const QfSentence& atom) {
    for (Label l : atom.args)
        if (!domain_contains(s, l))
            throw ContractViolation("constant " + std::to_string(l) +
                                    " is outside the structure's domain");
    if (atom.symbol == "=") return atom.args[0] == atom.args[1];
    if (atom.symbol == "E") {
        const auto* g = std::get_if<GraphPayload>(&s.payload);
        if (!g) throw ContractViolation("atom E requires a graph");
        return g->adjacent(atom.args[0], atom.args[1]);
    }
    if (atom.symbol == "<") {
        const auto* o = std::get_if<OrderPayload>(&s.payload);
        if (!o) throw ContractViolation("atom < requires a linear order");
        return o->less(atom.args[0], atom.args[1]);
    }
    if (atom.symbol == "d") {
        const auto* m = std::get_if<QMetricPayload>(&s.payload);
        if (!m) throw ContractViolation("atom d requires a metric space");
        return m->distance(atom.args[0], atom.args[1]) == atom.value;
    }
    if (atom.symbol == "sum") {
        const auto* g = std::get_if<AbelianPayload>(&s.payload);
        if (!g) throw ContractViolation("atom sum requires an abelian group");
        Code a = labeling_to_code(g->labeling, atom.args[0]);
        Code b = labeling_to_code(g->labeling, atom.args[1]);
        Code c = labeling_to_code(g->labeling, atom.args[2]);
        return abelian_add(*g, a, b) == c;
    }
    const auto* f = std::get_if<FieldPayload>(&s.payload);
    if (!f) throw ContractViolation("atom " + atom.symbol + " requires a field");
    Code a = labeling_to_code(f->labeling, atom.args[0]);
    Code b = labeling_to_code(f->labeling, atom.args[1]);
    Code c = labeling_to_code(f->labeling, atom.args[2]);
    if (atom.symbol == "add") return field_add(*f, a, b) == c;
    if (atom.symbol == "mul") return field_mul(*f, a, b) == c;
    throw ContractViolation("unknown atom symbol " + atom.symbol);
}

} // namespace

QfSentence parse_sentence(const std::string& text) {
    Parser p{text};
    QfSentence s = p.sentence();
    if (!p.at_end()) p.fail("end of input");
    return s;
}

std::string sentence_to_string(const QfSentence& s) {
    switch (s.kind) {
    case QfSentence::Kind::neg:
    case QfSentence::Kind::conj:
    case QfSentence::Kind::disj: {
        std::string out = s.kind == QfSentence::Kind::neg    ? "(not"
                          : s.kind == QfSentence::Kind::conj ? "(and"
                                                             : "(or";
        for (const auto& c : s.children) out += " " + sentence_to_string(c);
        return out + ")";
    }
    case QfSentence::Kind::atom: {
        std::string out = "(" + s.symbol;
        if (s.symbol == "d") out += " " + frac_to_string(s.value);
        for (Label l : s.args) out += " " + std::to_string(l);
        return out + ")";
    }
    }
    throw ContractViolation("corrupt sentence node");
}

std::vector<Label> sentence_constants(const QfSentence& s) {
    std::set<Label> set;
    collect_constants(s, set);
    return {set.begin(), set.end()};
}

bool eval_sentence(const Structure& s, const QfSentence& phi) {
    switch (phi.kind) {
    case QfSentence::Kind::atom:
        return eval_atom(s, phi);
    case QfSentence::Kind::neg:
        return !eval_sentence(s, phi.children.front());
    case QfSentence::Kind::conj:
        return std::all_of(phi.children.begin(), phi.children.end(),
                           [&](const QfSentence& c) { return eval_sentence(s, c); });
    case QfSentence::Kind::disj:
        return std::any_of(phi.children.begin(), phi.children.end(),
                           [&](const QfSentence& c) { return eval_sentence(s, c); });
    }
    throw ContractViolation("corrupt sentence node");
}

QfSentence open_from_structure(const Structure& b) {
    std::vector<QfSentence> atoms;
    auto atom = [](std::string symbol, std::vector<Label> args, Frac value = Frac(0)) {
        QfSentence a;
        a.symbol = std::move(symbol);
        a.args = std::move(args);
        a.value = value;
        return a;
    };
    auto negate = [](QfSentence inner) {
        QfSentence n;
        n.kind = QfSentence::Kind::neg;
        n.children.push_back(std::move(inner));
        return n;
    };

    std::vector<Label> dom = b.domain;
    std::sort(dom.begin(), dom.end());
    if (const auto* g = std::get_if<GraphPayload>(&b.payload)) {
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = i + 1; j < dom.size(); ++j) {
                QfSentence a = atom("E", {dom[i], dom[j]});
                atoms.push_back(g->adjacent(dom[i], dom[j]) ? a : negate(a));
            }
    } else if (const auto* o = std::get_if<OrderPayload>(&b.payload)) {
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = i + 1; j < dom.size(); ++j) {
                bool less = o->less(dom[i], dom[j]);
                atoms.push_back(atom("<", {less ? dom[i] : dom[j], less ? dom[j] : dom[i]}));
            }
    } else if (const auto* m = std::get_if<QMetricPayload>(&b.payload)) {
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = i + 1; j < dom.size(); ++j)
                atoms.push_back(
                    atom("d", {dom[i], dom[j]}, m->distance(dom[i], dom[j])));
    } else {
        throw UsageError("open_from_structure: class is not finite-relational");
    }
    if (dom.empty()) throw ContractViolation("open_from_structure: empty structure");
    if (atoms.empty()) atoms.push_back(atom("=", {dom[0], dom[0]})); // single point
    if (atoms.size() == 1) return atoms.front();
    QfSentence conj;
    conj.kind = QfSentence::Kind::conj;
    conj.children = std::move(atoms);
    return conj;
}

Structure structure_from_open(const FraisseClass& cls, const QfSentence& phi,
                              const Structure& s) {
    if (!eval_sentence(s, phi))
        throw ContractViolation("structure_from_open: the sentence is false here");
    std::vector<Label> constants = sentence_constants(phi);
    if (constants.empty())
        throw ContractViolation("structure_from_open: sentence has no constants");
    return cls.substructure(s, constants);
}

} // namespace fraisse
