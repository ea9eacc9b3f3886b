#ifndef FRAISSE_FORMULAS_HPP
#define FRAISSE_FORMULAS_HPP

#include <fraisse/class_spec.hpp>

#include <memory>

namespace fraisse {

// Quantifier-free L(omega)-sentences in prefix S-expression form. All atom
// arguments are constant labels; the metric atom carries a distance value.
//
// Grammar (frozen):
//   sentence := atom | (not sentence) | (and sentence+) | (or sentence+)
//   atom     := (= n n)            equality, any class
//             | (E n n)            graph adjacency
//             | (< n n)            order comparison
//             | (d num/den n n)    metric: distance of the pair equals num/den
//             | (sum n n n)        abelian: first + second = third
//             | (add n n n)        field addition
//             | (mul n n n)        field multiplication
struct QfSentence {
    enum class Kind { atom, neg, conj, disj };
    Kind kind = Kind::atom;
    std::string symbol;              // atom relation/operation symbol
    std::vector<Label> args;         // atom constant labels
    Frac value{0};                   // metric atoms: the asserted distance
    std::vector<QfSentence> children;

    bool operator==(const QfSentence&) const = default;
};

// Parses the grammar above; errors report the byte position.
QfSentence parse_sentence(const std::string& text);

std::string sentence_to_string(const QfSentence& s);

// All constant labels mentioned, ascending.
std::vector<Label> sentence_constants(const QfSentence& s);

// Standard propositional evaluation over atom truth read from the payload.
// Constants outside the domain raise ContractViolation: the truth value is
// not determined at this finite stage.
bool eval_sentence(const Structure& s, const QfSentence& phi);

// phi_B: the full positive/negative atom table of B, so that for any S
// covering B's domain, eval(S, phi_B) iff the restriction of S equals B.
// Only the finite relational classes support this direction.
QfSentence open_from_structure(const Structure& b);

// The generated substructure on phi's constants; requires eval(S, phi).
Structure structure_from_open(const FraisseClass& cls, const QfSentence& phi,
                              const Structure& s);

} // namespace fraisse

#endif
