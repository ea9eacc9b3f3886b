#ifndef FRAISSE_BACK_AND_FORTH_HPP
#define FRAISSE_BACK_AND_FORTH_HPP

#include <fraisse/builder.hpp>

namespace fraisse {

// One side of a back-and-forth game: a growing approximation of a limit.
class BfSide {
public:
    virtual ~BfSide() = default;
    virtual const Structure& top() const = 0;
    // Enlarges the approximation; false when no further growth is possible.
    virtual bool grow() = 0;
    // The `limit` smallest labels present, ascending.
    virtual std::vector<Label> labels(std::size_t limit) const = 0;
    // Realizes a specific extension demand, when the side supports targeted
    // growth; false means the caller falls back to blind growth.
    virtual bool demand(const ExtensionTask&) { return false; }
};

// A builder chain; growth runs the fair schedule for `step_budget` steps.
class ChainSide : public BfSide {
public:
    ChainSide(ChainState& st, std::uint64_t step_budget)
        : st_(st), step_budget_(step_budget) {}
    const Structure& top() const override { return st_.top(); }
    bool grow() override {
        run(st_, step_budget_);
        return true;
    }
    std::vector<Label> labels(std::size_t limit) const override;
    bool demand(const ExtensionTask& t) override {
        realize_task(st_, t);
        return true;
    }

private:
    ChainState& st_;
    std::uint64_t step_budget_;
};

// Fragments of the explicit random graph (the BIT predicate); growth doubles
// the fragment size up to `cap` vertices.
class RadoSide : public BfSide {
public:
    explicit RadoSide(std::uint64_t start = 8, std::uint64_t cap = 1u << 16);
    const Structure& top() const override { return g_; }
    bool grow() override;
    std::vector<Label> labels(std::size_t limit) const override;

private:
    Structure g_;
    std::uint64_t k_;
    std::uint64_t cap_;
};

struct BfResult {
    bool success = true;
    std::vector<std::pair<Label, Label>> map; // matched pairs, match order
    std::string failure;
};

// Alternately absorbs the smallest unmatched label of each side, growing the
// other side on demand (at most `grow_budget` growth attempts per round).
BfResult back_and_forth(const FraisseClass& cls, BfSide& x, BfSide& y, std::uint64_t rounds,
                        std::uint64_t grow_budget = 8);

BfResult back_and_forth(ChainState& x, ChainState& y, std::uint64_t rounds,
                        std::uint64_t step_budget = 32);

} // namespace fraisse

#endif
