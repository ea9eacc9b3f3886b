#include <fraisse/back_and_forth.hpp>

#include <fraisse/graph_class.hpp>

#include <algorithm>

namespace fraisse {

namespace {

// First `limit` labels present in a structure, ascending.
std::vector<Label> present_labels(const Structure& s, std::size_t limit) {
    std::vector<Label> out;
    if (domain_is_implicit(s)) {
        for (Label l = 0; out.size() < limit && domain_contains(s, l); ++l) out.push_back(l);
    } else {
        std::vector<Label> dom = domain_labels(s);
        std::sort(dom.begin(), dom.end());
        for (Label l : dom) {
            if (out.size() >= limit) break;
            out.push_back(l);
        }
    }
    return out;
}

} // namespace

std::vector<Label> ChainSide::labels(std::size_t limit) const {
    return present_labels(st_.top(), limit);
}

RadoSide::RadoSide(std::uint64_t start, std::uint64_t cap)
    : g_(rado_oracle(start)), k_(start), cap_(cap) {}

bool RadoSide::grow() {
    if (k_ >= cap_) return false;
    k_ = std::min(cap_, k_ * 2);
    g_ = rado_oracle(k_);
    return true;
}

std::vector<Label> RadoSide::labels(std::size_t limit) const {
    std::vector<Label> out;
    for (Label l = 0; l < k_ && out.size() < limit; ++l) out.push_back(l);
    return out;
}

BfResult back_and_forth(const FraisseClass& cls, BfSide& x, BfSide& y, std::uint64_t rounds,
                        std::uint64_t grow_budget) {
    BfResult result;
    std::set<Label> used_x, used_y;

    // Matches the smallest unmatched source label into the target side.
    auto extend = [&](BfSide& src, BfSide& dst, std::set<Label>& used_src,
                      std::set<Label>& used_dst, bool forward,
                      std::uint64_t round) -> bool {
        std::vector<Label> pool = src.labels(used_src.size() + rounds + 1);
        Label next = 0;
        bool found = false;
        for (Label l : pool)
            if (!used_src.count(l)) {
                next = l;
                found = true;
                break;
            }
        if (!found) return true; // nothing left to match on this side

        std::vector<Label> gens(used_src.begin(), used_src.end());
        gens.push_back(next);
        std::vector<std::pair<Label, Label>> pins;
        for (const auto& [a, b] : result.map)
            pins.emplace_back(forward ? a : b, forward ? b : a);

        Structure sub = cls.substructure(src.top(), gens);
        auto find = [&]() { return cls.embeddings_extending(sub, dst.top(), pins, 1); };
        auto maps = find();

        if (maps.empty()) {
            // A targeted demand first: amalgamate a copy of `sub` over the
            // already-matched part, placed at the pinned images.
            LabelMap pinmap(pins.begin(), pins.end());
            std::vector<Label> ctx;
            for (Label l : domain_labels(sub))
                if (l != next) ctx.push_back(l);
            bool pinnable = !ctx.empty();
            Structure a1;
            if (pinnable) {
                a1 = cls.substructure(src.top(), ctx);
                for (Label l : domain_labels(a1))
                    if (!pinmap.count(l)) pinnable = false;
            }
            if (pinnable) {
                ExtensionTask t;
                t.a1 = a1;
                t.a2 = sub;
                LabelMap ident;
                for (Label l : domain_labels(a1)) {
                    ident[l] = l;
                    t.a.push_back(l);
                    t.b.push_back(pinmap.at(l));
                }
                t.e = Embedding{std::move(a1), sub, std::move(ident)};
                if (dst.demand(t)) maps = find();
            }
        }

        for (std::uint64_t attempt = 0; maps.empty(); ++attempt) {
            if (attempt >= grow_budget || !dst.grow()) {
                result.success = false;
                result.failure = "round " + std::to_string(round) + ": no partner for label " +
                                 std::to_string(next) +
                                 (forward ? " (forth)" : " (back)");
                return false;
            }
            maps = find();
        }

        Label image = maps.front().at(next);
        used_src.insert(next);
        used_dst.insert(image);
        if (forward)
            result.map.emplace_back(next, image);
        else
            result.map.emplace_back(image, next);
        return true;
    };

    for (std::uint64_t r = 0; r < rounds; ++r) {
        bool ok = (r % 2 == 0) ? extend(x, y, used_x, used_y, true, r)
                               : extend(y, x, used_y, used_x, false, r);
        if (!ok) break;
    }
    return result;
}

BfResult back_and_forth(ChainState& x, ChainState& y, std::uint64_t rounds,
                        std::uint64_t step_budget) {
    if (x.cls->id() != y.cls->id())
        throw ContractViolation("back_and_forth requires the same class on both sides");
    ChainSide sx(x, step_budget), sy(y, step_budget);
    return back_and_forth(*x.cls, sx, sy, rounds);
}

} // namespace fraisse
