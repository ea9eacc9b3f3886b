#include <fraisse/order_class.hpp>

#include <algorithm>
#include <sstream>

namespace fraisse {

namespace {

const OrderPayload& order_of(const Structure& s) {
    if (const auto* o = std::get_if<OrderPayload>(&s.payload)) return *o;
    throw ContractViolation("expected an order payload");
}

} // namespace

Structure OrderClass::make(std::vector<Label> ascending) const {
    OrderPayload p;
    for (std::size_t i = 0; i < ascending.size(); ++i) {
        if (!p.rank.emplace(ascending[i], i).second)
            throw ContractViolation("make order: duplicate label");
    }
    std::vector<Label> dom = ascending;
    std::sort(dom.begin(), dom.end());
    return Structure{id(), std::move(dom), std::move(p)};
}

std::vector<Label> OrderClass::ascending(const Structure& s) const {
    const OrderPayload& p = order_of(s);
    std::vector<Label> out(p.rank.size());
    for (const auto& [l, r] : p.rank) out[r] = l;
    return out;
}

bool OrderClass::is_member(const Structure& s) const {
    if (s.class_id != id()) return false;
    const auto* p = std::get_if<OrderPayload>(&s.payload);
    if (p == nullptr || s.domain.empty()) return false;
    if (p->rank.size() != s.domain.size()) return false;
    std::vector<bool> seen(s.domain.size(), false);
    for (const auto& [l, r] : p->rank) {
        if (!domain_contains(s, l)) return false;
        if (r >= s.domain.size() || seen[r]) return false;
        seen[r] = true;
    }
    return true;
}

Structure OrderClass::substructure(const Structure& s, std::span<const Label> gens) const {
    if (gens.empty()) throw ContractViolation("substructure: empty generating set");
    const OrderPayload& p = order_of(s);
    std::vector<Label> dom(gens.begin(), gens.end());
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    for (Label l : dom)
        if (p.rank.find(l) == p.rank.end())
            throw ContractViolation("substructure: label outside domain");
    std::vector<Label> asc = dom;
    std::sort(asc.begin(), asc.end(),
              [&](Label a, Label b) { return p.rank.at(a) < p.rank.at(b); });
    return make(asc);
}

bool OrderClass::is_embedding(const Embedding& e) const {
    const OrderPayload& ps = order_of(e.source);
    const OrderPayload& pt = order_of(e.target);
    if (e.map.size() != e.source.domain.size()) return false;
    std::set<Label> image;
    for (Label l : e.source.domain) {
        auto it = e.map.find(l);
        if (it == e.map.end() || !domain_contains(e.target, it->second)) return false;
        if (!image.insert(it->second).second) return false;
    }
    for (Label a : e.source.domain)
        for (Label b : e.source.domain)
            if (a != b && ps.less(a, b) != pt.less(e.map.at(a), e.map.at(b))) return false;
    return true;
}

std::vector<LabelMap> OrderClass::embeddings_extending(
    const Structure& a, const Structure& b,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const {
    const OrderPayload& pa = order_of(a);
    const OrderPayload& pb = order_of(b);
    auto ok = [&](const LabelMap& partial, Label s, Label t) {
        for (const auto& [ps, pt] : partial)
            if (pa.less(ps, s) != pb.less(pt, t)) return false;
        return true;
    };
    return backtrack_embeddings(a.domain, b.domain, pins, limit, ok);
}

CanonicalForm OrderClass::canonicalize(const Structure& s) const {
    std::ostringstream os;
    os << "or|" << s.domain.size();
    return CanonicalForm{os.str()};
}

Amalgam OrderClass::amalgamate(const Structure& a, const Embedding& h1,
                               const Embedding& h2) const {
    check_amalgam_inputs(*this, a, h1, h2);
    MergePlan plan = amalgam_label_plan(a, h1, h2);

    std::vector<Label> a_asc = ascending(a);
    std::vector<Label> b1_asc = ascending(h1.target);
    std::vector<Label> b2_asc = ascending(h2.target);

    // Split each side into the segments between consecutive images of A.
    auto segments = [&](const std::vector<Label>& asc, const LabelMap& h) {
        std::set<Label> anchors;
        for (const auto& [x, y] : h) anchors.insert(y);
        std::vector<std::vector<Label>> segs(1);
        for (Label l : asc) {
            if (anchors.count(l))
                segs.emplace_back();
            else
                segs.back().push_back(l);
        }
        return segs; // a_asc.size() + 1 segments
    };
    std::vector<std::vector<Label>> s1 = segments(b1_asc, h1.map);
    std::vector<std::vector<Label>> s2 = segments(b2_asc, h2.map);

    std::vector<Label> c_asc;
    for (std::size_t i = 0; i <= a_asc.size(); ++i) {
        for (Label l : s1[i]) c_asc.push_back(l);
        for (Label l : s2[i]) c_asc.push_back(plan.g2.at(l));
        if (i < a_asc.size()) c_asc.push_back(h1.map.at(a_asc[i]));
    }
    Structure c = make(c_asc);
    LabelMap idmap;
    for (Label l : h1.target.domain) idmap[l] = l;
    return Amalgam{c, Embedding{h1.target, c, std::move(idmap)},
                   Embedding{h2.target, c, plan.g2}};
}

JointEmbedding OrderClass::joint_embed(const Structure& a, const Structure& b) const {
    MergePlan plan = joint_label_plan(a, b);
    std::vector<Label> asc = ascending(a);
    for (Label l : ascending(b)) asc.push_back(plan.g2.at(l));
    Structure d = make(asc);
    LabelMap idmap;
    for (Label l : a.domain) idmap[l] = l;
    return JointEmbedding{d, Embedding{a, d, std::move(idmap)}, Embedding{b, d, plan.g2}};
}

Structure OrderClass::strict_extend(const Structure& s) const {
    // Append a fresh maximum.
    std::vector<Label> asc = ascending(s);
    Label fresh = 0;
    for (Label l : s.domain) fresh = std::max(fresh, l + 1);
    asc.push_back(fresh);
    return make(asc);
}

std::vector<Label> OrderClass::generating_tuple(const Structure& s) const {
    return s.domain;
}

Structure OrderClass::relabel(const Structure& s, const LabelMap& pi) const {
    std::vector<Label> asc = ascending(s);
    for (Label& l : asc) l = pi.at(l);
    return make(asc);
}

void OrderClass::enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const {
    const std::uint64_t kMaxEnumSize = 64;
    std::uint64_t n = next_bucket_size_++;
    if (n > kMaxEnumSize) {
        *done = true;
        return;
    }
    std::vector<Label> asc(n);
    for (std::size_t i = 0; i < n; ++i) asc[i] = i;
    memo.push_back(make(asc));
}

} // namespace fraisse
