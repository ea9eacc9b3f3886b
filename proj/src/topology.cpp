#include <fraisse/topology.hpp>

#include <fraisse/field_class.hpp>
#include <fraisse/json_io.hpp>

#include <algorithm>
#include <numeric>

namespace fraisse {

using nlohmann::json;

namespace {

constexpr std::uint64_t kRestrictionSample = 64;

bool algebraic_payload(const Structure& s) {
    return std::holds_alternative<AbelianPayload>(s.payload) ||
           std::holds_alternative<FieldPayload>(s.payload);
}

std::vector<Label> anchor_labels(const Structure& anchor) {
    if (!domain_is_implicit(anchor) && domain_size(anchor) <= 4096)
        return domain_labels(anchor);
    std::vector<Label> out;
    for (Label l = 0; out.size() < kRestrictionSample && domain_contains(anchor, l); ++l)
        out.push_back(l);
    return out;
}

std::vector<std::pair<Label, Label>> ext_pins_a2(const ExtensionTask& t) {
    std::vector<std::pair<Label, Label>> pins;
    for (std::size_t i = 0; i < t.a.size(); ++i)
        pins.emplace_back(t.e.map.at(t.a[i]), t.b[i]);
    return pins;
}

} // namespace

DenseSetDescriptor DenseSetDescriptor::age(Structure a) {
    DenseSetDescriptor d;
    d.kind = Kind::age;
    d.age_a = std::move(a);
    return d;
}

DenseSetDescriptor DenseSetDescriptor::ext(ExtensionTask t) {
    DenseSetDescriptor d;
    d.kind = Kind::ext;
    d.task = std::move(t);
    return d;
}

std::string DenseSetDescriptor::annotation(const FraisseClass& cls) const {
    if (kind == Kind::age) return "age:" + cls.canonicalize(age_a).bytes;
    std::string out = "ext:" + cls.canonicalize(task.a1).bytes + "->" +
                      cls.canonicalize(task.a2).bytes + ";b=";
    for (std::size_t i = 0; i < task.b.size(); ++i)
        out += (i ? "," : "") + std::to_string(task.b[i]);
    return out;
}

ChainState witness_nonempty(std::shared_ptr<const FraisseClass> cls, const Structure& b,
                            std::uint64_t steps) {
    ChainState st = new_builder(cls, b); // membership check included
    for (std::uint64_t i = 0; i < steps; ++i) {
        Structure next = cls->strict_extend(st.top());
        if (cls->structure_size(next) <= cls->structure_size(st.top()))
            throw ContractViolation("strict_extend failed to grow");
        st.chain.push_back(std::move(next));
    }
    return st;
}

bool member_basic(const FraisseClass& cls, const Structure& s, const BasicOpen& o) {
    std::vector<Label> labels = anchor_labels(o.anchor);
    if (labels.empty()) throw ContractViolation("member_basic: empty anchor");
    for (Label l : labels)
        if (!domain_contains(s, l))
            throw ContractViolation("member_basic: anchor label " + std::to_string(l) +
                                    " is outside the candidate's domain");
    // Compare the two restrictions through the same computation so explicit
    // and implicit labelings meet on common ground.
    auto lhs = cls.substructure_capped(s, labels, 4096);
    auto rhs = cls.substructure_capped(o.anchor, labels, 4096);
    if (!lhs || !rhs) throw ContractViolation("member_basic: restriction beyond desk scale");
    if (!domain_is_implicit(o.anchor) && domain_size(o.anchor) <= 4096) {
        // Closure inside s must not leave the anchor's domain.
        for (Label l : domain_labels(*lhs))
            if (!domain_contains(o.anchor, l)) return false;
    }
    return *lhs == *rhs;
}

DenseMembership member_dense_open(const FraisseClass& cls, const Structure& s,
                                  const DenseSetDescriptor& d) {
    DenseMembership out;
    if (d.kind == DenseSetDescriptor::Kind::age) {
        auto maps = cls.embeddings_extending(d.age_a, s, {}, 1);
        if (!maps.empty()) {
            out.yes = true;
            out.witness = maps.front();
        }
        return out;
    }
    bool resident = true;
    for (Label l : d.task.b)
        if (!domain_contains(s, l)) {
            resident = false;
            break;
        }
    if (resident && !task_applicable(cls, d.task, s)) {
        out.yes = true;
        out.vacuous = true; // case (i): the generated substructure refutes a -> b
        return out;
    }
    if (resident) {
        auto maps = cls.embeddings_extending(d.task.a2, s, ext_pins_a2(d.task), 1);
        if (!maps.empty()) {
            out.yes = true;
            out.witness = maps.front();
        }
    }
    return out;
}

BasicOpen refine_into_age(const FraisseClass& cls, const BasicOpen& o, const Structure& a) {
    if (!cls.is_member(a) || !cls.is_member(o.anchor))
        throw ContractViolation("refine_into_age: inputs must be class members");
    Structure anchor;
    if (const auto* fc = dynamic_cast<const FieldClass*>(&cls)) {
        // The label-preserving joint extension for fields is the lcm stage.
        std::uint32_t m = std::lcm(fc->degree_of(o.anchor), fc->degree_of(a));
        anchor = fc->extend_stage(o.anchor, m);
    } else {
        anchor = cls.joint_embed(o.anchor, a).d;
    }
    BasicOpen refined{std::move(anchor)};
    if (!member_basic(cls, refined.anchor, o))
        throw ContractViolation("refine_into_age broke the nesting");
    if (!member_dense_open(cls, refined.anchor, DenseSetDescriptor::age(a)).yes)
        throw ContractViolation("refine_into_age certificate failed");
    return refined;
}

namespace {

// Case (b) for relational classes: amalgamate over the anchor-resident part
// of b, then rename the fresh images of the remaining a-elements to the
// prescribed b-labels.
ExtRefinement refine_ext_relational(const FraisseClass& cls, const BasicOpen& o,
                                    const ExtensionTask& task) {
    std::vector<std::size_t> resident, fresh;
    for (std::size_t i = 0; i < task.b.size(); ++i)
        (domain_contains(o.anchor, task.b[i]) ? resident : fresh).push_back(i);

    Structure c;
    LabelMap phi; // a2 -> c
    if (resident.empty()) {
        JointEmbedding je = cls.joint_embed(o.anchor, task.a2);
        c = std::move(je.d);
        phi = je.gb.map;
    } else {
        std::vector<Label> a_res;
        std::vector<std::pair<Label, Label>> pins;
        for (std::size_t i : resident) {
            a_res.push_back(task.a[i]);
            pins.emplace_back(task.a[i], task.b[i]);
        }
        Structure a1r = cls.substructure(task.a1, a_res);
        auto match = cls.embeddings_extending(a1r, o.anchor, pins, 1);
        if (match.empty()) return {o, true, {}}; // case (a)
        Embedding h1{a1r, o.anchor, match.front()};
        LabelMap h2map;
        for (Label l : a1r.domain) h2map[l] = task.e.map.at(l);
        Embedding h2{a1r, task.a2, std::move(h2map)};
        Amalgam am = cls.amalgamate(a1r, h1, h2);
        c = std::move(am.c);
        phi = am.g2.map;
    }

    // Prescribed placement: the image of e(a_i) must carry the label b_i.
    LabelMap pi;
    for (Label l : c.domain) pi[l] = l;
    for (std::size_t i : fresh) {
        Label x = phi.at(task.e.map.at(task.a[i]));
        Label want = task.b[i];
        Label cur = pi.at(x);
        if (cur == want) continue;
        for (auto& [from, to] : pi)
            if (to == want) {
                to = cur;
                break;
            }
        pi[x] = want;
    }
    Structure renamed = cls.relabel(c, pi);
    for (auto& [src, img] : phi) img = pi.at(img);
    ExtRefinement out{BasicOpen{std::move(renamed)}, false, std::move(phi)};
    return out;
}

// Algebraic classes have gap-free label ranges, so growing the anchor until
// the b-labels are resident reduces case (b) to the builder's realization.
ExtRefinement refine_ext_algebraic(const FraisseClass& cls, const BasicOpen& o,
                                   const ExtensionTask& task) {
    Structure work = o.anchor;
    for (Label l : task.b) {
        int guard = 0;
        while (!domain_contains(work, l)) {
            work = cls.strict_extend(work);
            if (++guard > 64)
                throw ContractViolation("refine_into_ext: cannot reach label " +
                                        std::to_string(l));
        }
    }
    if (!realize_against(cls, task, work)) return {BasicOpen{std::move(work)}, true, {}};
    auto maps = cls.embeddings_extending(task.a2, work, ext_pins_a2(task), 1);
    return {BasicOpen{std::move(work)}, false, maps.front()};
}

} // namespace

ExtRefinement refine_into_ext(const FraisseClass& cls, const BasicOpen& o,
                              const ExtensionTask& task) {
    if (task.a.size() != task.b.size())
        throw ContractViolation("refine_into_ext: malformed task");
    std::set<Label> distinct(task.b.begin(), task.b.end());
    if (distinct.size() != task.b.size()) return {o, true, {}};

    ExtRefinement out = algebraic_payload(o.anchor) ? refine_ext_algebraic(cls, o, task)
                                                    : refine_ext_relational(cls, o, task);
    if (!member_basic(cls, out.open.anchor, o))
        throw ContractViolation("refine_into_ext broke the nesting");
    if (!out.vacuous) {
        Embedding witness{task.a2, out.open.anchor, out.witness};
        for (std::size_t i = 0; i < task.a.size(); ++i)
            if (out.witness.at(task.e.map.at(task.a[i])) != task.b[i])
                throw ContractViolation("refine_into_ext misplaced a b-label");
        if (!cls.is_embedding(witness))
            throw ContractViolation("refine_into_ext witness is not an embedding");
    }
    return out;
}

DenseOpenOracle oracle_for(std::shared_ptr<const FraisseClass> cls, DenseSetDescriptor d) {
    DenseOpenOracle oracle;
    oracle.descriptor = d;
    oracle.refine = [cls, d](const BasicOpen& o) -> BasicOpen {
        if (d.kind == DenseSetDescriptor::Kind::age) return refine_into_age(*cls, o, d.age_a);
        return refine_into_ext(*cls, o, d.task).open;
    };
    return oracle;
}

namespace {

// Absorbs every natural label <= n into the anchor.
Structure absorb_anchor(const FraisseClass& cls, Structure anchor, Label n) {
    for (Label l = 0; l <= n; ++l) {
        int guard = 0;
        while (!domain_contains(anchor, l)) {
            anchor = cls.strict_extend(anchor);
            if (++guard > 64) throw ContractViolation("anchor absorption failed");
        }
    }
    return anchor;
}

ChainState chain_of_anchors(std::shared_ptr<const FraisseClass> cls,
                            std::vector<Structure> anchors) {
    ChainState st;
    st.stream = std::make_shared<TaskStream>(cls);
    st.cls = std::move(cls);
    st.chain = std::move(anchors);
    st.steps_taken = st.chain.size() - 1;
    return st;
}

} // namespace

ChainState baire_intersect(std::shared_ptr<const FraisseClass> cls, const BasicOpen& seed,
                           const std::vector<DenseOpenOracle>& oracles, std::uint64_t rounds) {
    if (!cls->is_member(seed.anchor))
        throw ContractViolation("baire_intersect: seed is not a class member");
    std::vector<Structure> anchors{seed.anchor};
    BasicOpen current = seed;
    for (std::uint64_t r = 0; r < rounds; ++r) {
        if (!oracles.empty()) {
            const DenseOpenOracle& oracle = oracles[r % oracles.size()];
            BasicOpen next = oracle.refine(current);
            if (!member_basic(*cls, next.anchor, current))
                throw ContractViolation("oracle violated its nesting certificate");
            DenseMembership cert = member_dense_open(*cls, next.anchor, oracle.descriptor);
            if (!cert.yes)
                throw ContractViolation("oracle violated its density certificate");
            current = std::move(next);
        }
        current.anchor = absorb_anchor(*cls, std::move(current.anchor), r);
        anchors.push_back(current.anchor);
    }
    return chain_of_anchors(std::move(cls), std::move(anchors));
}

DescriptorStream::DescriptorStream(std::shared_ptr<const FraisseClass> cls)
    : cls_(cls), tasks_(std::make_shared<TaskStream>(std::move(cls))) {}

DenseSetDescriptor DescriptorStream::next() {
    for (int guard = 0; guard < 1 << 20; ++guard) {
        bool age_turn = (turn_++ % 2) == 0;
        if (age_turn) {
            try {
                return DenseSetDescriptor::age(cls_->enumerated(age_idx_++));
            } catch (const ContractViolation&) {
                continue; // enumeration exhausted; only ext descriptors remain
            }
        }
        auto t = tasks_->task_for_code(ext_code_++);
        if (t) return DenseSetDescriptor::ext(std::move(*t));
    }
    throw ContractViolation("descriptor stream ran dry");
}

GameTranscript play_banach_mazur(std::shared_ptr<const FraisseClass> cls,
                                 const BasicOpen& seed, const Adversary& adversary,
                                 std::uint64_t rounds) {
    if (!cls->is_member(seed.anchor))
        throw ContractViolation("play_banach_mazur: seed is not a class member");
    GameTranscript transcript;
    DescriptorStream stream(cls);
    BasicOpen current = seed;
    std::vector<Structure> anchors{seed.anchor};
    for (std::uint64_t r = 0; r < rounds; ++r) {
        BasicOpen move = adversary(current);
        if (!cls->is_member(move.anchor) || !member_basic(*cls, move.anchor, current))
            throw UsageError("invalid adversary move at round " + std::to_string(r));
        current = std::move(move);
        transcript.rounds.push_back({"adversary", current.anchor, ""});
        anchors.push_back(current.anchor);

        DenseSetDescriptor d = stream.next();
        std::string note = d.annotation(*cls);
        if (d.kind == DenseSetDescriptor::Kind::age) {
            current = refine_into_age(*cls, current, d.age_a);
        } else {
            ExtRefinement ref = refine_into_ext(*cls, current, d.task);
            if (ref.vacuous) note += " (vacuous)";
            current = std::move(ref.open);
        }
        transcript.rounds.push_back({"builder", current.anchor, note});
        anchors.push_back(current.anchor);
    }
    transcript.final_chain = chain_of_anchors(std::move(cls), std::move(anchors));
    return transcript;
}

Adversary adversary_random(std::shared_ptr<const FraisseClass> cls, std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [cls, rng](const BasicOpen& o) -> BasicOpen {
        std::uint64_t draw = (*rng)();
        if (draw & 1) return BasicOpen{cls->strict_extend(o.anchor)};
        // Age refinement by a small enumerated structure.
        Structure a = cls->enumerated(draw % 4);
        return refine_into_age(*cls, o, a);
    };
}

nlohmann::json GameTranscript::to_json() const {
    json out = json::array();
    for (const auto& r : rounds)
        out.push_back(json{{"player", r.player},
                           {"anchor", structure_to_json(r.anchor)},
                           {"annotation", r.annotation}});
    return out;
}

} // namespace fraisse
