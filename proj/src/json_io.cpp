#include <fraisse/json_io.hpp>

#include <fstream>

namespace fraisse {

using nlohmann::json;

namespace {

json code_json(Code c) { return code_to_string(c); }

Code code_from(const json& j) {
    if (!j.is_string()) throw UsageError("expected a decimal string code");
    return code_from_string(j.get<std::string>());
}

json graph_payload_json(const GraphPayload& g) {
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back(json::array({a, b}));
    return json{{"edges", edges}};
}

GraphPayload graph_payload_from(const json& j) {
    GraphPayload g;
    for (const auto& e : j.at("edges")) {
        Label a = e.at(0).get<Label>();
        Label b = e.at(1).get<Label>();
        if (a == b) throw UsageError("graph payload has a loop");
        if (a > b) std::swap(a, b);
        g.edges.insert({a, b});
    }
    return g;
}

json order_payload_json(const OrderPayload& o) {
    std::vector<Label> asc(o.rank.size());
    for (const auto& [l, r] : o.rank) {
        if (r >= asc.size()) throw ContractViolation("order rank out of range");
        asc[r] = l;
    }
    return json{{"ascending", asc}};
}

OrderPayload order_payload_from(const json& j) {
    OrderPayload o;
    std::size_t r = 0;
    for (const auto& l : j.at("ascending")) {
        if (!o.rank.emplace(l.get<Label>(), r++).second)
            throw UsageError("order payload repeats a label");
    }
    return o;
}

json qmetric_payload_json(const QMetricPayload& m) {
    json dist = json::array();
    for (const auto& [pair, d] : m.dist)
        dist.push_back(json::array({pair.first, pair.second, frac_to_string(d)}));
    return json{{"dist", dist}};
}

QMetricPayload qmetric_payload_from(const json& j) {
    QMetricPayload m;
    for (const auto& row : j.at("dist")) {
        Label a = row.at(0).get<Label>();
        Label b = row.at(1).get<Label>();
        if (a >= b) throw UsageError("distance table must be upper-triangular");
        m.dist[{a, b}] = frac_from_string(row.at(2).get<std::string>());
    }
    return m;
}

json abelian_payload_json(const AbelianPayload& g) {
    json factors = json::array();
    for (Code f : g.factors) factors.push_back(code_json(f));
    return json{{"factors", factors}, {"labeling", labeling_to_json(g.labeling)}};
}

AbelianPayload abelian_payload_from(const json& j) {
    AbelianPayload g;
    for (const auto& f : j.at("factors")) g.factors.push_back(code_from(f));
    g.labeling = labeling_from_json(j.at("labeling"));
    return g;
}

json field_payload_json(const FieldPayload& f) {
    return json{{"p", f.p},
                {"degree", f.degree},
                {"poly", f.poly},
                {"labeling", labeling_to_json(f.labeling)}};
}

FieldPayload field_payload_from(const json& j) {
    FieldPayload f;
    f.p = j.at("p").get<std::uint64_t>();
    f.degree = j.at("degree").get<std::uint32_t>();
    f.poly = j.at("poly").get<std::vector<std::uint8_t>>();
    f.labeling = labeling_from_json(j.at("labeling"));
    return f;
}

} // namespace

json labeling_to_json(const Labeling& lab) {
    json map = json::array();
    for (const auto& [l, c] : lab.to_code) map.push_back(json::array({l, code_json(c)}));
    json out{{"size", code_json(lab.size)},
             {"implicit", lab.implicit_full},
             {"map", map}};
    if (lab.has_linear()) {
        out["linear"] = json{{"base", lab.lin_base},
                             {"dim", lab.lin_dim},
                             {"mat", lab.lin},
                             {"inv", lab.lin_inv}};
    }
    return out;
}

Labeling labeling_from_json(const json& j) {
    Labeling lab;
    lab.size = code_from(j.at("size"));
    lab.implicit_full = j.at("implicit").get<bool>();
    for (const auto& e : j.at("map"))
        lab.to_code[e.at(0).get<Label>()] = code_from(e.at(1));
    if (j.contains("linear")) {
        const json& lin = j.at("linear");
        lab.lin_base = lin.at("base").get<std::uint64_t>();
        lab.lin_dim = lin.at("dim").get<std::uint32_t>();
        lab.lin = lin.at("mat").get<std::vector<std::uint8_t>>();
        lab.lin_inv = lin.at("inv").get<std::vector<std::uint8_t>>();
    }
    return lab;
}

json structure_to_json(const Structure& s) {
    json payload;
    if (const auto* g = std::get_if<GraphPayload>(&s.payload))
        payload = graph_payload_json(*g);
    else if (const auto* o = std::get_if<OrderPayload>(&s.payload))
        payload = order_payload_json(*o);
    else if (const auto* m = std::get_if<QMetricPayload>(&s.payload))
        payload = qmetric_payload_json(*m);
    else if (const auto* a = std::get_if<AbelianPayload>(&s.payload))
        payload = abelian_payload_json(*a);
    else
        payload = field_payload_json(std::get<FieldPayload>(s.payload));
    return json{{"class", s.class_id}, {"domain", s.domain}, {"payload", payload}};
}

Structure structure_from_json(const json& j) {
    Structure s;
    s.class_id = j.at("class").get<std::string>();
    s.domain = j.at("domain").get<std::vector<Label>>();
    const json& payload = j.at("payload");
    const std::string& id = s.class_id;
    if (id == "graph" || id.starts_with("kfree"))
        s.payload = graph_payload_from(payload);
    else if (id == "order")
        s.payload = order_payload_from(payload);
    else if (id.starts_with("qmetric"))
        s.payload = qmetric_payload_from(payload);
    else if (id.starts_with("abelian"))
        s.payload = abelian_payload_from(payload);
    else if (id.starts_with("field"))
        s.payload = field_payload_from(payload);
    else
        throw UsageError("unknown class id in JSON: " + id);
    return s;
}

std::string structure_to_string(const Structure& s) { return structure_to_json(s).dump(); }

Structure structure_from_string(const std::string& text) {
    try {
        return structure_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("structure text: ") + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace fraisse
