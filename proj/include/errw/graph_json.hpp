// graph_json.hpp - JSON interchange for weighted-graph instances, so
// arbitrary reflection-symmetric setups can be fed to the tools without code
// changes, plus the structural hash used to key oracle fixtures.
#pragma once

#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "errw/graph.hpp"
#include "errw/magic.hpp"

namespace errw {

struct GraphFile {
    FiniteGraph graph;
    InitialWeights a;
    VertexId v0 = 0;
    std::optional<VertexId> v1;
    EdgeId e0 = 0;
    std::optional<std::vector<double>> phi;
    std::optional<VertexPermutation> automorphism;

    SymmetricInstance instance() const {
        if (!v1 || !phi || !automorphism)
            throw std::invalid_argument("instance requires v1, phi and automorphism");
        SymmetricInstance inst;
        inst.graph = graph;
        inst.a = a;
        inst.v0 = v0;
        inst.v1 = *v1;
        inst.e0 = e0;
        inst.phi = *phi;
        inst.automorphism = *automorphism;
        return inst;
    }
};

inline GraphFile graph_from_json(const nlohmann::json& j) {
    GraphFile out;
    int n = 0;
    if (j.at("vertices").is_number_integer())
        n = j.at("vertices").get<int>();
    else
        n = static_cast<int>(j.at("vertices").size());
    out.graph.reset(n);
    for (const auto& e : j.at("edges"))
        out.graph.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    if (!out.graph.connected()) throw std::invalid_argument("graph file: graph not connected");

    if (j.contains("coords")) {
        std::vector<LatticeVertex> coords;
        for (const auto& c : j.at("coords"))
            coords.push_back({c.at(0).get<long long>(), c.at(1).get<long long>()});
        out.graph.set_coords(std::move(coords));
    }

    if (j.at("a").is_number())
        out.a = InitialWeights::constant(out.graph, j.at("a").get<double>());
    else
        out.a = InitialWeights::from_edges(out.graph, j.at("a").get<std::vector<double>>());

    out.v0 = j.value("v0", 0);
    if (j.contains("v1")) out.v1 = j.at("v1").get<int>();
    out.e0 = j.value("e0", 0);
    if (j.contains("phi")) out.phi = j.at("phi").get<std::vector<double>>();
    if (j.contains("automorphism"))
        out.automorphism = j.at("automorphism").get<std::vector<int>>();
    return out;
}

inline nlohmann::json graph_to_json(const GraphFile& gf) {
    nlohmann::json j;
    j["vertices"] = gf.graph.vertex_count();
    nlohmann::json edges = nlohmann::json::array();
    for (EdgeId e = 0; e < gf.graph.edge_count(); ++e) {
        const auto& ep = gf.graph.endpoints(e);
        edges.push_back({ep[0], ep[1]});
    }
    j["edges"] = std::move(edges);
    j["a"] = gf.a.edge;
    j["v0"] = gf.v0;
    if (gf.v1) j["v1"] = *gf.v1;
    j["e0"] = gf.e0;
    if (gf.phi) j["phi"] = *gf.phi;
    if (gf.automorphism) j["automorphism"] = *gf.automorphism;
    if (gf.graph.has_coords()) {
        nlohmann::json coords = nlohmann::json::array();
        for (VertexId v = 0; v < gf.graph.vertex_count(); ++v)
            coords.push_back({gf.graph.coord(v).x1, gf.graph.coord(v).x2});
        j["coords"] = std::move(coords);
    }
    return j;
}

// FNV-1a over the structure and weights; stable across runs and platforms.
inline std::string graph_hash(const FiniteGraph& g, const InitialWeights& a) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(g.vertex_count()));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& ep = g.endpoints(e);
        mix(static_cast<std::uint64_t>(ep[0]));
        mix(static_cast<std::uint64_t>(ep[1]));
        std::uint64_t bits;
        static_assert(sizeof(double) == sizeof(std::uint64_t));
        const double w = a.edge[static_cast<std::size_t>(e)];
        std::memcpy(&bits, &w, sizeof(bits));
        mix(bits);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// fixture record: {graph_hash, quantity, value, error}
inline nlohmann::json fixture_json(const std::string& hash, const std::string& quantity,
                                   double value, double error) {
    nlohmann::json j;
    j["graph_hash"] = hash;
    j["quantity"] = quantity;
    j["value"] = value;
    j["error"] = error;
    return j;
}

} // namespace errw
