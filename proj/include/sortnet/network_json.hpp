#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "network.hpp"

namespace sortnet {

// Network file schema: {"n": int, "layers": [[[i,j],...],...]} with 1-based
// channel indices.

inline nlohmann::json network_to_json(const LayeredNetwork& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& layer : net.layers()) {
        nlohmann::json jl = nlohmann::json::array();
        for (const Comparator c : layer)
            jl.push_back({c.i, c.j});
        layers.push_back(std::move(jl));
    }
    return nlohmann::json{{"n", net.channels()}, {"layers", std::move(layers)}};
}

inline LayeredNetwork network_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        std::vector<Layer> layers;
        for (const auto& jl : j.at("layers")) {
            Layer layer;
            for (const auto& jc : jl) {
                if (!jc.is_array() || jc.size() != 2)
                    throw parse_error("comparator must be a pair [i, j]");
                layer.push_back({jc[0].get<int>(), jc[1].get<int>()});
            }
            layers.push_back(std::move(layer));
        }
        return LayeredNetwork(n, std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad network JSON: ") + e.what());
    }
}

inline LayeredNetwork read_network_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open network file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("bad JSON in " + path.string() + ": " + e.what());
    }
    return network_from_json(j);
}

inline void write_network_file(const std::filesystem::path& path, const LayeredNetwork& net) {
    std::ofstream out(path);
    if (!out)
        throw parse_error("cannot write network file: " + path.string());
    out << network_to_json(net).dump(2) << '\n';
}

} // namespace sortnet
