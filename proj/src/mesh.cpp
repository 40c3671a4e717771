#include "spde/mesh.hpp"

#include "spde/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace spde {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 3) {
        throw EmptyPartition("mesh needs at least one interior node");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
        throw InvalidInput("mesh must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i + 1]) || !(nodes_[i + 1] > nodes_[i])) {
            throw NonMonotonePartition("mesh nodes must be strictly increasing");
        }
        h_ = std::max(h_, nodes_[i + 1] - nodes_[i]);
    }
}

Mesh Mesh::from_interior(std::span<const double> interior_points)
{
    if (interior_points.empty()) {
        throw EmptyPartition("mesh needs at least one interior node");
    }
    std::vector<double> nodes;
    nodes.reserve(interior_points.size() + 2);
    nodes.push_back(0.0);
    for (double p : interior_points) {
        if (!(p > 0.0 && p < 1.0)) {
            throw NonMonotonePartition("interior point outside (0,1)");
        }
        nodes.push_back(p);
    }
    nodes.push_back(1.0);
    return Mesh(std::move(nodes));
}

Mesh Mesh::uniform(std::size_t interior_count)
{
    if (interior_count == 0) {
        throw EmptyPartition("uniform mesh needs at least one interior node");
    }
    const std::size_t n = interior_count + 1;
    std::vector<double> nodes(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        nodes[i] = static_cast<double>(i) / static_cast<double>(n);
    }
    nodes.back() = 1.0;
    return Mesh(std::move(nodes));
}

Mesh Mesh::from_nodes(std::span<const double> nodes)
{
    return Mesh(std::vector<double>(nodes.begin(), nodes.end()));
}

std::string Mesh::to_json() const
{
    return nlohmann::json(nodes_).dump();
}

Mesh Mesh::from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("mesh JSON: ") + e.what());
    }
    if (!j.is_array()) {
        throw InvalidInput("mesh JSON must be an array of node coordinates");
    }
    std::vector<double> nodes;
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw InvalidInput("mesh JSON must contain only numbers");
        }
        nodes.push_back(v.get<double>());
    }
    return Mesh(std::move(nodes));
}

}  // namespace spde
