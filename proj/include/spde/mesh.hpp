#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spde {

/// Partition 0 = x_0 < x_1 < ... < x_{N+1} = 1 of the unit interval.
class Mesh {
public:
    /// Mesh from interior points, which must lie strictly inside (0,1) and increase.
    static Mesh from_interior(std::span<const double> interior_points);

    /// Uniform mesh with `interior_count` interior nodes (spacing 1/(interior_count+1)).
    static Mesh uniform(std::size_t interior_count);

    /// Mesh from a full node list including both endpoints.
    static Mesh from_nodes(std::span<const double> nodes);

    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t interior_count() const noexcept { return nodes_.size() - 2; }
    [[nodiscard]] std::size_t element_count() const noexcept { return nodes_.size() - 1; }
    [[nodiscard]] double h() const noexcept { return h_; }

    /// Length of element e = [x_e, x_{e+1}].
    [[nodiscard]] double gap(std::size_t e) const noexcept { return nodes_[e + 1] - nodes_[e]; }

    /// Coordinate of interior node j (0-based), i.e. x_{j+1}.
    [[nodiscard]] double interior_node(std::size_t j) const noexcept { return nodes_[j + 1]; }

    /// JSON array of node coordinates.
    [[nodiscard]] std::string to_json() const;
    static Mesh from_json(const std::string& text);

    friend bool operator==(const Mesh&, const Mesh&) = default;

private:
    explicit Mesh(std::vector<double> nodes);

    std::vector<double> nodes_;
    double h_ = 0.0;
};

}  // namespace spde
