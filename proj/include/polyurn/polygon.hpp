#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace polyurn {

/// Ring of v vertices labelled 0..v-1. Edge j joins vertex j to vertex j+1
/// (mod v), so edges share the label set with vertices.
struct PolygonGraph {
    int vertex_count;

    explicit PolygonGraph(int v) : vertex_count(v) {
        if (v < 3)
            throw std::invalid_argument("PolygonGraph: need at least 3 vertices, got " +
                                        std::to_string(v));
    }

    int next(int j) const {
        check_vertex(j);
        return j + 1 == vertex_count ? 0 : j + 1;
    }

    int prev(int j) const {
        check_vertex(j);
        return j == 0 ? vertex_count - 1 : j - 1;
    }

    /// The two neighbors of j, counterclockwise first: (j-1, j+1) mod v.
    std::pair<int, int> neighbors(int j) const { return {prev(j), next(j)}; }

    bool adjacent(int u, int w) const { return next(u) == w || next(w) == u; }

    /// Label of the edge joining u and w: the j with {u,w} = {j, j+1}.
    int edge_between(int u, int w) const {
        if (next(u) == w) return u;
        if (next(w) == u) return w;
        throw std::invalid_argument("edge_between: vertices " + std::to_string(u) + " and " +
                                    std::to_string(w) + " are not adjacent on a " +
                                    std::to_string(vertex_count) + "-gon");
    }

    friend bool operator==(const PolygonGraph&, const PolygonGraph&) = default;

private:
    void check_vertex(int j) const {
        if (j < 0 || j >= vertex_count)
            throw std::out_of_range("vertex index " + std::to_string(j) + " outside 0.." +
                                    std::to_string(vertex_count - 1));
    }
};

}  // namespace polyurn
