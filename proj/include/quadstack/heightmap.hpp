#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "quadstack/core.hpp"

namespace quadstack {

// n_rows x n_cols grid of terrain heights. Cell (0,0) center sits at
// (origin_x, origin_y); columns advance along world x, rows along world y.
// Immutable after construction; all queries are pure.
struct HeightMap {
    int n_rows = 0;
    int n_cols = 0;
    double resolution = 0.0;  // meters per cell
    double origin_x = 0.0;    // world x of cell (0,0) center
    double origin_y = 0.0;
    std::vector<double> heights;  // row-major, n_rows * n_cols

    double at(int row, int col) const { return heights[static_cast<size_t>(row) * n_cols + col]; }
    double& at(int row, int col) { return heights[static_cast<size_t>(row) * n_cols + col]; }

    bool valid_cell(CellIndex c) const {
        return c.row >= 0 && c.row < n_rows && c.col >= 0 && c.col < n_cols;
    }

    // Physical extent: cells cover half a resolution beyond the outer centers.
    double min_x() const { return origin_x - 0.5 * resolution; }
    double max_x() const { return origin_x + (n_cols - 0.5) * resolution; }
    double min_y() const { return origin_y - 0.5 * resolution; }
    double max_y() const { return origin_y + (n_rows - 0.5) * resolution; }

    bool contains(double x, double y) const {
        return x >= min_x() && x <= max_x() && y >= min_y() && y <= max_y();
    }
};

HeightMap make_flat_map(int n, double resolution, double origin_x = 0.0, double origin_y = 0.0);

// Map file format: two header lines ("resolution <m>", "origin <x> <y>")
// followed by whitespace-separated rows of heights, one grid row per line.
HeightMap parse_heightmap(std::istream& in);
HeightMap parse_heightmap(const std::string& text);
std::string serialize_heightmap(const HeightMap& map);

// Bilinear interpolation between cell centers; the outer half-cell band
// extends edge values. Throws BoundsError outside the physical extent.
double height_at(const HeightMap& map, double x, double y);

// As height_at but clamps the query onto the map instead of throwing.
double height_at_clamped(const HeightMap& map, double x, double y);

// Max |h(cell) - h(neighbor)| over the 8-neighborhood, clipped at borders.
double height_deviation(const HeightMap& map, CellIndex cell);

// Nearest-center quantization. Throws BoundsError outside the extent.
CellIndex world_to_cell(const HeightMap& map, double x, double y);
std::pair<double, double> cell_to_world(const HeightMap& map, CellIndex cell);

}  // namespace quadstack
