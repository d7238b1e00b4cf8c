#include "quadstack/heightmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace quadstack {

namespace {

// Shortest representation that parses back to the same double.
void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

bool parse_number(const std::string& tok, double& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

void validate(const HeightMap& m) {
    if (m.n_rows <= 0 || m.n_cols <= 0)
        throw ParseError("empty height grid", 3);
    if (!(m.resolution > 0.0))
        throw ParseError("resolution must be positive", 1);
    for (double h : m.heights)
        if (!std::isfinite(h)) throw ParseError("non-finite height value", 3);
}

}  // namespace

HeightMap make_flat_map(int n, double resolution, double origin_x, double origin_y) {
    HeightMap m;
    m.n_rows = n;
    m.n_cols = n;
    m.resolution = resolution;
    m.origin_x = origin_x;
    m.origin_y = origin_y;
    m.heights.assign(static_cast<size_t>(n) * n, 0.0);
    return m;
}

HeightMap parse_heightmap(std::istream& in) {
    HeightMap map;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("missing 'resolution' header at line 1", 1);
    line_no = 1;
    {
        auto toks = split_ws(line);
        if (toks.size() != 2 || toks[0] != "resolution" || !parse_number(toks[1], map.resolution))
            throw ParseError("expected 'resolution <m>' at line 1", 1);
    }
    if (!std::getline(in, line))
        throw ParseError("missing 'origin' header at line 2", 2);
    line_no = 2;
    {
        auto toks = split_ws(line);
        if (toks.size() != 3 || toks[0] != "origin" || !parse_number(toks[1], map.origin_x) ||
            !parse_number(toks[2], map.origin_y))
            throw ParseError("expected 'origin <x> <y>' at line 2", 2);
    }

    int n_cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = split_ws(line);
        if (toks.empty()) break;  // trailing blank line ends the grid
        if (n_cols < 0)
            n_cols = static_cast<int>(toks.size());
        else if (static_cast<int>(toks.size()) != n_cols)
            throw ParseError("ragged row at line " + std::to_string(line_no), line_no);
        for (const auto& t : toks) {
            double h;
            if (!parse_number(t, h))
                throw ParseError("non-numeric cell '" + t + "' at line " + std::to_string(line_no),
                                 line_no);
            map.heights.push_back(h);
        }
        ++map.n_rows;
    }
    map.n_cols = std::max(n_cols, 0);
    validate(map);
    return map;
}

HeightMap parse_heightmap(const std::string& text) {
    std::istringstream ss(text);
    return parse_heightmap(ss);
}

std::string serialize_heightmap(const HeightMap& map) {
    std::string out;
    out.reserve(map.heights.size() * 4 + 64);
    out += "resolution ";
    append_number(out, map.resolution);
    out += "\norigin ";
    append_number(out, map.origin_x);
    out += ' ';
    append_number(out, map.origin_y);
    out += '\n';
    for (int r = 0; r < map.n_rows; ++r) {
        for (int c = 0; c < map.n_cols; ++c) {
            if (c) out += ' ';
            append_number(out, map.at(r, c));
        }
        out += '\n';
    }
    return out;
}

double height_at(const HeightMap& map, double x, double y) {
    if (!map.contains(x, y))
        throw BoundsError("height query out of bounds at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")",
                          x, y);
    return height_at_clamped(map, x, y);
}

double height_at_clamped(const HeightMap& map, double x, double y) {
    // Continuous cell coordinates clamped to the center lattice; the outer
    // half-cell band therefore extends edge values.
    double gc = std::clamp((x - map.origin_x) / map.resolution, 0.0, double(map.n_cols - 1));
    double gr = std::clamp((y - map.origin_y) / map.resolution, 0.0, double(map.n_rows - 1));
    int c0 = std::min(static_cast<int>(gc), map.n_cols - 2 >= 0 ? map.n_cols - 2 : 0);
    int r0 = std::min(static_cast<int>(gr), map.n_rows - 2 >= 0 ? map.n_rows - 2 : 0);
    if (map.n_cols == 1) c0 = 0;
    if (map.n_rows == 1) r0 = 0;
    int c1 = std::min(c0 + 1, map.n_cols - 1);
    int r1 = std::min(r0 + 1, map.n_rows - 1);
    double fc = gc - c0;
    double fr = gr - r0;
    double h00 = map.at(r0, c0), h01 = map.at(r0, c1);
    double h10 = map.at(r1, c0), h11 = map.at(r1, c1);
    return (1.0 - fr) * ((1.0 - fc) * h00 + fc * h01) + fr * ((1.0 - fc) * h10 + fc * h11);
}

double height_deviation(const HeightMap& map, CellIndex cell) {
    double h = map.at(cell.row, cell.col);
    double dev = 0.0;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            int r = cell.row + dr, c = cell.col + dc;
            if (r < 0 || r >= map.n_rows || c < 0 || c >= map.n_cols) continue;
            dev = std::max(dev, std::abs(h - map.at(r, c)));
        }
    }
    return dev;
}

CellIndex world_to_cell(const HeightMap& map, double x, double y) {
    if (!map.contains(x, y))
        throw BoundsError("cell query out of bounds at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")",
                          x, y);
    int col = static_cast<int>(std::lround((x - map.origin_x) / map.resolution));
    int row = static_cast<int>(std::lround((y - map.origin_y) / map.resolution));
    col = std::clamp(col, 0, map.n_cols - 1);
    row = std::clamp(row, 0, map.n_rows - 1);
    return {row, col};
}

std::pair<double, double> cell_to_world(const HeightMap& map, CellIndex cell) {
    return {map.origin_x + cell.col * map.resolution, map.origin_y + cell.row * map.resolution};
}

}  // namespace quadstack
