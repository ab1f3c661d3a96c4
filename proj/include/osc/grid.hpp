#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace osc {

// Sampled function on a regular isotropic grid. Cell (i_0,...,i_{dim-1}) has
// center origin[a] + spacing * i_a and is stored row-major, last axis fastest.
// Only masked cells carry meaningful values; operators never read unmasked
// cells. Invariants (validate()): dim >= 1, every shape entry >= 1, spacing
// > 0, at least one masked cell, every masked value finite.
struct GridFunction {
    int dim = 0;
    std::vector<std::int64_t> shape;
    double spacing = 0.0;
    std::vector<double> origin;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;

    std::size_t size() const;
    std::size_t masked_count() const;
    std::vector<std::int64_t> strides() const;  // row-major, last axis = 1

    double center(int axis, std::int64_t idx) const {
        return origin[static_cast<std::size_t>(axis)] + spacing * static_cast<double>(idx);
    }
    bool in_bounds(std::span<const std::int64_t> idx) const;
    std::size_t flat_index(std::span<const std::int64_t> idx) const;

    void validate() const;  // throws ConfigError
};

// Header JSON + raw data on disk also carry the measure constant c (mu = c * Leb).
struct GridFile {
    GridFunction grid;
    double measure_scale = 1.0;
};

// Header format: {"dim","shape","spacing","origin","c","data","mask"} with
// "data" a relative path to little-endian float64 values (row-major) and
// "mask" either a relative path to one byte per cell (0/1) or "full".
GridFile load_grid_function(const std::filesystem::path& header_path);

// Writes header + raw payloads next to it; paths stored relative. Values are
// written bit-exactly, so save followed by load round-trips.
void save_grid_function(const GridFunction& g, double c, const std::filesystem::path& header_path);

// c * h^dim * sum of masked values, compensated (Neumaier) summation in flat
// index order. Reproducible bit-for-bit for a given grid.
double integrate(const GridFunction& g, double c);

// c * h^dim * (masked cell count): the discrete mu(D).
double mask_measure(const GridFunction& g, double c);

// sup - inf over masked cells.
double value_range(const GridFunction& g);
double masked_min(const GridFunction& g);
double masked_max(const GridFunction& g);

// Masked cells with a face neighbor that is unmasked or outside the grid.
std::size_t perimeter_cell_count(const GridFunction& g);

// Diagonal of the bounding box of masked cell centers; upper bound for the
// domain diameter, used to cap default sweeps.
double domain_bbox_diameter(const GridFunction& g);

// Copy with every masked value shifted by -masked_min, so 0 <= f <= M.
GridFunction shift_to_nonnegative(const GridFunction& g);

// Halved spacing over the same extent (shape 2n-1 per axis); every new cell
// takes the value and mask of its nearest parent, ties to the lower index.
GridFunction refine_nearest(const GridFunction& g);

}  // namespace osc
