#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "lsavg/domain.hpp"

namespace lsavg {

/// Regular grid placement: cell i has center origin + (i + 1/2) h along each axis.
struct GridFrame {
    int n = 2;
    double h = 0.0;
    Point origin;
    std::array<int, kMaxDim> dims{1, 1, 1};

    std::size_t cell_count() const;
    std::size_t index(const std::array<int, kMaxDim>& ijk) const;
    std::array<int, kMaxDim> coords(std::size_t idx) const;
    Point center(std::size_t idx) const;
    /// Cell containing z, or nullopt when z lies outside the frame.
    std::optional<std::size_t> cell_of(const Point& z) const;
    /// True when both frames use the same h and their origins differ by whole cells.
    bool aligned_with(const GridFrame& other) const;
};

/// Frame covering the box with two padding cells, origin snapped to a multiple of h.
GridFrame frame_for(const Box& box, double h);

struct RasterDomain {
    GridFrame frame;
    std::vector<std::uint8_t> mask;  ///< 1 = cell center inside
    std::vector<double> dist;        ///< distance to boundary; 0 outside
    std::size_t insideCount = 0;
    double volumeEstimate = 0.0;
    DomainSpec spec;
    TruncationResult truncation;

    int n() const { return frame.n; }
    double h() const { return frame.h; }
    bool inside(std::size_t idx) const { return mask[idx] != 0; }
    const DomainSpec& effective() const { return truncation.effective; }
};

using RasterPtr = std::shared_ptr<const RasterDomain>;

/// Squared Euclidean distance, in cell units, from every cell to the nearest cell with
/// mask 0. Cells beyond the frame are not considered.
std::vector<double> squared_distance_transform(const GridFrame& frame, const std::vector<std::uint8_t>& mask);

/// Samples the truncated spec at cell centers and computes the boundary distance field.
/// The distance is the transform value minus h/2, capped by the analytic distance when one
/// exists, and never below h/2.
RasterPtr rasterize(const DomainSpec& spec, double h);
RasterPtr rasterize(const DomainSpec& spec, double h, const GridFrame& frame);

void write_raster_binary(std::ostream& os, const RasterDomain& raster);
/// Reads the header and mask written by write_raster_binary.
GridFrame read_raster_binary(std::istream& is, std::vector<std::uint8_t>& mask);
void write_raster_csv(std::ostream& os, const RasterDomain& raster);

void write_frame_header(std::ostream& os, const GridFrame& frame, const char magic[8]);
GridFrame read_frame_header(std::istream& is, const char magic[8]);

}  // namespace lsavg
