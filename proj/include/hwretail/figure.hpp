#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "hwretail/sweep.hpp"

namespace hwretail {

enum class FigureKind { bifurcation, partition_heatmap, range_chart };
std::string_view to_string(FigureKind kind);
FigureKind parse_figure_kind(std::string_view name);

/// Standalone SVG 1.1 documents. Output depends only on the input data.
std::string bifurcation_svg(const Bifurcation& b);
std::string partition_svg(std::span<const PartitionCell> cells, std::string_view title);
std::string range_chart_svg(const StabilityRanges& ranges, std::string_view title);

/// Number of legend entries (distinct winner_M values) a partition heatmap will carry.
std::size_t partition_legend_size(std::span<const PartitionCell> cells);

/// Writes text to a file, throwing Error on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hwretail
