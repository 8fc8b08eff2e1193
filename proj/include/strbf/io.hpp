#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "strbf/kernels.hpp"
#include "strbf/network.hpp"
#include "strbf/series.hpp"

namespace strbf {

/// Shortest-roundtrip is not enough for diffing; every float we emit uses
/// 17 significant digits so text -> double is exact.
std::string format_double(double v);
double parse_double(std::string_view s);

/// Minimal CSV: comma separated, no quoting (none of our fields need it).
/// Lines starting with '#' are metadata and land in `comments`.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// `t,value` rows.
std::string series_to_csv(const TimeSeries& s);
TimeSeries series_from_csv(std::string_view text);

/// `cluster,center_0..center_{d-1},spread`.
std::string cluster_model_to_csv(const ClusterModel& m);

/// Topology in a leading '#' line, then
/// `branch,neuron,center_0..center_{d-1},spread,weight` per kernel and a
/// final `bias` row carrying the bias in the weight column.
std::string checkpoint_to_csv(const NetworkState& s);
NetworkState checkpoint_from_csv(std::string_view text);

}  // namespace strbf
