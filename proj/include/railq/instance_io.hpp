#pragma once

#include "railq/rail_model.hpp"
#include "railq/schedule.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace railq {

/// Parses the JSON instance format. Throws ModelError naming the offending field.
InstanceData parse_instance(std::string_view json_text);
std::string serialize_instance(const InstanceData& data);

InstanceData load_instance_data(const std::filesystem::path& path);
RailwayInstance load_instance(const std::filesystem::path& path);
void save_instance(const InstanceData& data, const std::filesystem::path& path);

/// "HH:MM" -> minutes since midnight.
Minutes parse_clock(std::string_view text);
std::string format_clock(Minutes minutes);

/// train,station,delay rows for every decision station.
void write_schedule_csv(std::ostream& out, const RailwayInstance& instance, const Schedule& schedule);
Schedule read_schedule_csv(std::istream& in, const RailwayInstance& instance);

/// Repeats every train `copies` times, shifted by multiples of `period` minutes. Copy k > 0 of
/// train "X" is named "X.k"; entry delays and turnovers are repeated with the trains.
InstanceData replicate_instance(const InstanceData& data, int copies, Minutes period);

/// train,block,t_in_min,t_out_min
void write_diagram_csv(std::ostream& out, const RailwayInstance& instance, const std::vector<BlockTimes>& rows);

} // namespace railq
