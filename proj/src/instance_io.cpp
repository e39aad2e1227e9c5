#include "railq/instance_io.hpp"

#include "railq/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace railq {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name, const std::string& where) {
    if (!obj.is_object()) throw ModelError(where + ": expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) throw ModelError(where + "." + name + ": missing");
    return *it;
}

std::string text(const json& obj, const char* name, const std::string& where) {
    const auto& v = field(obj, name, where);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ModelError(where + "." + name + ": expected a string");
}

std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ModelError(where + ": expected an integer");
    return v.get<std::int64_t>();
}

Minutes time_value(const json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_clock(v.get<std::string>());
        } catch (const std::exception& e) {
            throw ModelError(where + ": " + e.what());
        }
    }
    return integer(v, where);
}

Rational rational(const json& v, const std::string& where) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number()) return parse_rational(v.dump());
    } catch (const std::exception& e) {
        throw ModelError(where + ": " + e.what());
    }
    throw ModelError(where + ": expected a number or \"p/q\" string");
}

json rational_json(const Rational& r) {
    const auto s = format_rational(r);
    if (s.find('/') != std::string::npos) return s;
    return json::parse(s);
}

} // namespace

Minutes parse_clock(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= text.size()) {
        throw std::invalid_argument("malformed clock time '" + std::string(text) + "'");
    }
    Minutes hours = 0;
    Minutes minutes = 0;
    for (char c : text.substr(0, colon)) {
        if (c < '0' || c > '9') throw std::invalid_argument("malformed clock time '" + std::string(text) + "'");
        hours = hours * 10 + (c - '0');
    }
    for (char c : text.substr(colon + 1)) {
        if (c < '0' || c > '9') throw std::invalid_argument("malformed clock time '" + std::string(text) + "'");
        minutes = minutes * 10 + (c - '0');
    }
    if (minutes >= 60) throw std::invalid_argument("malformed clock time '" + std::string(text) + "'");
    return hours * 60 + minutes;
}

std::string format_clock(Minutes minutes) {
    const bool negative = minutes < 0;
    const Minutes m = negative ? -minutes : minutes;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02lld:%02lld", negative ? "-" : "", static_cast<long long>(m / 60),
                  static_cast<long long>(m % 60));
    return buf;
}

InstanceData parse_instance(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("instance: malformed JSON: ") + e.what());
    }
    InstanceData data;
    const std::string root = "instance";
    data.schema_version = static_cast<int>(integer(field(doc, "schema_version", root), root + ".schema_version"));
    if (data.schema_version != 1) {
        throw ModelError(root + ".schema_version: unsupported version " + std::to_string(data.schema_version));
    }
    if (doc.contains("name")) data.name = text(doc, "name", root);
    if (doc.contains("note")) data.note = text(doc, "note", root);

    const auto& blocks = field(doc, "blocks", root);
    if (!blocks.is_array()) throw ModelError("blocks: expected an array");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto where = "blocks[" + std::to_string(i) + "]";
        Block b;
        b.id = text(blocks[i], "id", where);
        const auto kind = text(blocks[i], "kind", where);
        if (kind == "station") {
            b.kind = BlockKind::station;
        } else if (kind == "line") {
            b.kind = BlockKind::line;
        } else {
            throw ModelError(where + ".kind: expected \"station\" or \"line\"");
        }
        b.capacity = static_cast<int>(integer(field(blocks[i], "capacity", where), where + ".capacity"));
        data.blocks.push_back(std::move(b));
    }

    const auto& trains = field(doc, "trains", root);
    if (!trains.is_array()) throw ModelError("trains: expected an array");
    for (std::size_t i = 0; i < trains.size(); ++i) {
        const auto where = "trains[" + std::to_string(i) + "]";
        TrainSpec t;
        t.id = text(trains[i], "id", where);
        const auto dir = text(trains[i], "direction", where);
        if (dir == "dir0") {
            t.direction = Direction::dir0;
        } else if (dir == "dir1") {
            t.direction = Direction::dir1;
        } else {
            throw ModelError(where + ".direction: expected \"dir0\" or \"dir1\"");
        }
        const auto& route = field(trains[i], "route", where);
        if (!route.is_array()) throw ModelError(where + ".route: expected an array");
        for (const auto& r : route) {
            if (r.is_string()) {
                t.route.push_back(r.get<std::string>());
            } else if (r.is_number_integer()) {
                t.route.push_back(std::to_string(r.get<std::int64_t>()));
            } else {
                throw ModelError(where + ".route: expected block ids");
            }
        }
        t.weight = rational(field(trains[i], "weight", where), where + ".weight");
        t.d_max = integer(field(trains[i], "d_max", where), where + ".d_max");
        data.trains.push_back(std::move(t));
    }

    const auto& timetable = field(doc, "timetable", root);
    if (!timetable.is_array()) throw ModelError("timetable: expected an array");
    for (std::size_t i = 0; i < timetable.size(); ++i) {
        const auto where = "timetable[" + std::to_string(i) + "]";
        TimetableEntry e;
        e.train = text(timetable[i], "train", where);
        e.block = text(timetable[i], "block", where);
        e.t_out = time_value(field(timetable[i], "t_out", where), where + ".t_out");
        e.p_timetable = integer(field(timetable[i], "p_timetable", where), where + ".p_timetable");
        e.p_min = integer(field(timetable[i], "p_min", where), where + ".p_min");
        data.timetable.push_back(std::move(e));
    }

    if (doc.contains("scenario")) {
        const auto& scenario = doc["scenario"];
        if (scenario.contains("entry_delays")) {
            const auto& delays = scenario["entry_delays"];
            if (!delays.is_object()) throw ModelError("scenario.entry_delays: expected an object");
            for (const auto& [train, value] : delays.items()) {
                data.scenario.entry_delays[train] = integer(value, "scenario.entry_delays." + train);
            }
        }
        if (scenario.contains("turnover_pairs")) {
            const auto& pairs = scenario["turnover_pairs"];
            if (!pairs.is_array()) throw ModelError("scenario.turnover_pairs: expected an array");
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto where = "scenario.turnover_pairs[" + std::to_string(i) + "]";
                TurnoverSpec t;
                t.from = text(pairs[i], "from", where);
                t.to = text(pairs[i], "to", where);
                t.min_turnover = integer(field(pairs[i], "min_turnover", where), where + ".min_turnover");
                data.scenario.turnover_pairs.push_back(std::move(t));
            }
        }
    }

    if (doc.contains("penalties")) {
        const auto& p = doc["penalties"];
        data.penalties.p_sum = rational(field(p, "p_sum", "penalties"), "penalties.p_sum");
        data.penalties.p_pair = rational(field(p, "p_pair", "penalties"), "penalties.p_pair");
    }
    return data;
}

std::string serialize_instance(const InstanceData& data) {
    json doc = json::object();
    doc["schema_version"] = data.schema_version;
    doc["name"] = data.name;
    if (!data.note.empty()) doc["note"] = data.note;
    doc["blocks"] = json::array();
    for (const auto& b : data.blocks) {
        doc["blocks"].push_back({{"id", b.id}, {"kind", std::string(to_string(b.kind))}, {"capacity", b.capacity}});
    }
    doc["trains"] = json::array();
    for (const auto& t : data.trains) {
        doc["trains"].push_back({{"id", t.id},
                                 {"direction", std::string(to_string(t.direction))},
                                 {"route", t.route},
                                 {"weight", rational_json(t.weight)},
                                 {"d_max", t.d_max}});
    }
    doc["timetable"] = json::array();
    for (const auto& e : data.timetable) {
        doc["timetable"].push_back({{"train", e.train},
                                    {"block", e.block},
                                    {"t_out", e.t_out},
                                    {"p_timetable", e.p_timetable},
                                    {"p_min", e.p_min}});
    }
    json delays = json::object();
    for (const auto& [train, d] : data.scenario.entry_delays) delays[train] = d;
    json pairs = json::array();
    for (const auto& t : data.scenario.turnover_pairs) {
        pairs.push_back({{"from", t.from}, {"to", t.to}, {"min_turnover", t.min_turnover}});
    }
    doc["scenario"] = {{"entry_delays", delays}, {"turnover_pairs", pairs}};
    doc["penalties"] = {{"p_sum", rational_json(data.penalties.p_sum)},
                        {"p_pair", rational_json(data.penalties.p_pair)}};
    return doc.dump(2) + "\n";
}

InstanceData load_instance_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open instance file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_instance(buffer.str());
    } catch (const ModelError& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
}

RailwayInstance load_instance(const std::filesystem::path& path) {
    auto data = load_instance_data(path);
    try {
        return RailwayInstance(std::move(data));
    } catch (const ModelError& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
}

void save_instance(const InstanceData& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write instance file '" + path.string() + "'");
    out << serialize_instance(data);
}

void write_schedule_csv(std::ostream& out, const RailwayInstance& instance, const Schedule& schedule) {
    check_shape(instance, schedule);
    out << "train,station,delay\n";
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
            out << instance.route(j).id << ',' << instance.block(instance.route(j).stations[k]).id << ','
                << schedule.at(j, k) << '\n';
        }
    }
}

Schedule read_schedule_csv(std::istream& in, const RailwayInstance& instance) {
    Schedule schedule;
    schedule.delays.resize(instance.train_count());
    std::vector<std::vector<bool>> seen(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        schedule.delays[j].assign(instance.decision_count(j), 0);
        seen[j].assign(instance.decision_count(j), false);
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.rfind("train,", 0) == 0) continue;
        std::stringstream row(line);
        std::string train;
        std::string station;
        std::string delay;
        if (!std::getline(row, train, ',') || !std::getline(row, station, ',') || !std::getline(row, delay)) {
            throw ModelError("schedule line " + std::to_string(lineno) + ": expected train,station,delay");
        }
        const auto j = instance.train_index(train);
        const auto rank = instance.station_rank(j, instance.block_index(station));
        if (!rank || *rank >= instance.decision_count(j)) {
            throw ModelError("schedule line " + std::to_string(lineno) + ": '" + station +
                             "' is not a decision station of '" + train + "'");
        }
        try {
            schedule.delays[j][*rank] = std::stoll(delay);
        } catch (const std::exception&) {
            throw ModelError("schedule line " + std::to_string(lineno) + ": bad delay '" + delay + "'");
        }
        seen[j][*rank] = true;
    }
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (std::size_t k = 0; k < seen[j].size(); ++k) {
            if (!seen[j][k]) {
                throw ModelError("schedule: missing delay for (" + instance.route(j).id + ", " +
                                 instance.block(instance.route(j).stations[k]).id + ")");
            }
        }
    }
    return schedule;
}

InstanceData replicate_instance(const InstanceData& data, int copies, Minutes period) {
    if (copies < 1) throw ParameterError("copies must be >= 1");
    if (period <= 0) throw ParameterError("period must be positive");
    auto rename = [](const std::string& id, int k) { return k == 0 ? id : id + "." + std::to_string(k); };
    InstanceData out = data;
    out.trains.clear();
    out.timetable.clear();
    out.scenario = {};
    for (int k = 0; k < copies; ++k) {
        for (auto t : data.trains) {
            t.id = rename(t.id, k);
            out.trains.push_back(std::move(t));
        }
        for (auto e : data.timetable) {
            e.train = rename(e.train, k);
            e.t_out += k * period;
            out.timetable.push_back(std::move(e));
        }
        for (const auto& [train, d] : data.scenario.entry_delays) out.scenario.entry_delays[rename(train, k)] = d;
        for (auto t : data.scenario.turnover_pairs) {
            t.from = rename(t.from, k);
            t.to = rename(t.to, k);
            out.scenario.turnover_pairs.push_back(std::move(t));
        }
    }
    if (copies > 1) out.name = data.name + "-x" + std::to_string(copies);
    return out;
}

void write_diagram_csv(std::ostream& out, const RailwayInstance& instance, const std::vector<BlockTimes>& rows) {
    out << "train,block,t_in_min,t_out_min\n";
    for (const auto& r : rows) {
        out << instance.route(r.train).id << ',' << instance.block(r.block).id << ',' << r.t_in << ',' << r.t_out
            << '\n';
    }
}

} // namespace railq
