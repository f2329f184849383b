#pragma once

#include <fstream>
#include <sstream>

#include "engine.hpp"

namespace odar {

// JSON-lines trace format: a header object, one event per line, a summary
// object last. This is the byte-exact golden-file format, so every key is
// emitted in a fixed order and rationals use their canonical text form.

inline nlohmann::ordered_json trace_header(const SimTrace& tr) {
    nlohmann::ordered_json h;
    h["instance"] = tr.instance_json;
    h["policy"] = tr.policy_name;
    h["params"] = tr.policy_params;
    h["checks"] = tr.checks;
    return h;
}

inline nlohmann::ordered_json trace_event_json(const TraceEvent& e) {
    nlohmann::ordered_json j;
    j["t"] = to_string(e.t);
    j["kind"] = e.kind;
    j["id"] = e.id;
    j["pos"] = point_to_string(e.pos);
    j["data"] = e.data;
    return j;
}

inline nlohmann::ordered_json trace_summary(const SimTrace& tr) {
    nlohmann::ordered_json s;
    s["completion"] = to_string(tr.completion_time);
    nlohmann::ordered_json opts = nlohmann::ordered_json::array();
    for (const auto& v : tr.opt_prefix_values) opts.push_back(to_string(v));
    s["opt_prefix"] = std::move(opts);
    nlohmann::ordered_json scheds = nlohmann::ordered_json::array();
    for (const auto& r : tr.schedule_records) {
        nlohmann::ordered_json js;
        js["i"] = r.index;
        js["t"] = to_string(r.start_time);
        js["p"] = point_to_string(r.start_point);
        js["requests"] = r.request_ids;
        js["len"] = to_string(r.planned_length);
        js["interrupted"] = r.interrupted;
        js["done"] = r.completion_time ? to_string(*r.completion_time) : "";
        scheds.push_back(std::move(js));
    }
    s["schedules"] = std::move(scheds);
    s["checks_passed"] = tr.checks_passed;
    nlohmann::ordered_json out;
    out["summary"] = std::move(s);
    return out;
}

inline std::string trace_to_jsonl(const SimTrace& tr) {
    std::ostringstream os;
    os << trace_header(tr).dump() << "\n";
    for (const auto& e : tr.events) os << trace_event_json(e).dump() << "\n";
    os << trace_summary(tr).dump() << "\n";
    return os.str();
}

inline void write_trace(const SimTrace& tr, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw StructuralError("cannot open trace file for writing: " + path);
    f << trace_to_jsonl(tr);
}

}  // namespace odar
