#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metric.hpp"

namespace odar {

// Transportation request (a, b; t): appears at a at release time t > 0 and
// must be carried to b. Requests with a == b are visit-only: the server
// serves them by being at the point at or after t, and they occupy no
// capacity.
struct Request {
    int id = 0;
    Point source;
    Point destination;
    Rational release;

    bool is_visit(const MetricSpace& space) const {
        return space.distance(source, destination) == 0;
    }
};

// nullopt = unbounded capacity
using Capacity = std::optional<int>;

struct Instance {
    MetricSpace space = MetricSpace::real_line();
    Capacity capacity;  // unbounded by default
    std::vector<Request> requests;

    int capacity_or(int n) const { return capacity ? *capacity : n; }

    nlohmann::ordered_json to_json() const;
    static Instance from_json(const nlohmann::json& j);
};

// Violations are data, not errors: every broken invariant is reported.
inline std::vector<std::string> validate(const Instance& inst) {
    std::vector<std::string> out;
    if (inst.capacity && *inst.capacity < 1) out.push_back("capacity must be positive");
    Rational prev(0);
    bool first = true;
    for (const auto& r : inst.requests) {
        std::string tag = "request " + std::to_string(r.id) + ": ";
        if (!inst.space.valid_point(r.source)) out.push_back(tag + "source not a valid point");
        if (!inst.space.valid_point(r.destination))
            out.push_back(tag + "destination not a valid point");
        if (r.release <= 0) out.push_back(tag + "release time must be positive");
        if (!first && r.release <= prev)
            out.push_back(tag + "non-strict release order (releases must strictly increase)");
        prev = r.release;
        first = false;
    }
    return out;
}

// --- JSON: {"space":..., "capacity": int|"inf",
// ---        "requests":[{"a":..., "b":..., "t":"p/q"}]}
// Line endpoints are rational coordinates; finite-metric endpoints are
// vertex indices.

inline nlohmann::ordered_json point_to_json(const MetricSpace& space, const Point& p) {
    if (space.is_line()) return rational_to_json(std::get<LineCoord>(p).x);
    return std::get<Vertex>(p).id;
}

inline Point point_from_json(const MetricSpace& space, const nlohmann::json& j) {
    if (space.is_line()) return LineCoord{rational_from_json(j)};
    if (!j.is_number_integer())
        throw StructuralError("finite-metric request endpoints must be vertex indices");
    return Vertex{j.get<int>()};
}

inline nlohmann::ordered_json Instance::to_json() const {
    nlohmann::ordered_json j;
    j["space"] = space.to_json();
    if (capacity)
        j["capacity"] = *capacity;
    else
        j["capacity"] = "inf";
    nlohmann::ordered_json reqs = nlohmann::ordered_json::array();
    for (const auto& r : requests) {
        nlohmann::ordered_json jr;
        jr["a"] = point_to_json(space, r.source);
        jr["b"] = point_to_json(space, r.destination);
        jr["t"] = to_string(r.release);
        reqs.push_back(std::move(jr));
    }
    j["requests"] = std::move(reqs);
    return j;
}

inline Instance Instance::from_json(const nlohmann::json& j) {
    Instance inst;
    inst.space = MetricSpace::from_json(j.at("space"));
    const auto& cap = j.at("capacity");
    if (cap.is_string()) {
        if (cap.get<std::string>() != "inf") throw StructuralError("capacity must be int or \"inf\"");
        inst.capacity = std::nullopt;
    } else {
        inst.capacity = cap.get<int>();
    }
    int id = 0;
    for (const auto& jr : j.at("requests")) {
        Request r;
        r.id = id++;
        r.source = point_from_json(inst.space, jr.at("a"));
        r.destination = point_from_json(inst.space, jr.at("b"));
        r.release = rational_from_json(jr.at("t"));
        inst.requests.push_back(std::move(r));
    }
    return inst;
}

}  // namespace odar
