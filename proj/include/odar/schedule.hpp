#pragma once

#include <variant>
#include <vector>

#include "metric.hpp"

namespace odar {

struct MoveTo {
    Point target;
};
struct PickUp {
    int request = 0;
};
struct DropOff {
    int request = 0;
};
struct WaitUntil {
    Rational until;
};

using Action = std::variant<MoveTo, PickUp, DropOff, WaitUntil>;

// Ordered, timed sequence of server actions. Visit-only requests (a == b)
// appear as a PickUp immediately followed by a DropOff at one instant.
struct Schedule {
    Point start_point;
    Rational start_time;
    std::vector<Action> actions;
    Rational end_time;
    Point end_point;

    Rational length() const { return end_time - start_time; }
};

inline std::string action_to_string(const Action& a) {
    if (auto* m = std::get_if<MoveTo>(&a)) return "move " + point_to_string(m->target);
    if (auto* p = std::get_if<PickUp>(&a)) return "pick r" + std::to_string(p->request);
    if (auto* d = std::get_if<DropOff>(&a)) return "drop r" + std::to_string(d->request);
    return "wait " + to_string(std::get<WaitUntil>(a).until);
}

}  // namespace odar
