#include <catch2/catch_amalgamated.hpp>

#include "odar/instance.hpp"

using namespace odar;

namespace {

Request req(int id, long long a, long long b, Rational t) {
    return {id, line_point(rat(a)), line_point(rat(b)), std::move(t)};
}

}  // namespace

TEST_CASE("validation reports every violation as data") {
    Instance inst;
    inst.requests = {req(0, 0, 1, rat(1)), req(1, 0, -1, rat(1))};
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].find("non-strict release order") != std::string::npos);

    inst.requests = {req(0, 0, 1, rat(0))};
    v = validate(inst);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].find("release time must be positive") != std::string::npos);

    inst.requests.clear();
    REQUIRE(validate(inst).empty());

    inst.capacity = 0;
    REQUIRE(validate(inst).size() == 1);
}

TEST_CASE("finite-metric endpoint validity") {
    Instance inst;
    Rational z(0), one(1);
    inst.space = MetricSpace::finite({{z, one}, {one, z}});
    inst.requests = {{0, vertex(0), vertex(5), rat(1)}};
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].find("destination") != std::string::npos);
}

TEST_CASE("instance JSON round-trip keeps exact values") {
    Instance inst;
    inst.capacity = 2;
    inst.requests = {req(0, 0, 1, rat(1, 100)), {1, line_point(rat(-101, 100)),
                                                 line_point(rat(-101, 100)), rat(301, 100)}};
    auto j = inst.to_json();
    Instance back = Instance::from_json(j);
    REQUIRE(back.capacity == inst.capacity);
    REQUIRE(back.requests.size() == 2);
    REQUIRE(back.requests[1].source == inst.requests[1].source);
    REQUIRE(back.requests[1].release == inst.requests[1].release);
    REQUIRE(j.dump().find("\"t\":\"301/100\"") != std::string::npos);

    Instance unbounded;
    unbounded.requests = {req(0, 0, 1, rat(1))};
    REQUIRE(unbounded.to_json()["capacity"] == "inf");
    REQUIRE_FALSE(Instance::from_json(unbounded.to_json()).capacity.has_value());
}
