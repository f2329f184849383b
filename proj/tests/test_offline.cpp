#include <catch2/catch_amalgamated.hpp>

#include "odar/harness.hpp"
#include "odar/offline.hpp"

using namespace odar;

namespace {

const MetricSpace kLine = MetricSpace::real_line();

Request req(int id, Rational a, Rational b, Rational t = Rational(1)) {
    return {id, LineCoord{std::move(a)}, LineCoord{std::move(b)}, std::move(t)};
}

}  // namespace

TEST_CASE("shortest schedule basics") {
    // single request from the start point
    auto r1 = shortest_schedule(kLine, std::nullopt, {req(0, rat(0), rat(1))}, line_point(rat(0)));
    REQUIRE(r1.value == 1);

    // symmetric pair: length 3, negative side first
    auto r2 = shortest_schedule(kLine, std::nullopt,
                                {req(0, rat(0), rat(1)), req(1, rat(0), rat(-1))},
                                line_point(rat(0)));
    REQUIRE(r2.value == 3);
    bool dropped_neg_first = false;
    for (const auto& a : r2.schedule.actions) {
        if (auto* d = std::get_if<DropOff>(&a)) {
            dropped_neg_first = d->request == 1;
            break;
        }
    }
    REQUIRE(dropped_neg_first);

    // capacity 1 forces serving (0,1) before (2,3): 3 against 6 the other way
    auto r3 = shortest_schedule(kLine, 1, {req(0, rat(0), rat(1)), req(1, rat(2), rat(3))},
                                line_point(rat(0)));
    REQUIRE(r3.value == 3);

    // empty set is a zero-length schedule
    auto r0 = shortest_schedule(kLine, std::nullopt, {}, line_point(rat(5)));
    REQUIRE(r0.value == 0);
    REQUIRE(r0.schedule.end_point == line_point(rat(5)));
}

TEST_CASE("shortest schedule length is invariant under relabeling") {
    std::vector<Request> reqs = {req(0, rat(0), rat(2)), req(1, rat(-1), rat(1)),
                                 req(2, rat(3), rat(3))};
    auto base = shortest_schedule(kLine, 1, reqs, line_point(rat(0)));
    std::vector<Request> relabeled = {reqs[2], reqs[0], reqs[1]};
    relabeled[0].id = 0;
    relabeled[1].id = 1;
    relabeled[2].id = 2;
    auto perm = shortest_schedule(kLine, 1, relabeled, line_point(rat(0)));
    REQUIRE(base.value == perm.value);
}

TEST_CASE("offline optimum on pinned sets") {
    // forced wait until the release, then deliver
    Instance late;
    late.requests = {req(0, rat(0), rat(1), rat(10))};
    REQUIRE(opt_prefix(late, rat(10)) == 11);

    // a visit at 1 released at 1/2 is reached at time 1
    Instance lemma;
    lemma.requests = {req(0, rat(1), rat(1), rat(1, 2))};
    REQUIRE(opt_prefix(lemma, rat(1, 2)) == 1);

    // the three-request construction hits its release exactly
    Instance p2 = generate_lower_bound({Family::Prop2, rat(1), rat(1, 100)});
    REQUIRE(opt_prefix(p2, rat(301, 100)) == rat(301, 100));
    REQUIRE(opt_prefix(p2, rat(2, 100)) == 3);
    REQUIRE(opt_prefix(p2, rat(1, 200)) == 0);

    Instance p3 = generate_lower_bound({Family::Prop3, rat(1, 2), rat(1, 100)});
    Rational a = rat(1, 2), e = rat(1, 100);
    REQUIRE(opt_prefix(p3, e) == 1);
    REQUIRE(opt_prefix(p3, a + e) == a + 1 + e);
    REQUIRE(opt_prefix(p3, rat(1, 1000)) == 0);
}

TEST_CASE("deliver and return") {
    REQUIRE(deliver_and_return_time(kLine, std::nullopt, {}, line_point(rat(0))) == 0);
    REQUIRE(deliver_and_return_time(kLine, std::nullopt, {}, line_point(rat(-3, 2))) == rat(3, 2));
    REQUIRE(deliver_and_return_time(kLine, 1, {req(1, rat(0), rat(-1), rat(2, 100))},
                                    line_point(rat(0))) == 2);
    // both dropoff orders cost 6 from the origin
    REQUIRE(deliver_and_return_time(kLine, 2,
                                    {req(0, rat(0), rat(2)), req(1, rat(0), rat(3))},
                                    line_point(rat(0))) == 6);
}

TEST_CASE("pruned solver agrees with the exhaustive one") {
    Rng rng(77);
    StressConfig cfg;
    cfg.n_max = 4;
    for (int iter = 0; iter < 120; ++iter) {
        Instance inst = random_line_instance(rng, cfg);
        CAPTURE(inst.to_json().dump());
        OptCache cache(inst);
        Rational prev(0);
        for (size_t k = 0; k <= inst.requests.size(); ++k) {
            std::vector<Request> prefix(inst.requests.begin(), inst.requests.begin() + k);
            Rational oracle = oracle_opt_requests(inst.space, inst.capacity, prefix);
            REQUIRE(cache.opt_prefix(k) == oracle);
            REQUIRE(cache.opt_prefix(k) >= prev);  // monotone in the prefix
            prev = cache.opt_prefix(k);
        }
        // release-free relaxation bound from the origin
        Rational s = shortest_schedule(inst.space, inst.capacity, inst.requests,
                                       inst.space.origin())
                         .value;
        REQUIRE(s <= cache.opt_prefix(inst.requests.size()));
    }
}

TEST_CASE("oracle rejects oversized inputs and handles the empty prefix") {
    Instance inst;
    for (int i = 0; i < 9; ++i) inst.requests.push_back(req(i, rat(i), rat(i + 1), rat(i + 1)));
    REQUIRE_THROWS_AS(oracle_opt(inst, rat(100)), OracleLimitError);
    REQUIRE(oracle_opt(inst, rat(1, 2)) == 0);
}

TEST_CASE("optimum schedules carry explicit waits") {
    // the visit at the origin is released only at 3/2: the schedule must
    // hold there before completing it
    Instance inst;
    inst.requests = {req(0, rat(0), rat(0), rat(3, 2))};
    auto res = opt_offline(kLine, std::nullopt, inst.requests, kLine.origin());
    REQUIRE(res.value == rat(3, 2));
    bool has_wait = false;
    for (const auto& a : res.schedule.actions)
        if (std::holds_alternative<WaitUntil>(a)) has_wait = true;
    REQUIRE(has_wait);
    REQUIRE(res.schedule.end_time == res.value);
}
