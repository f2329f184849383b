#include <catch2/catch_amalgamated.hpp>

#include "odar/harness.hpp"
#include "odar/policy.hpp"

using namespace odar;

TEST_CASE("policy registry") {
    auto p = make_policy("lazy", rat(81, 50));
    REQUIRE(p->name() == "lazy");
    REQUIRE(p->params() == "alpha=81/50");
    REQUIRE_THROWS_AS(make_policy("lazy", rat(-1)), StructuralError);
    REQUIRE_THROWS_AS(make_policy("smartstart", rat(1)), StructuralError);
    REQUIRE_THROWS_AS(make_policy("nonsense", rat(1)), StructuralError);
}

TEST_CASE("idle handler: wait below the threshold, then serve everything") {
    Instance inst = generate_lower_bound({Family::Prop2, rat(1), rat(1, 100)});
    OptCache cache(inst);
    LazyPolicy lazy(rat(1));

    ServerView view;
    view.instance = &inst;
    view.position = inst.space.origin();

    // with both early requests in, OPT = 3 and the policy waits until 3
    view.now = rat(1, 50);
    auto cmd = lazy.on_idle(rat(1, 50), view,
                            {inst.requests[0], inst.requests[1]}, OptAccess(cache, rat(1, 50)));
    REQUIRE(cmd.has_value());
    auto* wait = std::get_if<CmdWaitUntil>(&*cmd);
    REQUIRE(wait != nullptr);
    REQUIRE(wait->until == 3);

    // once the wait expires it starts a shortest schedule with no idling in it
    view.now = rat(3);
    cmd = lazy.on_idle(rat(3), view, {inst.requests[0], inst.requests[1]},
                       OptAccess(cache, rat(3)));
    REQUIRE(cmd.has_value());
    auto* follow = std::get_if<CmdFollowSchedule>(&*cmd);
    REQUIRE(follow != nullptr);
    REQUIRE(follow->schedule.length() == 3);
    for (const auto& a : follow->schedule.actions)
        REQUIRE_FALSE(std::holds_alternative<WaitUntil>(a));

    // nothing pending and past the threshold: done
    cmd = lazy.on_idle(rat(10), view, {}, OptAccess(cache, rat(10)));
    REQUIRE_FALSE(cmd.has_value());
}

TEST_CASE("request handler issues the reset only when it fits") {
    Instance inst = generate_lower_bound({Family::Prop2, rat(1), rat(1, 100)});
    inst.capacity = 1;
    OptCache cache(inst);
    LazyPolicy lazy(rat(1));

    ServerView view;
    view.instance = &inst;

    // release while idle at the origin, empty-handed: instant reset
    view.now = rat(1, 100);
    view.position = inst.space.origin();
    auto cmd = lazy.on_request(inst.requests[0], rat(1, 100), view, OptAccess(cache, rat(1, 100)));
    REQUIRE(cmd.has_value());
    REQUIRE(std::holds_alternative<CmdDeliverAndReturn>(*cmd));

    // mid-delivery at -eps with the second request aboard: the reset would
    // finish too late, so the schedule keeps going
    view.now = rat(301, 100);
    view.position = line_point(rat(-1, 100));
    view.loaded = {1};
    cmd = lazy.on_request(inst.requests[2], rat(301, 100), view, OptAccess(cache, rat(301, 100)));
    REQUIRE_FALSE(cmd.has_value());
}

TEST_CASE("the optimum access is clamped to the present") {
    Instance inst = generate_lower_bound({Family::Lemma1, rat(1), rat(1, 1000)});
    OptCache cache(inst);
    OptAccess access(cache, rat(1, 2));
    REQUIRE(access.opt(rat(1, 2)) == 1);
    REQUIRE(access.opt(rat(1, 4)) == 0);
    REQUIRE_THROWS_AS(access.opt(rat(3, 4)), ContractError);
}

TEST_CASE("completion on the single-request family across the alpha range") {
    for (const auto& a : {rat(0), rat(1, 4), rat(1, 2), rat(1), rat(81, 50), rat(3)}) {
        Instance inst = generate_lower_bound({Family::Lemma1, a, rat(1, 1000)});
        LazyPolicy policy(a);
        CheckConfig checks;
        checks.alpha = a;
        SimTrace tr = run(inst, policy, checks);
        CAPTURE(to_string(a));
        REQUIRE(tr.completion_time == (a >= rat(1, 2) ? a + 1 : rat(3, 2)));
        REQUIRE(tr.opt_prefix_values.back() == 1);
    }
}
