#include <catch2/catch_amalgamated.hpp>

#include "odar/harness.hpp"
#include "odar/policy.hpp"
#include "odar/trace_io.hpp"

using namespace odar;

namespace {

SimTrace run_family(Family f, const Rational& alpha, const Rational& eps,
                    std::optional<int> capacity = std::nullopt) {
    Instance inst = generate_lower_bound({f, alpha, eps});
    if (capacity) inst.capacity = capacity;
    LazyPolicy policy(alpha);
    CheckConfig checks;
    checks.alpha = alpha;
    return run(inst, policy, checks);
}

// deliberately broken policies for the fault paths
struct BadWaitPolicy : OnlinePolicy {
    std::optional<Command> on_request(const Request&, const Rational&, const ServerView&,
                                      const OptAccess&) override {
        return std::nullopt;
    }
    std::optional<Command> on_idle(const Rational& t, const ServerView&,
                                   const std::vector<Request>& unserved,
                                   const OptAccess&) override {
        if (unserved.empty()) return std::nullopt;
        return Command(CmdWaitUntil{t - 1});
    }
    std::string name() const override { return "bad-wait"; }
};

struct EagerPickPolicy : OnlinePolicy {
    // starts a schedule for a request that has not been released yet
    std::optional<Command> on_request(const Request&, const Rational&, const ServerView&,
                                      const OptAccess&) override {
        return std::nullopt;
    }
    std::optional<Command> on_idle(const Rational& t, const ServerView& view,
                                   const std::vector<Request>&, const OptAccess&) override {
        if (fired) return std::nullopt;
        fired = true;
        auto res = shortest_schedule(view.instance->space, view.instance->capacity,
                                     view.instance->requests, view.position, t);
        return Command(CmdFollowSchedule{std::move(res.schedule)});
    }
    std::string name() const override { return "eager"; }
    bool fired = false;
};

struct SpinPolicy : OnlinePolicy {
    std::optional<Command> on_request(const Request&, const Rational&, const ServerView&,
                                      const OptAccess&) override {
        return std::nullopt;
    }
    std::optional<Command> on_idle(const Rational& t, const ServerView&,
                                   const std::vector<Request>& unserved,
                                   const OptAccess&) override {
        if (unserved.empty()) return std::nullopt;
        return Command(CmdWaitUntil{t});  // completes instantly, forever
    }
    std::string name() const override { return "spin"; }
};

}  // namespace

TEST_CASE("single visit request: wait, then one schedule") {
    SimTrace tr = run_family(Family::Lemma1, rat(2), rat(1, 1000));
    REQUIRE(tr.completion_time == 3);
    REQUIRE(tr.schedule_records.size() == 1);
    REQUIRE(tr.schedule_records[0].start_time == 2);
    REQUIRE_FALSE(tr.schedule_records[0].interrupted);
    REQUIRE(tr.opt_prefix_values == std::vector<Rational>{Rational(1)});
}

TEST_CASE("three-request run with a failed interruption check") {
    SimTrace tr = run_family(Family::Prop2, rat(1), rat(1, 100));
    REQUIRE(tr.completion_time == rat(801, 100));
    REQUIRE(tr.schedule_records.size() == 2);
    REQUIRE_FALSE(tr.schedule_records[0].interrupted);
    REQUIRE(tr.schedule_records[0].start_time == 3);

    auto line = MetricSpace::real_line();
    REQUIRE(tr.position_at(rat(0), line) == line_point(rat(0)));
    REQUIRE(tr.position_at(rat(3), line) == line_point(rat(0)));
    REQUIRE(tr.position_at(rat(7, 2), line) == line_point(rat(-1, 2)));
    REQUIRE(tr.position_at(rat(301, 100), line) == line_point(rat(-1, 100)));
    REQUIRE_THROWS_AS(tr.position_at(rat(9), line), ContractError);
    REQUIRE_THROWS_AS(tr.position_at(rat(-1), line), ContractError);
}

TEST_CASE("empty instance completes at time zero") {
    Instance inst;
    LazyPolicy policy(rat(81, 50));
    CheckConfig checks;
    checks.alpha = rat(81, 50);
    SimTrace tr = run(inst, policy, checks);
    REQUIRE(tr.completion_time == 0);
    REQUIRE(tr.schedule_records.empty());
}

TEST_CASE("successful interruption resets to the origin") {
    // one long delivery underway, then a far visit whose reset is affordable
    Instance inst;
    inst.requests = {{0, line_point(rat(0)), line_point(rat(4)), rat(1, 4)},
                     {1, line_point(rat(-4)), line_point(rat(-4)), rat(7)}};
    Rational alpha = rat(81, 50);
    LazyPolicy policy(alpha);
    CheckConfig checks;
    checks.alpha = alpha;
    SimTrace tr = run(inst, policy, checks);

    REQUIRE(tr.schedule_records.size() == 2);
    REQUIRE(tr.schedule_records[0].interrupted);
    REQUIRE(tr.schedule_records[1].start_point == line_point(rat(0)));
    REQUIRE(tr.schedule_records[1].start_time == rat(486, 25));  // alpha * OPT
    REQUIRE(tr.completion_time == rat(586, 25));
    // the delivery of the first request survived the abort
    bool delivered = false;
    for (const auto& e : tr.events)
        if (e.kind == "dropoff" && e.id == 0) delivered = true;
    REQUIRE(delivered);
}

TEST_CASE("interruption check at the boundary and at the origin") {
    Instance inst;
    inst.requests = {{0, line_point(rat(1)), line_point(rat(1)), rat(1, 2)}};
    OptCache cache(inst);
    ServerView view;
    view.instance = &inst;

    // empty-handed at the origin: always interruptible when t <= alpha*OPT
    view.position = line_point(rat(0));
    REQUIRE(check_interruptible(inst, view, rat(1, 2), rat(2), cache.opt_at(rat(1, 2))));

    // boundary: t + d(p, O) equals alpha*OPT exactly ("until" read inclusively)
    view.position = line_point(rat(1, 2));
    REQUIRE(check_interruptible(inst, view, rat(3, 2), rat(2), cache.opt_at(rat(1, 2))));
    view.position = line_point(rat(1, 2) + rat(1, 1000));
    REQUIRE_FALSE(check_interruptible(inst, view, rat(3, 2), rat(2), cache.opt_at(rat(1, 2))));
}

TEST_CASE("interruption check mid-delivery matches the construction narrative") {
    Instance inst = generate_lower_bound({Family::Prop2, rat(1), rat(1, 100)});
    inst.capacity = 1;
    LazyPolicy policy(rat(1));
    CheckConfig checks;
    checks.alpha = rat(1);
    SimTrace tr = run(inst, policy, checks);
    REQUIRE(tr.completion_time == rat(801, 100));

    // at the third release the server is at -eps carrying the second request;
    // resetting would finish at 3a+2, beyond alpha*OPT = 301/100
    ServerView view;
    view.instance = &inst;
    view.now = rat(301, 100);
    view.position = tr.position_at(rat(301, 100), inst.space);
    REQUIRE(view.position == line_point(rat(-1, 100)));
    view.loaded = {1};
    OptCache cache(inst);
    REQUIRE(cache.opt_at(rat(301, 100)) == rat(301, 100));
    REQUIRE_FALSE(check_interruptible(inst, view, rat(301, 100), rat(1), rat(301, 100)));
}

TEST_CASE("deterministic traces") {
    SimTrace a = run_family(Family::Prop3, rat(1, 2), rat(1, 1000));
    SimTrace b = run_family(Family::Prop3, rat(1, 2), rat(1, 1000));
    REQUIRE(trace_to_jsonl(a) == trace_to_jsonl(b));
}

TEST_CASE("faulty policies are rejected with simulation faults") {
    Instance inst;
    inst.requests = {{0, line_point(rat(0)), line_point(rat(1)), rat(1)}};

    BadWaitPolicy bad;
    CheckConfig off;
    off.enabled = false;
    REQUIRE_THROWS_AS(run(inst, bad, off), SimFault);

    SpinPolicy spin;
    REQUIRE_THROWS_AS(run(inst, spin, off), SimFault);

    Instance future;
    future.requests = {{0, line_point(rat(0)), line_point(rat(1)), rat(1)},
                       {1, line_point(rat(2)), line_point(rat(3)), rat(50)}};
    EagerPickPolicy eager;
    REQUIRE_THROWS_AS(run(future, eager, off), SimFault);
}

TEST_CASE("invalid instances are rejected up front") {
    Instance inst;
    inst.requests = {{0, line_point(rat(0)), line_point(rat(1)), rat(1)},
                     {1, line_point(rat(0)), line_point(rat(2)), rat(1)}};
    LazyPolicy policy(rat(1));
    CheckConfig checks;
    checks.alpha = rat(1);
    REQUIRE_THROWS_AS(run(inst, policy, checks), StructuralError);
}

TEST_CASE("trace checks cover the waiting-policy conditions at high alpha") {
    Instance inst;
    inst.requests = {{0, line_point(rat(0)), line_point(rat(4)), rat(1, 4)},
                     {1, line_point(rat(-4)), line_point(rat(-4)), rat(7)}};
    LazyPolicy policy(rat(81, 50));
    CheckConfig checks;
    checks.alpha = rat(81, 50);
    SimTrace tr = run(inst, policy, checks);
    for (const char* tag : {"eq1", "eq2", "cond-a", "cond-b", "start-point"}) {
        CAPTURE(tag);
        REQUIRE(std::count(tr.checks_passed.begin(), tr.checks_passed.end(), tag) == 1);
    }
}
