#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "offline.hpp"

namespace odar {

// Simulation faults are bugs in the policy or its commands (infeasible
// timing, dropping something not aboard). Check violations are failed
// run-time assertions of the analyzed waiting-policy properties.
struct SimFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckViolation : std::runtime_error {
    CheckViolation(std::string tag_, const std::string& what)
        : std::runtime_error("[" + tag_ + "] " + what), tag(std::move(tag_)) {}
    std::string tag;
};

struct CheckConfig {
    bool enabled = true;
    Rational alpha;  // the waiting parameter the run is checked against
    // schedule-length conditions are only guaranteed from this threshold up
    Rational length_condition_threshold = rat(81, 50);

    bool check_length_conditions() const {
        return enabled && alpha >= length_condition_threshold;
    }
};

struct ServerView {
    const Instance* instance = nullptr;
    Rational now;
    Point position;
    std::vector<int> loaded;  // request ids aboard, ascending
    std::vector<int> served;  // request ids already served, ascending
};

// Prefix-optimum access handed to policies. The information model is
// enforced here: only values at or before the current time can be queried.
class OptAccess {
  public:
    OptAccess(const OptCache& cache, Rational now) : cache_(&cache), now_(std::move(now)) {}
    const Rational& opt(const Rational& t) const {
        if (t > now_) throw ContractError("policy queried OPT beyond the current time");
        return cache_->opt_at(t);
    }
    const Rational& opt_now() const { return cache_->opt_at(now_); }

  private:
    const OptCache* cache_;
    Rational now_;
};

struct CmdDeliverAndReturn {};
struct CmdWaitUntil {
    Rational until;
};
struct CmdFollowSchedule {
    Schedule schedule;
};
using Command = std::variant<CmdDeliverAndReturn, CmdWaitUntil, CmdFollowSchedule>;

class OnlinePolicy {
  public:
    virtual ~OnlinePolicy() = default;
    virtual std::optional<Command> on_request(const Request& r, const Rational& t,
                                              const ServerView& view, const OptAccess& opt) = 0;
    virtual std::optional<Command> on_idle(const Rational& t, const ServerView& view,
                                           const std::vector<Request>& unserved,
                                           const OptAccess& opt) = 0;
    virtual std::string name() const = 0;
    virtual std::string params() const { return ""; }
};

// Whether delivering everything aboard and returning to the origin finishes
// by alpha * OPT(t). Lives here because it needs the mid-movement position.
inline bool check_interruptible(const Instance& inst, const ServerView& view, const Rational& t,
                                const Rational& alpha, const Rational& opt_t) {
    std::vector<Request> loaded;
    for (int id : view.loaded) loaded.push_back(inst.requests[id]);
    Rational dr = deliver_and_return_time(inst.space, inst.capacity, loaded, view.position);
    return t + dr <= alpha * opt_t;
}

struct TraceEvent {
    Rational t;
    std::string kind;  // release | command | interrupt | pickup | dropoff | visit
    int id = -1;       // request id, or schedule index for schedule commands
    Point pos;         // server position when the event happened
    std::string data;  // command detail ("wait_until 3", "follow_schedule len=3", ...)
};

struct MoveLeg {
    Rational t0, t1;
    Point from, target;
};

struct ScheduleRecord {
    int index = 0;  // 1-based
    Rational start_time;
    Point start_point;
    std::vector<int> request_ids;
    Rational planned_length;
    bool interrupted = false;
    std::optional<Rational> completion_time;
};

struct SimTrace {
    nlohmann::ordered_json instance_json;
    std::string policy_name;
    std::string policy_params;
    bool checks = false;
    std::vector<TraceEvent> events;
    std::vector<MoveLeg> legs;
    std::vector<ScheduleRecord> schedule_records;
    Rational completion_time;
    std::vector<Rational> opt_prefix_values;  // k = 1..n
    std::vector<std::string> checks_passed;   // tags of assertions that ran clean

    // Exact server position at any time up to the end of the run.
    Point position_at(const Rational& t, const MetricSpace& space) const {
        if (t < 0) throw ContractError("position_at: negative time");
        Rational horizon = completion_time;
        if (!legs.empty()) horizon = rat_max(horizon, legs.back().t1);
        if (!events.empty()) horizon = rat_max(horizon, events.back().t);
        if (t > horizon) throw ContractError("position_at: time beyond the end of the run");
        Point pos = space.origin();
        for (const auto& leg : legs) {
            if (t < leg.t0) break;
            if (t <= leg.t1) return space.advance(leg.from, leg.target, t - leg.t0);
            pos = leg.target;
        }
        return pos;
    }
};

namespace detail {

// A command expanded against absolute time: each entry is an instantaneous
// effect or a movement leg.
struct TimedAction {
    Rational at;  // completion time of this entry
    Action action;
    Point from;  // for moves
};

struct ActiveCommand {
    enum class Kind { Waiting, Following, Delivering } kind;
    std::vector<TimedAction> timeline;
    size_t next = 0;
    Rational done_at;
    int schedule_index = -1;  // Following only
};

}  // namespace detail

class Simulator {
  public:
    Simulator(const Instance& inst, OnlinePolicy& policy, CheckConfig checks)
        : inst_(inst), policy_(policy), checks_(std::move(checks)), cache_(inst), pos_(inst.space.origin()) {
        auto violations = validate(inst);
        if (!violations.empty())
            throw StructuralError("instance invalid: " + violations.front());
    }

    SimTrace run() {
        trace_.instance_json = inst_.to_json();
        trace_.policy_name = policy_.name();
        trace_.policy_params = policy_.params();
        trace_.checks = checks_.enabled;
        dispatch_idle(Rational(0));
        while (true) {
            std::optional<Rational> next;
            if (next_release_ < inst_.requests.size())
                next = inst_.requests[next_release_].release;
            if (active_ && (!next || active_->done_at < *next)) next = active_->done_at;
            if (!next) {
                if (served_.size() != inst_.requests.size())
                    throw SimFault("policy went idle with unserved requests pending");
                break;
            }
            step_to(*next);
        }
        finalize();
        return std::move(trace_);
    }

  private:
    // -- event processing ---------------------------------------------------

    void step_to(const Rational& t) {
        run_actions_before(t);
        now_ = t;
        // releases first; a command completing at the same instant sees them
        while (next_release_ < inst_.requests.size() &&
               inst_.requests[next_release_].release == t) {
            const Request& r = inst_.requests[next_release_++];
            event(t, "release", r.id, describe_request(r));
            auto cmd = policy_.on_request(r, t, view(), OptAccess(cache_, t));
            if (cmd) install(*cmd, t);
        }
        run_actions_at(t);
        if (active_ && active_->done_at == t && active_->next == active_->timeline.size())
            complete_command(t);
        if (!active_) dispatch_idle(t);
    }

    void dispatch_idle(const Rational& t) {
        // wait expiry -> start schedule happens at one timestamp; bound the
        // number of same-instant dispatches to catch policy livelocks
        size_t budget = inst_.requests.size() + 2;
        for (size_t round = 0; !active_; ++round) {
            if (round > budget) throw SimFault("policy dispatch cycle at one timestamp");
            auto cmd = policy_.on_idle(t, view(), unserved_released(), OptAccess(cache_, t));
            if (!cmd) {
                if (served_.size() != inst_.requests.size() && next_release_ >= inst_.requests.size())
                    throw SimFault("policy went idle with unserved requests pending");
                return;
            }
            install(*cmd, t);
            run_actions_at(t);
            if (active_ && active_->done_at == t && active_->next == active_->timeline.size())
                complete_command(t);
        }
    }

    // Exact position at time t: the discrete anchor, or a point inside the
    // pending movement leg.
    Point position_now(const Rational& t) const {
        if (active_ && active_->next < active_->timeline.size()) {
            const auto& ta = active_->timeline[active_->next];
            if (auto* m = std::get_if<MoveTo>(&ta.action)) {
                Rational d = inst_.space.distance(ta.from, m->target);
                Rational leg_start = ta.at - d;
                if (t > leg_start) return inst_.space.advance(ta.from, m->target, t - leg_start);
            }
        }
        return pos_;
    }

    void install(const Command& cmd, const Rational& t) {
        if (active_) abort_active(t);
        if (auto* w = std::get_if<CmdWaitUntil>(&cmd)) {
            if (w->until < t) throw SimFault("wait_until target in the past");
            detail::ActiveCommand ac;
            ac.kind = detail::ActiveCommand::Kind::Waiting;
            ac.done_at = w->until;
            active_ = std::move(ac);
            event(t, "command", -1, "wait_until " + to_string(w->until));
            return;
        }
        if (auto* f = std::get_if<CmdFollowSchedule>(&cmd)) {
            const Schedule& s = f->schedule;
            if (!(s.start_point == pos_) || s.start_time != t)
                throw SimFault("follow_schedule must start at the current position and time");
            int idx = ++schedule_counter_;
            record_schedule_start(idx, s, t);
            detail::ActiveCommand ac;
            ac.kind = detail::ActiveCommand::Kind::Following;
            ac.schedule_index = idx;
            ac.timeline = expand(s);
            ac.done_at = s.end_time;
            active_ = std::move(ac);
            event(t, "command", idx, "follow_schedule len=" + to_string(s.length()));
            return;
        }
        // deliver_and_return: plan from the current position and load; a
        // re-issue while already returning simply re-plans
        std::vector<Request> loaded;
        for (int id : loaded_) loaded.push_back(inst_.requests[id]);
        auto plan = deliver_and_return_plan(inst_.space, inst_.capacity, loaded, pos_, t);
        detail::ActiveCommand ac;
        ac.kind = detail::ActiveCommand::Kind::Delivering;
        ac.timeline = expand(plan.schedule);
        ac.done_at = plan.schedule.end_time;
        active_ = std::move(ac);
        event(t, "command", -1, "deliver_and_return len=" + to_string(plan.value));
    }

    void abort_active(const Rational& t) {
        // a movement cut short still happened up to t; keep the walked part
        // so position reconstruction stays exact
        if (active_->next < active_->timeline.size()) {
            const auto& ta = active_->timeline[active_->next];
            if (auto* m = std::get_if<MoveTo>(&ta.action)) {
                Rational d = inst_.space.distance(ta.from, m->target);
                Rational leg_start = ta.at - d;
                if (t > leg_start) {
                    trace_.legs.push_back({leg_start, t, ta.from, m->target});
                    pos_ = inst_.space.advance(ta.from, m->target, t - leg_start);
                    event(t, "move", -1,
                          "cut short toward " + point_to_string(m->target) + " since " +
                              to_string(leg_start));
                }
            }
        }
        if (active_->kind == detail::ActiveCommand::Kind::Following) {
            auto& rec = trace_.schedule_records[active_->schedule_index - 1];
            rec.interrupted = true;
            event(t, "interrupt", active_->schedule_index, "schedule aborted");
        }
        active_.reset();
    }

    std::vector<detail::TimedAction> expand(const Schedule& s) const {
        std::vector<detail::TimedAction> out;
        Rational t = s.start_time;
        Point p = s.start_point;
        for (const auto& a : s.actions) {
            if (auto* m = std::get_if<MoveTo>(&a)) {
                Rational d = inst_.space.distance(p, m->target);
                out.push_back({t + d, a, p});
                t += d;
                p = m->target;
            } else if (auto* w = std::get_if<WaitUntil>(&a)) {
                if (w->until < t) throw SimFault("schedule waits into the past");
                out.push_back({w->until, a, p});
                t = w->until;
            } else {
                out.push_back({t, a, p});
            }
        }
        if (t != s.end_time) throw SimFault("schedule timing inconsistent with its actions");
        return out;
    }

    void run_actions_before(const Rational& t) { run_actions(t, /*inclusive=*/false); }
    void run_actions_at(const Rational& t) { run_actions(t, /*inclusive=*/true); }

    void run_actions(const Rational& t, bool inclusive) {
        if (!active_) return;
        while (active_->next < active_->timeline.size()) {
            const auto& ta = active_->timeline[active_->next];
            if (inclusive ? ta.at > t : ta.at >= t) break;
            execute(ta);
            ++active_->next;
        }
    }

    void execute(const detail::TimedAction& ta) {
        now_ = ta.at;
        if (auto* m = std::get_if<MoveTo>(&ta.action)) {
            Rational t0 = ta.at - inst_.space.distance(ta.from, m->target);
            trace_.legs.push_back({t0, ta.at, ta.from, m->target});
            pos_ = m->target;
            event(ta.at, "move", -1, "from " + point_to_string(ta.from) + " since " + to_string(t0));
            return;
        }
        if (std::holds_alternative<WaitUntil>(ta.action)) return;
        if (auto* p = std::get_if<PickUp>(&ta.action)) {
            const Request& r = inst_.requests[p->request];
            if (ta.at < r.release) throw SimFault("pickup before release of r" + std::to_string(r.id));
            if (!(inst_.space.distance(pos_, r.source) == 0))
                throw SimFault("pickup away from the source of r" + std::to_string(r.id));
            if (served_.count(r.id)) throw SimFault("request served twice: r" + std::to_string(r.id));
            if (r.is_visit(inst_.space)) {
                pending_visit_ = r.id;  // paired DropOff completes the visit
                return;
            }
            if (loaded_.count(r.id)) throw SimFault("request picked twice: r" + std::to_string(r.id));
            int cap = inst_.capacity_or((int)inst_.requests.size());
            if ((int)loaded_.size() + 1 > cap) throw SimFault("capacity exceeded");
            loaded_.insert(r.id);
            event(ta.at, "pickup", r.id, "");
            return;
        }
        const auto& d = std::get<DropOff>(ta.action);
        const Request& r = inst_.requests[d.request];
        if (pending_visit_ == r.id) {
            pending_visit_ = -1;
            serve(r, ta.at, "visit");
            return;
        }
        if (!loaded_.count(r.id)) throw SimFault("dropoff of request not aboard: r" + std::to_string(r.id));
        if (!(inst_.space.distance(pos_, r.destination) == 0))
            throw SimFault("dropoff away from the destination of r" + std::to_string(r.id));
        loaded_.erase(r.id);
        serve(r, ta.at, "dropoff");
    }

    void serve(const Request& r, const Rational& t, const char* kind) {
        served_.insert(r.id);
        last_serve_ = t;
        event(t, kind, r.id, "");
    }

    void complete_command(const Rational& t) {
        if (active_->kind == detail::ActiveCommand::Kind::Following) {
            auto& rec = trace_.schedule_records[active_->schedule_index - 1];
            rec.completion_time = t;
            last_schedule_end_ = pos_;
            has_schedule_end_ = true;
        }
        active_.reset();
    }

    // -- bookkeeping and checks ---------------------------------------------

    void record_schedule_start(int idx, const Schedule& s, const Rational& t) {
        ScheduleRecord rec;
        rec.index = idx;
        rec.start_time = t;
        rec.start_point = pos_;
        for (const auto& r : unserved_released()) rec.request_ids.push_back(r.id);
        rec.planned_length = s.length();
        if (checks_.enabled) check_schedule_start(rec);
        trace_.schedule_records.push_back(std::move(rec));
    }

    void check_schedule_start(const ScheduleRecord& rec) {
        const Rational& opt_t = cache_.opt_at(rec.start_time);
        const Rational& a = checks_.alpha;
        if (rec.start_time < a * opt_t)
            throw CheckViolation("eq1", "schedule " + std::to_string(rec.index) +
                                            " started at t=" + to_string(rec.start_time) +
                                            " < alpha*OPT(t)=" + to_string(a * opt_t));
        note_check("eq1");
        if (rec.index >= 2) {
            const auto& prev = trace_.schedule_records[rec.index - 2];
            if (!(opt_t > prev.start_time))
                throw CheckViolation("eq2", "OPT(t(" + std::to_string(rec.index) + "))=" +
                                                to_string(opt_t) + " not above t(" +
                                                std::to_string(rec.index - 1) + ")=" +
                                                to_string(prev.start_time));
            note_check("eq2");
            bool from_prev_end =
                !prev.interrupted && has_schedule_end_ && (rec.start_point == last_schedule_end_);
            bool from_origin =
                inst_.space.distance(rec.start_point, inst_.space.origin()) == 0;
            if (!from_prev_end && !from_origin)
                throw CheckViolation("start-point",
                                     "schedule starts neither at the previous end nor at the origin");
            note_check("start-point");
        }
        if (checks_.check_length_conditions()) {
            if (!(rec.planned_length <= opt_t))
                throw CheckViolation("cond-a", "schedule " + std::to_string(rec.index) +
                                                   " length " + to_string(rec.planned_length) +
                                                   " exceeds OPT(t)=" + to_string(opt_t));
            note_check("cond-a");
            if (!(rec.start_time + rec.planned_length <= (1 + a) * opt_t))
                throw CheckViolation("cond-b", "schedule " + std::to_string(rec.index) +
                                                   " finishes after (1+alpha)*OPT(t)");
            note_check("cond-b");
        }
    }

    void note_check(const char* tag) {
        for (const auto& s : trace_.checks_passed)
            if (s == tag) return;
        trace_.checks_passed.push_back(tag);
    }

    void finalize() {
        trace_.completion_time = last_serve_;
        for (size_t k = 1; k <= inst_.requests.size(); ++k)
            trace_.opt_prefix_values.push_back(cache_.opt_prefix(k));
    }

    ServerView view() const {
        ServerView v;
        v.instance = &inst_;
        v.now = now_;
        v.position = position_now(now_);
        v.loaded.assign(loaded_.begin(), loaded_.end());
        v.served.assign(served_.begin(), served_.end());
        return v;
    }

    std::vector<Request> unserved_released() const {
        std::vector<Request> out;
        for (size_t i = 0; i < next_release_; ++i)
            if (!served_.count(inst_.requests[i].id) && !loaded_.count(inst_.requests[i].id))
                out.push_back(inst_.requests[i]);
        return out;
    }

    std::string describe_request(const Request& r) const {
        return point_to_string(r.source) + "->" + point_to_string(r.destination) + "@" +
               to_string(r.release);
    }

    void event(const Rational& t, const char* kind, int id, std::string data) {
        trace_.events.push_back({t, kind, id, position_now(t), std::move(data)});
    }

    const Instance& inst_;
    OnlinePolicy& policy_;
    CheckConfig checks_;
    OptCache cache_;

    Rational now_{0};
    Point pos_;
    std::set<int> loaded_, served_;
    size_t next_release_ = 0;
    std::optional<detail::ActiveCommand> active_;
    int schedule_counter_ = 0;
    int pending_visit_ = -1;
    Rational last_serve_{0};
    Point last_schedule_end_;
    bool has_schedule_end_ = false;

    SimTrace trace_;
};

inline SimTrace run(const Instance& inst, OnlinePolicy& policy, CheckConfig checks) {
    return Simulator(inst, policy, std::move(checks)).run();
}

}  // namespace odar
