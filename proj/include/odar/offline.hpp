#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "instance.hpp"
#include "schedule.hpp"

namespace odar {

struct SolveResult {
    Schedule schedule;
    Rational value;
    std::uint64_t nodes_explored = 0;
};

// ---------------------------------------------------------------------------
// Offline-optimum convention
//
// The offline solver values a request set the way the adversarial analyses
// do: the offline server knows every request from the start, so it may stage
// a pickup at the source ahead of the release time. Release times still bind
// in two ways:
//   * a visit-only request (a == b) is served by being at the point at or
//     after its release, so routes wait there if they arrive early;
//   * no schedule can complete before release + d(a, b) for any request
//     (the cargo does not exist before its release, so its delivery cannot
//     have finished earlier than that), which bounds the final makespan.
// On every construction in this repository the convention coincides with
// the intended optimum values; it is also what the online policy's waiting
// rule is calibrated against.
// ---------------------------------------------------------------------------

namespace solver {

struct Task {
    int id = 0;
    Point src;
    Point dst;
    Rational release;
    bool visit = false;      // a == b: single visit event
    bool preloaded = false;  // already picked up (delivery planning)
};

struct Options {
    int capacity = 0;             // resolved: unbounded callers pass task count
    bool respect_releases = false;  // on: visit waits + release+carry makespan bound
    std::optional<Point> forced_end;  // end the route here (delivery planning)
};

// One serving order, with enough derived data to compare candidates
// deterministically. Movement entries remember which event caused them.
struct Candidate {
    std::vector<int> event_task;   // task index per event, in order
    std::vector<int> event_kind;   // 0 pick, 1 drop, 2 visit
    std::vector<int> move_class;   // per movement: line 0 neg / 1 pos; finite: target id
    std::vector<int> move_task;    // task whose event caused the movement (-1: forced end)
    std::vector<int> move_kind;
    Rational raw_end;              // time of the last serving event (+ forced end move)
    Rational value;                // raw_end, or the release bound if larger
    Point end_point;
};

// Schedule order preference between equal-value candidates: at the first
// differing movement, the one heading in the negative direction (toward the
// lower vertex id) wins; between equal directions the lower request id wins.
// Events that stay in place (a pickup where the server stands) carry no
// movement and defer the decision.
inline bool canonical_less(const Candidate& a, const Candidate& b) {
    size_t n = std::min(a.move_class.size(), b.move_class.size());
    for (size_t i = 0; i < n; ++i) {
        if (a.move_class[i] != b.move_class[i]) return a.move_class[i] < b.move_class[i];
        if (a.move_task[i] != b.move_task[i]) return a.move_task[i] < b.move_task[i];
        if (a.move_kind[i] != b.move_kind[i]) return a.move_kind[i] < b.move_kind[i];
    }
    if (a.move_class.size() != b.move_class.size())
        return a.move_class.size() < b.move_class.size();
    if (a.event_task != b.event_task)
        return std::lexicographical_compare(a.event_task.begin(), a.event_task.end(),
                                            b.event_task.begin(), b.event_task.end());
    return std::lexicographical_compare(a.event_kind.begin(), a.event_kind.end(),
                                        b.event_kind.begin(), b.event_kind.end());
}

class Dfs {
  public:
    Dfs(const MetricSpace& space, std::vector<Task> tasks, Options opt, Point start,
        Rational start_time)
        : space_(space),
          tasks_(std::move(tasks)),
          opt_(std::move(opt)),
          start_(std::move(start)),
          start_time_(std::move(start_time)) {
        release_bound_ = start_time_;
        if (opt_.respect_releases)
            for (const auto& tk : tasks_)
                release_bound_ =
                    rat_max(release_bound_, tk.release + space_.distance(tk.src, tk.dst));
        for (size_t i = 0; i < tasks_.size(); ++i) {
            if (tasks_[i].preloaded) {
                picked_ |= (1u << i);
                ++load_;
            }
        }
    }

    Candidate run() {
        pos_ = start_;
        time_ = start_time_;
        recurse();
        return std::move(*best_);
    }

    std::uint64_t nodes() const { return nodes_; }

  private:
    int move_class_of(const Point& from, const Point& to) const {
        if (space_.is_line())
            return std::get<LineCoord>(to).x < std::get<LineCoord>(from).x ? 0 : 1;
        return std::get<Vertex>(to).id;
    }

    bool all_done() const { return done_ == (1u << tasks_.size()) - 1; }

    Rational lower_bound() const {
        // elapsed plus the distance to the nearest point we still have to
        // touch; release bound applies regardless of the continuation
        Rational lb = time_;
        bool any = false;
        Rational nearest(0);
        for (size_t i = 0; i < tasks_.size(); ++i) {
            if (done_ & (1u << i)) continue;
            const Point& pt = (picked_ & (1u << i)) ? tasks_[i].dst : tasks_[i].src;
            Rational d = space_.distance(pos_, pt);
            if (!any || d < nearest) nearest = d, any = true;
        }
        if (any)
            lb += nearest;
        else if (opt_.forced_end)
            lb += space_.distance(pos_, *opt_.forced_end);
        if (opt_.respect_releases) lb = rat_max(lb, release_bound_);
        return lb;
    }

    void finish_candidate() {
        Candidate c;
        c.event_task = event_task_;
        c.event_kind = event_kind_;
        c.move_class = move_class_;
        c.move_task = move_task_;
        c.move_kind = move_kind_;
        c.end_point = pos_;
        c.raw_end = time_;
        if (opt_.forced_end && !(pos_ == *opt_.forced_end)) {
            c.move_class.push_back(move_class_of(pos_, *opt_.forced_end));
            c.move_task.push_back(-1);
            c.move_kind.push_back(3);
            c.raw_end += space_.distance(pos_, *opt_.forced_end);
            c.end_point = *opt_.forced_end;
        }
        c.value = opt_.respect_releases ? rat_max(c.raw_end, release_bound_) : c.raw_end;
        if (!best_ || c.value < best_->value ||
            (c.value == best_->value && canonical_less(c, *best_)))
            best_ = std::move(c);
    }

    struct Step {
        int task;
        int kind;  // 0 pick, 1 drop, 2 visit
        int cls;   // child ordering: -1 when no movement
    };

    void recurse() {
        ++nodes_;
        if (best_ && lower_bound() > best_->value) return;
        if (all_done()) {
            finish_candidate();
            return;
        }
        std::vector<Step> steps;
        for (size_t i = 0; i < tasks_.size(); ++i) {
            if (done_ & (1u << i)) continue;
            const Task& tk = tasks_[i];
            if (tk.visit) {
                steps.push_back({(int)i, 2, step_class(tk.src)});
            } else if (picked_ & (1u << i)) {
                steps.push_back({(int)i, 1, step_class(tk.dst)});
            } else if (load_ < opt_.capacity) {
                steps.push_back({(int)i, 0, step_class(tk.src)});
            }
        }
        std::sort(steps.begin(), steps.end(), [&](const Step& a, const Step& b) {
            if (a.cls != b.cls) return a.cls < b.cls;
            if (tasks_[a.task].id != tasks_[b.task].id)
                return tasks_[a.task].id < tasks_[b.task].id;
            return a.kind < b.kind;
        });
        for (const Step& s : steps) apply(s);
    }

    int step_class(const Point& target) const {
        if (space_.distance(pos_, target) == 0) return -1;
        return move_class_of(pos_, target);
    }

    void apply(const Step& s) {
        const Task& tk = tasks_[s.task];
        const Point& target = s.kind == 1 ? tk.dst : tk.src;
        Point old_pos = pos_;
        Rational old_time = time_;
        bool moved = !(space_.distance(pos_, target) == 0);

        if (moved) {
            time_ += space_.distance(pos_, target);
            pos_ = target;
            move_class_.push_back(move_class_of(old_pos, target));
            move_task_.push_back(tasks_[s.task].id);
            move_kind_.push_back(s.kind);
        }
        if (s.kind == 2 && opt_.respect_releases) time_ = rat_max(time_, tk.release);
        event_task_.push_back(s.task);
        event_kind_.push_back(s.kind);
        if (s.kind == 0)
            picked_ |= (1u << s.task), ++load_;
        else if (s.kind == 1)
            done_ |= (1u << s.task), --load_;
        else
            done_ |= (1u << s.task);

        recurse();

        if (s.kind == 0)
            picked_ &= ~(1u << s.task), --load_;
        else if (s.kind == 1)
            done_ &= ~(1u << s.task), ++load_;
        else
            done_ &= ~(1u << s.task);
        event_task_.pop_back();
        event_kind_.pop_back();
        if (moved) {
            move_class_.pop_back();
            move_task_.pop_back();
            move_kind_.pop_back();
        }
        pos_ = std::move(old_pos);
        time_ = std::move(old_time);
    }

    const MetricSpace& space_;
    std::vector<Task> tasks_;
    Options opt_;
    Point start_;
    Rational start_time_;
    Rational release_bound_;

    Point pos_;
    Rational time_;
    unsigned picked_ = 0, done_ = 0;
    int load_ = 0;
    std::vector<int> event_task_, event_kind_;
    std::vector<int> move_class_, move_task_, move_kind_;
    std::optional<Candidate> best_;
    std::uint64_t nodes_ = 0;
};

inline std::vector<Task> tasks_from_requests(const MetricSpace& space,
                                             const std::vector<Request>& reqs,
                                             bool preloaded = false) {
    std::vector<Task> tasks;
    for (const auto& r : reqs)
        tasks.push_back(
            {r.id, r.source, r.destination, r.release, r.is_visit(space), preloaded});
    return tasks;
}

// Materializes the chosen event order as a Schedule. With releases on, visit
// waits become explicit WaitUntil actions; if the release bound exceeds the
// raw route time the slack becomes a leading wait (plus a trailing one if
// waiting early is absorbed by later visit waits).
inline Schedule materialize(const MetricSpace& space, const std::vector<Task>& tasks,
                            const Candidate& cand, const Options& opt, const Point& start,
                            const Rational& start_time) {
    Schedule s;
    s.start_point = start;
    s.start_time = start_time;

    Rational lead(0);
    auto build = [&](bool commit) -> Rational {
        Point pos = start;
        Rational t = start_time;
        if (lead > 0) {
            t += lead;
            if (commit) s.actions.push_back(WaitUntil{t});
        }
        for (size_t k = 0; k < cand.event_task.size(); ++k) {
            const Task& tk = tasks[cand.event_task[k]];
            int kind = cand.event_kind[k];
            const Point& target = kind == 1 ? tk.dst : tk.src;
            if (!(space.distance(pos, target) == 0)) {
                t += space.distance(pos, target);
                pos = target;
                if (commit) s.actions.push_back(MoveTo{target});
            }
            if (kind == 2 && opt.respect_releases && t < tk.release) {
                t = tk.release;
                if (commit) s.actions.push_back(WaitUntil{t});
            }
            if (commit) {
                if (kind == 0) {
                    s.actions.push_back(PickUp{tk.id});
                } else if (kind == 1) {
                    s.actions.push_back(DropOff{tk.id});
                } else {
                    s.actions.push_back(PickUp{tk.id});
                    s.actions.push_back(DropOff{tk.id});
                }
            }
        }
        if (opt.forced_end && !(pos == *opt.forced_end)) {
            t += space.distance(pos, *opt.forced_end);
            pos = *opt.forced_end;
            if (commit) s.actions.push_back(MoveTo{*opt.forced_end});
        }
        if (commit) s.end_point = pos;
        return t;
    };

    Rational raw = build(false);
    if (cand.value > raw) {
        lead = cand.value - raw;
        raw = build(false);  // leading wait may be partially absorbed by visit waits
    }
    Rational finish = build(true);
    if (finish < cand.value) {
        s.actions.push_back(WaitUntil{cand.value});
        finish = cand.value;
    }
    s.end_time = finish;
    return s;
}

}  // namespace solver

// S(R, x): shortest capacity-feasible schedule serving R from x, release
// times ignored, no waiting. Ties resolved by the canonical order.
inline SolveResult shortest_schedule(const MetricSpace& space, Capacity capacity,
                                     const std::vector<Request>& reqs, const Point& x,
                                     const Rational& start_time = Rational(0)) {
    auto tasks = solver::tasks_from_requests(space, reqs);
    solver::Options opt;
    opt.capacity = capacity ? *capacity : (int)tasks.size();
    solver::Dfs dfs(space, tasks, opt, x, start_time);
    if (reqs.empty()) {
        Schedule s{x, start_time, {}, start_time, x};
        return {s, Rational(0), 1};
    }
    auto cand = dfs.run();
    Schedule s = solver::materialize(space, tasks, cand, opt, x, start_time);
    return {s, cand.value - start_time, dfs.nodes()};
}

// Offline optimum over a request set, from `start` at `start_time` (the
// origin at time 0 unless reusing the solver mid-run). Value is the absolute
// completion time under the offline convention above.
inline SolveResult opt_offline(const MetricSpace& space, Capacity capacity,
                               const std::vector<Request>& reqs, const Point& start,
                               const Rational& start_time = Rational(0)) {
    if (reqs.empty()) {
        Schedule s{start, start_time, {}, start_time, start};
        return {s, start_time, 1};
    }
    auto tasks = solver::tasks_from_requests(space, reqs);
    solver::Options opt;
    opt.capacity = capacity ? *capacity : (int)tasks.size();
    opt.respect_releases = true;
    solver::Dfs dfs(space, tasks, opt, start, start_time);
    auto cand = dfs.run();
    Schedule s = solver::materialize(space, tasks, cand, opt, start, start_time);
    return {s, cand.value, dfs.nodes()};
}

// Minimal time to drop off every loaded request and end at the origin,
// starting from p. Dropoff order is optimized exactly.
inline SolveResult deliver_and_return_plan(const MetricSpace& space, Capacity capacity,
                                           const std::vector<Request>& loaded, const Point& p,
                                           const Rational& start_time = Rational(0)) {
    (void)capacity;  // everything is already aboard (precondition), so it cannot bind
    auto tasks = solver::tasks_from_requests(space, loaded, /*preloaded=*/true);
    solver::Options opt;
    opt.capacity = (int)tasks.size();
    opt.forced_end = space.origin();
    solver::Dfs dfs(space, tasks, opt, p, start_time);
    if (loaded.empty() && space.distance(p, space.origin()) == 0) {
        Schedule s{p, start_time, {}, start_time, space.origin()};
        return {s, Rational(0), 1};
    }
    auto cand = dfs.run();
    Schedule s = solver::materialize(space, tasks, cand, opt, p, start_time);
    return {s, cand.value - start_time, dfs.nodes()};
}

inline Rational deliver_and_return_time(const MetricSpace& space, Capacity capacity,
                                        const std::vector<Request>& loaded, const Point& p) {
    return deliver_and_return_plan(space, capacity, loaded, p).value;
}

// Exhaustive reference solver: enumerates every valid event interleaving
// with no pruning. Exists to cross-check the branch-and-bound; rejects more
// than 8 requests.
struct OracleLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational oracle_opt_requests(const MetricSpace& space, Capacity capacity,
                                    const std::vector<Request>& reqs) {
    if (reqs.size() > 8)
        throw OracleLimitError("oracle only handles up to 8 released requests");
    if (reqs.empty()) return Rational(0);
    auto tasks = solver::tasks_from_requests(space, reqs);
    const int cap = capacity ? *capacity : (int)tasks.size();
    Rational bound(0);
    for (const auto& tk : tasks)
        bound = rat_max(bound, tk.release + space.distance(tk.src, tk.dst));

    std::optional<Rational> best;
    // plain recursive enumeration over (picked, done) states
    auto rec = [&](auto&& self, Point pos, Rational time, unsigned picked, unsigned done,
                   int load) -> void {
        if (done == (1u << tasks.size()) - 1) {
            Rational v = rat_max(time, bound);
            if (!best || v < *best) best = v;
            return;
        }
        for (size_t i = 0; i < tasks.size(); ++i) {
            if (done & (1u << i)) continue;
            const solver::Task& tk = tasks[i];
            if (tk.visit) {
                Rational t = rat_max(time + space.distance(pos, tk.src), tk.release);
                self(self, tk.src, t, picked, done | (1u << i), load);
            } else if (picked & (1u << i)) {
                Rational t = time + space.distance(pos, tk.dst);
                self(self, tk.dst, t, picked, done | (1u << i), load - 1);
            } else if (load < cap) {
                Rational t = time + space.distance(pos, tk.src);
                self(self, tk.src, t, picked | (1u << i), done, load + 1);
            }
        }
    };
    rec(rec, space.origin(), Rational(0), 0, 0, 0);
    return *best;
}

// OPT(t) with memoization by release-prefix length: the value only changes
// at release times.
class OptCache {
  public:
    explicit OptCache(const Instance& inst) : inst_(&inst) {}

    size_t released_count(const Rational& t) const {
        size_t k = 0;
        while (k < inst_->requests.size() && inst_->requests[k].release <= t) ++k;
        return k;
    }

    const Rational& opt_prefix(size_t k) const {
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        std::vector<Request> prefix(inst_->requests.begin(), inst_->requests.begin() + k);
        Rational v = opt_offline(inst_->space, inst_->capacity, prefix, inst_->space.origin()).value;
        return memo_.emplace(k, std::move(v)).first->second;
    }

    const Rational& opt_at(const Rational& t) const { return opt_prefix(released_count(t)); }

    size_t size() const { return inst_->requests.size(); }

  private:
    const Instance* inst_;
    mutable std::map<size_t, Rational> memo_;
};

inline Rational opt_prefix(const Instance& inst, const Rational& t) {
    if (t < 0) throw ContractError("opt_prefix: t must be nonnegative");
    return OptCache(inst).opt_at(t);
}

inline Rational oracle_opt(const Instance& inst, const Rational& t) {
    size_t k = OptCache(inst).released_count(t);
    std::vector<Request> prefix(inst.requests.begin(), inst.requests.begin() + k);
    return oracle_opt_requests(inst.space, inst.capacity, prefix);
}

}  // namespace odar
