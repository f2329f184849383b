#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "lower_bounds.hpp"
#include "policy.hpp"
#include "trace_io.hpp"

namespace odar {

// ---------------------------------------------------------------------------
// single runs

struct RunReport {
    std::string instance_id;
    std::string policy;
    Rational alg_time;
    Rational opt_time;
    std::optional<Rational> ratio;  // empty when opt_time == 0
    std::vector<std::pair<std::string, bool>> invariant_results;
    std::string trace_path;
};

inline RunReport report_from_trace(const SimTrace& tr, std::string instance_id,
                                   std::string trace_path = "") {
    RunReport rep;
    rep.instance_id = std::move(instance_id);
    rep.policy = tr.policy_name + (tr.policy_params.empty() ? "" : " " + tr.policy_params);
    rep.alg_time = tr.completion_time;
    rep.opt_time = tr.opt_prefix_values.empty() ? Rational(0) : tr.opt_prefix_values.back();
    if (rep.opt_time > 0) rep.ratio = rep.alg_time / rep.opt_time;
    for (const auto& tag : tr.checks_passed) rep.invariant_results.emplace_back(tag, true);
    rep.trace_path = std::move(trace_path);
    return rep;
}

inline std::string format_report(const RunReport& rep) {
    std::ostringstream os;
    os << "instance: " << rep.instance_id << "\n";
    os << "policy:   " << rep.policy << "\n";
    os << "alg:      " << to_string(rep.alg_time) << " (~" << approx(rep.alg_time) << ")\n";
    os << "opt:      " << to_string(rep.opt_time) << " (~" << approx(rep.opt_time) << ")\n";
    if (rep.ratio)
        os << "ratio:    " << to_string(*rep.ratio) << " (~" << approx(*rep.ratio) << ")\n";
    else
        os << "ratio:    undefined (opt is 0)\n";
    for (const auto& [tag, ok] : rep.invariant_results)
        os << "check:    " << tag << " " << (ok ? "pass" : "FAIL") << "\n";
    if (!rep.trace_path.empty()) os << "trace:    " << rep.trace_path << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// construction verification (exact reproduction of the adversarial runs)

enum class VerifyStatus { Pass, Mismatch, Skipped };

struct VerifyOutcome {
    FamilyParams params;
    VerifyStatus status = VerifyStatus::Pass;
    std::string note;
};

inline bool checkpoint_matches(const SimTrace& tr, const Checkpoint& cp) {
    if (cp.kind == "completion") return tr.completion_time == cp.t;
    for (const auto& e : tr.events) {
        if (cp.kind == "wait_until") {
            if (e.kind == "command" && e.data == "wait_until " + to_string(cp.t)) return true;
        } else if (cp.kind == "schedule_start") {
            if (e.kind == "command" && e.id == cp.id && e.t == cp.t &&
                e.data.rfind("follow_schedule", 0) == 0)
                return true;
        } else if (e.kind == cp.kind && e.id == cp.id && e.t == cp.t) {
            return true;
        }
    }
    return false;
}

inline std::string checkpoint_to_string(const Checkpoint& cp) {
    return cp.kind + (cp.kind == "wait_until" || cp.kind == "completion"
                          ? ""
                          : " #" + std::to_string(cp.id)) +
           " at t=" + to_string(cp.t);
}

inline std::string golden_name(const FamilyParams& p) {
    auto sanitize = [](std::string s) {
        for (auto& c : s)
            if (c == '/') c = '_';
        return s;
    };
    return std::string(family_name(p.family)) + "_a" + sanitize(to_string(p.alpha)) + "_e" +
           sanitize(to_string(p.eps)) + ".jsonl";
}

// Simulates one construction and compares against its closed form, its
// timeline checkpoints, and (optionally) a stored golden trace.
inline VerifyOutcome verify_family(const FamilyParams& p, const std::string& golden_dir = "",
                                   bool update_golden = false) {
    VerifyOutcome out{p};
    if (auto v = family_domain_violation(p)) {
        out.status = VerifyStatus::Skipped;
        out.note = "outside construction domain: " + *v;
        return out;
    }
    Instance inst = generate_lower_bound(p);
    LazyPolicy policy(p.alpha);
    CheckConfig checks;
    checks.alpha = p.alpha;
    SimTrace tr;
    try {
        tr = run(inst, policy, checks);
    } catch (const std::exception& ex) {
        out.status = VerifyStatus::Mismatch;
        out.note = std::string("simulation failed: ") + ex.what();
        return out;
    }
    auto [alg, opt] = predicted_outcome(p);
    if (tr.completion_time != alg) {
        out.status = VerifyStatus::Mismatch;
        out.note = "alg = " + to_string(tr.completion_time) + ", expected " + to_string(alg);
        return out;
    }
    Rational opt_final = tr.opt_prefix_values.back();
    if (opt_final != opt) {
        out.status = VerifyStatus::Mismatch;
        out.note = "opt = " + to_string(opt_final) + ", expected " + to_string(opt);
        return out;
    }
    for (const auto& cp : trace_checkpoints(p)) {
        if (!checkpoint_matches(tr, cp)) {
            out.status = VerifyStatus::Mismatch;
            out.note = "first diverging event: expected " + checkpoint_to_string(cp);
            return out;
        }
    }
    if (!golden_dir.empty()) {
        std::string fname = golden_dir + "/" + golden_name(p);
        std::string text = trace_to_jsonl(tr);
        if (update_golden) {
            std::ofstream f(fname, std::ios::binary);
            if (!f) throw StructuralError("cannot write golden file " + fname);
            f << text;
        } else {
            std::ifstream f(fname, std::ios::binary);
            if (!f) {
                out.status = VerifyStatus::Mismatch;
                out.note = "golden trace missing: " + fname;
                return out;
            }
            std::stringstream buf;
            buf << f.rdbuf();
            if (buf.str() != text) {
                out.status = VerifyStatus::Mismatch;
                out.note = "trace differs from golden " + fname;
                return out;
            }
        }
    }
    out.note = "alg=" + to_string(alg) + " opt=" + to_string(opt);
    return out;
}

// Families whose construction covers the given alpha.
inline std::vector<Family> applicable_families(const Rational& alpha, const Rational& eps) {
    std::vector<Family> fams{Family::Lemma1};
    if (alpha >= 1) fams.push_back(Family::Prop2);
    if (alpha < 1) {
        fams.push_back(Family::Prop3);
        fams.push_back(prop4_case_for(alpha, eps));
    }
    return fams;
}

inline std::vector<VerifyOutcome> verify_bounds(const std::vector<Rational>& alphas,
                                                const Rational& eps,
                                                const std::string& golden_dir = "",
                                                bool update_golden = false) {
    std::vector<VerifyOutcome> out;
    for (const auto& a : alphas)
        for (Family f : applicable_families(a, eps))
            out.push_back(verify_family({f, a, eps}, golden_dir, update_golden));
    return out;
}

// ---------------------------------------------------------------------------
// alpha sweep (lower-bound envelope)

struct SweepRow {
    Rational alpha;
    Rational lb_lemma1;
    std::optional<Rational> lb_prop2;  // alpha >= 1
    std::optional<Rational> lb_prop3;  // alpha < 1
    std::optional<Rational> lb_prop4;  // alpha < 1
    Rational lb_max;
    std::optional<Rational> simulated_ratio;
    std::string simulated_family;
};

inline SweepRow sweep_row(const Rational& alpha, const Rational& eps, bool simulate) {
    SweepRow row;
    row.alpha = alpha;
    row.lb_lemma1 = lb_lemma1(alpha);
    row.lb_max = row.lb_lemma1;
    if (alpha >= 1) {
        row.lb_prop2 = lb_prop2(alpha);
        row.lb_max = rat_max(row.lb_max, *row.lb_prop2);
    } else {
        row.lb_prop3 = lb_prop3(alpha);
        row.lb_prop4 = lb_prop4(alpha);
        row.lb_max = rat_max(row.lb_max, rat_max(*row.lb_prop3, *row.lb_prop4));
    }
    if (!simulate) return row;
    // simulate the strongest admissible construction at this alpha
    std::vector<std::pair<Rational, Family>> candidates;
    candidates.emplace_back(row.lb_lemma1, Family::Lemma1);
    if (row.lb_prop2) candidates.emplace_back(*row.lb_prop2, Family::Prop2);
    if (row.lb_prop3) candidates.emplace_back(*row.lb_prop3, Family::Prop3);
    if (row.lb_prop4) candidates.emplace_back(*row.lb_prop4, prop4_case_for(alpha, eps));
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (const auto& [value, fam] : candidates) {
        FamilyParams p{fam, alpha, eps};
        if (family_domain_violation(p)) continue;
        Instance inst = generate_lower_bound(p);
        LazyPolicy policy(alpha);
        CheckConfig checks;
        checks.alpha = alpha;
        SimTrace tr = run(inst, policy, checks);
        Rational opt = tr.opt_prefix_values.back();
        row.simulated_ratio = tr.completion_time / opt;
        row.simulated_family = family_name(fam);
        break;
    }
    return row;
}

inline std::vector<SweepRow> sweep(const Rational& from, const Rational& to, const Rational& step,
                                   const Rational& eps, bool simulate) {
    std::vector<SweepRow> rows;
    for (Rational a = from; a <= to; a += step) rows.push_back(sweep_row(a, eps, simulate));
    return rows;
}

struct SweepChecks {
    Rational min_lbmax_ge1{0};
    Rational min_lbmax_lt1{0};
    Rational argmin_ge1{0};
    bool corollary1_ok = false;
    bool corollary2_ok = false;
};

inline SweepChecks sweep_checks(const std::vector<SweepRow>& rows) {
    SweepChecks c;
    bool seen_ge1 = false, seen_lt1 = false;
    c.corollary2_ok = true;
    const Rational lo = rat(1078, 1000), hi = rat(1618, 1000);
    for (const auto& row : rows) {
        if (row.alpha >= 1) {
            if (!seen_ge1 || row.lb_max < c.min_lbmax_ge1) {
                c.min_lbmax_ge1 = row.lb_max;
                c.argmin_ge1 = row.alpha;
                seen_ge1 = true;
            }
        } else if (!seen_lt1 || row.lb_max < c.min_lbmax_lt1) {
            c.min_lbmax_lt1 = row.lb_max;
            seen_lt1 = true;
        }
        bool outside = !(row.alpha > lo && row.alpha < hi);
        if (outside && row.lb_max < rat(2618, 1000)) c.corollary2_ok = false;
    }
    c.corollary1_ok = (!seen_ge1 || c.min_lbmax_ge1 >= rat(2457, 1000)) &&
                      (!seen_lt1 || c.min_lbmax_lt1 >= rat(5, 2));
    return c;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "alpha,lb_lemma1,lb_prop2,lb_prop3,lb_prop4,lb_max,simulated_ratio,simulated_family\n";
    auto cell = [](const std::optional<Rational>& r) { return r ? approx(*r) : std::string(); };
    for (const auto& row : rows) {
        os << approx(row.alpha) << ',' << approx(row.lb_lemma1) << ',' << cell(row.lb_prop2)
           << ',' << cell(row.lb_prop3) << ',' << cell(row.lb_prop4) << ',' << approx(row.lb_max)
           << ',' << cell(row.simulated_ratio) << ',' << row.simulated_family << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// randomized stress against the exhaustive reference solver

// mt19937_64 is fully specified, so seeded runs are reproducible everywhere;
// the bounded draw below avoids distribution-object variance across
// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bounded(std::uint64_t n) {
        std::uint64_t limit = ~0ull - (~0ull % n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    long long range(long long lo, long long hi) {
        return lo + (long long)bounded((std::uint64_t)(hi - lo + 1));
    }

  private:
    std::mt19937_64 eng_;
};

struct StressConfig {
    std::uint64_t count = 1000;
    std::uint64_t seed = 1;
    int n_max = 5;
    int grid = 4;           // coordinates are multiples of 1/grid in [-4, 4]
    Rational alpha = rat(81, 50);
    bool finite_metric = false;  // random 4-vertex metrics instead of the line
};

inline Instance random_line_instance(Rng& rng, const StressConfig& cfg) {
    Instance inst;
    inst.space = MetricSpace::real_line();
    switch (rng.bounded(3)) {
        case 0: inst.capacity = 1; break;
        case 1: inst.capacity = 2; break;
        default: inst.capacity = std::nullopt;
    }
    int n = 1 + (int)rng.bounded((std::uint64_t)cfg.n_max);
    Rational t(0);
    const int g = cfg.grid;
    for (int i = 0; i < n; ++i) {
        Request r;
        r.id = i;
        r.source = LineCoord{rat(rng.range(-4 * g, 4 * g), g)};
        r.destination = rng.bounded(4) == 0 ? r.source  // visit-only request
                                            : Point(LineCoord{rat(rng.range(-4 * g, 4 * g), g)});
        t += rat(rng.range(1, 2 * g), g);
        r.release = t;
        inst.requests.push_back(std::move(r));
    }
    return inst;
}

inline Instance random_finite_instance(Rng& rng, const StressConfig& cfg) {
    const int g = cfg.grid, n = 4;
    std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d[i][j] = d[j][i] = rat(rng.range(1, 4 * g), g);
    // shortest-path closure repairs triangle violations
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d[i][j] = rat_min(d[i][j], d[i][k] + d[k][j]);
    Instance inst;
    inst.space = MetricSpace::finite(std::move(d));
    switch (rng.bounded(3)) {
        case 0: inst.capacity = 1; break;
        case 1: inst.capacity = 2; break;
        default: inst.capacity = std::nullopt;
    }
    int m = 1 + (int)rng.bounded((std::uint64_t)std::min(cfg.n_max, 4));
    Rational t(0);
    for (int i = 0; i < m; ++i) {
        Request r;
        r.id = i;
        r.source = Vertex{(int)rng.bounded(4)};
        r.destination = Vertex{(int)rng.bounded(4)};
        t += rat(rng.range(1, 2 * g), g);
        r.release = t;
        inst.requests.push_back(std::move(r));
    }
    return inst;
}

struct StressResult {
    std::uint64_t ran = 0;
    bool ok = true;
    std::string failure;
    std::string reproducer;  // instance JSON of the failing case
};

// Runs `count` seeded random instances through the lazy policy with live
// trace checks, and cross-checks the optimum against the exhaustive solver:
// completion <= (1+alpha) * oracle, and the pruned solver agrees with the
// oracle on every release prefix.
inline StressResult stress(const StressConfig& cfg) {
    Rng rng(cfg.seed);
    StressResult res;
    for (std::uint64_t it = 0; it < cfg.count; ++it) {
        Instance inst =
            cfg.finite_metric ? random_finite_instance(rng, cfg) : random_line_instance(rng, cfg);
        auto fail = [&](const std::string& why) {
            res.ok = false;
            res.failure = "instance " + std::to_string(it) + " (seed " +
                          std::to_string(cfg.seed) + "): " + why;
            res.reproducer = inst.to_json().dump();
        };
        try {
            LazyPolicy policy(cfg.alpha);
            CheckConfig checks;
            checks.alpha = cfg.alpha;
            SimTrace tr = run(inst, policy, checks);
            Rational oracle_final =
                oracle_opt_requests(inst.space, inst.capacity, inst.requests);
            if (!(tr.completion_time <= (1 + cfg.alpha) * oracle_final)) {
                fail("completion " + to_string(tr.completion_time) + " exceeds (1+alpha)*opt = " +
                     to_string((1 + cfg.alpha) * oracle_final));
                return res;
            }
            OptCache cache(inst);
            Rational prev(0);
            for (size_t k = 1; k <= inst.requests.size(); ++k) {
                std::vector<Request> prefix(inst.requests.begin(), inst.requests.begin() + k);
                Rational oracle_k = oracle_opt_requests(inst.space, inst.capacity, prefix);
                const Rational& fast_k = cache.opt_prefix(k);
                if (fast_k != oracle_k) {
                    fail("solver/oracle disagree on prefix " + std::to_string(k) + ": " +
                         to_string(fast_k) + " vs " + to_string(oracle_k));
                    return res;
                }
                if (fast_k < prev) {
                    fail("opt prefix not monotone at k=" + std::to_string(k));
                    return res;
                }
                prev = fast_k;
            }
        } catch (const std::exception& ex) {
            fail(ex.what());
            return res;
        }
        ++res.ran;
    }
    return res;
}

// ---------------------------------------------------------------------------
// trajectory plot data (line instances only)

struct PlotPoint {
    Rational t;
    Rational pos;
    std::string who;
};

inline std::vector<PlotPoint> alg_trajectory(const SimTrace& tr, const MetricSpace& space) {
    if (!space.is_line()) throw StructuralError("trajectories are line diagrams only");
    std::vector<PlotPoint> pts;
    Rational t(0), pos(0);
    pts.push_back({t, pos, "alg"});
    for (const auto& leg : tr.legs) {
        if (leg.t0 > t) pts.push_back({leg.t0, pos, "alg"});  // held position
        Point end = space.advance(leg.from, leg.target, leg.t1 - leg.t0);
        t = leg.t1;
        pos = std::get<LineCoord>(end).x;
        pts.push_back({t, pos, "alg"});
    }
    if (tr.completion_time > t) pts.push_back({tr.completion_time, pos, "alg"});
    return pts;
}

inline std::vector<PlotPoint> opt_trajectory(const Instance& inst) {
    if (!inst.space.is_line()) throw StructuralError("trajectories are line diagrams only");
    auto res = opt_offline(inst.space, inst.capacity, inst.requests, inst.space.origin());
    std::vector<PlotPoint> pts;
    Rational t(0), pos(0);
    pts.push_back({t, pos, "opt"});
    for (const auto& a : res.schedule.actions) {
        if (auto* m = std::get_if<MoveTo>(&a)) {
            Rational x = std::get<LineCoord>(m->target).x;
            t += rat_abs(x - pos);
            pos = x;
            pts.push_back({t, pos, "opt"});
        } else if (auto* w = std::get_if<WaitUntil>(&a)) {
            if (w->until > t) {
                t = w->until;
                pts.push_back({t, pos, "opt"});
            }
        }
    }
    return pts;
}

inline std::string plot_csv(const std::vector<PlotPoint>& alg, const std::vector<PlotPoint>& opt) {
    std::ostringstream os;
    os << "t,pos,who\n";
    for (const auto* side : {&alg, &opt})
        for (const auto& p : *side) os << approx(p.t) << ',' << approx(p.pos) << ',' << p.who << "\n";
    return os.str();
}

}  // namespace odar
