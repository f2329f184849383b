#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "instance.hpp"

namespace odar {

// The adversarial construction families. The identifiers are the public CLI
// names; each family builds a fixed request list on the real line from
// (alpha, eps) and predicts the exact (ALG, OPT) outcome of the lazy policy
// on it.
enum class Family { Lemma1, Prop2, Prop3, Prop4Case1, Prop4Case2, Prop4Case3 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Lemma1: return "lemma1";
        case Family::Prop2: return "prop2";
        case Family::Prop3: return "prop3";
        case Family::Prop4Case1: return "prop4case1";
        case Family::Prop4Case2: return "prop4case2";
        case Family::Prop4Case3: return "prop4case3";
    }
    return "?";
}

inline std::optional<Family> family_from_name(const std::string& s) {
    for (Family f : {Family::Lemma1, Family::Prop2, Family::Prop3, Family::Prop4Case1,
                     Family::Prop4Case2, Family::Prop4Case3})
        if (s == family_name(f)) return f;
    return std::nullopt;
}

struct FamilyParams {
    Family family = Family::Lemma1;
    Rational alpha;
    Rational eps = rat(1, 1000);
};

// Parameter-domain rejection, naming the first violated constraint.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Every constraint the construction's exact execution needs. Checked one by
// one so rejections can name the offender.
inline std::optional<std::string> family_domain_violation(const FamilyParams& p) {
    const Rational &a = p.alpha, &e = p.eps;
    auto fail = [&](const std::string& what) {
        return std::optional<std::string>(std::string(family_name(p.family)) + ": " + what);
    };
    if (a < 0) return fail("alpha must be nonnegative");
    if (p.family == Family::Lemma1) return std::nullopt;
    if (e <= 0) return fail("eps must be positive");

    switch (p.family) {
        case Family::Prop2:
            if (a < 1) return fail("alpha >= 1 required");
            if (!(3 * a + 2 > 3 * a * a + a * e))
                return fail("3a+2 > 3a^2+a*eps required (the return check at the third "
                            "release must fail)");
            return std::nullopt;
        case Family::Prop3:
            if (a == 0) return fail("alpha = 0 has an empty eps domain; rejected");
            if (a >= 1) return fail("alpha < 1 required");
            if (!(e < a / 2)) return fail("eps < alpha/2 required (no motion before the "
                                          "second release)");
            if (!(a * a + a * e < 1))
                return fail("a^2+a*eps < 1 required (the mid-tour return check must fail)");
            if (!(e < 1 - a)) return fail("eps < 1-alpha required");
            return std::nullopt;
        case Family::Prop4Case1:
        case Family::Prop4Case2:
        case Family::Prop4Case3:
            break;
        default:
            return std::nullopt;
    }

    // shared constraints of the three-case construction
    if (a >= 1) return fail("alpha < 1 required");
    if (!(a + a * e >= e))
        return fail("a(1+eps) >= eps required (first schedule must start at the wait target)");
    if (!(e > a * e))
        return fail("a+eps > a(1+eps) required (second release after the first schedule starts)");
    if (!(a + a * e + 2 > a * (2 * a + 1 + e)))
        return fail("a(1+eps)+2 > a(2a+1+eps) required (return check at the second release "
                    "must fail)");
    if (!(2 * a + 1 + e < 2 + a))
        return fail("2a+1+eps < 2+a required (left-first sweep is the two-request optimum)");

    const Rational q = 3 * a * a + a;  // case boundaries are thresholds on 3a^2+a
    switch (p.family) {
        case Family::Prop4Case1:
            if (!(a < rat(2, 3))) return fail("alpha < 2/3 required for case 1");
            if (!(a + a * e + 2 > 2 * a + 3 * a * a))
                return fail("a(1+eps)+2 > 2a+3a^2 required (return check at the third "
                            "release must fail)");
            if (!(2 * a + 3 * a * a >= 1 + a + a * e))
                return fail("2a+3a^2 >= 1+a(1+eps) required (second schedule must start at "
                            "the wait target, not at the first schedule's end)");
            if (!(2 * a + 3 * a * a < 2 + 3 * a))
                return fail("2a+3a^2 < 2+3a required (second schedule starts before the "
                            "last release)");
            return std::nullopt;
        case Family::Prop4Case2:
            if (!(q >= 2)) return fail("3a^2+a >= 2 required for case 2");
            if (!(q < 3 - e))
                return fail("2a+3a^2 < 3+a-eps required (return check at the fourth release "
                            "must fail)");
            if (!(2 * a * a + a * e < 2))
                return fail("2a^2+a*eps < 2 required (the third point lies right of 1)");
            if (!((1 - a) * (3 * a + 2) > 2 * a * e))
                return fail("(1-a)(3a+2) > 2a*eps required (left-first sweep stays optimal)");
            return std::nullopt;
        case Family::Prop4Case3:
            if (!(q >= 3 - e)) return fail("3a^2+a >= 3-eps required for case 3");
            if (!(2 * a * a + a * e < 2))
                return fail("2a^2+a*eps < 2 required (the third point lies right of 1)");
            if (!((1 - a) * (3 * a + 2) > 2 * a * e))
                return fail("(1-a)(3a+2) > 2a*eps required (left-first sweep stays optimal)");
            if (!(4 - a - 3 * a * a > 3 * e))
                return fail("4-a-3a^2 > 3eps required (return check at the fifth release "
                            "must fail)");
            if (!(3 - a - a * a >= e * (2 - a)))
                return fail("3-a-a^2 >= eps(2-a) required (the optimum reaches the fourth "
                            "point without waiting)");
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

inline Request line_request(int id, Rational a, Rational b, Rational t) {
    return Request{id, LineCoord{std::move(a)}, LineCoord{std::move(b)}, std::move(t)};
}

}  // namespace detail

// nullopt when (family, alpha, eps) is admissible; otherwise the violated
// constraint.
inline std::optional<std::string> family_domain_violation(const FamilyParams& p) {
    auto v = detail::family_domain_violation(p);
    if (v) return v;
    // the built release list must be strictly increasing and positive; for
    // degenerate parameters (e.g. alpha = 0 in the three-case construction)
    // this is the first thing to break
    return std::nullopt;
}

inline Instance generate_lower_bound(const FamilyParams& p) {
    if (auto v = family_domain_violation(p)) throw DomainError(*v);
    const Rational &a = p.alpha, &e = p.eps;
    using detail::line_request;
    Instance inst;
    inst.space = MetricSpace::real_line();
    inst.capacity = std::nullopt;  // the constructions behave identically for every capacity
    switch (p.family) {
        case Family::Lemma1:
            inst.requests = {line_request(0, 1, 1, rat(1, 2))};
            break;
        case Family::Prop2:
            inst.requests = {line_request(0, 0, 1, e), line_request(1, 0, -1, 2 * e),
                             line_request(2, 2 - 3 * a - e, 2 - 3 * a - e, 3 * a + e)};
            break;
        case Family::Prop3:
            inst.requests = {line_request(0, e / 2, rat(1, 2), e / 2), line_request(1, 1, 1, e),
                             line_request(2, 0, 0, a + e),
                             line_request(3, rat(1, 2) + e, 1, a + 2 * e),
                             line_request(4, 1, 1, a + 1 + e)};
            break;
        case Family::Prop4Case1:
            inst.requests = {line_request(0, 0, 1, e), line_request(1, -a, -a, a + e),
                             line_request(2, 2 + a - e, 2 + a - e, a + 2 * e),
                             line_request(3, 2 + a - e, 2 + a - e, 2 + 3 * a)};
            break;
        case Family::Prop4Case2: {
            Rational p3 = 2 / a + 1 - 2 * a - e;
            inst.requests = {line_request(0, 0, 1, e), line_request(1, -a, -a, a + e),
                             line_request(2, p3, p3, a + 2 * e),
                             line_request(3, 2 + a - e, 2 + a - e, 2 + a - e),
                             line_request(4, 2 + a - e, 2 + a - e, 2 + 3 * a)};
            break;
        }
        case Family::Prop4Case3: {
            Rational p3 = 2 / a + 1 - 2 * a - e;
            Rational p4 = 3 / a + 1 - 2 * a - (2 + a) * e / a;
            inst.requests = {line_request(0, 0, 1, e), line_request(1, -a, -a, a + e),
                             line_request(2, p3, p3, a + 2 * e),
                             line_request(3, p4, p4, 2 + a - e),
                             line_request(4, 2 + a - e, 2 + a - e, 3 + a - 3 * e),
                             line_request(5, 2 + a - e, 2 + a - e, 2 + 3 * a)};
            break;
        }
    }
    // belt and braces: the constraint set above is supposed to make the list
    // well formed
    Rational prev(0);
    for (const auto& r : inst.requests) {
        if (r.release <= prev)
            throw DomainError(std::string(family_name(p.family)) +
                              ": release times must strictly increase");
        prev = r.release;
    }
    return inst;
}

// The exact (ALG, OPT) completion times of the lazy policy / the offline
// optimum on the generated instance.
inline std::pair<Rational, Rational> predicted_outcome(const FamilyParams& p) {
    if (auto v = family_domain_violation(p)) throw DomainError(*v);
    const Rational &a = p.alpha, &e = p.eps;
    switch (p.family) {
        case Family::Lemma1:
            if (a >= rat(1, 2)) return {1 + a, Rational(1)};
            return {rat(3, 2), Rational(1)};
        case Family::Prop2:
            return {6 * a + 2 + e, 3 * a + e};
        case Family::Prop3:
            return {4 + a - 2 * e, a + 1 + e};
        default:
            return {5 + 7 * a + 3 * a * a - 3 * e, 2 + 3 * a};
    }
}

// Lower-bound formulas plotted over alpha (the limiting ratios of the four
// constructions). Families apply on different alpha ranges.
inline Rational lb_lemma1(const Rational& a) { return 1 + a; }
inline Rational lb_prop2(const Rational& a) { return 2 + Rational(2) / (3 * a); }  // alpha >= 1
inline Rational lb_prop3(const Rational& a) { return 1 + Rational(3) / (a + 1); }  // alpha < 1
inline Rational lb_prop4(const Rational& a) {                                      // alpha < 1
    return 2 + a + (1 - a) / (2 + 3 * a);
}

inline Family prop4_case_for(const Rational& a, const Rational& e) {
    if (a < rat(2, 3)) return Family::Prop4Case1;
    if (3 * a * a + a < 3 - e) return Family::Prop4Case2;
    return Family::Prop4Case3;
}

// Named timeline facts of each construction's execution, matched against
// simulation traces. kind is one of: wait_until (t = the wait target),
// schedule_start (id = 1-based schedule index), pickup/dropoff/visit
// (id = request), completion.
struct Checkpoint {
    std::string kind;
    int id = 0;
    Rational t;
};

inline std::vector<Checkpoint> trace_checkpoints(const FamilyParams& p) {
    if (auto v = family_domain_violation(p)) throw DomainError(*v);
    const Rational &a = p.alpha, &e = p.eps;
    std::vector<Checkpoint> cp;
    auto wait = [&](Rational t) { cp.push_back({"wait_until", 0, std::move(t)}); };
    auto sched = [&](int i, Rational t) { cp.push_back({"schedule_start", i, std::move(t)}); };
    auto drop = [&](int id, Rational t) { cp.push_back({"dropoff", id, std::move(t)}); };
    auto visit = [&](int id, Rational t) { cp.push_back({"visit", id, std::move(t)}); };
    auto done = [&](Rational t) { cp.push_back({"completion", 0, std::move(t)}); };
    switch (p.family) {
        case Family::Lemma1: {
            Rational start = rat_max(a, rat(1, 2));
            sched(1, start);
            visit(0, start + 1);
            done(start + 1);
            break;
        }
        case Family::Prop2:
            wait(3 * a);
            sched(1, 3 * a);
            drop(1, 3 * a + 1);
            drop(0, 3 * a + 3);
            sched(2, 3 * a + 3);
            visit(2, 6 * a + 2 + e);
            done(6 * a + 2 + e);
            break;
        case Family::Prop3:
            wait(a);
            sched(1, a);
            drop(0, a + rat(1, 2));
            visit(1, a + 1);
            sched(2, a + 1);
            drop(3, a + 2 - 2 * e);
            visit(2, a + 3 - 2 * e);
            sched(3, a + 3 - 2 * e);
            visit(4, 4 + a - 2 * e);
            done(4 + a - 2 * e);
            break;
        case Family::Prop4Case1:
        case Family::Prop4Case2:
        case Family::Prop4Case3: {
            wait(a * (1 + e));
            sched(1, a * (1 + e));
            drop(0, 1 + a + a * e);
            Rational s2 = 2 * a + 3 * a * a;  // the admissibility checks pin this start
            if (p.family == Family::Prop4Case1) {
                if (s2 > 1 + a + a * e) wait(s2);
            } else {
                wait(2 + a);
                if (p.family == Family::Prop4Case3) wait(3 + a - 2 * e);
                if (s2 > 2 + a || p.family == Family::Prop4Case3) wait(s2);
            }
            sched(2, s2);
            if (p.family == Family::Prop4Case2 || p.family == Family::Prop4Case3)
                visit(2, s2 + (2 / a - 2 * a - e));  // third point, passed on the way out
            if (p.family == Family::Prop4Case3)
                visit(3, s2 + (3 / a - 2 * a - (2 + a) * e / a));
            // rightmost point of the sweep
            int right_id = p.family == Family::Prop4Case1 ? 2 : (p.family == Family::Prop4Case2 ? 3 : 4);
            visit(right_id, s2 + 1 + a - e);
            visit(1, s2 + 3 + 3 * a - 2 * e);
            sched(3, s2 + 3 + 3 * a - 2 * e);
            int last_id = p.family == Family::Prop4Case1 ? 3 : (p.family == Family::Prop4Case2 ? 4 : 5);
            visit(last_id, 5 + 7 * a + 3 * a * a - 3 * e);
            done(5 + 7 * a + 3 * a * a - 3 * e);
            break;
        }
    }
    return cp;
}

}  // namespace odar
