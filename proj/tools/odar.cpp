// Command-line front end: generate adversarial instances, run the lazy
// policy with live invariant checks, verify the constructions against their
// closed forms and golden traces, sweep the lower-bound envelope, stress
// against the exhaustive solver, and export plot data.
//
// Exit codes: 0 pass, 2 invariant/bound violation or simulation fault,
// 3 input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "odar/harness.hpp"

using namespace odar;

namespace {

constexpr int kExitViolation = 2;
constexpr int kExitInput = 3;

Rational parse_rat_arg(const std::string& s, const std::string& flag) {
    auto r = parse_rational(s);
    if (!r) throw CLI::ValidationError(flag, "expected a rational like 81/50");
    return *r;
}

Family parse_family_arg(const std::string& s) {
    auto f = family_from_name(s);
    if (!f)
        throw CLI::ValidationError(
            "--family", "unknown family '" + s +
                            "' (use lemma1, prop2, prop3, prop4case1, prop4case2, prop4case3)");
    return *f;
}

std::vector<Rational> parse_alpha_list(const std::string& s) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_rat_arg(item, "--alphas"));
    if (out.empty()) throw CLI::ValidationError("--alphas", "empty alpha list");
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CLI::ValidationError("-o", "cannot open " + path);
    f << text;
}

Instance load_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--instance", "cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    return Instance::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open dial-a-ride lab: lazy policy vs exact offline optimum"};
    app.require_subcommand(1);

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate an adversarial instance");
    std::string gen_family, gen_alpha, gen_eps = "1/1000", gen_capacity, gen_out;
    gen->add_option("--family", gen_family, "construction family")->required();
    gen->add_option("--alpha", gen_alpha, "waiting parameter the instance targets")->required();
    gen->add_option("--eps", gen_eps, "construction epsilon (default 1/1000)");
    gen->add_option("--capacity", gen_capacity, "server capacity (positive int or 'inf')");
    gen->add_option("-o,--out", gen_out, "write instance JSON here (default stdout)");

    // ---- run ----------------------------------------------------------
    auto* runc = app.add_subcommand("run", "simulate one instance under a policy");
    std::string run_family, run_alpha, run_eps = "1/1000", run_instance, run_policy = "lazy";
    std::string run_policy_alpha, run_trace;
    bool run_no_checks = false;
    runc->add_option("--family", run_family, "construction family to generate and run");
    runc->add_option("--instance", run_instance, "instance JSON file to run");
    runc->add_option("--alpha", run_alpha, "waiting parameter (family and policy)");
    runc->add_option("--eps", run_eps, "construction epsilon");
    runc->add_option("--policy", run_policy, "policy name (lazy)");
    runc->add_option("--policy-alpha", run_policy_alpha,
                     "override the policy's alpha independently of the family's");
    runc->add_option("--trace", run_trace, "write the JSON-lines trace here");
    runc->add_flag("--no-checks", run_no_checks, "disable live invariant checks");

    // ---- verify-bounds --------------------------------------------------
    auto* ver = app.add_subcommand("verify-bounds",
                                   "reproduce the constructions exactly at given alphas");
    std::string ver_alphas, ver_eps = "1/1000", ver_golden;
    bool ver_update = false;
    ver->add_option("--alphas", ver_alphas, "comma-separated alpha list")->required();
    ver->add_option("--eps", ver_eps, "construction epsilon");
    ver->add_option("--golden", ver_golden, "directory of golden traces to compare against");
    ver->add_flag("--update-golden", ver_update, "rewrite golden traces instead of comparing");

    // ---- sweep ----------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "lower-bound envelope over an alpha grid");
    std::string swp_from = "0", swp_to = "3", swp_step = "1/1000", swp_eps = "1/1000", swp_out;
    bool swp_simulate = false;
    swp->add_option("--from", swp_from, "grid start");
    swp->add_option("--to", swp_to, "grid end");
    swp->add_option("--step", swp_step, "grid step");
    swp->add_option("--eps", swp_eps, "epsilon for simulated rows");
    swp->add_flag("--simulate", swp_simulate, "also simulate the strongest construction per row");
    swp->add_option("-o,--out", swp_out, "write CSV here (default stdout)");

    // ---- stress ---------------------------------------------------------
    auto* str = app.add_subcommand("stress", "randomized runs cross-checked with the oracle");
    std::uint64_t str_count = 1000, str_seed = 1;
    int str_nmax = 5, str_grid = 4;
    std::string str_alpha = "81/50", str_space = "line", str_repro = "stress_reproducer.json";
    str->add_option("--count", str_count, "number of instances");
    str->add_option("--seed", str_seed, "RNG seed");
    str->add_option("--n-max", str_nmax, "max requests per instance");
    str->add_option("--grid", str_grid, "coordinate grid denominator");
    str->add_option("--alpha", str_alpha, "policy waiting parameter");
    str->add_option("--space", str_space, "line or k4");
    str->add_option("--reproducer", str_repro, "where to dump a failing instance");

    // ---- plotdata -------------------------------------------------------
    auto* plt = app.add_subcommand("plotdata", "trajectory CSV for a construction run");
    std::string plt_family, plt_alpha, plt_eps = "1/1000", plt_out;
    plt->add_option("--family", plt_family, "construction family")->required();
    plt->add_option("--alpha", plt_alpha, "waiting parameter")->required();
    plt->add_option("--eps", plt_eps, "construction epsilon");
    plt->add_option("-o,--out", plt_out, "write CSV here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            FamilyParams p{parse_family_arg(gen_family), parse_rat_arg(gen_alpha, "--alpha"),
                           parse_rat_arg(gen_eps, "--eps")};
            Instance inst = generate_lower_bound(p);
            if (!gen_capacity.empty() && gen_capacity != "inf") {
                int c = std::stoi(gen_capacity);
                if (c < 1) throw CLI::ValidationError("--capacity", "must be positive or 'inf'");
                inst.capacity = c;
            }
            std::string text = inst.to_json().dump(2) + "\n";
            if (gen_out.empty())
                std::cout << text;
            else
                write_file(gen_out, text);
            return 0;
        }

        if (runc->parsed()) {
            Instance inst;
            std::string id;
            Rational policy_alpha;
            if (!run_instance.empty()) {
                inst = load_instance(run_instance);
                id = run_instance;
                if (run_alpha.empty() && run_policy_alpha.empty())
                    throw CLI::ValidationError("--alpha", "a policy alpha is required");
            } else if (!run_family.empty()) {
                if (run_alpha.empty())
                    throw CLI::ValidationError("--alpha", "required with --family");
                FamilyParams p{parse_family_arg(run_family), parse_rat_arg(run_alpha, "--alpha"),
                               parse_rat_arg(run_eps, "--eps")};
                inst = generate_lower_bound(p);
                id = std::string(family_name(p.family)) + " alpha=" + to_string(p.alpha) +
                     " eps=" + to_string(p.eps);
            } else {
                throw CLI::ValidationError("run", "needs --family or --instance");
            }
            policy_alpha = !run_policy_alpha.empty()
                               ? parse_rat_arg(run_policy_alpha, "--policy-alpha")
                               : parse_rat_arg(run_alpha, "--alpha");
            auto violations = validate(inst);
            if (!violations.empty()) {
                std::cerr << "invalid instance: " << violations.front() << "\n";
                return kExitInput;
            }
            auto policy = make_policy(run_policy, policy_alpha);
            CheckConfig checks;
            checks.enabled = !run_no_checks;
            checks.alpha = policy_alpha;
            SimTrace tr = run(inst, *policy, checks);
            if (!run_trace.empty()) write_trace(tr, run_trace);
            std::cout << format_report(report_from_trace(tr, id, run_trace));
            return 0;
        }

        if (ver->parsed()) {
            auto outcomes =
                verify_bounds(parse_alpha_list(ver_alphas), parse_rat_arg(ver_eps, "--eps"),
                              ver_golden, ver_update);
            int mismatches = 0;
            for (const auto& oc : outcomes) {
                const char* status = oc.status == VerifyStatus::Pass
                                         ? "PASS"
                                         : oc.status == VerifyStatus::Skipped ? "SKIP" : "FAIL";
                if (oc.status == VerifyStatus::Mismatch) ++mismatches;
                std::cout << status << " " << family_name(oc.params.family)
                          << " alpha=" << to_string(oc.params.alpha)
                          << " eps=" << to_string(oc.params.eps) << ": " << oc.note << "\n";
            }
            std::cout << (mismatches ? "FAILED" : "OK") << " (" << outcomes.size()
                      << " combinations, " << mismatches << " mismatches)\n";
            return mismatches ? kExitViolation : 0;
        }

        if (swp->parsed()) {
            auto rows = sweep(parse_rat_arg(swp_from, "--from"), parse_rat_arg(swp_to, "--to"),
                              parse_rat_arg(swp_step, "--step"), parse_rat_arg(swp_eps, "--eps"),
                              swp_simulate);
            std::string csv = sweep_csv(rows);
            if (swp_out.empty())
                std::cout << csv;
            else
                write_file(swp_out, csv);
            auto checks = sweep_checks(rows);
            std::cerr << "min lb_max (alpha >= 1): " << to_string(checks.min_lbmax_ge1) << " (~"
                      << approx(checks.min_lbmax_ge1) << ") at alpha=" << to_string(checks.argmin_ge1)
                      << "\n";
            std::cerr << "min lb_max (alpha < 1):  " << to_string(checks.min_lbmax_lt1) << " (~"
                      << approx(checks.min_lbmax_lt1) << ")\n";
            std::cerr << "threshold 2457/1000 and 5/2: " << (checks.corollary1_ok ? "pass" : "FAIL")
                      << "\n";
            std::cerr << "threshold 2618/1000 outside (1078/1000,1618/1000): "
                      << (checks.corollary2_ok ? "pass" : "FAIL") << "\n";
            return checks.corollary1_ok && checks.corollary2_ok ? 0 : kExitViolation;
        }

        if (str->parsed()) {
            StressConfig cfg;
            cfg.count = str_count;
            cfg.seed = str_seed;
            cfg.n_max = str_nmax;
            cfg.grid = str_grid;
            cfg.alpha = parse_rat_arg(str_alpha, "--alpha");
            if (str_space == "k4")
                cfg.finite_metric = true;
            else if (str_space != "line")
                throw CLI::ValidationError("--space", "line or k4");
            auto res = stress(cfg);
            if (!res.ok) {
                write_file(str_repro, res.reproducer + "\n");
                std::cerr << "FAIL " << res.failure << "\nreproducer: " << str_repro << "\n";
                return kExitViolation;
            }
            std::cout << "OK " << res.ran << " instances (seed " << cfg.seed << ", alpha "
                      << str_alpha << ", " << str_space << ")\n";
            return 0;
        }

        if (plt->parsed()) {
            FamilyParams p{parse_family_arg(plt_family), parse_rat_arg(plt_alpha, "--alpha"),
                           parse_rat_arg(plt_eps, "--eps")};
            Instance inst = generate_lower_bound(p);
            LazyPolicy policy(p.alpha);
            CheckConfig checks;
            checks.alpha = p.alpha;
            SimTrace tr = run(inst, policy, checks);
            std::string csv = plot_csv(alg_trajectory(tr, inst.space), opt_trajectory(inst));
            if (plt_out.empty())
                std::cout << csv;
            else
                write_file(plt_out, csv);
            return 0;
        }
    } catch (const CheckViolation& ex) {
        std::cerr << "check violation: " << ex.what() << "\n";
        return kExitViolation;
    } catch (const SimFault& ex) {
        std::cerr << "simulation fault: " << ex.what() << "\n";
        return kExitViolation;
    } catch (const DomainError& ex) {
        std::cerr << "rejected: " << ex.what() << "\n";
        return kExitInput;
    } catch (const CLI::Error& ex) {
        std::cerr << ex.what() << "\n";
        return kExitInput;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInput;
    }
    return 0;
}
