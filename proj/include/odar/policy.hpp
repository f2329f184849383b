#pragma once

#include <memory>

#include "engine.hpp"

namespace odar {

// The lazy waiting policy. On a release, reset to the origin if everything
// aboard can be delivered and the origin reached by alpha * OPT(t);
// otherwise keep going. When idle, wait until alpha * OPT(t), then serve all
// pending requests with a shortest schedule from the current position.
class LazyPolicy final : public OnlinePolicy {
  public:
    explicit LazyPolicy(Rational alpha) : alpha_(std::move(alpha)) {
        if (alpha_ < 0) throw StructuralError("lazy policy needs alpha >= 0");
    }

    const Rational& alpha() const { return alpha_; }

    std::optional<Command> on_request(const Request&, const Rational& t, const ServerView& view,
                                      const OptAccess& opt) override {
        if (check_interruptible(*view.instance, view, t, alpha_, opt.opt(t)))
            return Command(CmdDeliverAndReturn{});
        return std::nullopt;
    }

    std::optional<Command> on_idle(const Rational& t, const ServerView& view,
                                   const std::vector<Request>& unserved,
                                   const OptAccess& opt) override {
        const Rational& opt_t = opt.opt(t);
        if (t < alpha_ * opt_t) return Command(CmdWaitUntil{alpha_ * opt_t});
        if (!unserved.empty()) {
            auto res = shortest_schedule(view.instance->space, view.instance->capacity, unserved,
                                         view.position, t);
            return Command(CmdFollowSchedule{std::move(res.schedule)});
        }
        return std::nullopt;
    }

    std::string name() const override { return "lazy"; }
    std::string params() const override { return "alpha=" + to_string(alpha_); }

  private:
    Rational alpha_;
};

// Registry; the single entry today is "lazy", other baselines slot in here.
inline std::unique_ptr<OnlinePolicy> make_policy(const std::string& name, const Rational& alpha) {
    if (name == "lazy") return std::make_unique<LazyPolicy>(alpha);
    throw StructuralError("policy '" + name + "' not implemented");
}

}  // namespace odar
