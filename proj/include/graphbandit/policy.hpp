#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphbandit/estimators.hpp"

namespace gbandit {

// Named numeric parameters passed through the harness and the CLI.
class Params {
public:
    Params() = default;
    explicit Params(std::map<std::string, double> values) : values_(std::move(values)) {}

    bool has(const std::string& name) const { return values_.count(name) > 0; }
    double get(const std::string& name, double fallback) const {
        const auto it = values_.find(name);
        return it == values_.end() ? fallback : it->second;
    }
    double require(const std::string& name) const {
        const auto it = values_.find(name);
        if (it == values_.end()) throw std::invalid_argument("missing parameter: " + name);
        return it->second;
    }
    void set(const std::string& name, double value) { values_[name] = value; }
    const std::map<std::string, double>& raw() const { return values_; }

private:
    std::map<std::string, double> values_;
};

// A learner: propose a sampling distribution over the arms, then digest the
// feedback of the played round. Policies are deterministic state machines;
// all randomness lives in the harness.
class Policy {
public:
    virtual ~Policy() = default;
    virtual const std::vector<double>& propose() = 0;
    virtual void update(const FeedbackEvent& event) = 0;
    // Epoch bookkeeping of the doubling-trick variants; plain policies stay at 1.
    virtual int current_epoch() const { return 1; }
    virtual int current_meta_epoch() const { return 1; }
    virtual int epochs_used() const { return current_epoch(); }
};

}  // namespace gbandit
