#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hegsim_app/config.hpp"

namespace hegsim::app {

struct SweepAxis {
    std::string key;  // section.key
    std::vector<std::string> values;
};

inline constexpr std::size_t kMaxSweepPoints = 1'000'000;

// "section.key=v1,v2,...".
SweepAxis parse_sweep_axis(const std::string& spec);

struct SweepPoint {
    RunConfig config;
    std::vector<ConfigValue> values;  // one per axis
};

// Cross product in odometer order, first axis slowest. No axes gives the base
// config alone. The constructor throws ConfigError on unknown keys, bad values
// or more than kMaxSweepPoints points.
class Sweep {
public:
    Sweep(RunConfig base, std::vector<SweepAxis> axes);

    std::size_t size() const { return size_; }
    const std::vector<SweepAxis>& axes() const { return axes_; }
    SweepPoint point(std::size_t n) const;

private:
    RunConfig base_;
    std::vector<SweepAxis> axes_;
    std::vector<std::vector<ConfigValue>> parsed_;
    std::size_t size_ = 1;
};

}  // namespace hegsim::app
