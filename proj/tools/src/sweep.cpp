#include "hegsim_app/sweep.hpp"

#include <sstream>
#include <stdexcept>

namespace hegsim::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep " + spec + ": expected section.key=v1,v2,...");
    SweepAxis axis;
    axis.key = trim(spec.substr(0, eq));
    if (!is_known_key(axis.key)) throw ConfigError("--sweep: unknown key '" + axis.key + "'");
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("--sweep " + axis.key + ": empty value");
        axis.values.push_back(item);
    }
    if (axis.values.empty()) throw ConfigError("--sweep " + axis.key + ": no values");
    return axis;
}

Sweep::Sweep(RunConfig base, std::vector<SweepAxis> axes) : base_(std::move(base)), axes_(std::move(axes)) {
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const SweepAxis& axis = axes_[a];
        for (std::size_t b = 0; b < a; ++b) {
            if (axes_[b].key == axis.key) throw ConfigError("--sweep: key '" + axis.key + "' given twice");
        }
        if (axis.values.empty()) throw ConfigError("--sweep " + axis.key + ": no values");
        if (size_ > kMaxSweepPoints / axis.values.size()) {
            throw ConfigError("--sweep: more than " + std::to_string(kMaxSweepPoints) + " points");
        }
        size_ *= axis.values.size();
    }
    // Every value is checked once here so that errors surface before any work.
    parsed_.resize(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        for (const auto& text : axes_[a].values) {
            try {
                parsed_[a].push_back(parse_value(text, true));
            } catch (const ConfigError& e) {
                throw ConfigError("--sweep " + axes_[a].key + ": " + e.what());
            }
            RunConfig probe = base_;
            probe.set(axes_[a].key, parsed_[a].back(), "--sweep " + axes_[a].key);
        }
    }
}

SweepPoint Sweep::point(std::size_t n) const {
    if (n >= size_) throw std::out_of_range("sweep point " + std::to_string(n) + " out of range");
    SweepPoint p{base_, std::vector<ConfigValue>(axes_.size())};
    for (std::size_t a = axes_.size(); a-- > 0;) {
        const std::size_t k = axes_[a].values.size();
        const std::size_t i = n % k;
        n /= k;
        p.config.set(axes_[a].key, parsed_[a][i], "--sweep " + axes_[a].key);
        p.values[a] = parsed_[a][i];
    }
    return p;
}

}  // namespace hegsim::app
