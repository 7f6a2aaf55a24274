#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hegsim_app/config.hpp"
#include "hegsim_app/table.hpp"

namespace hegsim::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitValidationFailed = 4,
};

const std::vector<std::string>& subcommand_names();

struct PointOutput {
    Table main;
    Table per_replication;  // simulate only
    Table latency;          // simulate with sim.latency_k
    bool failed = false;    // validate: some case did not pass
};

// One subcommand at one resolved configuration. `option` carries the
// subcommand-specific choice (validate: "standard" or "grid").
PointOutput run_point(const std::string& name, const RunConfig& cfg, unsigned jobs,
                      const std::string& option = {});

// Bell-pair trial probability: mux.p_trial when set, else p_e*^2 / 2 at the
// HEG optimum of the configured cavity.
double resolve_p_trial(const RunConfig& cfg, unsigned jobs);

// Full command line: `hegsim <subcommand> [options]`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hegsim::app
