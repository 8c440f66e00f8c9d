#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tfred/conditions.hpp"
#include "tfred/config.hpp"
#include "tfred/convergence.hpp"
#include "tfred/examples.hpp"
#include "tfred/lyapunov.hpp"

namespace tfred {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct CheckResult {
    ConditionReport report;
    std::vector<Vec> stationary;
    std::optional<LyapunovCertificate> certificate;
};

/// Decomposition, TF0, TFI, TFII, CIS, GP, uniqueness of the stationary point and LC.
CheckResult run_checks(const ExampleSystem& ex, const RunConfig& cfg);

/// Certificate for the example's Lyapunov candidate, or the one-dimensional
/// construction for curves. Throws when neither applies.
LyapunovCertificate build_certificate(const ExampleSystem& ex, const ReducedField& rf, const Vec& z);

SweepOptions sweep_options(const RunConfig& cfg);

std::string list_text(const Registry& reg);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Registry& reg);
int run_cli(int argc, char** argv);

}  // namespace tfred
