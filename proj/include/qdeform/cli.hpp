#pragma once

#include "qdeform/algebra.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qdeform::cli
{

enum ExitCode : int {
    kSuccess = 0,
    kVerdictFail = 1,
    kConfigError = 2,
    kEvaluationError = 3,
    kDomainError = 4,
};

struct FaultInjection
{
    int n = 0;
    double delta = 0.0;

    bool operator==(const FaultInjection&) const = default;
};

struct Overrides
{
    std::optional<int> probeDepth;
    std::optional<double> tailTol;
    std::optional<int> certDim;
    std::optional<double> certTol;
    std::optional<double> momentTol;
    /// Test fixture hook: perturb f(n) before any computation.
    std::optional<FaultInjection> injectFault;

    bool operator==(const Overrides&) const = default;
};

/// Deformation config file:
///   {"name": ..., "F": ..., "G": ..., "params": {"q": "0.5"}, "overrides": {...}}
/// Parameter values are JSON numbers or complex strings "a+bi".
struct Config
{
    std::string name;
    std::string F;
    std::string G;
    Bindings params;
    Overrides overrides;

    bool operator==(const Config&) const = default;
};

/// Throws ConfigError on malformed JSON, missing or unknown keys.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);
std::string serialize_config(const Config& config);
Config builtin_config(std::string_view name, const Bindings& params = {});

DeformationSpec to_spec(const Config& config);

/// Canonical JSON text: sorted keys, two-space indent, doubles at 17
/// significant digits, non-finite doubles as null, trailing newline.
std::string canonical_json(const nlohmann::json& value);

/// Number formatting shared by the CSV and table writers.
std::string format_number(double value, int significant);

/// Runs one CLI invocation (args exclude the program name) and returns the
/// exit code. Regular output goes to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qdeform::cli
