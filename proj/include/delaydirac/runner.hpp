#ifndef DELAYDIRAC_RUNNER_HPP
#define DELAYDIRAC_RUNNER_HPP

#include <string>

#include "delaydirac/types.hpp"

namespace dd {

/// Parsed top-level configuration: the delay and the potentials.
struct Model {
    DelayConfig cfg;
    PotentialPair potentials;
};

/// Parses {"a": <real>, "potential": {"p": [segments], "q": [segments]}}.
/// Segment: {"from", "to", "shape": "zero"|"constant"|"cosine"|"samples", ...}.
/// Complex scalars are a number or a [re, im] pair.
Model parse_model(const std::string& json_text);

Spectrum spectrum_from_json(const std::string& json_text);
std::string spectrum_to_json(const Spectrum& spec);

/// Result document of one command; exit_code follows the CLI contract
/// (0 clean, 2 carries a numerical flag).
struct CommandOutput {
    std::string body;
    std::string summary;     // one-line digest for the terminal, may be empty
    std::string attachment;  // secondary document (iso: potential CSV), may be empty
    int exit_code = 0;
};

/// overrides_json may be empty; recognized keys: engine, m, g, tol.
CommandOutput run_charfn(const std::string& config_json, const std::string& overrides_json);
CommandOutput run_spectrum(const std::string& config_json, const std::string& overrides_json);
CommandOutput run_iso(const std::string& config_json, const std::string& overrides_json);
CommandOutput run_ambarzumian(const std::string& config_json, const std::string& overrides_json);
CommandOutput run_hadamard(const std::string& config_json, const std::string& overrides_json,
                           const std::string& spectrum_json);
CommandOutput run_trace(const std::string& config_json, const std::string& overrides_json);
CommandOutput run_asymfit(const std::string& config_json, const std::string& overrides_json);

}  // namespace dd

#endif
