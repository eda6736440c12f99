#pragma once

#include <string>
#include <vector>

#include "flowname/model.hpp"
#include "flowname/parse.hpp"

namespace flowname {

// Entry point behind tools/main.cpp; returns the process exit code.
int runCli(int argc, const char* const* argv);

// Engine-config flag handling, exposed for round-trip tests: parse a flag
// vector (optionally including --config <file>) into an EngineConfig, and
// emit a config file body that parses back to the same values.
Parsed<EngineConfig> parseEngineFlags(const std::vector<std::string>& args);
std::string emitEngineConfig(const EngineConfig& config);

}  // namespace flowname
