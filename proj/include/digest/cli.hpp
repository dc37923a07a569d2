#pragma once

#include <string>
#include <vector>

namespace digest::cli {

// Exit codes: 0 success, 1 config, 2 ingest, 3 provider, 4 render.
enum ExitCode { kOk = 0, kConfigError = 1, kIngestError = 2, kProviderError = 3, kRenderError = 4 };

// Parses and runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace digest::cli
