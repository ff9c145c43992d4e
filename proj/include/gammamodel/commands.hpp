#pragma once

#include <string>
#include <vector>

#include "gammamodel/io.hpp"

namespace gm {

/// Process-level status of a command run; doubles as the CLI exit code.
enum class CommandStatus { ok = 0, validation_failure = 1, io_failure = 2 };

/// Runs one named command ("oracle", "train", "sweep-horizon", "value-map",
/// "control") with a fully resolved configuration, writing artifacts and a
/// run manifest into out_dir. Exceptions are mapped to the status codes and
/// the message is returned through `error` when non-null.
CommandStatus run_command(const std::string& command, const Config& config,
                          const std::string& out_dir, std::string* error = nullptr);

/// Re-executes the command recorded in a manifest; with the recorded seed
/// and config this reproduces the artifact files exactly.
CommandStatus run_from_manifest(const std::string& manifest_path, const std::string& out_dir,
                                std::string* error = nullptr);

/// Known command names, for CLI dispatch and error messages.
const std::vector<std::string>& command_names();

}  // namespace gm
