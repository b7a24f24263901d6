#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cascade/config.hpp"

namespace cascade {

/// Raised by run() when validate() reports anything; carries the list.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

struct RunOptions {
  bool desk_scale = false;
  /// Overrides run.out_dir when non-empty.
  std::string out_dir;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

struct ArtifactRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunResult {
  std::string out_dir;
  std::map<std::string, bool> pass_flags;
  std::vector<ArtifactRecord> artifacts;  // manifest.json itself excluded

  bool pass() const;
  /// 0 iff every pass flag holds, else 1.
  int exit_status() const;
};

/// Validates, computes, and writes the mode's artifacts plus manifest.json
/// into the output directory (created if missing, files overwritten).
/// figure1 always runs the five-mode datum and figure2 the square.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Version string recorded in manifests.
const char* code_version();

}  // namespace cascade
