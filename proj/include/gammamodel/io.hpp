#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gammamodel/gamma_td.hpp"
#include "gammamodel/oracle.hpp"

namespace gm {

/// Configuration error (bad values, mismatched shapes, failed invariants).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem error (unreadable/unwritable paths, malformed files).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// On-disk table of per-(s, a) rows with a version tag. Kind "gamma-model"
/// rows are probability distributions (validated on load); kind
/// "gamma-successor" rows sum to 1/(1-gamma). Text format:
///   line 1: `<kind> v1`
///   line 2: `n_states n_actions gamma`
///   then one line per (s, a): `s a p_0 ... p_{n_states-1}`
/// with 17-significant-digit decimals, so write/read/write is idempotent.
struct ModelFile {
    std::string kind = "gamma-model";
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    std::vector<double> rows;  // [s][a][s_e]
};

void save_model_file(const ModelFile& file, const std::string& path);
ModelFile load_model_file(const std::string& path);

ModelFile to_model_file(const GammaModelTable& model);
ModelFile to_model_file(const OccupancyTable& occupancy);
ModelFile to_model_file(const SuccessorTable& successor);
GammaModelTable to_gamma_model(const ModelFile& file);

/// key=value configuration; later sources win (defaults < file < overrides).
using Config = std::map<std::string, std::string>;

Config parse_config_file(const std::string& path);
/// Each override is a single `key=value` token.
void apply_overrides(Config& config, const std::vector<std::string>& overrides);

std::string config_get(const Config& config, const std::string& key,
                       const std::string& fallback);
double config_get_double(const Config& config, const std::string& key, double fallback);
int config_get_int(const Config& config, const std::string& key, int fallback);
long config_get_long(const Config& config, const std::string& key, long fallback);
std::uint64_t config_get_seed(const Config& config);
std::vector<double> config_get_double_list(const Config& config, const std::string& key,
                                           const std::string& fallback);
std::vector<std::string> config_get_string_list(const Config& config, const std::string& key,
                                                const std::string& fallback);

/// Record of one command run: everything needed to reproduce it plus the
/// artifact list. Written atomically (temp file + rename) at run end.
struct RunManifest {
    std::string command;
    Config config;  // resolved key-values, seed included
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;  // file names relative to the out dir
    double duration_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

/// Minimal CSV emission: header plus preformatted rows, '.' decimals,
/// newline-terminated. Doubles are printed with %.17g.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);
std::string format_double(double value);

}  // namespace gm
