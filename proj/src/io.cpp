#include "gammamodel/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gm {

namespace {

void rename_over(const std::string& tmp, const std::string& path) {
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move " + tmp + " to " + path);
    }
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

void parse_kv_line(Config& config, const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ValidationError("malformed key=value entry in " + where + ": " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("empty key in " + where + ": " + line);
    config[key] = value;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void save_model_file(const ModelFile& file, const std::string& path) {
    if (file.kind != "gamma-model" && file.kind != "gamma-successor")
        throw ValidationError("unknown model file kind: " + file.kind);
    const std::string tmp = path + ".tmp";
    std::FILE* out = std::fopen(tmp.c_str(), "wb");
    if (!out) throw IoError("cannot open for writing: " + tmp);
    std::fprintf(out, "%s v1\n", file.kind.c_str());
    std::fprintf(out, "%d %d %.17g\n", file.n_states, file.n_actions, file.gamma);
    const int n = file.n_states;
    for (int s = 0; s < file.n_states; ++s)
        for (int a = 0; a < file.n_actions; ++a) {
            std::fprintf(out, "%d %d", s, a);
            const double* row = file.rows.data() + (static_cast<std::size_t>(s) * file.n_actions + a) * n;
            for (int j = 0; j < n; ++j) std::fprintf(out, " %.17g", row[j]);
            std::fputc('\n', out);
        }
    if (std::fclose(out) != 0) throw IoError("write failed: " + tmp);
    rename_over(tmp, path);
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    ModelFile file;
    std::string header;
    if (!std::getline(in, header)) throw IoError("empty model file: " + path);
    if (header == "gamma-model v1") {
        file.kind = "gamma-model";
    } else if (header == "gamma-successor v1") {
        file.kind = "gamma-successor";
    } else {
        throw ValidationError("unrecognized model file version tag: " + header);
    }
    if (!(in >> file.n_states >> file.n_actions >> file.gamma))
        throw ValidationError("malformed model file dimensions in " + path);
    if (file.n_states < 1 || file.n_actions < 1 || !(file.gamma >= 0.0 && file.gamma < 1.0))
        throw ValidationError("invalid model file dimensions in " + path);
    const int n = file.n_states;
    file.rows.assign(static_cast<std::size_t>(n) * file.n_actions * n, 0.0);
    const double expected_sum = file.kind == "gamma-model" ? 1.0 : 1.0 / (1.0 - file.gamma);
    for (long k = 0; k < static_cast<long>(n) * file.n_actions; ++k) {
        int s = 0;
        int a = 0;
        if (!(in >> s >> a)) throw ValidationError("truncated model file: " + path);
        if (s < 0 || s >= n || a < 0 || a >= file.n_actions)
            throw ValidationError("model file row index out of range in " + path);
        double* row = file.rows.data() + (static_cast<std::size_t>(s) * file.n_actions + a) * n;
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!(in >> row[j])) throw ValidationError("truncated model file row in " + path);
            if (!(row[j] >= 0.0))
                throw ValidationError("negative model file entry in " + path);
            sum += row[j];
        }
        if (std::abs(sum - expected_sum) > 1e-9 * std::max(1.0, expected_sum))
            throw ValidationError("model file row does not sum to " +
                                  format_double(expected_sum) + " in " + path);
    }
    return file;
}

ModelFile to_model_file(const GammaModelTable& model) {
    ModelFile file;
    file.kind = "gamma-model";
    file.n_states = model.n_states();
    file.n_actions = model.n_actions();
    file.gamma = model.gamma();
    file.rows = model.probability_table();
    return file;
}

ModelFile to_model_file(const OccupancyTable& occupancy) {
    ModelFile file;
    file.kind = "gamma-model";
    file.n_states = occupancy.n_states;
    file.n_actions = occupancy.n_actions;
    file.gamma = occupancy.gamma;
    file.rows = occupancy.mu;
    return file;
}

ModelFile to_model_file(const SuccessorTable& successor) {
    ModelFile file;
    file.kind = "gamma-successor";
    file.n_states = successor.n_states;
    file.n_actions = successor.n_actions;
    file.gamma = successor.gamma;
    file.rows = successor.m;
    return file;
}

GammaModelTable to_gamma_model(const ModelFile& file) {
    if (file.kind != "gamma-model")
        throw ValidationError("not a probability table: kind " + file.kind);
    return GammaModelTable::from_probabilities(file.n_states, file.n_actions, file.gamma,
                                               file.rows);
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    Config config;
    std::string line;
    while (std::getline(in, line)) {
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        parse_kv_line(config, entry, path);
    }
    return config;
}

void apply_overrides(Config& config, const std::vector<std::string>& overrides) {
    for (const auto& entry : overrides) parse_kv_line(config, trim(entry), "override");
}

std::string config_get(const Config& config, const std::string& key,
                       const std::string& fallback) {
    const auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
}

double config_get_double(const Config& config, const std::string& key, double fallback) {
    const auto it = config.find(key);
    if (it == config.end()) return fallback;
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return value;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + " is not a number: " + it->second);
    }
}

int config_get_int(const Config& config, const std::string& key, int fallback) {
    const long value = config_get_long(config, key, fallback);
    return static_cast<int>(value);
}

long config_get_long(const Config& config, const std::string& key, long fallback) {
    const auto it = config.find(key);
    if (it == config.end()) return fallback;
    try {
        std::size_t used = 0;
        const long value = std::stol(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return value;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + " is not an integer: " + it->second);
    }
}

std::uint64_t config_get_seed(const Config& config) {
    const auto it = config.find("seed");
    if (it == config.end()) return 0;
    try {
        return static_cast<std::uint64_t>(std::stoull(it->second));
    } catch (const std::exception&) {
        throw ValidationError("config key seed is not an integer: " + it->second);
    }
}

std::vector<double> config_get_double_list(const Config& config, const std::string& key,
                                           const std::string& fallback) {
    const std::string raw = config_get(config, key, fallback);
    std::vector<double> values;
    std::stringstream stream(raw);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const std::string entry = trim(token);
        if (entry.empty()) continue;
        try {
            values.push_back(std::stod(entry));
        } catch (const std::exception&) {
            throw ValidationError("config key " + key + " has a non-numeric entry: " + entry);
        }
    }
    if (values.empty()) throw ValidationError("config key " + key + " is empty");
    return values;
}

std::vector<std::string> config_get_string_list(const Config& config, const std::string& key,
                                                const std::string& fallback) {
    const std::string raw = config_get(config, key, fallback);
    std::vector<std::string> values;
    std::stringstream stream(raw);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const std::string entry = trim(token);
        if (!entry.empty()) values.push_back(entry);
    }
    if (values.empty()) throw ValidationError("config key " + key + " is empty");
    return values;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::json doc;
    doc["schema"] = "run-manifest v1";
    doc["command"] = manifest.command;
    doc["seed"] = manifest.seed;
    doc["config"] = manifest.config;
    doc["artifacts"] = manifest.artifacts;
    doc["duration_seconds"] = manifest.duration_seconds;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << doc.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + tmp);
    }
    rename_over(tmp, path);
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ValidationError("malformed manifest " + path + ": " + e.what());
    }
    if (doc.value("schema", "") != "run-manifest v1")
        throw ValidationError("unrecognized manifest schema in " + path);
    RunManifest manifest;
    manifest.command = doc.at("command").get<std::string>();
    manifest.seed = doc.at("seed").get<std::uint64_t>();
    manifest.config = doc.at("config").get<Config>();
    manifest.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    manifest.duration_seconds = doc.value("duration_seconds", 0.0);
    return manifest;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (!out) throw IoError("cannot open for writing: " + path);
    std::fprintf(out, "%s\n", header.c_str());
    for (const auto& row : rows) std::fprintf(out, "%s\n", row.c_str());
    if (std::fclose(out) != 0) throw IoError("write failed: " + path);
}

}  // namespace gm
