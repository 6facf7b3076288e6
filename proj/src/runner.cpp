#include "anderson/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/ids.hpp"
#include "anderson/levelstats.hpp"
#include "anderson/version.hpp"
#include "anderson/wegner.hpp"

namespace anderson {

namespace fs = std::filesystem;

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Ids: return "ids";
        case ExperimentKind::Dos: return "dos";
        case ExperimentKind::FreeIds: return "free-ids";
        case ExperimentKind::BoundCert: return "bound-cert";
        case ExperimentKind::Spacing: return "spacing";
        case ExperimentKind::Verify: return "verify";
    }
    return "unknown";
}

namespace {

ExperimentKind parse_kind(const std::string& name, const std::string& key_path) {
    if (name == "ids") return ExperimentKind::Ids;
    if (name == "dos") return ExperimentKind::Dos;
    if (name == "free-ids") return ExperimentKind::FreeIds;
    if (name == "bound-cert") return ExperimentKind::BoundCert;
    if (name == "spacing") return ExperimentKind::Spacing;
    if (name == "verify") return ExperimentKind::Verify;
    throw ConfigError(key_path + ": unknown experiment kind '" + name + "'");
}

const nlohmann::json* maybe_section(const nlohmann::json& j, const std::string& name) {
    const auto it = j.find(name);
    if (it == j.end()) return nullptr;
    if (!it->is_object()) throw ConfigError(name + ": must be an object");
    return &*it;
}

void reject_unknown_keys(const nlohmann::json& section, const std::string& prefix,
                         const std::set<std::string>& allowed) {
    for (const auto& item : section.items())
        if (!allowed.contains(item.key()))
            throw ConfigError(prefix + item.key() + ": unknown key");
}

double get_number(const nlohmann::json& section, const std::string& key,
                  const std::string& key_path, double fallback, bool* present = nullptr) {
    const auto it = section.find(key);
    if (it == section.end()) {
        if (present) *present = false;
        return fallback;
    }
    if (!it->is_number()) throw ConfigError(key_path + ": must be a number");
    if (present) *present = true;
    return it->get<double>();
}

int get_int(const nlohmann::json& section, const std::string& key, const std::string& key_path,
            int fallback) {
    const auto it = section.find(key);
    if (it == section.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(key_path + ": must be an integer");
    return it->get<int>();
}

SingleSiteDensity parse_density(const nlohmann::json& section) {
    reject_unknown_keys(section, "density.",
                        {"kind", "W_minus", "W_plus", "breaks", "values", "table", "rho_min",
                         "rho_max"});
    const std::string kind = section.value("kind", std::string("uniform"));
    SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
    try {
        if (kind == "uniform") {
            const double lo = get_number(section, "W_minus", "density.W_minus", 0.0);
            const double hi = get_number(section, "W_plus", "density.W_plus", 1.0);
            density = SingleSiteDensity::uniform(lo, hi);
        } else if (kind == "piecewise-constant") {
            if (!section.contains("breaks") || !section.contains("values"))
                throw ConfigError("density.breaks/density.values: required for "
                                  "piecewise-constant densities");
            density = SingleSiteDensity::piecewise_constant(
                section.at("breaks").get<std::vector<double>>(),
                section.at("values").get<std::vector<double>>());
        } else if (kind == "truncated-custom") {
            if (!section.contains("table"))
                throw ConfigError("density.table: required for truncated-custom densities");
            std::vector<double> points;
            std::vector<double> values;
            for (const auto& row : section.at("table")) {
                if (!row.is_array() || row.size() != 2)
                    throw ConfigError("density.table: rows must be [w, rho] pairs");
                points.push_back(row[0].get<double>());
                values.push_back(row[1].get<double>());
            }
            density = SingleSiteDensity::tabulated(std::move(points), std::move(values));
        } else {
            throw ConfigError("density.kind: unknown kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("density: ") + e.what());
    }
    if (section.contains("rho_min")) {
        const double floor = section.at("rho_min").get<double>();
        if (!(floor > 0.0)) throw ConfigError("density.rho_min: must be positive");
        density.declare_rho_min(floor);
    }
    if (section.contains("rho_max")) {
        const auto& ceiling = section.at("rho_max");
        if (ceiling.is_string() && ceiling.get<std::string>() == "unbounded")
            density.declare_rho_max(std::nullopt);
        else if (ceiling.is_number())
            density.declare_rho_max(ceiling.get<double>());
        else
            throw ConfigError("density.rho_max: must be a number or \"unbounded\"");
    }
    return density;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& subcommand) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(j, "", {"experiment", "model", "density", "grid", "mc", "algorithm",
                                "output"});

    RunConfig config;
    if (j.contains("experiment")) {
        if (!j.at("experiment").is_string()) throw ConfigError("experiment: must be a string");
        config.kind = parse_kind(j.at("experiment").get<std::string>(), "experiment");
        if (!subcommand.empty() && subcommand != kind_name(config.kind))
            throw ConfigError("experiment: config says '" + kind_name(config.kind) +
                              "' but the subcommand is '" + subcommand + "'");
    } else if (!subcommand.empty()) {
        config.kind = parse_kind(subcommand, "experiment");
    } else {
        throw ConfigError("experiment: missing (no subcommand given either)");
    }

    if (const nlohmann::json* model = maybe_section(j, "model")) {
        reject_unknown_keys(*model, "model.", {"d", "L", "ell"});
        config.dimension = get_int(*model, "d", "model.d", config.dimension);
        config.side = get_int(*model, "L", "model.L", config.side);
        config.ell = get_int(*model, "ell", "model.ell", config.ell);
    }
    if (config.dimension < 1) throw ConfigError("model.d: must be >= 1");
    if (config.side < 1) throw ConfigError("model.L: must be >= 1");
    if (config.ell < 1) throw ConfigError("model.ell: must be >= 1");

    if (const nlohmann::json* density = maybe_section(j, "density"))
        config.density = parse_density(*density);

    if (const nlohmann::json* grid = maybe_section(j, "grid")) {
        reject_unknown_keys(*grid, "grid.", {"min", "max", "step"});
        bool has_min = false;
        bool has_max = false;
        const double lo = get_number(*grid, "min", "grid.min", 0.0, &has_min);
        const double hi = get_number(*grid, "max", "grid.max", 0.0, &has_max);
        if (has_min != has_max) throw ConfigError("grid.min/grid.max: give both or neither");
        if (has_min) {
            if (!(hi >= lo)) throw ConfigError("grid.max: must be >= grid.min");
            config.grid_min = lo;
            config.grid_max = hi;
        }
        config.grid_step = get_number(*grid, "step", "grid.step", config.grid_step);
        if (!(config.grid_step > 0.0)) throw ConfigError("grid.step: must be positive");
    }

    if (const nlohmann::json* mc = maybe_section(j, "mc")) {
        reject_unknown_keys(*mc, "mc.", {"R", "seed"});
        config.realizations = get_int(*mc, "R", "mc.R", config.realizations);
        if (mc->contains("seed")) {
            if (!mc->at("seed").is_number_integer() || mc->at("seed").get<std::int64_t>() < 0)
                throw ConfigError("mc.seed: must be a nonnegative integer");
            config.seed = mc->at("seed").get<std::uint64_t>();
        }
    }
    if (config.realizations < 1) throw ConfigError("mc.R: must be >= 1");

    if (const nlohmann::json* algo = maybe_section(j, "algorithm")) {
        reject_unknown_keys(*algo, "algorithm.",
                            {"h", "epsilon", "delta", "D_rank", "ell_max", "X", "ks_threshold",
                             "energy"});
        config.bin_width = get_number(*algo, "h", "algorithm.h", config.bin_width);
        config.switch_width = get_number(*algo, "epsilon", "algorithm.epsilon",
                                         config.switch_width);
        config.delta = get_number(*algo, "delta", "algorithm.delta", config.delta);
        config.d_rank = get_number(*algo, "D_rank", "algorithm.D_rank", config.d_rank);
        config.ell_max = get_int(*algo, "ell_max", "algorithm.ell_max", config.ell_max);
        config.window = get_number(*algo, "X", "algorithm.X", config.window);
        config.ks_threshold = get_number(*algo, "ks_threshold", "algorithm.ks_threshold",
                                         config.ks_threshold);
        bool has_energy = false;
        const double energy = get_number(*algo, "energy", "algorithm.energy", 0.0, &has_energy);
        if (has_energy) config.energy = energy;
    }
    if (!(config.bin_width > 0.0)) throw ConfigError("algorithm.h: must be positive");
    if (!(config.switch_width > 0.0)) throw ConfigError("algorithm.epsilon: must be positive");
    if (!(config.window > 0.0)) throw ConfigError("algorithm.X: must be positive");
    if (!(config.ks_threshold > 0.0))
        throw ConfigError("algorithm.ks_threshold: must be positive");
    if (config.ell_max < 0) throw ConfigError("algorithm.ell_max: must be >= 0");
    if (config.kind == ExperimentKind::Dos && config.bin_width < 2.0 * config.grid_step)
        throw ConfigError("algorithm.h: must be at least twice grid.step");
    if (config.kind == ExperimentKind::BoundCert) {
        const double quarter = 0.25 * (config.density.w_plus() - config.density.w_minus());
        if (!(config.delta > 0.0) || !(config.delta < quarter))
            throw ConfigError("algorithm.delta: must lie in ]0, (W_plus - W_minus)/4[");
    }

    if (const nlohmann::json* output = maybe_section(j, "output")) {
        reject_unknown_keys(*output, "output.", {"dir"});
        if (output->contains("dir")) {
            if (!output->at("dir").is_string())
                throw ConfigError("output.dir: must be a string");
            config.out_dir = output->at("dir").get<std::string>();
        }
    }
    return config;
}

RunConfig RunConfig::from_file(const std::string& path, const std::string& subcommand) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j, subcommand);
}

nlohmann::json RunConfig::canonical_json() const {
    nlohmann::json density_json{{"kind", density.kind_name()},
                                {"W_minus", density.w_minus()},
                                {"W_plus", density.w_plus()},
                                {"rho_min", density.rho_min()}};
    if (density.rho_max().has_value())
        density_json["rho_max"] = *density.rho_max();
    else
        density_json["rho_max"] = "unbounded";

    nlohmann::json grid_json{{"step", grid_step}};
    if (grid_min.has_value()) {
        grid_json["min"] = *grid_min;
        grid_json["max"] = *grid_max;
    }

    nlohmann::json algo_json{{"h", bin_width},   {"epsilon", switch_width},
                             {"delta", delta},   {"D_rank", d_rank},
                             {"ell_max", ell_max}, {"X", window},
                             {"ks_threshold", ks_threshold}};
    if (energy.has_value()) algo_json["energy"] = *energy;

    return nlohmann::json{{"experiment", kind_name(kind)},
                          {"model", {{"d", dimension}, {"L", side}, {"ell", ell}}},
                          {"density", density_json},
                          {"grid", grid_json},
                          {"mc", {{"R", realizations}, {"seed", seed}}},
                          {"algorithm", algo_json}};
}

std::vector<double> RunConfig::resolve_grid() const {
    if (grid_min.has_value()) return make_grid(*grid_min, *grid_max, grid_step);
    if (kind == ExperimentKind::FreeIds)
        return make_grid(-2.0 * dimension, 2.0 * dimension, grid_step);
    const auto spectrum = deterministic_spectrum(density, dimension);
    return make_grid(spectrum.front().lo - 0.2, spectrum.front().hi + 0.2, grid_step);
}

std::string fnv1a64_hex(const void* data, std::size_t size) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read back output file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string contents = buffer.str();
    return fnv1a64_hex(contents.data(), contents.size());
}

namespace {

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output directory not writable: " + path.string());
    out << contents;
    if (!out) throw ConfigError("failed writing " + path.string());
}

} // namespace

std::vector<std::string> run_experiment(const RunConfig& config, int workers,
                                        std::ostream& log) {
    if (workers < 1) throw ConfigError("worker budget must be >= 1");
    const auto started = std::chrono::steady_clock::now();

    if (config.kind == ExperimentKind::Verify) {
        if (!verify_all(log)) throw CheckError("verification suite reported failures");
        return {};
    }

    const fs::path out_dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir.string());

    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& contents) {
        write_text_file(out_dir / name, contents);
        files.push_back(name);
        log << "wrote " << (out_dir / name).string() << "\n";
    };

    switch (config.kind) {
        case ExperimentKind::Ids: {
            const SpectralCurve ids =
                empirical_ids(config.dimension, config.side, config.density,
                              config.resolve_grid(), config.realizations, config.seed, workers);
            std::ostringstream csv;
            ids.write_csv(csv);
            emit("ids.csv", csv.str());
            break;
        }
        case ExperimentKind::Dos: {
            const SpectralCurve ids =
                empirical_ids(config.dimension, config.side, config.density,
                              config.resolve_grid(), config.realizations, config.seed, workers);
            const SpectralCurve dos = empirical_dos(ids, config.bin_width);
            const UpperBoundReport report = upper_bound_check(dos, config.density.rho_max());
            std::ostringstream ids_csv;
            ids.write_csv(ids_csv);
            emit("ids.csv", ids_csv.str());
            std::ostringstream dos_csv;
            dos.write_csv(dos_csv);
            emit("dos.csv", dos_csv.str());
            emit("wegner_report.json", report.to_json().dump(2) + "\n");
            break;
        }
        case ExperimentKind::FreeIds: {
            const std::vector<double> grid = config.resolve_grid();
            SpectralCurve finite;
            finite.energies = grid;
            finite.stderrs.assign(grid.size(), 0.0);
            for (double lambda : grid)
                finite.values.push_back(free_ids_finite(config.dimension, config.ell, lambda));
            finite.metadata = {{"kind", "free-ids-finite"},
                               {"d", std::to_string(config.dimension)},
                               {"ell", std::to_string(config.ell)}};
            const FreeIDSTable table = tabulate_free_ids(config.dimension, grid);
            SpectralCurve infinite;
            infinite.energies = grid;
            infinite.values = table.values;
            infinite.stderrs.assign(grid.size(), 0.0);
            infinite.metadata = {{"kind", "free-ids-infinite"},
                                 {"d", std::to_string(config.dimension)},
                                 {"error_bound", format_number(table.error_bound)}};
            std::ostringstream finite_csv;
            finite.write_csv(finite_csv);
            emit("free_ids_finite.csv", finite_csv.str());
            std::ostringstream infinite_csv;
            infinite.write_csv(infinite_csv);
            emit("free_ids_infinite.csv", infinite_csv.str());
            break;
        }
        case ExperimentKind::BoundCert: {
            const WegnerCertificate cert = lower_bound_constant(
                config.dimension, config.density.w_minus(), config.density.w_plus(),
                config.density.rho_min(), config.delta, config.ell_max, config.d_rank, workers);
            emit("certificate.json", cert.to_json().dump(2) + "\n");
            break;
        }
        case ExperimentKind::Spacing: {
            const double band_center =
                0.5 * (config.density.w_minus() + config.density.w_plus());
            const double energy = config.energy.value_or(band_center);
            const SpacingSample sample =
                collect_spacings(config.dimension, config.side, config.density, energy,
                                 config.window, config.realizations, config.seed, workers);
            const double intensity = intensity_estimate(sample);
            nlohmann::json report{{"E", energy},
                                  {"X", config.window},
                                  {"R", config.realizations},
                                  {"L", config.side},
                                  {"d", config.dimension},
                                  {"pooled_positions", sample.positions.size()},
                                  {"intensity", intensity}};
            if (intensity > 0.0 && sample.spacings.size() >= 2) {
                const PoissonTestResult test =
                    poisson_test(sample, intensity, config.ks_threshold);
                report["poisson"] = test.to_json();
            } else {
                report["poisson"] = {{"sufficient", false},
                                     {"note", "empty or near-empty sample"}};
            }
            std::ostringstream csv;
            sample.write_csv(csv);
            emit("spacings.csv", csv.str());
            emit("poisson_report.json", report.dump(2) + "\n");
            break;
        }
        case ExperimentKind::Verify:
            break; // handled above
    }

    // manifest last: lists every other file with its digest
    const nlohmann::json canonical = config.canonical_json();
    const std::string canonical_text = canonical.dump();
    nlohmann::json outputs = nlohmann::json::array();
    for (const std::string& name : files) {
        const fs::path path = out_dir / name;
        outputs.push_back({{"file", name},
                           {"digest", digest_file(path.string())},
                           {"bytes", fs::file_size(path)}});
    }
    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json manifest{
        {"config_digest", fnv1a64_hex(canonical_text.data(), canonical_text.size())},
        {"config", canonical},
        {"tool_version", kToolVersion},
        {"created_utc", utc_timestamp()},
        {"wall_seconds", wall_seconds},
        {"workers", workers},
        {"outputs", outputs}};
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    files.push_back("manifest.json");
    log << "wrote " << (out_dir / "manifest.json").string() << "\n";
    return files;
}

} // namespace anderson
