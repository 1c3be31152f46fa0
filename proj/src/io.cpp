#include "colsched/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace colsched {

namespace {

const Json& require_key(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("missing key '") + key + "'");
    return doc.at(key);
}

template <typename T>
T read_as(const Json& doc, const char* key) {
    try {
        return require_key(doc, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::vector<int> to_one_based(const std::vector<int>& ids) {
    std::vector<int> out;
    for (int id : ids) out.push_back(id + 1);
    return out;
}

std::vector<int> to_zero_based(const std::vector<int>& ids) {
    std::vector<int> out;
    for (int id : ids) out.push_back(id - 1);
    return out;
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("not a valid document: ") + e.what());
    }
}

}  // namespace

Json config_to_json(const NetworkConfig& config) {
    Json topology;
    topology["num_adaptive"] = config.topology.num_adaptive;
    topology["num_channels"] = config.topology.num_channels;
    Json sets = Json::array();
    for (const auto& set : config.topology.access_sets) sets.push_back(to_one_based(set));
    topology["access_sets"] = sets;

    Json arrivals;
    if (config.adaptive_arrival_kind.kind == ArrivalKind::Bernoulli) {
        arrivals["kind"] = "bernoulli";
    } else {
        arrivals["kind"] = "binomial";
        arrivals["trials"] = config.adaptive_arrival_kind.trials;
    }

    Json doc;
    doc["topology"] = topology;
    doc["adaptive_rates"] = config.adaptive_rates;
    doc["uncoop_rates"] = config.uncoop_rates;
    doc["adaptive_arrival_kind"] = arrivals;
    doc["horizon"] = config.horizon;
    doc["seed"] = config.seed;
    return doc;
}

NetworkConfig config_from_json(const Json& doc, bool require_uncoop_rates) {
    NetworkConfig config;
    const Json& topology = require_key(doc, "topology");
    config.topology.num_adaptive = read_as<int>(topology, "num_adaptive");
    config.topology.num_channels = read_as<int>(topology, "num_channels");
    for (const auto& set : read_as<std::vector<std::vector<int>>>(topology, "access_sets"))
        config.topology.access_sets.push_back(to_zero_based(set));

    config.adaptive_rates = read_as<std::vector<double>>(doc, "adaptive_rates");
    if (require_uncoop_rates || doc.contains("uncoop_rates"))
        config.uncoop_rates = read_as<std::vector<double>>(doc, "uncoop_rates");
    else
        config.uncoop_rates.assign(static_cast<std::size_t>(std::max(0, config.topology.num_channels)), 0.0);

    if (doc.contains("adaptive_arrival_kind")) {
        const Json& arrivals = doc.at("adaptive_arrival_kind");
        const auto kind = read_as<std::string>(arrivals, "kind");
        if (kind == "bernoulli") {
            config.adaptive_arrival_kind = {ArrivalKind::Bernoulli, 1};
        } else if (kind == "binomial") {
            config.adaptive_arrival_kind = {ArrivalKind::Binomial, read_as<int>(arrivals, "trials")};
        } else {
            throw FormatError("unknown adaptive_arrival_kind '" + kind + "'");
        }
    }
    if (doc.contains("horizon")) config.horizon = read_as<std::int64_t>(doc, "horizon");
    if (doc.contains("seed")) config.seed = read_as<std::uint64_t>(doc, "seed");
    return config;
}

std::string config_to_text(const NetworkConfig& config) { return config_to_json(config).dump(2) + "\n"; }

NetworkConfig parse_config(std::string_view text) { return config_from_json(parse_json(text)); }

Json problem_to_json(const AssignmentProblem& problem) {
    Json base = config_to_json(problem.base);
    base.erase("uncoop_rates");
    Json users = Json::array();
    for (const UncoopUser& u : problem.users) {
        Json entry;
        entry["rate"] = u.rate;
        entry["candidates"] = to_one_based(u.candidates);
        users.push_back(entry);
    }
    Json doc;
    doc["base"] = base;
    doc["uncoop_users"] = users;
    return doc;
}

Json set_cover_to_json(const SetCoverInstance& instance) {
    Json subsets = Json::array();
    for (const auto& s : instance.subsets) subsets.push_back(to_one_based(s));
    Json body;
    body["num_elements"] = instance.num_elements;
    body["subsets"] = subsets;
    body["k"] = instance.budget;
    Json doc;
    doc["set_cover"] = body;
    return doc;
}

SetCoverInstance set_cover_from_json(const Json& doc) {
    const Json& body = require_key(doc, "set_cover");
    SetCoverInstance instance;
    instance.num_elements = read_as<int>(body, "num_elements");
    for (const auto& s : read_as<std::vector<std::vector<int>>>(body, "subsets"))
        instance.subsets.push_back(to_zero_based(s));
    instance.budget = read_as<int>(body, "k");
    return instance;
}

AssignmentProblem parse_problem(std::string_view text) {
    const Json doc = parse_json(text);
    if (doc.is_object() && doc.contains("set_cover")) return reduce_set_cover(set_cover_from_json(doc));

    AssignmentProblem problem;
    problem.base = config_from_json(require_key(doc, "base"), false);
    for (const Json& entry : read_as<std::vector<Json>>(doc, "uncoop_users")) {
        UncoopUser user;
        user.rate = read_as<double>(entry, "rate");
        user.candidates = to_zero_based(read_as<std::vector<int>>(entry, "candidates"));
        problem.users.push_back(std::move(user));
    }
    return problem;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream contents;
    contents << in.rdbuf();
    return contents.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace colsched
