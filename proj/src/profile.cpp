#include "memjoin/profile.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace memjoin {

using nlohmann::json;

std::string profile_to_json(const MachineProfile& p) {
    json j{
        {"label", p.label},
        {"cache_line_bytes", p.cache_line_bytes},
        {"weights",
         {{"sr", p.weights.sr}, {"rr", p.weights.rr}, {"sw", p.weights.sw}, {"rw", p.weights.rw}}},
        {"bootstrap",
         {{"worker_count", p.worker_count},
          {"array_bytes", p.array_bytes},
          {"repetitions", p.repetitions},
          {"seed", p.seed},
          {"placement_policy", p.placement_policy},
          {"raw_ns_per_line",
           {{"sr", p.raw_ns_per_line[0]},
            {"rr", p.raw_ns_per_line[1]},
            {"sw", p.raw_ns_per_line[2]},
            {"rw", p.raw_ns_per_line[3]}}}}},
    };
    return j.dump(2) + "\n";
}

MachineProfile profile_from_json(const std::string& text) {
    const json j = json::parse(text);
    MachineProfile p;
    p.label = j.value("label", "");
    p.cache_line_bytes = j.at("cache_line_bytes").get<std::uint64_t>();
    const json& w = j.at("weights");
    p.weights = WeightVector{w.at("sr").get<double>(), w.at("rr").get<double>(),
                             w.at("sw").get<double>(), w.at("rw").get<double>()};
    if (j.contains("bootstrap")) {
        const json& b = j["bootstrap"];
        p.worker_count = b.value("worker_count", 0u);
        p.array_bytes = b.value("array_bytes", std::uint64_t{0});
        p.repetitions = b.value("repetitions", 0);
        p.seed = b.value("seed", std::uint64_t{0});
        p.placement_policy = b.value("placement_policy", "first-touch");
        if (b.contains("raw_ns_per_line")) {
            const json& r = b["raw_ns_per_line"];
            p.raw_ns_per_line = {r.value("sr", 0.0), r.value("rr", 0.0), r.value("sw", 0.0),
                                 r.value("rw", 0.0)};
        }
    }
    if (!p.valid()) throw std::invalid_argument("profile fails validation");
    return p;
}

void save_profile(const MachineProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << profile_to_json(p);
}

MachineProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return profile_from_json(text);
}

}  // namespace memjoin
