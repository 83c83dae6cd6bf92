#include "futsim/trace.hpp"

#include "futsim/hash.hpp"
#include "futsim/json_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace futsim {

const char* trace_ev_name(trace_ev e) {
    switch (e) {
    case trace_ev::executed: return "Executed";
    case trace_ev::popped: return "Popped";
    case trace_ev::stole: return "Stole";
    case trace_ev::failed_steal: return "FailedSteal";
    case trace_ev::idle: return "Idle";
    }
    return "?";
}

namespace {

trace_ev trace_ev_from_name(const std::string& s) {
    if (s == "Executed") return trace_ev::executed;
    if (s == "Popped") return trace_ev::popped;
    if (s == "Stole") return trace_ev::stole;
    if (s == "FailedSteal") return trace_ev::failed_steal;
    if (s == "Idle") return trace_ev::idle;
    throw std::runtime_error("unknown trace event: " + s);
}

nlohmann::json header_json(const trace& t) {
    return {{"dag_hash", hash_hex(t.dag_hash)},
            {"policy", t.policy},
            {"procs", t.procs},
            {"script_hash", hash_hex(t.script_hash)},
            {"victim_seed", t.victim_seed},
            {"victim_rng", t.victim_rng}};
}

nlohmann::json event_json(const trace_event& e) {
    nlohmann::json j = {{"step", e.step}, {"proc", e.proc}, {"ev", trace_ev_name(e.ev)}};
    if (e.node >= 0) j["node"] = e.node;
    if (e.victim >= 0) j["victim"] = e.victim;
    return j;
}

nlohmann::json summary_json(const trace& t) {
    nlohmann::json j = {{"total_steps", t.total_steps}, {"steal_count", t.steal_count}};
    if (t.misses) j["misses"] = *t.misses;
    return j;
}

std::string canonical_lines(const trace& t) {
    std::ostringstream os;
    os << header_json(t).dump() << "\n";
    for (const trace_event& e : t.events) os << event_json(e).dump() << "\n";
    os << summary_json(t).dump() << "\n";
    return os.str();
}

} // namespace

void save_trace(const trace& t, const std::string& path) {
    write_text_atomic(canonical_lines(t), path);
}

trace load_trace(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    trace t;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (!have_header) {
            t.dag_hash = std::stoull(j.at("dag_hash").get<std::string>(), nullptr, 16);
            t.policy = j.at("policy").get<std::string>();
            t.procs = j.at("procs").get<int>();
            t.script_hash = std::stoull(j.at("script_hash").get<std::string>(), nullptr, 16);
            t.victim_seed = j.at("victim_seed").get<uint64_t>();
            t.victim_rng = j.value("victim_rng", "splitmix64");
            have_header = true;
        } else if (j.contains("total_steps")) {
            t.total_steps = j.at("total_steps").get<int64_t>();
            t.steal_count = j.at("steal_count").get<int64_t>();
            if (j.contains("misses")) t.misses = j.at("misses").get<int64_t>();
        } else {
            trace_event e;
            e.step = j.at("step").get<int64_t>();
            e.proc = j.at("proc").get<int>();
            e.ev = trace_ev_from_name(j.at("ev").get<std::string>());
            e.node = j.value("node", node_id{-1});
            e.victim = j.value("victim", -1);
            t.events.push_back(e);
        }
    }
    if (!have_header) throw std::runtime_error("trace has no header line: " + path);
    return t;
}

uint64_t trace_hash(const trace& t) { return fnv1a64(canonical_lines(t)); }

} // namespace futsim
