#include "futsim/script.hpp"

#include "futsim/hash.hpp"
#include "futsim/json_io.hpp"

#include <sstream>

namespace futsim {

namespace {

const char* op_name(op o) {
    switch (o) {
    case op::execute: return "execute";
    case op::sleep: return "sleep";
    case op::sleep_until: return "sleep_until";
    case op::sleep_forever: return "sleep_forever";
    case op::steal_from: return "steal_from";
    case op::pop_own: return "pop_own";
    case op::wake: return "wake";
    }
    return "?";
}

op op_from_name(const std::string& s) {
    if (s == "execute") return op::execute;
    if (s == "sleep") return op::sleep;
    if (s == "sleep_until") return op::sleep_until;
    if (s == "sleep_forever") return op::sleep_forever;
    if (s == "steal_from") return op::steal_from;
    if (s == "pop_own") return op::pop_own;
    if (s == "wake") return op::wake;
    throw script_error("unknown directive op: " + s);
}

} // namespace

nlohmann::json script_to_json(const script& s) {
    nlohmann::json j;
    j["processors"] = nlohmann::json::array();
    for (const proc_script& p : s.processors) {
        nlohmann::json pj;
        pj["id"] = p.id;
        pj["directives"] = nlohmann::json::array();
        for (const directive& d : p.directives) {
            nlohmann::json dj;
            dj["op"] = op_name(d.o);
            switch (d.o) {
            case op::execute: dj["times"] = d.times; break;
            case op::sleep: dj["steps"] = d.steps; break;
            case op::sleep_until: dj["node"] = d.node; break;
            case op::steal_from: dj["victim"] = d.victim; break;
            default: break;
            }
            pj["directives"].push_back(std::move(dj));
        }
        j["processors"].push_back(std::move(pj));
    }
    j["default"] = {{"random_victim_seed", s.random_victim_seed}};
    return j;
}

script script_from_json(const nlohmann::json& j) {
    script s;
    for (const auto& pj : j.at("processors")) {
        proc_script p;
        p.id = pj.at("id").get<int>();
        for (const auto& dj : pj.at("directives")) {
            directive d;
            d.o = op_from_name(dj.at("op").get<std::string>());
            switch (d.o) {
            case op::execute: d.times = dj.value("times", int64_t{1}); break;
            case op::sleep: d.steps = dj.at("steps").get<int64_t>(); break;
            case op::sleep_until: d.node = dj.at("node").get<node_id>(); break;
            case op::steal_from: d.victim = dj.at("victim").get<int>(); break;
            default: break;
            }
            p.directives.push_back(d);
        }
        s.processors.push_back(std::move(p));
    }
    if (j.contains("default"))
        s.random_victim_seed = j.at("default").value("random_victim_seed", uint64_t{0});
    return s;
}

void save_script(const script& s, const std::string& path) {
    write_json_atomic(script_to_json(s), path);
}

script load_script(const std::string& path) {
    return script_from_json(read_json_file(path));
}

uint64_t script_hash(const script& s) {
    std::ostringstream os;
    os << "script:v1;seed=" << s.random_victim_seed << ";";
    for (const proc_script& p : s.processors) {
        os << "p" << p.id << "[";
        for (const directive& d : p.directives)
            os << op_name(d.o) << "(" << d.times << "," << d.steps << "," << d.node
               << "," << d.victim << ");";
        os << "]";
    }
    return fnv1a64(os.str());
}

uint64_t script_hash_none() { return fnv1a64("script:none"); }

directive d_execute(int64_t times) {
    directive d;
    d.o = op::execute;
    d.times = times;
    return d;
}

directive d_sleep(int64_t steps) {
    directive d;
    d.o = op::sleep;
    d.steps = steps;
    return d;
}

directive d_sleep_until(node_id n) {
    directive d;
    d.o = op::sleep_until;
    d.node = n;
    return d;
}

directive d_sleep_forever() {
    directive d;
    d.o = op::sleep_forever;
    return d;
}

directive d_steal_from(int victim) {
    directive d;
    d.o = op::steal_from;
    d.victim = victim;
    return d;
}

directive d_pop_own() {
    directive d;
    d.o = op::pop_own;
    return d;
}

} // namespace futsim
