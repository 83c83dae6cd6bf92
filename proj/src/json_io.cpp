#include "futsim/json_io.hpp"

#include "futsim/hash.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace futsim {

nlohmann::json dag_to_json(const dag& d) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const node& n : d.nodes) {
        nlohmann::json nj;
        nj["id"] = n.id;
        if (n.block > 0)
            nj["block"] = n.block;
        else
            nj["block"] = nullptr;
        nj["is_real_touch"] = n.is_real_touch;
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = nlohmann::json::array();
    for (const edge& e : d.edges)
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", edge_kind_name(e.kind)}});
    j["root"] = d.root;
    j["final"] = d.final;
    j["super_final_mode"] = d.super_final_mode;
    nlohmann::json lm = nlohmann::json::object();
    for (const auto& [name, id] : std::map<std::string, node_id>(d.landmarks.begin(), d.landmarks.end()))
        lm[name] = id;
    j["landmarks"] = std::move(lm);
    return j;
}

dag dag_from_json(const nlohmann::json& j) {
    dag d;
    d.root = j.at("root").get<node_id>();
    d.final = j.at("final").get<node_id>();
    d.super_final_mode = j.value("super_final_mode", false);

    std::set<node_id> touched;
    for (const auto& ej : j.at("edges")) {
        edge e;
        e.from = ej.at("from").get<node_id>();
        e.to = ej.at("to").get<node_id>();
        e.kind = edge_kind_from_name(ej.at("kind").get<std::string>());
        if (e.kind == edge_kind::touch) touched.insert(e.to);
        d.edges.push_back(e);
    }

    for (const auto& nj : j.at("nodes")) {
        node n;
        n.id = nj.at("id").get<node_id>();
        if (nj.contains("block") && !nj.at("block").is_null())
            n.block = nj.at("block").get<int64_t>();
        if (nj.contains("is_real_touch"))
            n.is_real_touch = nj.at("is_real_touch").get<bool>();
        else
            n.is_real_touch = touched.count(n.id) && !(n.id == d.final && d.super_final_mode);
        d.nodes.push_back(n);
    }

    if (j.contains("landmarks"))
        for (auto it = j.at("landmarks").begin(); it != j.at("landmarks").end(); ++it)
            d.landmarks[it.key()] = it.value().get<node_id>();
    return d;
}

uint64_t dag_hash(const dag& d) {
    // Canonical text form: sorted nodes and edges, fixed field order.
    std::vector<node> ns = d.nodes;
    std::sort(ns.begin(), ns.end(), [](const node& a, const node& b) { return a.id < b.id; });
    std::vector<edge> es = d.edges;
    std::sort(es.begin(), es.end(), [](const edge& a, const edge& b) {
        if (a.from != b.from) return a.from < b.from;
        if (a.to != b.to) return a.to < b.to;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    std::ostringstream os;
    os << "dag:v1;root=" << d.root << ";final=" << d.final
       << ";super_final=" << (d.super_final_mode ? 1 : 0) << ";";
    for (const node& n : ns)
        os << "n(" << n.id << "," << n.block << "," << (n.is_real_touch ? 1 : 0) << ");";
    for (const edge& e : es)
        os << "e(" << e.from << "," << e.to << "," << edge_kind_name(e.kind) << ");";
    return fnv1a64(os.str());
}

void write_text_atomic(const std::string& text, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f << text;
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

void write_json_atomic(const nlohmann::json& j, const std::string& path, int indent) {
    write_text_atomic(j.dump(indent) + "\n", path);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    f >> j;
    return j;
}

void save_dag(const dag& d, const std::string& path) {
    write_json_atomic(dag_to_json(d), path);
}

dag load_dag(const std::string& path) {
    return dag_from_json(read_json_file(path));
}

} // namespace futsim
