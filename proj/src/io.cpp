#include "fsl/io.hpp"

#include <fstream>
#include <sstream>

namespace fsl {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

MetricMeasureSpace space_from_config(const Json& cfg) {
    const std::string type = cfg.at("type");
    if (type == "grid") {
        const int dim = cfg.at("dim");
        const int side = cfg.at("side");
        const double spacing = cfg.at("spacing");
        const std::string boundary = cfg.value("boundary", "periodic");
        return build_grid_space(dim, side, spacing,
                                boundary == "periodic" ? GridBoundary::Periodic
                                                       : GridBoundary::Dirichlet);
    }
    if (type == "graph") {
        const int n = cfg.at("n");
        std::vector<Edge> edges;
        for (const auto& e : cfg.at("edges"))
            edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        Vec measure = cfg.at("measure").get<Vec>();
        return build_graph_space(n, edges, std::move(measure));
    }
    throw std::invalid_argument("space config: unknown type " + type);
}

Weight weight_from_config(const MetricMeasureSpace& s, const Json& cfg) {
    const std::string type = cfg.at("type");
    if (type == "constant") return constant_weight(s, cfg.value("value", 1.0));
    if (type == "power")
        return power_weight(s, cfg.at("center").get<int>(), cfg.at("exponent").get<double>());
    if (type == "explicit") {
        Vec values = cfg.at("values").get<Vec>();
        if (values.size() != s.size())
            throw std::invalid_argument("weight config: values size mismatch");
        for (double v : values)
            if (!(v > 0.0)) throw std::invalid_argument("weight config: values must be positive");
        return {std::move(values), "explicit"};
    }
    throw std::invalid_argument("weight config: unknown type " + type);
}

SelfAdjointOperator operator_from_config(const MetricMeasureSpace& s, const Json& cfg) {
    const std::string kind = cfg.value("kind", "grid-laplacian");
    if (kind != "grid-laplacian" && kind != "graph-laplacian")
        throw std::invalid_argument("operator config: unknown kind " + kind);
    const std::string norm = cfg.value("normalization", "unit-speed");
    return build_laplacian(s, norm == "unit-speed" ? LaplacianNormalization::UnitSpeed
                                                   : LaplacianNormalization::None);
}

SpectralProfile profile_from_config(const Json& cfg) {
    const std::string type = cfg.at("type");
    if (type == "partition") return make_partition_of_unity(cfg.value("shape", 1.0)).psi;
    if (type == "heat") return heat_profile(cfg.value("m", 1));
    if (type == "sm") return sm_profile(cfg.value("m", 1));
    if (type == "compact-phi") return make_compact_phi(cfg.value("half_width", 0.25));
    throw std::invalid_argument("profile config: unknown type " + type);
}

MultiplierProfile symbol_from_config(const Json& cfg) {
    const std::string type = cfg.at("type");
    if (type == "constant") return constant_symbol(cfg.value("value", 1.0));
    if (type == "exp") return exp_symbol(cfg.value("a", 1.0));
    if (type == "table")
        return table_symbol(cfg.at("u").get<std::vector<double>>(),
                            cfg.at("m").get<std::vector<double>>());
    throw std::invalid_argument("symbol config: unknown type " + type);
}

Json cube_tree_to_json(const DyadicCubeTree& tree) {
    Json levels = Json::array();
    for (const auto& level : tree.levels) {
        Json cubes = Json::array();
        for (const auto& q : level.cubes)
            cubes.push_back({{"id", q.id},
                             {"center", q.center},
                             {"parent", q.parent},
                             {"members", q.members}});
        levels.push_back({{"nu", level.nu}, {"scale", level.scale}, {"cubes", cubes}});
    }
    return {{"c0", tree.c0}, {"kappa0", tree.kappa0}, {"levels", levels}};
}

Json report_to_json(const EquivalenceReport& rep) {
    Json j;
    j["check"] = rep.check;
    j["key"] = rep.key;
    j["params"] = rep.params;
    j["samples"] = rep.samples;
    j["seed"] = rep.seed;
    j["ratios"] = {{"min", rep.ratio_min}, {"max", rep.ratio_max}, {"median", rep.ratio_median}};
    j["extra"] = rep.extra;
    j["gating"] = rep.gating;
    j["pass"] = rep.pass;
    return j;
}

std::string report_to_csv(const Json& report_file) {
    std::ostringstream os;
    os << "check,key,param,value,stat,stat_value\n";
    if (!report_file.contains("reports")) return os.str();
    auto num = [](double v) {
        std::ostringstream o;
        o.precision(17);
        o << v;
        return o.str();
    };
    for (const auto& rep : report_file.at("reports")) {
        const std::string check = rep.at("check");
        const std::string key = rep.at("key");
        for (const auto& [pname, pval] : rep.at("params").items())
            for (const std::string stat : {"min", "max", "median"})
                os << check << "," << key << "," << pname << "," << num(pval.get<double>()) << ","
                   << stat << "," << num(rep.at("ratios").at(stat).get<double>()) << "\n";
        if (rep.at("params").empty())
            for (const std::string stat : {"min", "max", "median"})
                os << check << "," << key << ",,," << stat << ","
                   << num(rep.at("ratios").at(stat).get<double>()) << "\n";
    }
    return os.str();
}

Vec read_csv_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Vec v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        v.push_back(std::stod(line));
    }
    return v;
}

void write_csv_vector(const std::string& path, const Vec& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (double x : v) out << x << "\n";
}

BaselineStore BaselineStore::load(const std::string& path) {
    BaselineStore store;
    std::ifstream in(path);
    if (!in) return store; // fresh store
    Json j;
    in >> j;
    for (const auto& [key, e] : j.at("entries").items()) {
        Entry entry;
        entry.lo = e.at("lo");
        entry.hi = e.at("hi");
        entry.median = e.value("median", 0.0);
        entry.date = e.value("date", "");
        entry.config_hash = e.value("config_hash", "");
        store.entries_[key] = entry;
    }
    return store;
}

void BaselineStore::save(const std::string& path) const {
    Json entries = Json::object();
    for (const auto& [key, e] : entries_)
        entries[key] = {{"lo", e.lo},
                        {"hi", e.hi},
                        {"median", e.median},
                        {"date", e.date},
                        {"config_hash", e.config_hash}};
    write_json_file(path, Json{{"entries", entries}});
}

std::optional<BaselineStore::Entry> BaselineStore::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool BaselineStore::record(const std::string& key, const Entry& e, bool rebaseline) {
    if (entries_.count(key) && !rebaseline) return false;
    entries_[key] = e;
    return true;
}

bool BaselineStore::within(const std::string& key, double lo, double hi, double drift) const {
    const auto e = find(key);
    if (!e) return false;
    return lo >= e->lo / drift && hi <= e->hi * drift;
}

std::string config_hash(const Json& j) {
    const std::string dump = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (char c : dump) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace fsl
