#include "sigmak/fieldio.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace sigmak {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_values(const std::string& path, const std::vector<double>& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (double x : v) out << format_double(x) << "\n";
}

std::vector<double> read_values(const std::string& path, size_t expect) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<double> v;
    v.reserve(expect);
    double x;
    while (in >> x) v.push_back(x);
    if (v.size() != expect)
        throw std::runtime_error(path + ": expected " + std::to_string(expect) + " values, got " +
                                 std::to_string(v.size()));
    return v;
}

json load_header(const std::string& base, const char* kind) {
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("cannot read " + base + ".json");
    json h = json::parse(in);
    if (h.value("schema_version", 0) != 1)
        throw std::runtime_error(base + ": unsupported schema_version");
    if (h.value("kind", "") != kind)
        throw std::runtime_error(base + ": expected kind '" + kind + "'");
    return h;
}

} // namespace

void save_field(const GridField& f, const std::string& base) {
    const BoxGrid& g = f.grid();
    json h = {{"schema_version", 1},
              {"kind", "euclidean"},
              {"n", g.n},
              {"shape", g.shape},
              {"lo", g.lo},
              {"h", g.h},
              {"values_file", base + ".csv"}};
    std::ofstream out(base + ".json");
    if (!out) throw std::runtime_error("cannot write " + base + ".json");
    out << h.dump(2) << "\n";
    write_values(base + ".csv", f.values());
}

GridField load_field(const std::string& base) {
    json h = load_header(base, "euclidean");
    BoxGrid g(h.at("n").get<int>(), h.at("shape").get<std::vector<int>>(),
              h.at("lo").get<std::vector<double>>(), h.at("h").get<double>());
    return GridField(g, read_values(base + ".csv", (size_t)g.size()));
}

void save_axisym(const SphereAxisymField& f, const std::string& base) {
    json h = {{"schema_version", 1},
              {"kind", "sphere_axisym"},
              {"n", f.n()},
              {"N", f.N()},
              {"values_file", base + ".csv"}};
    std::ofstream out(base + ".json");
    if (!out) throw std::runtime_error("cannot write " + base + ".json");
    out << h.dump(2) << "\n";
    write_values(base + ".csv", f.values());
}

SphereAxisymField load_axisym(const std::string& base) {
    json h = load_header(base, "sphere_axisym");
    int n = h.at("n").get<int>(), N = h.at("N").get<int>();
    return SphereAxisymField(n, N, read_values(base + ".csv", (size_t)N + 1));
}

} // namespace sigmak
