#include "vortex/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vortex {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

json vec3s(const std::vector<V3<double>>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back({x[0], x[1], x[2]});
    return a;
}

json point_to_json(const AugmentedPoint& x) {
    return {{"u", x.u}, {"lambda", x.lambda}, {"alpha", x.alpha}, {"omega", x.omega}};
}

AugmentedPoint point_from_json(const json& j) {
    AugmentedPoint x;
    x.u = j.at("u").get<Vec<double>>();
    x.lambda = j.at("lambda").get<Vec<double>>();
    x.alpha = j.at("alpha").get<double>();
    x.omega = j.at("omega").get<double>();
    return x;
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(std::size_t(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::number_float: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
            std::string s = buf;
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            out += s;
            break;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            bool flat = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& x : j) {
                if (!first) out += flat || indent < 0 ? ", " : ",";
                if (!flat) newline(depth + 1);
                dump_into(out, x, indent, depth + 1);
                first = false;
            }
            if (!flat) newline(depth);
            out += ']';
            break;
        }
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                newline(depth + 1);
                out += json(it.key()).dump();
                out += ": ";
                dump_into(out, it.value(), indent, depth + 1);
                first = false;
            }
            newline(depth);
            out += '}';
            break;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string dump(const json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

json to_json(const Interval& x) { return {{"lo", to_hex(x.lo)}, {"hi", to_hex(x.hi)}}; }

Interval interval_from_json(const json& j) {
    return guarded("interval", [&] {
        if (j.is_number()) return Interval(j.get<double>());
        return Interval(from_hex(j.at("lo").get<std::string>()), from_hex(j.at("hi").get<std::string>()));
    });
}

json config_to_json(const RingSystem& r, std::optional<double> omega) {
    json j = {{"m", r.m}, {"n", r.n}, {"p", r.p}, {"generators", vec3s(r.u)}};
    if (omega) j["omega"] = *omega;
    return j;
}

ConfigFile config_from_json(const json& j) {
    return guarded("configuration", [&] {
        ConfigFile c;
        if (j.contains("vortices")) {
            for (const auto& g : j.at("vortices")) {
                if (!g.is_array() || g.size() != 3) throw IoError("configuration: vortex needs 3 coordinates");
                c.system.u.push_back({g[0].get<double>(), g[1].get<double>(), g[2].get<double>()});
            }
            c.system.m = 1;
            c.system.n = int(c.system.u.size());
            c.system.p = 0;
            if (j.contains("omega")) c.omega = j.at("omega").get<double>();
            validate_rings(c.system);
            return c;
        }
        c.system.m = j.at("m").get<int>();
        c.system.n = j.at("n").get<int>();
        c.system.p = j.at("p").get<int>();
        for (const auto& g : j.at("generators")) {
            if (!g.is_array() || g.size() != 3) throw IoError("configuration: generator needs 3 coordinates");
            c.system.u.push_back({g[0].get<double>(), g[1].get<double>(), g[2].get<double>()});
        }
        if (j.contains("omega")) c.omega = j.at("omega").get<double>();
        if (j.contains("provenance")) c.provenance = j.at("provenance").get<std::string>();
        validate_rings(c.system);
        return c;
    });
}

json fixture_to_json(const FixtureEntry& e) {
    json j = config_to_json(e.system(), e.omega);
    j["name"] = e.name;
    j["N"] = e.N;
    j["provenance"] = e.provenance;
    j["tolerance"] = e.tolerance;
    json reps = json::array();
    for (const auto& r : e.reps) reps.push_back(config_to_json(r.system()));
    j["symmetries"] = reps;
    return j;
}

json to_json(const BranchCertificate& c) {
    json b = {{"Y", c.bounds.Y},         {"Yhat", c.bounds.Yhat}, {"Z", c.bounds.Z},
              {"rstar", c.bounds.rstar}, {"r0", nullptr},         {"norm", c.bounds.norm_id}};
    if (c.bounds.r0) b["r0"] = *c.bounds.r0;
    json j = {{"m", c.m},
              {"n", c.n},
              {"p", c.p},
              {"omega", {c.x0.omega, c.x1.omega}},
              {"anchor", c.anchor},
              {"x0", point_to_json(c.x0)},
              {"x1", point_to_json(c.x1)},
              {"bounds", b},
              {"r0", c.r0},
              {"status", c.status}};
    if (!c.build_id.empty()) j["build_id"] = c.build_id;
    return j;
}

BranchCertificate certificate_from_json(const json& j) {
    return guarded("certificate", [&] {
        BranchCertificate c;
        c.m = j.at("m").get<int>();
        c.n = j.at("n").get<int>();
        c.p = j.at("p").get<int>();
        c.anchor = j.at("anchor").get<Vec<double>>();
        c.x0 = point_from_json(j.at("x0"));
        c.x1 = point_from_json(j.at("x1"));
        const json& b = j.at("bounds");
        c.bounds.Y = b.at("Y").get<double>();
        c.bounds.Yhat = b.at("Yhat").get<double>();
        c.bounds.Z = b.at("Z").get<double>();
        c.bounds.rstar = b.at("rstar").get<double>();
        if (b.contains("r0") && !b.at("r0").is_null()) c.bounds.r0 = b.at("r0").get<double>();
        c.bounds.norm_id = b.value("norm", std::string("sup"));
        c.r0 = j.at("r0").get<double>();
        c.status = j.at("status").get<std::string>();
        c.build_id = j.value("build_id", std::string());
        int dim = augmented_dim(c.shape());
        if (int(pack(c.x0).size()) != dim || int(pack(c.x1).size()) != dim || int(c.anchor.size()) != 3 * c.n)
            throw IoError("certificate: vector lengths do not match (m, n, p)");
        return c;
    });
}

json chain_to_json(const std::vector<BranchCertificate>& chain) {
    json a = json::array();
    for (const auto& c : chain) a.push_back(to_json(c));
    return a;
}

std::vector<BranchCertificate> chain_from_json(const json& j) {
    if (j.is_object()) return {certificate_from_json(j)};
    if (!j.is_array()) throw IoError("chain: expected an array of certificates");
    std::vector<BranchCertificate> out;
    for (const auto& c : j) out.push_back(certificate_from_json(c));
    return out;
}

json to_json(const StabilityVerdict& v) {
    auto pair = [](const Interval& x) { return json::array({x.lo, x.hi}); };
    json blocks = json::array();
    for (const auto& b : v.blocks) {
        json eigs = json::array();
        for (const auto& e : b.eigs) eigs.push_back(pair(e));
        json cl = json::array();
        for (const auto& c : b.clusters) cl.push_back({{"center", c.center}, {"halfwidth", c.halfwidth}, {"count", c.count}});
        json jb = {{"l", b.l},       {"kind", to_string(b.kind)}, {"size", b.size},         {"eigs", eigs},
                   {"clusters", cl}, {"kernel", b.kernel},        {"positive", b.positive}, {"complete", b.complete}};
        if (b.negative_witness) jb["negative_witness"] = pair(*b.negative_witness);
        if (!b.note.empty()) jb["note"] = b.note;
        blocks.push_back(jb);
    }
    json j = {{"omega", pair(v.omega)},
              {"mu", pair(v.mu)},
              {"zero_momentum", v.zero_momentum},
              {"blocks", blocks},
              {"verdict", to_string(v.verdict)},
              {"whole_segment", v.whole_segment}};
    if (v.zero_momentum) j["kernel"] = {{"block", v.kernel_block}, {"count", v.kernel_count}};
    if (v.witness_block >= 0) j["witness_block"] = v.witness_block;
    if (!v.reason.empty()) j["reason"] = v.reason;
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return guarded("parse", [&] { return json::parse(ss.str()); });
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace vortex
