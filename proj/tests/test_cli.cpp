#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vortex/cli.hpp"
#include "vortex/io.hpp"

using namespace vortex;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "vortex_cert_tests";
    fs::create_directories(d);
    return d / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("interval json round trip") {
    Interval x(0.1, 0.30000000000000004);
    json j = to_json(x);
    CHECK(j.at("lo").is_string());
    Interval y = interval_from_json(j);
    CHECK(y.lo == x.lo);
    CHECK(y.hi == x.hi);
    CHECK(interval_from_json(json(0.5)) == Interval(0.5));
    CHECK_THROWS_AS(interval_from_json(json::object()), IoError);
}

TEST_CASE("config json") {
    RingSystem r{3, 1, 2, {{0.6, 0.0, 0.8}}};
    json j = config_to_json(r, 0.25);
    ConfigFile c = config_from_json(j);
    CHECK(c.system.m == 3);
    CHECK(c.system.p == 2);
    CHECK(c.system.u[0][2] == 0.8);
    REQUIRE(c.omega.has_value());
    CHECK(*c.omega == 0.25);
    CHECK_THROWS(config_from_json(json{{"m", 3}, {"n", 2}, {"p", 0}, {"generators", {{0.6, 0.0, 0.8}}}}));
    ConfigFile v = config_from_json(json{{"vortices", {{0, 0, 1}, {0, 0, -1}}}});
    CHECK(v.system.m == 1);
    CHECK(v.system.n == 2);
    CHECK_THROWS_AS(config_from_json(json{{"vortices", {{0, 0}}}}), IoError);
}

TEST_CASE("dump keeps full precision") {
    json j = {{"x", 0.1}, {"y", 1.0}, {"v", {1.5, 2.0}}};
    std::string s = dump(j);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("1.0") != std::string::npos);
    CHECK(s.find("[1.5, 2.0]") != std::string::npos);
    CHECK(json::parse(s).at("x").get<double>() == 0.1);
}

TEST_CASE("certificate round trip") {
    fs::path out = scratch("tet.json");
    Run r = run({"certify", "--fixture", "tetrahedron", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("validated") != std::string::npos);
    json j = read_json_file(out.string());
    BranchCertificate c = certificate_from_json(j);
    CHECK(c.m == 3);
    CHECK(c.status == "validated");
    CHECK(c.r0 > 0.0);
    CHECK(dump(to_json(c)) == dump(j));
    json m = read_json_file(out.string() + ".manifest.json");
    CHECK(m.at("command").get<std::string>().rfind("certify --fixture tetrahedron", 0) == 0);
    CHECK(m.contains("build_id"));
    CHECK(m.contains("wall_clock_s"));

    json bad = j;
    bad["anchor"] = {1.0};
    CHECK_THROWS_AS(certificate_from_json(bad), IoError);
}

TEST_CASE("certify from a config file and failure codes") {
    fs::path cfg = scratch("pent.json");
    double z = 0.2;
    std::ofstream(cfg) << dump(json{{"m", 5}, {"n", 1}, {"p", 2}, {"generators", {{std::sqrt(1 - z * z), 0.0, z}}},
                                    {"omega", 3 * z / (1 - z * z)}});
    Run ok = run({"certify", "--config", cfg.string(), "--json"});
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out).at("status") == "validated");

    Run miss = run({"certify"});
    CHECK(miss.code == 1);
    Run both = run({"certify", "--fixture", "tetrahedron", "--config", cfg.string()});
    CHECK(both.code == 1);
    Run unknown = run({"certify", "--fixture", "nope"});
    CHECK(unknown.code == 1);
    // three vortices next to a pole with omega far below the family's range
    fs::path near = scratch("near_pole.json");
    double zp = 0.9999;
    std::ofstream(near) << dump(json{{"m", 3}, {"n", 1}, {"p", 1}, {"generators", {{std::sqrt(1 - zp * zp), 0.0, zp}}},
                                     {"omega", -50.0}});
    Run far = run({"certify", "--config", near.string()});
    CHECK(far.code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("continue, stability and diagram") {
    fs::path chain = scratch("chain.json");
    fs::path cfg = scratch("ring4.json");
    double z = 0.8;
    std::ofstream(cfg) << dump(json{{"m", 4}, {"n", 1}, {"p", 0}, {"generators", {{std::sqrt(1 - z * z), 0.0, z}}}});
    Run c = run({"continue", "--config", cfg.string(), "--omega-from", "3.3", "--omega-to", "3.4", "--step", "0.05",
                 "--out", chain.string(), "--workers", "2"});
    REQUIRE(c.code == 0);
    auto certs = chain_from_json(read_json_file(chain.string()));
    REQUIRE(certs.size() >= 2);

    fs::path verdicts = scratch("verdicts.json");
    Run s = run({"stability", chain.string(), "--out", verdicts.string()});
    CHECK(s.code == 0);
    json v = read_json_file(verdicts.string());
    REQUIRE(v.is_array());
    CHECK(v.size() == certs.size());
    for (const auto& e : v) {
        CHECK(e.at("verdict") == "CertifiedStable");
        CHECK(e.at("omega").is_array());
    }

    fs::path csv = scratch("diagram.csv");
    Run d = run({"diagram", chain.string(), "--out", csv.string()});
    CHECK(d.code == 0);
    std::string text = slurp(csv);
    CHECK(text.rfind("omega_lo,omega_hi,mu_lo,mu_hi,H_lo,H_hi,status\n", 0) == 0);
    CHECK(text.find(",green") != std::string::npos);

    Run n = run({"continue", "--config", cfg.string(), "--omega-from", "3.3", "--omega-to", "3.35", "--no-rigor",
                 "--json"});
    CHECK(n.code == 0);
    fs::path nchain = scratch("numeric.json");
    std::ofstream(nchain) << n.out;
    Run nd = run({"diagram", nchain.string(), "--no-stability"});
    CHECK(nd.out.find(",black") != std::string::npos);

    Run single = run({"stability", "--fixture", "octahedron", "--json"});
    CHECK(single.code == 0);
    CHECK(json::parse(single.out).at("verdict") == "CertifiedStable");
}

TEST_CASE("simulate and catalog") {
    Run s = run({"simulate", "--fixture", "triangle3", "--t", "0.01", "--dt", "0.005"});
    CHECK(s.code == 0);
    std::istringstream lines(s.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "t,H,phi_x,phi_y,phi_z,x0,y0,z0,x1,y1,z1,x2,y2,z2");
    int rows = 0;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == 3);
    CHECK(run({"simulate", "--fixture", "triangle3", "--dt", "-1"}).code == 1);

    Run l = run({"catalog", "list"});
    CHECK(l.code == 0);
    CHECK(l.out.find("icosahedron") != std::string::npos);
    Run sh = run({"catalog", "show", "octahedron", "--symmetry", "3", "--json"});
    CHECK(sh.code == 0);
    json j = json::parse(sh.out);
    CHECK(j.at("m") == 3);
    CHECK(j.at("n") == 2);
    CHECK(run({"catalog", "show", "nothing"}).code == 1);
}
