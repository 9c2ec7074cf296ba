#include "vortex/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "vortex/catalog.hpp"
#include "vortex/continuation.hpp"
#include "vortex/errors.hpp"
#include "vortex/io.hpp"
#include "vortex/stability.hpp"

#ifndef VORTEX_BUILD_ID
#define VORTEX_BUILD_ID "dev"
#endif

namespace vortex {

const char* build_id() { return VORTEX_BUILD_ID; }

namespace {

struct ProofFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputOpts {
    std::string fixture;
    std::string config;
    int symmetry = 0;
    std::optional<double> omega;
};

struct Input {
    RingSystem system;
    double omega = 0.0;
    std::string label;
};

void add_input(CLI::App* app, InputOpts& in) {
    auto* f = app->add_option("--fixture", in.fixture, "catalog fixture name");
    auto* c = app->add_option("--config", in.config, "configuration JSON file");
    f->excludes(c);
    app->add_option("--symmetry", in.symmetry, "Z_m description of the fixture to use");
    app->add_option("--omega", in.omega, "angular velocity");
}

Input load_input(const InputOpts& in) {
    Input out;
    if (!in.fixture.empty()) {
        FixtureEntry e = fixture(in.fixture);
        out.system = in.symmetry ? e.system(in.symmetry) : e.system();
        out.omega = e.omega;
        out.label = "fixture:" + in.fixture;
    } else if (!in.config.empty()) {
        ConfigFile c = config_from_json(read_json_file(in.config));
        out.system = c.system;
        out.omega = c.omega.value_or(0.0);
        out.label = in.config;
    } else {
        throw IoError("an input is required: --fixture NAME or --config PATH");
    }
    if (in.omega) out.omega = *in.omega;
    if (!std::isfinite(out.omega)) throw DomainError("omega must be finite");
    return out;
}

Vec<double> generators_flat(const RingSystem& r) {
    Vec<double> a;
    for (const auto& u : r.u) a.insert(a.end(), u.begin(), u.end());
    return a;
}

BranchCertificate point_certificate(const RingSystem& sys, double omega) {
    validate_rings(sys, 1e-6);
    const RingShape s = sys.shape();
    Vec<double> anchor = generators_flat(sys);
    AugmentedPoint x;
    try {
        x = newton_polish(s, make_point(sys, omega), anchor);
    } catch (const NoConvergence& e) {
        throw ProofFailed(std::string("no numerical zero near the input: ") + e.what());
    }
    PointEnclosure pe = nk_validate_point(s, x, anchor);
    BranchCertificate c;
    c.m = s.m;
    c.n = s.n;
    c.p = s.p;
    c.anchor = anchor;
    c.x0 = c.x1 = x;
    c.bounds = pe.bounds;
    c.r0 = pe.bounds.r0.value_or(0.0);
    c.status = "validated";
    c.build_id = build_id();
    return c;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

struct Manifest {
    std::string command;
    std::vector<std::string> inputs;
    json parameters = json::object();
    std::vector<std::string> outputs;
    json stages = json::array();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void stage(const std::string& name, const std::string& status) { stages.push_back({{"stage", name}, {"status", status}}); }

    void write_next_to(const std::string& out_path) const {
        if (out_path.empty()) return;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json j = {{"command", command},     {"inputs", inputs},   {"parameters", parameters},
                  {"outputs", outputs},     {"build_id", build_id()}, {"wall_clock_s", secs},
                  {"stages", stages}};
        write_text_file(out_path + ".manifest.json", dump(j) + "\n");
    }
};

void emit(const json& j, const std::string& out_path, bool to_stdout, std::ostream& out, Manifest& man) {
    std::string text = dump(j) + "\n";
    if (!out_path.empty()) {
        write_text_file(out_path, text);
        man.outputs.push_back(out_path);
    }
    if (to_stdout) out << text;
}

std::string verdict_color(const BranchCertificate& c, const std::optional<StabilityVerdict>& v) {
    if (c.status != "validated") return "black";
    if (v && v->verdict == Verdict::CertifiedStable && v->whole_segment) return "green";
    return "yellow";
}

// ------------------------------------------------------------------ commands

int cmd_certify(const InputOpts& in, const std::string& out_path, bool as_json, std::ostream& out, Manifest& man) {
    Input input = load_input(in);
    man.inputs.push_back(input.label);
    man.parameters["omega"] = input.omega;
    BranchCertificate c = point_certificate(input.system, input.omega);
    man.stage("nk_validate_point", "validated");
    emit(to_json(c), out_path, as_json, out, man);
    if (!as_json)
        out << "validated (" << input.label << ", omega " << fmt(input.omega) << "): r0 = " << fmt(c.r0)
            << ", Y = " << fmt(c.bounds.Y) << ", Z = " << fmt(c.bounds.Z) << "\n";
    man.write_next_to(out_path);
    return 0;
}

int cmd_continue(const InputOpts& in, double from, double to, double step, unsigned workers, bool no_rigor,
                 const std::string& out_path, bool as_json, std::ostream& out, std::ostream& err, Manifest& man) {
    Input input = load_input(in);
    man.inputs.push_back(input.label);
    man.parameters = {{"omega_from", from}, {"omega_to", to}, {"step", step}, {"rigor", !no_rigor}};
    ContinuationOptions opt;
    opt.step = step;
    opt.workers = workers;
    opt.rigor = !no_rigor;
    std::vector<BranchCertificate> chain;
    int code = 0;
    try {
        chain = continue_branch(input.system, from, to, opt);
        man.stage("continue_branch", "complete");
    } catch (const BranchStalled& e) {
        chain = e.partial;
        code = 2;
        man.stage("continue_branch", "stalled");
        double reached = chain.empty() ? from : chain.back().x1.omega;
        err << "stalled: green/yellow up to omega = " << fmt(reached) << ", black beyond (no proof near omega = "
            << fmt(e.omega) << "): " << e.what() << "\n";
    }
    for (auto& c : chain) c.build_id = build_id();
    emit(chain_to_json(chain), out_path, as_json, out, man);
    if (!as_json) out << chain.size() << " segment(s)" << (no_rigor ? " (numeric only)" : " validated") << "\n";
    man.write_next_to(out_path);
    return code;
}

std::vector<StabilityVerdict> chain_stability(const std::vector<BranchCertificate>& chain, unsigned workers) {
    StabilityOptions opt;
    opt.workers = workers;
    std::vector<StabilityVerdict> out;
    for (const auto& c : chain) out.push_back(stability_over_segment(c, opt));
    return out;
}

int cmd_stability(const std::string& chain_path, const InputOpts& in, unsigned workers, const std::string& out_path,
                  bool as_json, std::ostream& out, Manifest& man) {
    std::vector<BranchCertificate> chain;
    if (!chain_path.empty()) {
        chain = chain_from_json(read_json_file(chain_path));
        man.inputs.push_back(chain_path);
    } else {
        Input input = load_input(in);
        man.inputs.push_back(input.label);
        man.parameters["omega"] = input.omega;
        chain.push_back(point_certificate(input.system, input.omega));
    }
    std::vector<StabilityVerdict> vs = chain_stability(chain, workers);
    man.stage("stability", "complete");
    json arr = json::array();
    for (const auto& v : vs) arr.push_back(to_json(v));
    emit(chain_path.empty() ? arr.at(0) : arr, out_path, as_json, out, man);
    if (!as_json)
        for (const auto& v : vs) {
            out << to_string(v.verdict) << " omega [" << fmt(v.omega.lo) << ", " << fmt(v.omega.hi) << "]";
            if (!v.reason.empty()) out << ": " << v.reason;
            out << "\n";
        }
    man.write_next_to(out_path);
    return 0;
}

int cmd_diagram(const std::string& chain_path, bool stability, unsigned workers, const std::string& out_path,
                std::ostream& out, Manifest& man) {
    std::vector<BranchCertificate> chain = chain_from_json(read_json_file(chain_path));
    man.inputs.push_back(chain_path);
    std::ostringstream csv;
    csv << "omega_lo,omega_hi,mu_lo,mu_hi,H_lo,H_hi,status\n";
    StabilityOptions opt;
    opt.workers = workers;
    for (const auto& c : chain) {
        std::optional<StabilityVerdict> v;
        if (stability && c.status == "validated") v = stability_over_segment(c, opt);
        Interval w, mu, H;
        if (c.status == "validated") {
            w = certificate_omega(c);
            mu = certificate_mu(c);
            H = certificate_H(c);
        } else {
            w = Interval::hull(c.x0.omega, c.x1.omega);
            Interval m0 = momentum_Phi(lift_rho(rings_of(c.shape(), c.x0)))[2];
            Interval m1 = momentum_Phi(lift_rho(rings_of(c.shape(), c.x1)))[2];
            mu = hull(m0, m1);
            H = hull(Interval(hamiltonian_H(lift_rho(rings_of(c.shape(), c.x0)))),
                     Interval(hamiltonian_H(lift_rho(rings_of(c.shape(), c.x1)))));
        }
        csv << fmt(w.lo) << ',' << fmt(w.hi) << ',' << fmt(mu.lo) << ',' << fmt(mu.hi) << ',' << fmt(H.lo) << ','
            << fmt(H.hi) << ',' << verdict_color(c, v) << "\n";
    }
    man.stage("diagram", "complete");
    if (out_path.empty()) {
        out << csv.str();
    } else {
        write_text_file(out_path, csv.str());
        man.outputs.push_back(out_path);
        man.write_next_to(out_path);
    }
    return 0;
}

int cmd_simulate(const InputOpts& in, double t, double dt, int every, const std::string& out_path, std::ostream& out,
                 Manifest& man) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("simulate: --dt must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("simulate: --t must be non-negative");
    if (every < 1) throw DomainError("simulate: --every must be at least 1");
    Input input = load_input(in);
    man.inputs.push_back(input.label);
    man.parameters = {{"t", t}, {"dt", dt}, {"every", every}};
    Config<double> v = lift_rho(input.system);
    std::ostringstream csv;
    csv << "t,H,phi_x,phi_y,phi_z";
    for (std::size_t i = 0; i < v.size(); ++i) csv << ",x" << i << ",y" << i << ",z" << i;
    csv << "\n";
    auto row = [&](double time) {
        V3<double> phi = momentum_Phi(v);
        csv << fmt(time) << ',' << fmt(hamiltonian_H(v)) << ',' << fmt(phi[0]) << ',' << fmt(phi[1]) << ','
            << fmt(phi[2]);
        for (const auto& x : v) csv << ',' << fmt(x[0]) << ',' << fmt(x[1]) << ',' << fmt(x[2]);
        csv << "\n";
    };
    long steps = std::lround(std::ceil(t / dt - 1e-9));
    row(0.0);
    for (long k = 1; k <= steps; ++k) {
        double h = std::min(dt, t - (k - 1) * dt);
        v = integrate_full(v, h, h);
        if (k % every == 0 || k == steps) row(std::min(t, k * dt));
    }
    man.stage("simulate", "complete");
    if (out_path.empty()) {
        out << csv.str();
    } else {
        write_text_file(out_path, csv.str());
        man.outputs.push_back(out_path);
        man.write_next_to(out_path);
    }
    return 0;
}

int cmd_catalog_list(std::ostream& out) {
    for (const auto& name : fixture_names()) {
        FixtureEntry e = fixture(name);
        out << name << "  N=" << e.N << "  omega=" << fmt_short(e.omega) << "  Z_m:";
        for (const auto& r : e.reps) out << " (" << r.m << ',' << r.n << ',' << r.p << ')';
        out << "\n";
    }
    return 0;
}

int cmd_catalog_show(const std::string& name, int symmetry, bool as_json, std::ostream& out) {
    FixtureEntry e = fixture(name);
    if (as_json) {
        json j = symmetry ? config_to_json(e.system(symmetry), e.omega) : fixture_to_json(e);
        j["provenance"] = e.provenance;
        out << dump(j) << "\n";
        return 0;
    }
    out << e.name << ": N=" << e.N << ", omega=" << fmt_short(e.omega) << " (" << e.provenance << ")\n";
    for (const auto& r : e.reps) {
        out << "  (m,n,p) = (" << r.m << ',' << r.n << ',' << r.p << ")\n";
        for (const auto& u : r.generators) out << "    " << fmt(u[0]) << ' ' << fmt(u[1]) << ' ' << fmt(u[2]) << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"certified relative equilibria of point vortices on the sphere", "vortex_cert"};
    app.require_subcommand(1);

    InputOpts in;
    std::string out_path, chain_path, name;
    bool as_json = false, no_rigor = false, no_stability = false;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    double from = 0.0, to = 0.0, step = 1e-2, t = 1.0, dt = 1e-3;
    int every = 1;

    auto* certify = app.add_subcommand("certify", "validate a single relative equilibrium");
    add_input(certify, in);
    certify->add_option("--out", out_path);
    certify->add_flag("--json", as_json);
    certify->add_option("--workers", workers);

    auto* cont = app.add_subcommand("continue", "certify a branch over an omega range");
    add_input(cont, in);
    cont->add_option("--omega-from", from)->required();
    cont->add_option("--omega-to", to)->required();
    cont->add_option("--step", step);
    cont->add_option("--out", out_path);
    cont->add_option("--workers", workers);
    cont->add_flag("--no-rigor", no_rigor);
    cont->add_flag("--json", as_json);

    auto* stab = app.add_subcommand("stability", "stability verdicts for a chain file or a single point");
    stab->add_option("chain", chain_path, "chain or certificate JSON");
    add_input(stab, in);
    stab->add_option("--out", out_path);
    stab->add_option("--workers", workers);
    stab->add_flag("--json", as_json);

    auto* diag = app.add_subcommand("diagram", "energy-momentum CSV from a chain file");
    diag->add_option("chain", chain_path)->required();
    diag->add_option("--out", out_path);
    diag->add_option("--workers", workers);
    diag->add_flag("--no-stability", no_stability);

    auto* sim = app.add_subcommand("simulate", "RK4 trajectory of the full system");
    add_input(sim, in);
    sim->add_option("--t", t);
    sim->add_option("--dt", dt);
    sim->add_option("--every", every);
    sim->add_option("--out", out_path);

    auto* cat = app.add_subcommand("catalog", "list or show fixtures");
    cat->require_subcommand(1);
    cat->add_subcommand("list");
    auto* show = cat->add_subcommand("show");
    show->add_option("name", name)->required();
    show->add_option("--symmetry", in.symmetry);
    show->add_flag("--json", as_json);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    Manifest man;
    for (const auto& a : args) man.command += (man.command.empty() ? "" : " ") + a;
    try {
        if (*certify) return cmd_certify(in, out_path, as_json, out, man);
        if (*cont) return cmd_continue(in, from, to, step, workers, no_rigor, out_path, as_json, out, err, man);
        if (*stab) return cmd_stability(chain_path, in, workers, out_path, as_json, out, man);
        if (*diag) return cmd_diagram(chain_path, !no_stability, workers, out_path, out, man);
        if (*sim) return cmd_simulate(in, t, dt, every, out_path, out, man);
        if (*cat) {
            if (*show) return cmd_catalog_show(name, in.symmetry, as_json, out);
            return cmd_catalog_list(out);
        }
    } catch (const NotValidated& e) {
        err << "NotValidated: " << e.what() << " (Y = " << fmt(e.bounds.Y) << ", Z = " << fmt(e.bounds.Z) << ")\n";
        return 2;
    } catch (const ProofFailed& e) {
        err << "NotValidated: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace vortex
