#include "mnls/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mnls {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& v, int line) {
    std::string s = v;
    for (auto& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    std::vector<double> out;
    double x;
    while (is >> x) out.push_back(x);
    if (!is.eof()) throw ConfigError("config line " + std::to_string(line) + ": expected numbers, got '" + v + "'");
    return out;
}

double parse_double(const std::string& v, int line) {
    auto nums = parse_numbers(v, line);
    if (nums.size() != 1)
        throw ConfigError("config line " + std::to_string(line) + ": expected one number");
    return nums[0];
}

int parse_int(const std::string& v, int line) {
    double d = parse_double(v, line);
    int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 1e-12)
        throw ConfigError("config line " + std::to_string(line) + ": expected an integer");
    return i;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int ln = 0;
    bool sponge_seen = false;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(ln) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "coefficients" && section != "grid" && section != "scenario" &&
                section != "functionals" && section != "sweep")
                throw ConfigError("config line " + std::to_string(ln) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(ln) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(ln) + ": key outside any section");

        if (section == "coefficients") {
            if (key == "preset") {
                cfg.preset = val;
                CoeffParams base = preset_params(val);
                int dim = cfg.coeff.dim;
                double delta = cfg.coeff.delta;
                cfg.coeff = base;
                cfg.coeff.dim = dim;
                cfg.coeff.delta = delta;
            } else if (key == "delta")
                cfg.coeff.delta = parse_double(val, ln);
            else if (key == "bump_amplitude")
                cfg.coeff.bump_amp = parse_double(val, ln);
            else if (key == "bump_width")
                cfg.coeff.bump_width = parse_double(val, ln);
            else if (key == "beta")
                cfg.coeff.beta = parse_double(val, ln);
            else if (key == "kappa")
                cfg.coeff.kappa = parse_double(val, ln);
            else if (key == "kappa_smooth")
                cfg.coeff.kappa_smooth = parse_double(val, ln);
            else if (key == "harmonic")
                cfg.coeff.harmonic = parse_double(val, ln);
            else if (key == "gamma")
                cfg.coeff.gamma = parse_double(val, ln);
            else if (key == "lambda")
                cfg.coeff.lambda = parse_double(val, ln);
            else if (key == "declared_ca")
                cfg.coeff.declared.Ca = parse_double(val, ln);
            else if (key == "declared_cb")
                cfg.coeff.declared.Cb = parse_double(val, ln);
            else if (key == "declared_cplus")
                cfg.coeff.declared.Cplus = parse_double(val, ln);
            else if (key == "declared_cminus")
                cfg.coeff.declared.Cminus = parse_double(val, ln);
            else if (key == "declared_cc")
                cfg.coeff.declared.Cc = parse_double(val, ln);
            else if (key == "declared_ccprime")
                cfg.coeff.declared.Ccprime = parse_double(val, ln);
            else if (key == "declared_ci")
                cfg.coeff.declared.CI = parse_double(val, ln);
            else
                throw ConfigError("config line " + std::to_string(ln) + ": unknown key '" + key +
                                  "' in [coefficients]");
        } else if (section == "grid") {
            if (key == "dim")
                cfg.grid.dim = cfg.coeff.dim = parse_int(val, ln);
            else if (key == "box")
                cfg.grid.box = parse_double(val, ln);
            else if (key == "points")
                cfg.grid.points = parse_int(val, ln);
            else if (key == "shells")
                cfg.grid.shells = parse_int(val, ln);
            else if (key == "obstacle") {
                if (val == "none") {
                    cfg.grid.obstacle = {};
                } else {
                    std::istringstream os(val);
                    std::string kind;
                    os >> kind;
                    if (kind != "ball")
                        throw ConfigError("config line " + std::to_string(ln) +
                                          ": obstacle must be 'none' or 'ball cx cy cz r'");
                    Obstacle ob;
                    ob.kind = Obstacle::Kind::ball;
                    std::vector<double> nums;
                    double x;
                    while (os >> x) nums.push_back(x);
                    if (nums.size() < 2)
                        throw ConfigError("config line " + std::to_string(ln) +
                                          ": ball obstacle needs center coords and radius");
                    for (std::size_t k = 0; k + 1 < nums.size() && k < kMaxDim; ++k)
                        ob.center[k] = nums[k];
                    ob.radius = nums.back();
                    cfg.grid.obstacle = ob;
                }
            } else
                throw ConfigError("config line " + std::to_string(ln) + ": unknown key '" + key +
                                  "' in [grid]");
        } else if (section == "scenario") {
            if (key == "initial") {
                std::istringstream os(val);
                std::string kind;
                os >> kind;
                if (kind == "gaussian")
                    cfg.scenario.initial.kind = InitialSpec::Kind::gaussian;
                else if (kind == "ring")
                    cfg.scenario.initial.kind = InitialSpec::Kind::ring;
                else if (kind == "eigenmode")
                    cfg.scenario.initial.kind = InitialSpec::Kind::eigenmode;
                else if (kind == "file") {
                    cfg.scenario.initial.kind = InitialSpec::Kind::file;
                    os >> cfg.scenario.initial.path;
                } else
                    throw ConfigError("config line " + std::to_string(ln) +
                                      ": unknown initial kind '" + kind + "'");
            } else if (key == "center") {
                auto nums = parse_numbers(val, ln);
                for (std::size_t k = 0; k < nums.size() && k < kMaxDim; ++k)
                    cfg.scenario.initial.center[k] = nums[k];
            } else if (key == "momentum") {
                auto nums = parse_numbers(val, ln);
                for (std::size_t k = 0; k < nums.size() && k < kMaxDim; ++k)
                    cfg.scenario.initial.momentum[k] = nums[k];
            } else if (key == "width")
                cfg.scenario.initial.width = parse_double(val, ln);
            else if (key == "amplitude")
                cfg.scenario.initial.amplitude = parse_double(val, ln);
            else if (key == "ring_radius")
                cfg.scenario.initial.ring_radius = parse_double(val, ln);
            else if (key == "mode")
                cfg.scenario.initial.mode = parse_int(val, ln);
            else if (key == "dt")
                cfg.scenario.dt = parse_double(val, ln);
            else if (key == "t_max")
                cfg.scenario.t_max = parse_double(val, ln);
            else if (key == "snapshot_stride")
                cfg.scenario.snapshot_stride = parse_int(val, ln);
            else if (key == "integrator") {
                if (val == "crank_nicolson")
                    cfg.scenario.integrator = Integrator::crank_nicolson;
                else if (val == "strang_free")
                    cfg.scenario.integrator = Integrator::strang_free;
                else
                    throw ConfigError("config line " + std::to_string(ln) +
                                      ": unknown integrator '" + val + "'");
            } else if (key == "fp_tol")
                cfg.scenario.fp_tol = parse_double(val, ln);
            else if (key == "fp_max")
                cfg.scenario.fp_max = parse_int(val, ln);
            else if (key == "linear")
                cfg.scenario.linear = (val == "true" || val == "on" || val == "1");
            else if (key == "sponge") {
                sponge_seen = true;
                if (val == "off") {
                    cfg.scenario.sponge.on = false;
                } else {
                    std::istringstream os(val);
                    std::string state;
                    os >> state;
                    if (state != "on")
                        throw ConfigError("config line " + std::to_string(ln) +
                                          ": sponge must be 'off' or 'on [width strength]'");
                    cfg.scenario.sponge.on = true;
                    double w, s;
                    if (os >> w) cfg.scenario.sponge.width = w;
                    if (os >> s) cfg.scenario.sponge.strength = s;
                }
            } else if (key == "boundary_threshold")
                cfg.scenario.boundary_threshold = parse_double(val, ln);
            else
                throw ConfigError("config line " + std::to_string(ln) + ": unknown key '" + key +
                                  "' in [scenario]");
        } else if (section == "functionals") {
            if (key == "r_list")
                cfg.functionals.r_list = parse_numbers(val, ln);
            else if (key == "eps_exp")
                cfg.functionals.eps_exp = parse_double(val, ln);
            else if (key == "smoothing")
                cfg.functionals.smoothing = val;
            else if (key == "interaction")
                cfg.functionals.interaction = val;
            else if (key == "interaction_stride")
                cfg.functionals.interaction_stride = parse_int(val, ln);
            else if (key == "report_times")
                cfg.functionals.report_times = parse_numbers(val, ln);
            else if (key == "virial_time")
                cfg.functionals.virial_time = parse_double(val, ln);
            else if (key == "virial_morawetz_scale")
                cfg.functionals.virial_morawetz_scale = parse_double(val, ln);
            else if (key == "virial_sigma")
                cfg.functionals.virial_sigma = parse_double(val, ln);
            else
                throw ConfigError("config line " + std::to_string(ln) + ": unknown key '" + key +
                                  "' in [functionals]");
        } else if (section == "sweep") {
            if (key == "axis")
                cfg.sweep.axis = val;
            else if (key == "values")
                cfg.sweep.values = parse_numbers(val, ln);
            else
                throw ConfigError("config line " + std::to_string(ln) + ": unknown key '" + key +
                                  "' in [sweep]");
        }
    }
    (void)sponge_seen;
    cfg.scenario.r_list = cfg.functionals.r_list;
    cfg.scenario.coefficients_free =
        (cfg.coeff.bump_amp == 0 && cfg.coeff.beta == 0 && cfg.coeff.kappa == 0 &&
         cfg.coeff.kappa_smooth == 0 && cfg.coeff.harmonic == 0);
    cfg.scenario.id = "cfg" + std::to_string(cfg.hash() % 100000000);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "[coefficients]\n";
    os << "preset = " << preset << "\n";
    os << "delta = " << fmt(coeff.delta) << "\n";
    os << "bump_amplitude = " << fmt(coeff.bump_amp) << "\n";
    os << "bump_width = " << fmt(coeff.bump_width) << "\n";
    os << "beta = " << fmt(coeff.beta) << "\n";
    os << "kappa = " << fmt(coeff.kappa) << "\n";
    os << "kappa_smooth = " << fmt(coeff.kappa_smooth) << "\n";
    os << "harmonic = " << fmt(coeff.harmonic) << "\n";
    os << "gamma = " << fmt(coeff.gamma) << "\n";
    os << "lambda = " << fmt(coeff.lambda) << "\n";
    os << "declared_ca = " << fmt(coeff.declared.Ca) << "\n";
    os << "declared_cb = " << fmt(coeff.declared.Cb) << "\n";
    os << "declared_cplus = " << fmt(coeff.declared.Cplus) << "\n";
    os << "declared_cminus = " << fmt(coeff.declared.Cminus) << "\n";
    os << "declared_cc = " << fmt(coeff.declared.Cc) << "\n";
    os << "declared_ccprime = " << fmt(coeff.declared.Ccprime) << "\n";
    os << "declared_ci = " << fmt(coeff.declared.CI) << "\n";
    os << "[grid]\n";
    os << "dim = " << grid.dim << "\n";
    os << "box = " << fmt(grid.box) << "\n";
    os << "points = " << grid.points << "\n";
    os << "shells = " << grid.shells << "\n";
    os << "obstacle = ";
    if (grid.obstacle.kind == Obstacle::Kind::ball) {
        os << "ball";
        for (int k = 0; k < grid.dim; ++k) os << " " << fmt(grid.obstacle.center[k]);
        os << " " << fmt(grid.obstacle.radius);
    } else {
        os << "none";
    }
    os << "\n[scenario]\n";
    os << "initial = ";
    switch (scenario.initial.kind) {
        case InitialSpec::Kind::gaussian: os << "gaussian"; break;
        case InitialSpec::Kind::ring: os << "ring"; break;
        case InitialSpec::Kind::eigenmode: os << "eigenmode"; break;
        case InitialSpec::Kind::file: os << "file " << scenario.initial.path; break;
    }
    os << "\ncenter =";
    for (int k = 0; k < grid.dim; ++k) os << " " << fmt(scenario.initial.center[k]);
    os << "\nmomentum =";
    for (int k = 0; k < grid.dim; ++k) os << " " << fmt(scenario.initial.momentum[k]);
    os << "\nwidth = " << fmt(scenario.initial.width) << "\n";
    os << "amplitude = " << fmt(scenario.initial.amplitude) << "\n";
    os << "ring_radius = " << fmt(scenario.initial.ring_radius) << "\n";
    os << "mode = " << scenario.initial.mode << "\n";
    os << "dt = " << fmt(scenario.dt) << "\n";
    os << "t_max = " << fmt(scenario.t_max) << "\n";
    os << "snapshot_stride = " << scenario.snapshot_stride << "\n";
    os << "integrator = "
       << (scenario.integrator == Integrator::crank_nicolson ? "crank_nicolson" : "strang_free")
       << "\n";
    os << "fp_tol = " << fmt(scenario.fp_tol) << "\n";
    os << "fp_max = " << scenario.fp_max << "\n";
    os << "linear = " << (scenario.linear ? "true" : "false") << "\n";
    os << "sponge = ";
    if (scenario.sponge.on)
        os << "on " << fmt(scenario.sponge.width) << " " << fmt(scenario.sponge.strength);
    else
        os << "off";
    os << "\nboundary_threshold = " << fmt(scenario.boundary_threshold) << "\n";
    os << "[functionals]\n";
    os << "r_list =";
    for (double r : functionals.r_list) os << " " << fmt(r);
    os << "\neps_exp = " << fmt(functionals.eps_exp) << "\n";
    os << "smoothing = " << functionals.smoothing << "\n";
    os << "interaction = " << functionals.interaction << "\n";
    os << "interaction_stride = " << functionals.interaction_stride << "\n";
    os << "report_times =";
    for (double t : functionals.report_times) os << " " << fmt(t);
    os << "\nvirial_time = " << fmt(functionals.virial_time) << "\n";
    os << "virial_morawetz_scale = " << fmt(functionals.virial_morawetz_scale) << "\n";
    os << "virial_sigma = " << fmt(functionals.virial_sigma) << "\n";
    os << "[sweep]\n";
    os << "axis = " << sweep.axis << "\n";
    os << "values =";
    for (double v : sweep.values) os << " " << fmt(v);
    os << "\n";
    return os.str();
}

std::uint64_t RunConfig::hash() const {
    std::string s = preset;
    {
        std::ostringstream os;
        os << coeff.delta << coeff.bump_amp << coeff.bump_width << coeff.beta << coeff.kappa
           << coeff.kappa_smooth << coeff.harmonic << coeff.gamma << coeff.lambda << grid.dim << grid.box << grid.points
           << grid.shells << scenario.dt << scenario.t_max << scenario.initial.width
           << scenario.initial.amplitude << static_cast<int>(scenario.initial.kind)
           << scenario.linear << functionals.eps_exp;
        s += os.str();
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

CoefficientSet make_coefficient_set(const RunConfig& cfg) {
    CoeffParams p = cfg.coeff;
    CoefficientSet cs = make_coefficients(p);
    cs.name = cfg.preset;
    return cs;
}

Grid make_grid(const RunConfig& cfg) {
    Obstacle ob = cfg.grid.obstacle;
    if (cfg.preset == "exterior-ball" && ob.kind == Obstacle::Kind::none) {
        ob.kind = Obstacle::Kind::ball;
        ob.radius = 1.0;
    }
    return Grid(cfg.grid.dim, cfg.grid.box, cfg.grid.points, ob);
}

}  // namespace mnls
