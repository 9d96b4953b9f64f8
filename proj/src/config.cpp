#include "bioref/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "bioref/errors.hpp"

namespace bioref {

using nlohmann::json;

namespace {

// Walks one JSON object, records which keys were consumed and reports the
// rest as unknown.
class Obj {
public:
    Obj(const json& j, std::string where, std::vector<std::string>& issues)
        : j_(j), where_(std::move(where)), issues_(issues) {
        if (!j_.is_object()) {
            issues_.push_back(where_ + ": expected an object");
            ok_ = false;
        }
    }
    ~Obj() {
        if (!ok_) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) issues_.push_back(where_ + "." + it.key() + ": unknown key");
        }
    }

    bool has(const std::string& k) const { return ok_ && j_.contains(k); }
    std::string path(const std::string& k) const { return where_ + "." + k; }

    const json* get(const std::string& k, bool required) {
        seen_.insert(k);
        if (!ok_) return nullptr;
        if (!j_.contains(k)) {
            if (required) issues_.push_back(path(k) + ": missing required key");
            return nullptr;
        }
        return &j_.at(k);
    }

    void num(const std::string& k, double& out, bool required = false) {
        if (const json* v = get(k, required)) {
            if (v->is_number()) out = v->get<double>();
            else issues_.push_back(path(k) + ": expected a number");
        }
    }
    void integer(const std::string& k, int& out) {
        if (const json* v = get(k, false)) {
            if (v->is_number_integer()) out = v->get<int>();
            else issues_.push_back(path(k) + ": expected an integer");
        }
    }
    void u64(const std::string& k, std::uint64_t& out) {
        if (const json* v = get(k, false)) {
            if (v->is_number_unsigned()) out = v->get<std::uint64_t>();
            else issues_.push_back(path(k) + ": expected a non-negative integer");
        }
    }
    void boolean(const std::string& k, bool& out) {
        if (const json* v = get(k, false)) {
            if (v->is_boolean()) out = v->get<bool>();
            else issues_.push_back(path(k) + ": expected true or false");
        }
    }
    std::optional<std::string> str(const std::string& k, bool required = false) {
        if (const json* v = get(k, required)) {
            if (v->is_string()) return v->get<std::string>();
            issues_.push_back(path(k) + ": expected a string");
        }
        return std::nullopt;
    }
    void nums(const std::string& k, std::vector<double>& out, bool required = false) {
        if (const json* v = get(k, required)) {
            if (!v->is_array()) {
                issues_.push_back(path(k) + ": expected an array of numbers");
                return;
            }
            std::vector<double> tmp;
            for (const auto& e : *v) {
                if (!e.is_number()) {
                    issues_.push_back(path(k) + ": expected an array of numbers");
                    return;
                }
                tmp.push_back(e.get<double>());
            }
            out = std::move(tmp);
        }
    }
    template <class E>
    void choice(const std::string& k, E& out, const std::vector<std::pair<std::string, E>>& opts) {
        if (auto s = str(k)) {
            for (const auto& [name, val] : opts) {
                if (*s == name) {
                    out = val;
                    return;
                }
            }
            std::string all;
            for (const auto& o : opts) all += (all.empty() ? "" : ", ") + o.first;
            issues_.push_back(path(k) + ": '" + *s + "' is not one of " + all);
        }
    }

private:
    const json& j_;
    std::string where_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
    bool ok_ = true;
};

void parse_ppf(const json& j, const std::string& where, PpfSpec& out, std::vector<std::string>& issues) {
    Obj o(j, where, issues);
    o.num("rho0", out.rho0, true);
    o.num("rho_inf", out.rho_inf, true);
    o.num("l", out.l, true);
}

void parse_band(const json& j, const std::string& where, PpfBand& out, std::vector<std::string>& issues) {
    Obj o(j, where, issues);
    o.num("rho0", out.upper.rho0, true);
    o.num("rho_inf", out.upper.rho_inf, true);
    o.num("l", out.upper.l, true);
    if (const json* lo = o.get("lower", false)) {
        if (lo->is_number()) {
            out.lower = lo->get<double>();
        } else {
            PpfSpec s;
            parse_ppf(*lo, where + ".lower", s, issues);
            out.lower = s;
        }
    } else {
        out.lower.reset();
    }
}

void parse_bounds(const json& j, const std::string& where, TransformBounds& out,
                  std::vector<std::string>& issues) {
    Obj o(j, where, issues);
    o.num("delta_L", out.delta_L);
    o.num("delta_U", out.delta_U);
}

void parse_fls(const json& j, const std::string& where, FlsConfig& out, std::vector<std::string>& issues) {
    Obj o(j, where, issues);
    o.nums("centers1", out.centers1);
    o.nums("centers2", out.centers2);
    o.num("width", out.width);
    std::vector<double> scale{out.scale[0], out.scale[1]};
    o.nums("scale", scale);
    if (scale.size() != 2) issues.push_back(where + ".scale: expected 2 numbers");
    else out.scale = {scale[0], scale[1]};
}

const std::vector<std::pair<std::string, WeightLaw>> kWeightLaws{
    {"negative", WeightLaw::negative}, {"positive", WeightLaw::positive}};

}  // namespace

ControllerConfig parse_controller(const json& j, const std::string& where,
                                  std::vector<std::string>& issues) {
    Obj o(j, where, issues);
    const auto type = o.str("type", true);
    if (!type) return PassiveConfig{};
    if (*type == "passive") return PassiveConfig{};
    if (*type == "approx_free") {
        ApproxFreeConfig c;
        o.num("k1", c.k1);
        o.num("k2", c.k2);
        o.num("k3", c.k3);
        o.num("theta_nominal", c.theta_nominal);
        if (const json* v = o.get("ppf1", false)) parse_band(*v, o.path("ppf1"), c.ppf1, issues);
        if (const json* v = o.get("ppf2", false)) parse_band(*v, o.path("ppf2"), c.ppf2, issues);
        if (const json* v = o.get("ppf3", false)) parse_band(*v, o.path("ppf3"), c.ppf3, issues);
        if (const json* v = o.get("bounds1", false)) parse_bounds(*v, o.path("bounds1"), c.bounds1, issues);
        if (const json* v = o.get("bounds2", false)) parse_bounds(*v, o.path("bounds2"), c.bounds2, issues);
        if (const json* v = o.get("bounds3", false)) parse_bounds(*v, o.path("bounds3"), c.bounds3, issues);
        return c;
    }
    if (*type == "fac") {
        FacConfig c;
        o.num("lambda1", c.lambda1);
        o.num("lambda2", c.lambda2);
        o.num("theta_nominal", c.theta_nominal);
        o.choice("weight_law", c.weight_law, kWeightLaws);
        if (const json* v = o.get("fls", false)) parse_fls(*v, o.path("fls"), c.fls, issues);
        return c;
    }
    if (*type == "fac_ppf") {
        FacPpfConfig c;
        o.num("gamma1", c.gamma1);
        o.num("gamma2", c.gamma2);
        o.num("theta_nominal", c.theta_nominal);
        o.choice("weight_law", c.weight_law, kWeightLaws);
        if (const json* v = o.get("fls", false)) parse_fls(*v, o.path("fls"), c.fls, issues);
        if (const json* v = o.get("ppf", false)) parse_ppf(*v, o.path("ppf"), c.ppf, issues);
        if (const json* v = o.get("bounds", false)) parse_bounds(*v, o.path("bounds"), c.bounds, issues);
        return c;
    }
    issues.push_back(where + ".type: '" + *type + "' is not one of passive, approx_free, fac, fac_ppf");
    // Mark the remaining keys as seen so only the type error is reported.
    for (auto it = j.begin(); it != j.end(); ++it) o.get(it.key(), false);
    return PassiveConfig{};
}

namespace {

RoadSpec parse_road(const json& j, std::vector<std::string>& issues) {
    Obj o(j, "road", issues);
    const auto type = o.str("type", true);
    auto speed = [&](double& v) {
        double kmh = v * 3.6;
        const bool has_kmh = o.has("V_kmh");
        const bool has_ms = o.has("V");
        if (has_kmh && has_ms) issues.emplace_back("road: give either V or V_kmh, not both");
        o.num("V_kmh", kmh);
        double ms = v;
        o.num("V", ms);
        v = has_kmh ? kmh_to_ms(kmh) : ms;
    };
    if (!type) return FlatRoadSpec{};
    if (*type == "flat") return FlatRoadSpec{};
    if (*type == "random") {
        RandomRoadSpec r;
        o.num("nz", r.nz);
        o.num("n0", r.n0);
        o.num("Gz", r.Gz);
        speed(r.V);
        o.choice("noise", r.noise, std::vector<std::pair<std::string, NoiseMode>>{
                                       {"sampled", NoiseMode::sampled}, {"wiener", NoiseMode::wiener}});
        o.num("hold", r.hold);
        return r;
    }
    if (*type == "bump") {
        BumpRoadSpec r;
        o.num("alpha", r.alpha);
        o.num("l", r.l);
        speed(r.V);
        return r;
    }
    if (*type == "sine") {
        SineRoadSpec r;
        o.num("amplitude", r.amplitude);
        o.num("freq", r.freq);
        return r;
    }
    issues.push_back("road.type: '" + *type + "' is not one of random, bump, sine, flat");
    for (auto it = j.begin(); it != j.end(); ++it) o.get(it.key(), false);
    return FlatRoadSpec{};
}

void parse_sim(const json& j, SimConfig& s, std::vector<std::string>& issues) {
    Obj o(j, "sim", issues);
    o.num("dt", s.dt, true);
    o.num("T", s.T, true);
    o.choice("routing", s.routing, std::vector<std::pair<std::string, Routing>>{
                                       {"unsprung_accel", Routing::unsprung_accel},
                                       {"road_accel", Routing::road_accel}});
    o.boolean("disturbance", s.disturbance);
    o.choice("disturbance_mode", s.disturbance_mode,
             std::vector<std::pair<std::string, DisturbanceMode>>{
                 {"force", DisturbanceMode::force}, {"acceleration", DisturbanceMode::acceleration}});
    o.u64("seed", s.seed);
    o.integer("decimation", s.decimation);
    o.boolean("zoh", s.zoh);
    o.boolean("timing", s.timing);
    o.boolean("passive_at_rest", s.passive_at_rest);
    o.choice("initial_check", s.initial_check,
             std::vector<std::pair<std::string, InitialCheckMode>>{
                 {"enforce", InitialCheckMode::enforce}, {"warn", InitialCheckMode::warn}});
    std::vector<double> x0{s.x0.x1, s.x0.x2, s.x0.x3, s.x0.x4};
    o.nums("x0", x0);
    if (x0.size() != 4) issues.emplace_back("sim.x0: expected 4 numbers");
    else s.x0 = {x0[0], x0[1], x0[2], x0[3]};
    std::vector<double> y0{s.y0.y1, s.y0.y2};
    o.nums("y0", y0);
    if (y0.size() != 2) issues.emplace_back("sim.y0: expected 2 numbers");
    else s.y0 = {y0[0], y0[1]};
}

void parse_plant(const json& j, SuspensionParams& p, std::vector<std::string>& issues) {
    Obj o(j, "plant", issues);
    o.num("ms", p.ms);
    o.num("mu", p.mu);
    o.num("ks1", p.ks1);
    o.num("ks2", p.ks2);
    o.num("ks3", p.ks3);
    o.num("cs1", p.cs1);
    o.num("cs2", p.cs2);
    o.num("kt", p.kt);
    o.num("ct", p.ct);
    o.num("zmax", p.zmax);
    o.num("g", p.g);
}

void parse_bio(const json& j, BioParams& b, std::vector<std::string>& issues) {
    Obj o(j, "bio", issues);
    o.num("M", b.M);
    o.num("L1", b.L1);
    o.num("L2", b.L2);
    o.num("theta1", b.theta1);
    o.num("kh", b.kh);
    o.num("kv", b.kv);
    o.num("mu1", b.mu1);
    o.num("mu2", b.mu2);
    o.integer("nx", b.nx);
}

ExperimentSpec parse_experiment(const json& j, std::vector<std::string>& issues) {
    ExperimentSpec e;
    Obj o(j, "experiment", issues);
    o.nums("velocities_kmh", e.velocities_kmh);
    o.nums("masses", e.masses);
    o.integer("threads", e.threads);
    if (const json* c = o.get("controllers", false)) {
        if (!c->is_object()) {
            issues.emplace_back("experiment.controllers: expected an object of label -> controller");
        } else {
            for (auto it = c->begin(); it != c->end(); ++it) {
                e.controllers.emplace_back(
                    it.key(), parse_controller(it.value(), "experiment.controllers." + it.key(), issues));
            }
        }
    }
    if (e.velocities_kmh.empty()) issues.emplace_back("experiment.velocities_kmh: must not be empty");
    for (double v : e.velocities_kmh) {
        if (!(v > 0)) issues.emplace_back("experiment.velocities_kmh: speeds must be > 0");
    }
    return e;
}

void collect(std::vector<std::string>& issues, const auto& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
}

}  // namespace

std::string config_hash(const json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const json& doc) {
    std::vector<std::string> issues;
    ExperimentConfig cfg;
    {
        Obj top(doc, "config", issues);
        if (const json* v = top.get("plant", false)) parse_plant(*v, cfg.plant, issues);
        if (const json* v = top.get("bio", false)) parse_bio(*v, cfg.bio, issues);
        if (const json* v = top.get("controller", false)) cfg.controller = parse_controller(*v, "controller", issues);
        if (const json* v = top.get("road", true)) cfg.road = parse_road(*v, issues);
        if (const json* v = top.get("sim", true)) parse_sim(*v, cfg.sim, issues);
        if (const json* v = top.get("experiment", false)) cfg.experiment = parse_experiment(*v, issues);
        if (const json* v = top.get("output", false)) {
            Obj o(*v, "output", issues);
            if (auto s = o.str("dir")) cfg.output.dir = *s;
            if (auto s = o.str("prefix")) cfg.output.prefix = *s;
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    collect(issues, [&] { cfg.plant.validate(); });
    collect(issues, [&] { cfg.bio.validate(); });
    collect(issues, [&] { theta2(cfg.bio); });
    if (cfg.controller) collect(issues, [&] { validate_controller(*cfg.controller); });
    if (cfg.experiment) {
        for (const auto& [label, c] : cfg.experiment->controllers) {
            collect(issues, [&, &c = c] { validate_controller(c); });
        }
    }
    collect(issues, [&] { validate_road(cfg.road); });
    collect(issues, [&] { cfg.sim.validate(); });
    if (!issues.empty()) throw ConfigError(std::move(issues));

    cfg.source = doc;
    cfg.hash = config_hash(doc);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path);
    json doc;
    try {
        doc = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

json apply_overrides(json doc, std::optional<std::uint64_t> seed, std::optional<double> dt,
                     bool no_timing) {
    if (!doc.is_object()) return doc;
    if (!seed && !dt && !no_timing) return doc;
    json& sim = doc["sim"];
    if (!sim.is_object()) return doc;  // reported by the parser
    if (seed) sim["seed"] = *seed;
    if (dt) {
        // Keep the logged sample spacing when the step changes.
        const double old_dt = sim.value("dt", 1e-4);
        const int old_dec = sim.value("decimation", 10);
        sim["dt"] = *dt;
        const double spacing = old_dt * old_dec;
        sim["decimation"] = std::max(1, int(std::lround(spacing / *dt)));
    }
    if (no_timing) sim["timing"] = false;
    return doc;
}

}  // namespace bioref
