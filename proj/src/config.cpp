#include "dynkin/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynkin/errors.hpp"
#include "dynkin/expression.hpp"

namespace dynkin {

namespace {

[[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col) {
    throw ConfigError(msg, line, col);
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::size_t skip_ws(const std::string& s, std::size_t i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    return i;
}

std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    return s;
}

struct RawValue {
    enum class Kind { number, string, boolean };
    Kind kind = Kind::number;
    double num = 0.0;
    bool flag = false;
    std::string text;  // string body, or the raw numeric token
    std::size_t line = 0;
    std::size_t col = 0;
};

const std::set<std::string> kSections = {"process", "discount", "costs", "solver",
                                         "montecarlo"};

double want_number(const RawValue& v, const std::string& key) {
    if (v.kind != RawValue::Kind::number)
        fail("key '" + key + "' expects a number", v.line, v.col);
    return v.num;
}

std::string want_string(const RawValue& v, const std::string& key) {
    if (v.kind != RawValue::Kind::string)
        fail("key '" + key + "' expects a quoted string", v.line, v.col);
    return v.text;
}

bool want_bool(const RawValue& v, const std::string& key) {
    if (v.kind != RawValue::Kind::boolean)
        fail("key '" + key + "' expects true or false", v.line, v.col);
    return v.flag;
}

std::size_t want_index(const RawValue& v, const std::string& key) {
    const double d = want_number(v, key);
    if (!(d >= 0.0) || std::floor(d) != d || d > 9e15)
        fail("key '" + key + "' expects a non-negative integer", v.line, v.col);
    return static_cast<std::size_t>(d);
}

std::uint64_t want_u64(const RawValue& v, const std::string& key) {
    if (v.kind == RawValue::Kind::number) {
        // prefer the raw digits so large seeds keep full precision
        const char* b = v.text.c_str();
        char* end = nullptr;
        const unsigned long long u = std::strtoull(b, &end, 10);
        if (end == b + v.text.size()) return u;
        if (v.num >= 0.0 && std::floor(v.num) == v.num && v.num <= 9e15)
            return static_cast<std::uint64_t>(v.num);
    }
    fail("key '" + key + "' expects a non-negative integer", v.line, v.col);
}

BoundaryClass want_boundary(const RawValue& v, const std::string& key) {
    const std::string s = want_string(v, key);
    const auto c = boundary_class_from_string(s);
    if (!c) fail("unknown boundary class '" + s + "'", v.line, v.col);
    return *c;
}

void dispatch(GameConfig& cfg, const std::string& section, const std::string& key,
              const RawValue& v, std::size_t key_col) {
    if (section == "process") {
        if (key == "preset") {
            const std::string s = want_string(v, key);
            if (s == "bm") cfg.preset = ProcessPreset::bm;
            else if (s == "gbm") cfg.preset = ProcessPreset::gbm;
            else if (s == "bessel") cfg.preset = ProcessPreset::bessel;
            else if (s == "besq") cfg.preset = ProcessPreset::besq;
            else if (s == "custom") cfg.preset = ProcessPreset::custom;
            else fail("unknown preset '" + s + "'", v.line, v.col);
        } else if (key == "drift") cfg.drift = want_number(v, key);
        else if (key == "vol") cfg.vol = want_number(v, key);
        else if (key == "dim") cfg.dim = want_number(v, key);
        else if (key == "mu") cfg.mu = want_string(v, key);
        else if (key == "sigma") cfg.sigma = want_string(v, key);
        else if (key == "x_lo") cfg.x_lo = want_number(v, key);
        else if (key == "x_hi") cfg.x_hi = want_number(v, key);
        else if (key == "x_ref") cfg.x_ref = want_number(v, key);
        else if (key == "boundary_lo") cfg.boundary_lo = want_boundary(v, key);
        else if (key == "boundary_hi") cfg.boundary_hi = want_boundary(v, key);
        else fail("unknown key '" + key + "' in section [process]", v.line, key_col);
    } else if (section == "discount") {
        if (key == "r") {
            if (v.kind == RawValue::Kind::string) cfg.rate_expr = v.text;
            else cfg.rate = want_number(v, key);
        } else {
            fail("unknown key '" + key + "' in section [discount]", v.line, key_col);
        }
    } else if (section == "costs") {
        if (key == "G1") cfg.g1 = want_string(v, key);
        else if (key == "G2") cfg.g2 = want_string(v, key);
        else if (key == "L1") cfg.l1 = want_string(v, key);
        else if (key == "L2") cfg.l2 = want_string(v, key);
        else if (key == "G1_deriv") cfg.g1_deriv = want_string(v, key);
        else if (key == "G1_deriv2") cfg.g1_deriv2 = want_string(v, key);
        else if (key == "G2_deriv") cfg.g2_deriv = want_string(v, key);
        else if (key == "G2_deriv2") cfg.g2_deriv2 = want_string(v, key);
        else if (key == "L1_deriv") cfg.l1_deriv = want_string(v, key);
        else if (key == "L1_deriv2") cfg.l1_deriv2 = want_string(v, key);
        else if (key == "L2_deriv") cfg.l2_deriv = want_string(v, key);
        else if (key == "L2_deriv2") cfg.l2_deriv2 = want_string(v, key);
        else fail("unknown key '" + key + "' in section [costs]", v.line, key_col);
    } else if (section == "solver") {
        if (key == "grid_n") cfg.grid_n = want_index(v, key);
        else if (key == "sign_tol") cfg.sign_tol = want_number(v, key);
        else if (key == "force_numerical") cfg.force_numerical = want_bool(v, key);
        else fail("unknown key '" + key + "' in section [solver]", v.line, key_col);
    } else if (section == "montecarlo") {
        if (key == "dt") cfg.mc.dt = want_number(v, key);
        else if (key == "paths") cfg.mc.n_paths = want_index(v, key);
        else if (key == "seed") cfg.mc.seed = want_u64(v, key);
        else if (key == "discount_floor") cfg.mc.discount_floor = want_number(v, key);
        else if (key == "boundary_pad") cfg.mc.boundary_pad = want_number(v, key);
        else if (key == "threads") cfg.mc.threads = static_cast<unsigned>(want_index(v, key));
        else if (key == "grid") cfg.deviation_grid = want_index(v, key);
        else if (key == "x0") cfg.x0 = want_number(v, key);
        else fail("unknown key '" + key + "' in section [montecarlo]", v.line, key_col);
    }
}

std::function<double(double)> fn_of(const Expression& e) {
    return [e](double x) { return e.eval(x); };
}

Expression parse_cost_expression(const std::string& text, const std::string& field) {
    Expression e = Expression::parse(text);
    if (e.to_string().find("abs(") != std::string::npos)
        throw ValidationError(field + ": abs is not allowed in cost expressions, which must be twice differentiable");
    return e;
}

CostInput cost_input(const std::string& text, const std::optional<std::string>& d1,
                     const std::optional<std::string>& d2, const std::string& field) {
    const Expression e = parse_cost_expression(text, field);
    const Expression e1 = d1 ? Expression::parse(*d1) : e.derivative();
    const Expression e2 = d2 ? Expression::parse(*d2) : e1.derivative();
    return CostInput::analytic(fn_of(e), fn_of(e1), fn_of(e2));
}

DiffusionSpec build_spec_impl(const GameConfig& cfg) {
    Expression rate_e;
    if (cfg.rate_expr) rate_e = Expression::parse(*cfg.rate_expr);
    const double ref_guess =
        cfg.x_ref ? *cfg.x_ref : (cfg.preset == ProcessPreset::bm ? 0.0 : 1.0);
    const double r0 = cfg.rate ? *cfg.rate : rate_e.eval(ref_guess);

    DiffusionSpec s;
    switch (cfg.preset) {
        case ProcessPreset::bm:
            s = make_bm(cfg.drift.value_or(0.0), cfg.vol.value_or(1.0), r0, ref_guess);
            break;
        case ProcessPreset::gbm:
            s = make_gbm(cfg.drift.value_or(0.0), cfg.vol.value_or(1.0), r0, ref_guess);
            break;
        case ProcessPreset::bessel:
            s = make_bessel(cfg.dim.value_or(3.0), r0, ref_guess);
            break;
        case ProcessPreset::besq:
            s = make_besq(cfg.dim.value_or(0.0), r0, ref_guess);
            break;
        case ProcessPreset::custom: {
            const Expression mu_e = Expression::parse(cfg.mu.value());
            const Expression sg_e = Expression::parse(cfg.sigma.value());
            const DiscountModel dm = cfg.rate ? DiscountModel::constant(*cfg.rate)
                                              : DiscountModel::function(fn_of(rate_e));
            s = make_custom(fn_of(mu_e), fn_of(sg_e), dm, cfg.x_lo.value(), cfg.x_hi.value(),
                            cfg.boundary_lo.value(), cfg.boundary_hi.value(),
                            cfg.x_ref.value());
            break;
        }
    }
    if (cfg.preset != ProcessPreset::custom) {
        if (cfg.rate_expr) s.discount = DiscountModel::function(fn_of(rate_e));
        const std::string name = to_string(cfg.preset);
        if (cfg.x_lo && !(*cfg.x_lo == s.x_lo))
            throw ValidationError("process.x_lo contradicts the '" + name + "' preset");
        if (cfg.x_hi && !(*cfg.x_hi == s.x_hi))
            throw ValidationError("process.x_hi contradicts the '" + name + "' preset");
        if (cfg.boundary_lo && *cfg.boundary_lo != s.boundary_lo)
            throw ValidationError("process.boundary_lo contradicts the '" + name +
                                  "' preset, which fixes a " + to_string(s.boundary_lo) +
                                  " lower boundary");
        if (cfg.boundary_hi && *cfg.boundary_hi != s.boundary_hi)
            throw ValidationError("process.boundary_hi contradicts the '" + name +
                                  "' preset, which fixes a " + to_string(s.boundary_hi) +
                                  " upper boundary");
    }
    return s;
}

void validate_semantics(const GameConfig& c) {
    std::vector<std::string> missing;
    auto require = [&](bool present, const char* name) {
        if (!present) missing.push_back(name);
    };
    require(!c.g1.empty(), "costs.G1");
    require(!c.g2.empty(), "costs.G2");
    require(!c.l1.empty(), "costs.L1");
    require(!c.l2.empty(), "costs.L2");
    require(c.rate.has_value() || c.rate_expr.has_value(), "discount.r");
    if (c.preset == ProcessPreset::custom) {
        require(c.mu.has_value(), "process.mu");
        require(c.sigma.has_value(), "process.sigma");
        require(c.x_lo.has_value(), "process.x_lo");
        require(c.x_hi.has_value(), "process.x_hi");
        require(c.x_ref.has_value(), "process.x_ref");
        require(c.boundary_lo.has_value(), "process.boundary_lo");
        require(c.boundary_hi.has_value(), "process.boundary_hi");
    }
    if (c.preset == ProcessPreset::bessel || c.preset == ProcessPreset::besq)
        require(c.dim.has_value(), "process.dim");
    if (!missing.empty()) {
        std::string all = missing.front();
        for (std::size_t i = 1; i < missing.size(); ++i) all += ", " + missing[i];
        throw ValidationError("config is missing required field(s): " + all);
    }

    if (c.preset != ProcessPreset::custom && (c.mu || c.sigma))
        throw ValidationError("process.mu and process.sigma apply only to the custom preset");
    if ((c.preset == ProcessPreset::bm || c.preset == ProcessPreset::gbm) && c.dim)
        throw ValidationError("process.dim applies only to the bessel/besq presets");
    if ((c.preset == ProcessPreset::bessel || c.preset == ProcessPreset::besq ||
         c.preset == ProcessPreset::custom) &&
        (c.drift || c.vol))
        throw ValidationError("process.drift and process.vol apply only to the bm/gbm presets");
    if (c.preset == ProcessPreset::custom && c.dim)
        throw ValidationError("process.dim applies only to the bessel/besq presets");

    if (!(c.sign_tol > 0.0)) throw ValidationError("solver.sign_tol must be positive");
    if (c.grid_n < 16) throw ValidationError("solver.grid_n must be at least 16");
    if (!(c.mc.dt > 0.0)) throw ValidationError("montecarlo.dt must be positive");
    if (c.mc.n_paths == 0) throw ValidationError("montecarlo.paths must be positive");
    if (!(c.mc.discount_floor > 0.0 && c.mc.discount_floor < 1.0))
        throw ValidationError("montecarlo.discount_floor must lie strictly between 0 and 1");
    if (!(c.mc.boundary_pad >= 0.0))
        throw ValidationError("montecarlo.boundary_pad must be non-negative");

    parse_cost_expression(c.g1, "costs.G1");
    parse_cost_expression(c.g2, "costs.G2");
    parse_cost_expression(c.l1, "costs.L1");
    parse_cost_expression(c.l2, "costs.L2");
    for (const auto* opt : {&c.g1_deriv, &c.g1_deriv2, &c.g2_deriv, &c.g2_deriv2, &c.l1_deriv,
                            &c.l1_deriv2, &c.l2_deriv, &c.l2_deriv2}) {
        if (*opt) Expression::parse(**opt);
    }

    const DiffusionSpec s = build_spec_impl(c);  // also checks preset contradictions
    if (!(s.x_lo < c.x0 && c.x0 < s.x_hi))
        throw ValidationError("montecarlo.x0 must lie strictly inside the state interval");
}

std::string fmt_num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

GameConfig parse_config(const std::string& text) {
    GameConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::size_t i = skip_ws(line, 0);
        if (i == line.size() || line[i] == '#') continue;
        if (line[i] == '[') {
            const std::size_t close = line.find(']', i);
            if (close == std::string::npos) fail("unterminated section header", ln, i + 1);
            const std::string name = rtrim(line.substr(i + 1, close - i - 1));
            if (kSections.find(name) == kSections.end())
                fail("unknown section [" + name + "]", ln, i + 2);
            const std::size_t after = skip_ws(line, close + 1);
            if (after < line.size() && line[after] != '#')
                fail("unexpected text after section header", ln, after + 1);
            section = name;
            continue;
        }
        if (section.empty()) fail("key outside any [section]", ln, i + 1);
        const std::size_t key_col = i + 1;
        std::size_t j = i;
        while (j < line.size() && ident_char(line[j])) ++j;
        if (j == i) fail("expected a key", ln, key_col);
        const std::string key = line.substr(i, j - i);
        i = skip_ws(line, j);
        if (i == line.size() || line[i] != '=')
            fail("expected '=' after key '" + key + "'", ln, i + 1);
        i = skip_ws(line, i + 1);
        if (i == line.size() || line[i] == '#')
            fail("missing value for key '" + key + "'", ln, i + 1);
        RawValue v;
        v.line = ln;
        v.col = i + 1;
        if (line[i] == '"') {
            std::size_t close = i + 1;
            while (close < line.size() && line[close] != '"') ++close;
            if (close == line.size()) fail("unterminated string", ln, i + 1);
            v.kind = RawValue::Kind::string;
            v.text = line.substr(i + 1, close - i - 1);
            i = close + 1;
        } else {
            std::size_t end = i;
            while (end < line.size() && line[end] != '#') ++end;
            const std::string token = rtrim(line.substr(i, end - i));
            if (token == "true" || token == "false") {
                v.kind = RawValue::Kind::boolean;
                v.flag = token == "true";
            } else {
                const char* b = token.c_str();
                char* stop = nullptr;
                const double d = std::strtod(b, &stop);
                if (token.empty() || stop != b + token.size() || std::isnan(d))
                    fail("expected a number or a quoted string", ln, v.col);
                v.kind = RawValue::Kind::number;
                v.num = d;
                v.text = token;
            }
            i = end;
        }
        i = skip_ws(line, i);
        if (i < line.size() && line[i] != '#') fail("unexpected text after value", ln, i + 1);
        if (!seen.insert(section + "." + key).second)
            fail("duplicate key '" + key + "' in section [" + section + "]", ln, key_col);
        dispatch(cfg, section, key, v, key_col);
    }
    validate_semantics(cfg);
    return cfg;
}

GameConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const GameConfig& c) {
    std::ostringstream out;
    out << "[process]\n";
    out << "preset = \"" << to_string(c.preset) << "\"\n";
    if (c.drift) out << "drift = " << fmt_num(*c.drift) << "\n";
    if (c.vol) out << "vol = " << fmt_num(*c.vol) << "\n";
    if (c.dim) out << "dim = " << fmt_num(*c.dim) << "\n";
    if (c.mu) out << "mu = \"" << *c.mu << "\"\n";
    if (c.sigma) out << "sigma = \"" << *c.sigma << "\"\n";
    if (c.x_lo) out << "x_lo = " << fmt_num(*c.x_lo) << "\n";
    if (c.x_hi) out << "x_hi = " << fmt_num(*c.x_hi) << "\n";
    if (c.x_ref) out << "x_ref = " << fmt_num(*c.x_ref) << "\n";
    if (c.boundary_lo) out << "boundary_lo = \"" << to_string(*c.boundary_lo) << "\"\n";
    if (c.boundary_hi) out << "boundary_hi = \"" << to_string(*c.boundary_hi) << "\"\n";
    out << "\n[discount]\n";
    if (c.rate) out << "r = " << fmt_num(*c.rate) << "\n";
    if (c.rate_expr) out << "r = \"" << *c.rate_expr << "\"\n";
    out << "\n[costs]\n";
    out << "G1 = \"" << c.g1 << "\"\n";
    out << "G2 = \"" << c.g2 << "\"\n";
    out << "L1 = \"" << c.l1 << "\"\n";
    out << "L2 = \"" << c.l2 << "\"\n";
    if (c.g1_deriv) out << "G1_deriv = \"" << *c.g1_deriv << "\"\n";
    if (c.g1_deriv2) out << "G1_deriv2 = \"" << *c.g1_deriv2 << "\"\n";
    if (c.g2_deriv) out << "G2_deriv = \"" << *c.g2_deriv << "\"\n";
    if (c.g2_deriv2) out << "G2_deriv2 = \"" << *c.g2_deriv2 << "\"\n";
    if (c.l1_deriv) out << "L1_deriv = \"" << *c.l1_deriv << "\"\n";
    if (c.l1_deriv2) out << "L1_deriv2 = \"" << *c.l1_deriv2 << "\"\n";
    if (c.l2_deriv) out << "L2_deriv = \"" << *c.l2_deriv << "\"\n";
    if (c.l2_deriv2) out << "L2_deriv2 = \"" << *c.l2_deriv2 << "\"\n";
    out << "\n[solver]\n";
    out << "grid_n = " << c.grid_n << "\n";
    out << "sign_tol = " << fmt_num(c.sign_tol) << "\n";
    out << "force_numerical = " << (c.force_numerical ? "true" : "false") << "\n";
    out << "\n[montecarlo]\n";
    out << "dt = " << fmt_num(c.mc.dt) << "\n";
    out << "paths = " << c.mc.n_paths << "\n";
    out << "seed = " << c.mc.seed << "\n";
    out << "discount_floor = " << fmt_num(c.mc.discount_floor) << "\n";
    out << "boundary_pad = " << fmt_num(c.mc.boundary_pad) << "\n";
    out << "threads = " << c.mc.threads << "\n";
    out << "grid = " << c.deviation_grid << "\n";
    out << "x0 = " << fmt_num(c.x0) << "\n";
    return out.str();
}

DiffusionSpec build_diffusion(const GameConfig& cfg) {
    return build_spec_impl(cfg);
}

GameSpec build_game(const GameConfig& cfg) {
    validate_semantics(cfg);
    DiffusionSpec spec = build_spec_impl(cfg);
    const CostInput g1 = cost_input(cfg.g1, cfg.g1_deriv, cfg.g1_deriv2, "costs.G1");
    const CostInput g2 = cost_input(cfg.g2, cfg.g2_deriv, cfg.g2_deriv2, "costs.G2");
    const CostInput l1 = cost_input(cfg.l1, cfg.l1_deriv, cfg.l1_deriv2, "costs.L1");
    const CostInput l2 = cost_input(cfg.l2, cfg.l2_deriv, cfg.l2_deriv2, "costs.L2");
    FundamentalOptions fo;
    fo.grid_n = cfg.grid_n;
    fo.force_numerical = cfg.force_numerical;
    ClassifyOptions co;
    co.grid_n = cfg.grid_n;
    co.sign_tol = cfg.sign_tol;
    return GameSpec(std::move(spec), g1, g2, l1, l2, fo, co);
}

}  // namespace dynkin
