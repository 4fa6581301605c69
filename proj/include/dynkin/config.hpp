#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "dynkin/diffusion.hpp"
#include "dynkin/game.hpp"
#include "dynkin/montecarlo.hpp"

namespace dynkin {

/// A declarative game description, one-to-one with the config file format.
///
/// The document is a line-based INI/TOML subset: `[section]` headers, `key =
/// value` pairs, `#` comments. Values are decimal numbers (inf accepted) or
/// double-quoted strings; strings hold expressions in x for anything
/// functional. Sections: [process], [discount], [costs], [solver],
/// [montecarlo].
struct GameConfig {
    // [process]
    ProcessPreset preset = ProcessPreset::custom;
    std::optional<double> drift;  // bm, gbm
    std::optional<double> vol;    // bm, gbm
    std::optional<double> dim;    // bessel, besq
    std::optional<std::string> mu;     // custom only
    std::optional<std::string> sigma;  // custom only
    std::optional<double> x_lo;
    std::optional<double> x_hi;
    std::optional<double> x_ref;
    std::optional<BoundaryClass> boundary_lo;
    std::optional<BoundaryClass> boundary_hi;

    // [discount]: exactly one of the two
    std::optional<double> rate;
    std::optional<std::string> rate_expr;

    // [costs]: required expressions plus optional analytic derivatives
    std::string g1, g2, l1, l2;
    std::optional<std::string> g1_deriv, g1_deriv2;
    std::optional<std::string> g2_deriv, g2_deriv2;
    std::optional<std::string> l1_deriv, l1_deriv2;
    std::optional<std::string> l2_deriv, l2_deriv2;

    // [solver]
    std::size_t grid_n = 4096;
    double sign_tol = 1e-7;
    bool force_numerical = false;

    // [montecarlo]
    PathConfig mc;
    std::size_t deviation_grid = 20;
    double x0 = 0.5;

    bool operator==(const GameConfig&) const = default;
};

/// Parses and fully validates a config document. Malformed syntax raises
/// ConfigError with a 1-based line/column; a broken embedded expression
/// raises ParseError with the column inside that expression; semantic
/// problems (missing cost, contradictory preset declarations...) raise
/// ValidationError naming the offending field.
GameConfig parse_config(const std::string& text);

/// Reads the file and delegates to parse_config. ValidationError when the
/// file cannot be read.
GameConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const GameConfig& cfg);

/// Instantiates just the diffusion (preset or custom expressions), checking
/// declared intervals and boundary classes against the preset's canon.
DiffusionSpec build_diffusion(const GameConfig& cfg);

/// Builds the solver-ready game: instantiates the diffusion (preset or
/// custom expressions), compiles cost expressions with symbolic derivatives
/// (or the declared analytic ones), and constructs the fundamental pair and
/// classifications.
GameSpec build_game(const GameConfig& cfg);

}  // namespace dynkin
