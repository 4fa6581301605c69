#pragma once

#include <string>
#include <vector>

#include "dynkin/diffusion.hpp"
#include "dynkin/equilibrium.hpp"
#include "dynkin/game.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/payoff.hpp"

namespace dynkin {

inline constexpr int kSchemaVersion = 1;

/// Every emitter returns deterministic JSON: keys in fixed insertion order, a
/// top-level "schema_version" field, two-space indentation, and non-finite
/// numbers rendered as null. Identical inputs give byte-identical text.
std::string boundary_report_json(const BoundaryReport& rep);
std::string assumption_report_json(const AssumptionReport& rep);
std::string equilibrium_json(const EquilibriumResult& eq);

/// Combined verification document: the solved equilibrium, the variational
/// residuals, and (when run) the Monte Carlo deviation and martingale
/// reports. `overall_pass` mirrors the exit-code contract.
std::string verify_report_json(const EquilibriumResult& eq, const ResidualReport& res,
                               bool residual_pass, const DeviationReport* dev,
                               const MartingaleReport* mart, bool overall_pass);

struct SweepRow {
    std::string parameter;
    double value = 0.0;
    Regime regime = Regime::not_found;
    double x1_star = 0.0;
    double x2_star = 0.0;
    double y1_star = 0.0;
    double y2_star = 0.0;
};

std::string sweep_json(const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace dynkin
