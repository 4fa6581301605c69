#include "dynkin/game.hpp"

#include <algorithm>
#include <cmath>

#include "dynkin/errors.hpp"

namespace dynkin {

namespace {

AssumptionReport evaluate(const DiffusionSpec& spec, const FundamentalPair& pair,
                          const CostProfile& g1, const CostProfile& g2,
                          const CostProfile& l1, const CostProfile& l2) {
    AssumptionReport rep;
    std::string why;

    const std::vector<double> grid =
        classification_grid(spec, pair.range_lo(), pair.range_hi(), 2048);
    double min_gap1 = std::numeric_limits<double>::infinity();
    double min_gap2 = min_gap1;
    double min_g1 = min_gap1, min_g2 = min_gap1;
    for (double x : grid) {
        min_gap1 = std::min(min_gap1, g1.value(x) - l1.value(x));
        min_gap2 = std::min(min_gap2, g2.value(x) - l2.value(x));
        min_g1 = std::min(min_g1, g1.value(x));
        min_g2 = std::min(min_g2, g2.value(x));
    }
    rep.costs_ordered = min_gap1 > 0.0 && min_gap2 > 0.0;
    if (!rep.costs_ordered) why += "cost ordering L_i < G_i fails on the grid; ";

    rep.classes_ok = g1.class_tag() == CostClass::A1 && g2.class_tag() == CostClass::A2 &&
                     g1.x_hat() < g2.x_hat();
    if (!rep.classes_ok)
        why += "gain costs not (A1, A2) with ordered sign changes (G1: " +
               to_string(g1.class_tag()) + ", G2: " + to_string(g2.class_tag()) + "); ";

    rep.limits_ok = l1.diagnostics().lower_bounded && l2.diagnostics().lower_bounded &&
                    l1.diagnostics().upper_bounded && l2.diagnostics().upper_bounded;
    if (!rep.limits_ok) why += "opponent-stop costs unbounded against psi/phi at an endpoint; ";

    const bool both_a1 =
        g1.class_tag() == CostClass::A1 && g2.class_tag() == CostClass::A1;
    const bool both_a2 =
        g1.class_tag() == CostClass::A2 && g2.class_tag() == CostClass::A2;
    rep.relaxed_applies =
        (both_a1 || both_a2) && min_g1 < 0.0 && min_g2 < 0.0 && rep.costs_ordered;

    if (rep.all_standard()) {
        switch (spec.boundary_lo) {
            case BoundaryClass::natural: rep.route = SolveRoute::main_natural; break;
            case BoundaryClass::entrance_not_exit: rep.route = SolveRoute::entrance; break;
            case BoundaryClass::exit_not_entrance: rep.route = SolveRoute::exit; break;
        }
    } else if (rep.relaxed_applies) {
        rep.route = SolveRoute::relaxed;
    } else {
        rep.route = SolveRoute::none;
    }
    rep.detail = why.empty() ? "all standing assumptions hold" : why;
    return rep;
}

}  // namespace

std::string to_string(SolveRoute r) {
    switch (r) {
        case SolveRoute::main_natural: return "main_natural";
        case SolveRoute::entrance: return "entrance";
        case SolveRoute::exit: return "exit";
        case SolveRoute::relaxed: return "relaxed";
        default: return "none";
    }
}

GameSpec::GameSpec(DiffusionSpec spec, const CostInput& g1, const CostInput& g2,
                   const CostInput& l1, const CostInput& l2,
                   const FundamentalOptions& fopts, const ClassifyOptions& copts) {
    spec_ = std::make_shared<const DiffusionSpec>(std::move(spec));
    pair_ = std::make_shared<const FundamentalPair>(solve_fundamental(*spec_, fopts));
    ctx_ = std::make_shared<const TransformContext>(*spec_, *pair_);
    g1_ = classify_cost(*spec_, *ctx_, g1, copts);
    g2_ = classify_cost(*spec_, *ctx_, g2, copts);
    l1_ = classify_cost(*spec_, *ctx_, l1, copts);
    l2_ = classify_cost(*spec_, *ctx_, l2, copts);
    hg1_ = HatFunction(*ctx_, g1_);
    hg2_ = HatFunction(*ctx_, g2_);
    hl1_ = HatFunction(*ctx_, l1_);
    hl2_ = HatFunction(*ctx_, l2_);
    report_ = evaluate(*spec_, *pair_, g1_, g2_, l1_, l2_);
}

AssumptionReport check_assumptions(const GameSpec& game) {
    return evaluate(game.spec(), game.pair(), game.G(1), game.G(2), game.L(1),
                    game.L(2));
}

}  // namespace dynkin
