#pragma once

#include <memory>
#include <string>

#include "dynkin/costs.hpp"

namespace dynkin {

/// Which equilibrium construction the cost geometry admits.
enum class SolveRoute {
    main_natural,  // natural lower boundary, interior-threshold system
    entrance,      // entrance-not-exit lower boundary dichotomy
    exit,          // exit-not-entrance lower boundary, possibly two-regime
    relaxed,       // both gain costs on the same side; one player never stops
    none
};
std::string to_string(SolveRoute r);

struct AssumptionReport {
    bool costs_ordered = false;   // L_i < G_i on the certification grid
    bool classes_ok = false;      // G1 in A1, G2 in A2, x_hat_1 < x_hat_2
    bool limits_ok = false;       // L_i/phi bounded at lo, L_i/psi vanishes at hi
    bool relaxed_applies = false; // both G's in A1 (or both A2) with negative infima
    SolveRoute route = SolveRoute::none;
    std::string detail;

    bool all_standard() const { return costs_ordered && classes_ok && limits_ok; }
};

/// Two players, one diffusion, four stopping costs. Player 1 pays G1 when it
/// stops first at tau1 and L1 when the opponent stops first; player 2 is the
/// mirror image and wins ties. Both minimise. The heavy objects (fundamental
/// pair, transform, classifications) are built once here and shared.
class GameSpec {
public:
    GameSpec(DiffusionSpec spec, const CostInput& g1, const CostInput& g2,
             const CostInput& l1, const CostInput& l2,
             const FundamentalOptions& fopts = {}, const ClassifyOptions& copts = {});

    const DiffusionSpec& spec() const { return *spec_; }
    const FundamentalPair& pair() const { return *pair_; }
    const TransformContext& ctx() const { return *ctx_; }

    const CostProfile& G(int player) const { return player == 1 ? g1_ : g2_; }
    const CostProfile& L(int player) const { return player == 1 ? l1_ : l2_; }
    const HatFunction& hatG(int player) const { return player == 1 ? hg1_ : hg2_; }
    const HatFunction& hatL(int player) const { return player == 1 ? hl1_ : hl2_; }

    const AssumptionReport& assumptions() const { return report_; }

private:
    std::shared_ptr<const DiffusionSpec> spec_;
    std::shared_ptr<const FundamentalPair> pair_;
    std::shared_ptr<const TransformContext> ctx_;
    CostProfile g1_, g2_, l1_, l2_;
    HatFunction hg1_, hg2_, hl1_, hl2_;
    AssumptionReport report_;
};

/// Re-evaluates the standing assumptions on an existing game: the cost
/// ordering, class membership of the gain costs, endpoint limits of the
/// opponent-stop costs, and the equilibrium-construction route they select.
AssumptionReport check_assumptions(const GameSpec& game);

}  // namespace dynkin
