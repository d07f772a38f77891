#pragma once

#include "gexp/solver.hpp"

#include <vector>

namespace gexp {

/// Knobs for the multi-variable backward reductions. Anchor grids hold stage
/// functions between solves; stage functions interpolate piecewise-linearly.
struct ReductionConfig {
    double dx{0.05};           // solve-grid step
    double cfl{0.45};          // dt = cfl·dx²/σ̄² per stage
    int anchors{101};          // anchor nodes per prefix dimension
    double support_mult{4.0};  // grid half-width = mult·σ̄·√horizon
    BoundaryRule boundary{BoundaryRule::ClampPayoff};
};

/// One reduced stage: values of the stage function on the anchor grids of the
/// not-yet-integrated variables (the conditional expectation at those anchors).
struct StageFunction {
    std::vector<CellGrid> axes;
    std::vector<double> values;  // last axis fastest
};

/// Ê[φ(X₁,…,Xₖ)] for an ordered list of 1D specs where each variable is
/// independent of its predecessors: integrates variables last-to-first, each
/// by a heat solve at horizon 1 read at the origin. `trace`, when given,
/// receives the intermediate stage functions outermost-last.
double sequential_expect(const PayoffN& phi,
                         const std::vector<VolatilityInterval>& specs,
                         const ReductionConfig& config,
                         std::vector<StageFunction>* trace = nullptr);

/// Ê[φ(B_{t₁},…,B_{tₙ})] by backward recursion over increments: stage i
/// integrates the last coordinate at horizon tᵢ−tᵢ₋₁ and reads the result at
/// the previous coordinate's anchor. Stage i of `trace` is the conditional
/// expectation given (B_{t₁},…,B_{tᵢ}) sampled at anchors.
double nested_expect(const PayoffN& phi, const std::vector<double>& times,
                     const VolatilityInterval& iv, const ReductionConfig& config,
                     std::vector<StageFunction>* trace = nullptr);

}  // namespace gexp
