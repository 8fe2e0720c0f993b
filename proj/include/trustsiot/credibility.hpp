#pragma once

// Reliability/benevolence fixed point and per-node credibility.
//
// B(S) averages r_prev(i)*DTM(i,S) over in-raters; R(S) is one minus half the
// mean absolute gap between S's outgoing DTM and the targets' benevolence.
// Both start at 0.5 and alternate (all B from the previous R map, then all R
// from the fresh B map) until the largest per-node change in either map drops
// below epsilon. Nodes with no in-edges (resp. out-edges) retain their
// previous benevolence (resp. reliability) instead of dividing by zero.
// Credibility is the elementwise product R*B.

#include <vector>

#include "trustsiot/graph.hpp"

namespace trustsiot {

struct CredibilityScores {
    std::vector<double> reliability;
    std::vector<double> benevolence;
    std::vector<double> credibility;
    std::size_t iterations = 0;
    bool converged = false;
};

std::vector<double> benevolence_step(const TrustGraph& g, const std::vector<double>& r_prev,
                                     const std::vector<double>& b_prev);

std::vector<double> reliability_step(const TrustGraph& g, const std::vector<double>& b_curr,
                                     const std::vector<double>& r_prev);

struct CredibilityOptions {
    double epsilon = 1e-6;
    std::size_t max_iter = 200;
};

// Non-convergence at max_iter is reported via the flag, not an exception.
CredibilityScores solve_credibility(const TrustGraph& g, const CredibilityOptions& opts = {});

}  // namespace trustsiot
