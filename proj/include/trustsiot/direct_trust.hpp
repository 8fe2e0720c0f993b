#pragma once

// Direct trust per ordered pair from time-bucketed interaction counts.
//
// Interactions split at t0: time > t0 is the current bucket, time <= t0 the
// past bucket. Past counts are discounted by the trust factor
// Phi = 1 - (elapsed/horizon)^lambda (clamped to [0,1]) before the
// Laplace-smoothed ratio (p+1)/(p+n+2). Raw elapsed time is normalized by
// `horizon` so Phi stays inside the unit interval for spans longer than one
// tick.

#include "trustsiot/graph.hpp"

namespace trustsiot {

struct DecayParams {
    double lambda = 1.0;    // rate of trust factor, > 0
    Timestamp t0 = 0;       // current/past bucket boundary
    double horizon = 1.0;   // time span mapped onto [0,1], > 0
};

struct PairCounters {
    double p_current = 0.0;
    double n_current = 0.0;
    double p_past = 0.0;
    double n_past = 0.0;
};

// Phi in [0,1], non-increasing in elapsed.
double trust_factor(double elapsed, const DecayParams& params);

// p_eff = phi*p_past + p_current, n_eff likewise.
std::pair<double, double> effective_counts(const PairCounters& c, double phi);

// Laplace-smoothed direct trust, strictly inside (0,1) for finite counts.
double dtm(double p_eff, double n_eff);

// Unsmoothed variant: p/(p+n) when both counts positive, 0.5 otherwise.
// Selectable via config for comparison; downstream credibility math prefers
// the smoothed form.
double dtm_unsmoothed(double p_eff, double n_eff);

// Tally of a pair's records into current/past buckets relative to t0.
PairCounters bucket_counts(std::span<const InteractionRecord> records, Timestamp t0);

struct DtmOptions {
    bool smoothed = true;
};

// Sets every edge weight from the log: trust_factor -> effective_counts ->
// dtm. Edges exist exactly for pairs with interactions, so all get a weight.
void compute_all_dtm(TrustGraph& g, const InteractionLog& log, const DecayParams& params,
                     Timestamp now, const DtmOptions& opts = {});

}  // namespace trustsiot
