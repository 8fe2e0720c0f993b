#include "trustsiot/direct_trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustsiot {

double trust_factor(double elapsed, const DecayParams& params) {
    if (params.lambda <= 0.0) throw std::invalid_argument("trust_factor: lambda must be > 0");
    if (params.horizon <= 0.0) throw std::invalid_argument("trust_factor: horizon must be > 0");
    if (elapsed <= 0.0) return 1.0;
    double phi = 1.0 - std::pow(elapsed / params.horizon, params.lambda);
    return std::clamp(phi, 0.0, 1.0);
}

std::pair<double, double> effective_counts(const PairCounters& c, double phi) {
    return {phi * c.p_past + c.p_current, phi * c.n_past + c.n_current};
}

double dtm(double p_eff, double n_eff) {
    return (p_eff + 1.0) / (p_eff + n_eff + 2.0);
}

double dtm_unsmoothed(double p_eff, double n_eff) {
    if (p_eff > 0.0 && n_eff > 0.0) return p_eff / (p_eff + n_eff);
    return 0.5;
}

PairCounters bucket_counts(std::span<const InteractionRecord> records, Timestamp t0) {
    PairCounters c;
    for (const InteractionRecord& r : records) {
        const bool positive = r.outcome == Outcome::Positive;
        if (r.time > t0) {
            (positive ? c.p_current : c.n_current) += 1.0;
        } else {
            (positive ? c.p_past : c.n_past) += 1.0;
        }
    }
    return c;
}

void compute_all_dtm(TrustGraph& g, const InteractionLog& log, const DecayParams& params,
                     Timestamp now, const DtmOptions& opts) {
    const double phi = trust_factor(static_cast<double>(now - params.t0), params);
    for (const TrustGraph::Edge& e : g.edges()) {
        PairCounters c = bucket_counts(log.pair_records(e.trustor, e.trustee), params.t0);
        auto [p_eff, n_eff] = effective_counts(c, phi);
        double w = opts.smoothed ? dtm(p_eff, n_eff) : dtm_unsmoothed(p_eff, n_eff);
        g.set_dtm(e.trustor, e.trustee, w);
    }
}

}  // namespace trustsiot
