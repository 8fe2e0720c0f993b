#include "trustsiot/credibility.hpp"

#include <cmath>
#include <stdexcept>

namespace trustsiot {

std::vector<double> benevolence_step(const TrustGraph& g, const std::vector<double>& r_prev,
                                     const std::vector<double>& b_prev) {
    const std::size_t n = g.node_count();
    if (r_prev.size() != n || b_prev.size() != n)
        throw std::invalid_argument("benevolence_step: map size mismatch");
    std::vector<double> b(n);
    for (ObjectId s = 0; s < n; ++s) {
        auto raters = g.in_neighbors(s);
        if (raters.empty()) {
            b[s] = b_prev[s];
            continue;
        }
        double sum = 0.0;
        for (ObjectId i : raters) sum += r_prev[i] * *g.dtm(i, s);
        b[s] = sum / static_cast<double>(raters.size());
    }
    return b;
}

std::vector<double> reliability_step(const TrustGraph& g, const std::vector<double>& b_curr,
                                     const std::vector<double>& r_prev) {
    const std::size_t n = g.node_count();
    if (b_curr.size() != n || r_prev.size() != n)
        throw std::invalid_argument("reliability_step: map size mismatch");
    std::vector<double> r(n);
    for (ObjectId s = 0; s < n; ++s) {
        auto targets = g.out_neighbors(s);
        if (targets.empty()) {
            r[s] = r_prev[s];
            continue;
        }
        double sum = 0.0;
        for (ObjectId i : targets) sum += std::fabs(*g.dtm(s, i) - b_curr[i]);
        r[s] = 1.0 - sum / (2.0 * static_cast<double>(targets.size()));
    }
    return r;
}

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

void check_unit_interval(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::logic_error(std::string("solve_credibility: ") + what + " left [0,1]");
}

}  // namespace

CredibilityScores solve_credibility(const TrustGraph& g, const CredibilityOptions& opts) {
    if (opts.epsilon <= 0.0) throw std::invalid_argument("solve_credibility: epsilon must be > 0");
    const std::size_t n = g.node_count();

    CredibilityScores out;
    out.reliability.assign(n, 0.5);
    out.benevolence.assign(n, 0.5);

    for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
        std::vector<double> b_next = benevolence_step(g, out.reliability, out.benevolence);
        std::vector<double> r_next = reliability_step(g, b_next, out.reliability);
        check_unit_interval(b_next, "benevolence");
        check_unit_interval(r_next, "reliability");

        double delta = std::max(max_abs_diff(b_next, out.benevolence),
                                max_abs_diff(r_next, out.reliability));
        out.benevolence = std::move(b_next);
        out.reliability = std::move(r_next);
        out.iterations = iter;
        if (delta < opts.epsilon) {
            out.converged = true;
            break;
        }
    }

    out.credibility.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.credibility[i] = out.reliability[i] * out.benevolence[i];
    return out;
}

}  // namespace trustsiot
