// SPDX-License-Identifier: Apache-2.0
#include "photon_model.hpp"

#include <cmath>
#include <numeric>

#include "error.hpp"

namespace pnc {

PhotonNumberDistribution::PhotonNumberDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
        fail(ErrorCode::validation, "distribution needs n_cut >= 1");
    }
    double mass = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || p > 1.0) {
            fail(ErrorCode::validation, "probability outside [0,1]");
        }
        mass += p;
    }
    if (mass < 1.0 - kTruncationTol || mass > 1.0 + 1e-12) {
        fail(ErrorCode::validation, "distribution mass outside [1-1e-9, 1]");
    }
}

std::vector<double> poisson_pmf_truncated(double mu, std::size_t n_cut) {
    if (!(mu > 0.0)) {
        fail(ErrorCode::validation, "poisson mean must be positive");
    }
    std::vector<double> p(n_cut + 1);
    p[0] = std::exp(-mu);
    for (std::size_t n = 1; n <= n_cut; ++n) {
        p[n] = p[n - 1] * mu / static_cast<double>(n);
    }
    return p;
}

namespace {

PhotonNumberDistribution checked(std::vector<double> p, const char* what) {
    double mass = std::accumulate(p.begin(), p.end(), 0.0);
    if (1.0 - mass > kTruncationTol) {
        fail(ErrorCode::truncation_too_severe, std::string(what) +
                 ": tail mass beyond n_cut exceeds 1e-9, raise n_cut");
    }
    return PhotonNumberDistribution(std::move(p));
}

}  // namespace

PhotonNumberDistribution poisson_distribution(double mu, std::size_t n_cut) {
    if (n_cut < 1) fail(ErrorCode::validation, "n_cut must be >= 1");
    return checked(poisson_pmf_truncated(mu, n_cut), "poisson");
}

PhotonNumberDistribution thermal_distribution(double mu, std::size_t n_cut) {
    if (!(mu > 0.0)) fail(ErrorCode::validation, "thermal mean must be positive");
    if (n_cut < 1) fail(ErrorCode::validation, "n_cut must be >= 1");
    // p_n = mu^n / (1+mu)^(n+1), a geometric pmf with ratio mu/(1+mu).
    std::vector<double> p(n_cut + 1);
    double ratio = mu / (1.0 + mu);
    p[0] = 1.0 / (1.0 + mu);
    for (std::size_t n = 1; n <= n_cut; ++n) {
        p[n] = p[n - 1] * ratio;
    }
    return checked(std::move(p), "thermal");
}

PhotonNumberDistribution single_photon_distribution(std::size_t n_cut) {
    if (n_cut < 1) fail(ErrorCode::validation, "n_cut must be >= 1");
    std::vector<double> p(n_cut + 1, 0.0);
    p[1] = 1.0;
    return PhotonNumberDistribution(std::move(p));
}

PhotonNumberDistribution mixture_distribution(
    const std::vector<PhotonNumberDistribution>& components,
    const std::vector<double>& weights) {
    if (components.empty() || components.size() != weights.size()) {
        fail(ErrorCode::validation, "mixture: component/weight lengths differ");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) fail(ErrorCode::validation, "mixture: weights must be positive");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
        fail(ErrorCode::validation, "mixture: weights must sum to 1 within 1e-12");
    }
    std::size_t n_cut = components.front().n_cut();
    for (const auto& c : components) {
        if (c.n_cut() != n_cut) {
            fail(ErrorCode::validation, "mixture: components must share n_cut");
        }
    }
    std::vector<double> p(n_cut + 1, 0.0);
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (std::size_t n = 0; n <= n_cut; ++n) {
            p[n] += weights[i] * components[i][n];
        }
    }
    return PhotonNumberDistribution(std::move(p));
}

SourceKind SourceKind::poisson(double mu) {
    SourceKind s;
    s.tag = Tag::poisson;
    s.mu = mu;
    return s;
}

SourceKind SourceKind::thermal(double mu) {
    SourceKind s;
    s.tag = Tag::thermal;
    s.mu = mu;
    return s;
}

SourceKind SourceKind::single_photon() {
    SourceKind s;
    s.tag = Tag::single_photon;
    s.mu = 1.0;
    return s;
}

SourceKind SourceKind::mixture(std::vector<SourceKind> components,
                               std::vector<double> weights) {
    if (components.empty() || components.size() != weights.size()) {
        fail(ErrorCode::validation, "mixture: component/weight lengths differ");
    }
    SourceKind s;
    s.tag = Tag::mixture;
    s.components = std::move(components);
    s.weights = std::move(weights);
    for (std::size_t i = 0; i < s.components.size(); ++i) {
        s.mu += s.weights[i] * s.components[i].mu;
    }
    return s;
}

PhotonNumberDistribution SourceKind::realise(std::size_t n_cut) const {
    switch (tag) {
        case Tag::poisson:
            return poisson_distribution(mu, n_cut);
        case Tag::thermal:
            return thermal_distribution(mu, n_cut);
        case Tag::single_photon:
            return single_photon_distribution(n_cut);
        case Tag::mixture: {
            std::vector<PhotonNumberDistribution> parts;
            parts.reserve(components.size());
            for (const auto& c : components) parts.push_back(c.realise(n_cut));
            return mixture_distribution(parts, weights);
        }
    }
    fail(ErrorCode::validation, "source: unknown tag");
}

PhotonNumberDistribution SourceKind::realise() const {
    for (std::size_t n_cut = 32; n_cut <= 8192; n_cut *= 2) {
        try {
            return realise(n_cut);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::truncation_too_severe) throw;
        }
    }
    fail(ErrorCode::truncation_too_severe,
         "source tail mass does not fall below 1e-9 by n_cut=8192");
}

double mean_photon_number(const PhotonNumberDistribution& dist) {
    double mu = 0.0;
    for (std::size_t n = 0; n <= dist.n_cut(); ++n) {
        mu += static_cast<double>(n) * dist[n];
    }
    return mu;
}

double correlation_from_distribution(const PhotonNumberDistribution& dist,
                                     unsigned order) {
    if (order < 2 || order > 4) {
        fail(ErrorCode::validation, "correlation order must be 2, 3 or 4");
    }
    double mu = mean_photon_number(dist);
    if (mu == 0.0) {
        fail(ErrorCode::zero_mean_source, "correlation undefined for zero mean");
    }
    long double moment = 0.0L;
    for (std::size_t n = order; n <= dist.n_cut(); ++n) {
        long double factor = 1.0L;
        for (unsigned k = 0; k < order; ++k) {
            factor *= static_cast<long double>(n - k);
        }
        moment += factor * static_cast<long double>(dist[n]);
    }
    return static_cast<double>(moment / std::pow(static_cast<long double>(mu),
                                                 static_cast<int>(order)));
}

}  // namespace pnc
