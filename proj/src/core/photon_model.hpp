// SPDX-License-Identifier: Apache-2.0
//
// Closed-form photon-number distributions of a pulsed source and the map
// from a distribution to its normalised zero-delay correlation functions.
#pragma once

#include <cstddef>
#include <vector>

namespace pnc {

/// Diagonal photon-number distribution p_0..p_{n_cut}.
///
/// Invariants: each p_n in [0,1]; the total mass lies in [1 - 1e-9, 1]
/// (truncation may only remove mass, never add); n_cut >= 1.
class PhotonNumberDistribution {
  public:
    /// Validates the invariants above; throws Error(validation) on breach.
    explicit PhotonNumberDistribution(std::vector<double> probs);

    const std::vector<double>& probs() const { return probs_; }
    std::size_t n_cut() const { return probs_.size() - 1; }
    double operator[](std::size_t n) const { return probs_[n]; }

  private:
    std::vector<double> probs_;
};

inline constexpr double kTruncationTol = 1e-9;

PhotonNumberDistribution poisson_distribution(double mu, std::size_t n_cut);
PhotonNumberDistribution thermal_distribution(double mu, std::size_t n_cut);
PhotonNumberDistribution single_photon_distribution(std::size_t n_cut);

/// Weighted sum of component distributions. Weights must be positive and
/// sum to 1 within 1e-12; all components must share one n_cut. The result
/// is never renormalised: malformed weights are an error, not a fixup.
PhotonNumberDistribution mixture_distribution(
    const std::vector<PhotonNumberDistribution>& components,
    const std::vector<double>& weights);

/// Source description used where a pulse train has to be generated rather
/// than a fixed truncation chosen up front.
struct SourceKind {
    enum class Tag { poisson, thermal, single_photon, mixture };

    Tag tag = Tag::poisson;
    double mu = 0.0;  // mean photons per pulse (poisson/thermal)
    std::vector<SourceKind> components;
    std::vector<double> weights;

    static SourceKind poisson(double mu);
    static SourceKind thermal(double mu);
    static SourceKind single_photon();
    static SourceKind mixture(std::vector<SourceKind> components,
                              std::vector<double> weights);

    /// Truncates at the smallest power-of-two n_cut (>= 25) whose tail mass
    /// is below the 1e-9 tolerance.
    PhotonNumberDistribution realise() const;
    PhotonNumberDistribution realise(std::size_t n_cut) const;
};

double mean_photon_number(const PhotonNumberDistribution& dist);

/// g_m(0) = sum_n p_n * n(n-1)...(n-m+1) / mu^m for m in {2,3,4}.
/// Summed in ascending n; terms are nonnegative so there is no cancellation.
double correlation_from_distribution(const PhotonNumberDistribution& dist,
                                     unsigned order);

/// Truncated Poisson pmf vector without the tail-mass check, used where the
/// tail is folded into an explicit residual term instead.
std::vector<double> poisson_pmf_truncated(double mu, std::size_t n_cut);

}  // namespace pnc
