// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo stand-in for a four-detector HBT arrangement: a pulsed source
// split onto four low-efficiency threshold detectors, per-pulse click
// records, coincidence counting and g_m estimation with counting errors.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "correlation.hpp"
#include "photon_model.hpp"

namespace pnc {

inline constexpr int kNumDetectors = 4;

struct DetectorConfig {
    double efficiency = 0.005;   // per-photon detection probability
    double eta0_cap = 0.01;      // trusted ceiling on the efficiency
    std::array<double, 4> split_probs{0.25, 0.25, 0.25, 0.25};
    double dark_count_prob = 0.0;  // per pulse per detector

    void validate() const;
};

struct DetectionRecord {
    std::uint64_t pulse_index = 0;
    std::array<bool, 4> clicks{};
};

/// Zero-delay coincidence tallies. Internally one counter per 4-bit click
/// pattern, so merging partial counts is plain addition.
struct CoincidenceCounts {
    std::uint64_t n_pulses = 0;
    std::array<std::uint64_t, 16> pattern{};  // index = click bitmask

    std::uint64_t singles(int i) const;
    std::uint64_t pairs(int i, int j) const;
    std::uint64_t triples(int i, int j, int k) const;
    std::uint64_t quads() const;

    void add(const DetectionRecord& rec);
    void merge(const CoincidenceCounts& other);
    void check_invariants() const;  // every count <= n_pulses etc.
};

using RecordSink = std::function<void(const DetectionRecord&)>;

/// Generates the pulse train record by record. Per pulse: sample the photon
/// number, route each photon independently through the splitter, detect it
/// with probability `efficiency`; a detector clicks on >= 1 detected photon
/// or a dark count. Deterministic in (source, n_pulses, cfg, seed): pulses
/// are generated in fixed batches whose RNGs are derived from the seed, so
/// batch-parallel generation would reproduce the sequential stream.
void simulate_pulse_train(const SourceKind& source, std::uint64_t n_pulses,
                          const DetectorConfig& cfg, std::uint64_t seed,
                          const RecordSink& sink);

/// Same run, reduced directly into coincidence counts.
CoincidenceCounts simulate_counts(const SourceKind& source,
                                  std::uint64_t n_pulses,
                                  const DetectorConfig& cfg,
                                  std::uint64_t seed);

CoincidenceCounts count_coincidences(const std::vector<DetectionRecord>& records);

/// Count-ratio estimators at zero delay, averaged over all detector
/// combinations of each order:
///   g2_ij = C_ij N / (S_i S_j),  g3_ijk = C_ijk N^2 / (S_i S_j S_k),
///   g4 = C_0123 N^3 / (S_0 S_1 S_2 S_3).
/// Poissonian counting errors propagated in quadrature. Throws
/// Error(insufficient_counts) when a required single or coincidence count
/// is zero, leaving sigma undefined.
CorrelationMeasurement estimate_correlation(const CoincidenceCounts& counts,
                                            unsigned order);
std::vector<CorrelationMeasurement> estimate_correlations(
    const CoincidenceCounts& counts);

// Newline-delimited record format: "<pulse_index> <c0><c1><c2><c3>".
void write_record(std::ostream& os, const DetectionRecord& rec);
DetectionRecord parse_record(const std::string& line, std::uint64_t line_no);
std::vector<DetectionRecord> read_record_file(std::istream& is);

}  // namespace pnc
