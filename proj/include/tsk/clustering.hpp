#pragma once

#include <cstdint>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/rng.hpp"

namespace tsk {

/// Cluster centers plus per-sample memberships. Fuzzy c-means yields
/// fractional memberships whose columns sum to 1; k-means yields hard 0/1
/// assignments with exactly one 1 per column.
struct ClusterResult {
    Matrix centers;     // R x M
    Matrix memberships; // R x N
};

inline constexpr int kClusteringMaxIterations = 100;
inline constexpr double kClusteringTolerance = 1e-5;

/// Fuzzy c-means with fuzzifier 2. Centers start at R distinct samples
/// drawn from the stream; iteration stops when no center moves more than
/// the tolerance.
ClusterResult fuzzy_c_means(const Matrix& X, int num_clusters, Rng& rng);
ClusterResult fuzzy_c_means(const Matrix& X, int num_clusters, std::uint64_t seed);

/// Lloyd k-means with the same seeding. A cluster that loses all members is
/// reseeded to the sample farthest from its assigned center. If wcss_trace
/// is given, the within-cluster sum of squares after each iteration is
/// appended to it.
ClusterResult k_means(const Matrix& X, int num_clusters, Rng& rng,
                      std::vector<double>* wcss_trace = nullptr);
ClusterResult k_means(const Matrix& X, int num_clusters, std::uint64_t seed,
                      std::vector<double>* wcss_trace = nullptr);

} // namespace tsk
