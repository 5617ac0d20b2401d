#include "tsk/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsk/error.hpp"

namespace tsk {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

// Pick num_clusters distinct rows of X as the starting centers.
Matrix initial_centers(const Matrix& X, int num_clusters, Rng& rng) {
    const auto picks = rng.sample_without_replacement(X.rows(), num_clusters);
    Matrix centers(num_clusters, X.cols());
    for (int r = 0; r < num_clusters; ++r) {
        const auto row = X.row(picks[static_cast<std::size_t>(r)]);
        for (int m = 0; m < X.cols(); ++m) centers(r, m) = row[m];
    }
    return centers;
}

void check_arguments(const Matrix& X, int num_clusters) {
    if (num_clusters < 1) {
        throw ParameterError("number of clusters must be positive, got " +
                             std::to_string(num_clusters));
    }
    if (X.rows() < num_clusters) {
        throw ParameterError("cannot form " + std::to_string(num_clusters) +
                             " clusters from " + std::to_string(X.rows()) +
                             " samples");
    }
}

// Memberships for fuzzifier 2: u_{r,n} = 1 / sum_j (d_rn / d_jn)^2. A sample
// sitting exactly on one or more centers gets its membership split evenly
// over the coincident centers.
void fcm_memberships(const Matrix& X, const Matrix& centers, Matrix& U) {
    const int R = centers.rows();
    const int N = X.rows();
    std::vector<double> dist2(static_cast<std::size_t>(R));
    for (int n = 0; n < N; ++n) {
        const auto x = X.row(n);
        int zero_count = 0;
        for (int r = 0; r < R; ++r) {
            dist2[static_cast<std::size_t>(r)] = squared_distance(x, centers.row(r));
            if (dist2[static_cast<std::size_t>(r)] == 0.0) ++zero_count;
        }
        if (zero_count > 0) {
            for (int r = 0; r < R; ++r) {
                U(r, n) = dist2[static_cast<std::size_t>(r)] == 0.0
                              ? 1.0 / zero_count
                              : 0.0;
            }
            continue;
        }
        for (int r = 0; r < R; ++r) {
            double denom = 0.0;
            for (int j = 0; j < R; ++j) {
                denom += dist2[static_cast<std::size_t>(r)] /
                         dist2[static_cast<std::size_t>(j)];
            }
            U(r, n) = 1.0 / denom;
        }
    }
}

} // namespace

ClusterResult fuzzy_c_means(const Matrix& X, int num_clusters, Rng& rng) {
    check_arguments(X, num_clusters);
    const int R = num_clusters;
    const int N = X.rows();
    const int M = X.cols();

    Matrix centers = initial_centers(X, R, rng);
    Matrix U(R, N);

    for (int iter = 0; iter < kClusteringMaxIterations; ++iter) {
        fcm_memberships(X, centers, U);

        double max_shift = 0.0;
        for (int r = 0; r < R; ++r) {
            double weight_sum = 0.0;
            std::vector<double> numer(static_cast<std::size_t>(M), 0.0);
            for (int n = 0; n < N; ++n) {
                const double u2 = U(r, n) * U(r, n);
                weight_sum += u2;
                const auto x = X.row(n);
                for (int m = 0; m < M; ++m) numer[static_cast<std::size_t>(m)] += u2 * x[m];
            }
            if (weight_sum == 0.0) continue; // center has no pull; leave it
            for (int m = 0; m < M; ++m) {
                const double updated = numer[static_cast<std::size_t>(m)] / weight_sum;
                max_shift = std::max(max_shift, std::abs(updated - centers(r, m)));
                centers(r, m) = updated;
            }
        }
        if (max_shift <= kClusteringTolerance) break;
    }

    // Memberships consistent with the final centers.
    fcm_memberships(X, centers, U);
    return {std::move(centers), std::move(U)};
}

ClusterResult fuzzy_c_means(const Matrix& X, int num_clusters, std::uint64_t seed) {
    Rng rng(seed);
    return fuzzy_c_means(X, num_clusters, rng);
}

ClusterResult k_means(const Matrix& X, int num_clusters, Rng& rng,
                      std::vector<double>* wcss_trace) {
    check_arguments(X, num_clusters);
    const int R = num_clusters;
    const int N = X.rows();
    const int M = X.cols();

    Matrix centers = initial_centers(X, R, rng);
    std::vector<int> assignment(static_cast<std::size_t>(N), -1);

    for (int iter = 0; iter < kClusteringMaxIterations; ++iter) {
        bool changed = false;
        for (int n = 0; n < N; ++n) {
            const auto x = X.row(n);
            int best = 0;
            double best_dist = squared_distance(x, centers.row(0));
            for (int r = 1; r < R; ++r) {
                const double d = squared_distance(x, centers.row(r));
                if (d < best_dist) {
                    best_dist = d;
                    best = r;
                }
            }
            if (assignment[static_cast<std::size_t>(n)] != best) {
                assignment[static_cast<std::size_t>(n)] = best;
                changed = true;
            }
        }

        // Reseed any emptied cluster to the sample farthest from its own
        // center, so every cluster keeps at least one member.
        std::vector<int> counts(static_cast<std::size_t>(R), 0);
        for (int n = 0; n < N; ++n) ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(n)])];
        for (int r = 0; r < R; ++r) {
            if (counts[static_cast<std::size_t>(r)] > 0) continue;
            int farthest = -1;
            double farthest_dist = -1.0;
            for (int n = 0; n < N; ++n) {
                const int a = assignment[static_cast<std::size_t>(n)];
                if (counts[static_cast<std::size_t>(a)] <= 1) continue;
                const double d = squared_distance(X.row(n), centers.row(a));
                if (d > farthest_dist) {
                    farthest_dist = d;
                    farthest = n;
                }
            }
            if (farthest < 0) break; // fewer distinct samples than clusters
            --counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(farthest)])];
            assignment[static_cast<std::size_t>(farthest)] = r;
            counts[static_cast<std::size_t>(r)] = 1;
            changed = true;
        }

        for (int r = 0; r < R; ++r) {
            if (counts[static_cast<std::size_t>(r)] == 0) continue;
            for (int m = 0; m < M; ++m) centers(r, m) = 0.0;
        }
        for (int n = 0; n < N; ++n) {
            const int r = assignment[static_cast<std::size_t>(n)];
            const auto x = X.row(n);
            for (int m = 0; m < M; ++m) centers(r, m) += x[m];
        }
        for (int r = 0; r < R; ++r) {
            const int c = counts[static_cast<std::size_t>(r)];
            if (c == 0) continue;
            for (int m = 0; m < M; ++m) centers(r, m) /= c;
        }

        if (wcss_trace != nullptr) {
            double wcss = 0.0;
            for (int n = 0; n < N; ++n) {
                wcss += squared_distance(
                    X.row(n), centers.row(assignment[static_cast<std::size_t>(n)]));
            }
            wcss_trace->push_back(wcss);
        }

        if (!changed) break;
    }

    Matrix U(R, N);
    for (int n = 0; n < N; ++n) U(assignment[static_cast<std::size_t>(n)], n) = 1.0;
    return {std::move(centers), std::move(U)};
}

ClusterResult k_means(const Matrix& X, int num_clusters, std::uint64_t seed,
                      std::vector<double>* wcss_trace) {
    Rng rng(seed);
    return k_means(X, num_clusters, rng, wcss_trace);
}

} // namespace tsk
