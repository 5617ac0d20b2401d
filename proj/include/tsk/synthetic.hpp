#pragma once

#include <cstdint>

#include "tsk/dataset.hpp"

namespace tsk {

/// Noiseless linear task y = 2*x1 - x2 with features uniform in [-1, 1].
/// A two-rule TSK model represents it exactly, so trained RMSE near zero is
/// the expected outcome, not a tuned one.
Dataset make_linear_dataset(int samples, std::uint64_t seed);

/// Mixture-of-blobs regression task: samples cluster around `blobs` centers
/// and the response is a separate affine map per blob plus Gaussian noise.
/// A rule base needs roughly one rule per blob, which makes the task a
/// natural fit for pruning experiments.
struct BlobSpec {
    int samples = 1000;
    int features = 4;
    int blobs = 6;
    double noise = 0.1;
    std::uint64_t seed = 0;
};

Dataset make_blob_dataset(const BlobSpec& spec);

} // namespace tsk
