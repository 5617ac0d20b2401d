#include "tsk/synthetic.hpp"

#include <string>

#include "tsk/error.hpp"
#include "tsk/rng.hpp"

namespace tsk {

Dataset make_linear_dataset(int samples, std::uint64_t seed) {
    if (samples < 1) throw ParameterError("sample count must be positive");
    Rng rng(seed);
    Dataset data;
    data.features = Matrix(samples, 2);
    data.targets.resize(static_cast<std::size_t>(samples));
    data.feature_names = {"x1", "x2"};
    for (int n = 0; n < samples; ++n) {
        const double x1 = rng.uniform(-1.0, 1.0);
        const double x2 = rng.uniform(-1.0, 1.0);
        data.features(n, 0) = x1;
        data.features(n, 1) = x2;
        data.targets[static_cast<std::size_t>(n)] = 2.0 * x1 - x2;
    }
    return data;
}

Dataset make_blob_dataset(const BlobSpec& spec) {
    if (spec.samples < 1 || spec.features < 1 || spec.blobs < 1)
        throw ParameterError("blob dataset needs positive samples, features, and blobs");
    if (spec.noise < 0.0) throw ParameterError("noise level must be nonnegative");

    Rng rng(spec.seed);
    const int G = spec.blobs;
    const int M = spec.features;

    // One dominant linear trend shared by every sample, plus a smaller
    // affine correction per blob. Real tabular benchmarks behave this way
    // (strong global effects, mild local structure), and it is what makes
    // a cluster-initialized rule base both effective and redundant.
    std::vector<double> trend(static_cast<std::size_t>(M));
    for (double& t : trend) t = rng.uniform(-1.0, 1.0);

    Matrix centers(G, M);
    std::vector<double> scales(static_cast<std::size_t>(G));
    std::vector<double> biases(static_cast<std::size_t>(G));
    Matrix slopes(G, M);
    for (int g = 0; g < G; ++g) {
        for (int m = 0; m < M; ++m) {
            centers(g, m) = rng.uniform(-2.0, 2.0);
            slopes(g, m) = rng.uniform(-0.5, 0.5);
        }
        scales[static_cast<std::size_t>(g)] = rng.uniform(0.3, 0.7);
        biases[static_cast<std::size_t>(g)] = rng.uniform(-1.0, 1.0);
    }

    Dataset data;
    data.features = Matrix(spec.samples, M);
    data.targets.resize(static_cast<std::size_t>(spec.samples));
    data.feature_names.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) data.feature_names.push_back("x" + std::to_string(m + 1));

    for (int n = 0; n < spec.samples; ++n) {
        const int g = static_cast<int>(rng.below(static_cast<std::uint64_t>(G)));
        double y = biases[static_cast<std::size_t>(g)];
        for (int m = 0; m < M; ++m) {
            const double offset = scales[static_cast<std::size_t>(g)] * rng.normal();
            const double x = centers(g, m) + offset;
            data.features(n, m) = x;
            y += trend[static_cast<std::size_t>(m)] * x + slopes(g, m) * offset;
        }
        data.targets[static_cast<std::size_t>(n)] = y + spec.noise * rng.normal();
    }
    return data;
}

} // namespace tsk
