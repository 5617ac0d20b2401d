#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "tsk/dataset.hpp"
#include "tsk/error.hpp"
#include "tsk/rng.hpp"

using namespace tsk;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "tsk_dataset_test";
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& text) {
    const std::string full = dir.file(name);
    std::ofstream out(full, std::ios::binary);
    out << text;
    return full;
}

} // namespace

TEST_CASE("load_csv basics") {
    TempDir dir;
    SUBCASE("plain numeric table") {
        const auto path = write_file(dir, "plain.csv", "1,2,3\n4,5,6\n7,8,9\n");
        const Dataset data = load_csv(path, false);
        CHECK(data.num_samples() == 3);
        CHECK(data.num_features() == 2);
        CHECK(data.features(1, 0) == 4.0);
        CHECK(data.targets == std::vector<double>{3.0, 6.0, 9.0});
    }
    SUBCASE("header row") {
        const auto path = write_file(dir, "header.csv", "x1,x2,y\n1,2,3\n");
        const Dataset data = load_csv(path, true);
        CHECK(data.num_samples() == 1);
        CHECK(data.feature_names == std::vector<std::string>{"x1", "x2"});
    }
    SUBCASE("windows line endings and trailing blank line") {
        const auto path = write_file(dir, "crlf.csv", "1,2\r\n3,4\r\n\r\n");
        const Dataset data = load_csv(path, false);
        CHECK(data.num_samples() == 2);
        CHECK(data.targets == std::vector<double>{2.0, 4.0});
    }
    SUBCASE("non-numeric cell names its position") {
        const auto path = write_file(
            dir, "bad.csv", "1,2\n3,4\n5,6\n7,8\n9,oops\n");
        try {
            load_csv(path, false);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string message = e.what();
            CHECK(message.find("row 5") != std::string::npos);
            CHECK(message.find("column 2") != std::string::npos);
        }
    }
    SUBCASE("ragged rows are rejected") {
        const auto path = write_file(dir, "ragged.csv", "1,2,3\n4,5\n");
        CHECK_THROWS_AS(load_csv(path, false), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv(dir.file("absent.csv"), false), DataError);
    }
    SUBCASE("single column is features-free and rejected") {
        const auto path = write_file(dir, "narrow.csv", "1\n2\n");
        CHECK_THROWS_AS(load_csv(path, false), DataError);
    }
}

TEST_CASE("save/load round trip") {
    TempDir dir;
    Dataset data;
    data.features = Matrix(2, 2);
    data.features(0, 0) = 0.1234567890123456;
    data.features(0, 1) = -7.5;
    data.features(1, 0) = 1e-9;
    data.features(1, 1) = 3.0;
    data.targets = {1.5, -2.25};
    data.feature_names = {"a", "b"};

    const std::string path = dir.file("round.csv");
    save_csv(data, path, true);
    const Dataset back = load_csv(path, true);
    CHECK(back.features(0, 0) == data.features(0, 0));
    CHECK(back.features(1, 0) == data.features(1, 0));
    CHECK(back.targets == data.targets);
    CHECK(back.feature_names == data.feature_names);
}

TEST_CASE("fit_transform standardizes the training split") {
    Dataset train;
    train.features = Matrix(3, 1);
    train.features(0, 0) = 1.0;
    train.features(1, 0) = 2.0;
    train.features(2, 0) = 3.0;
    train.targets = {5.0, 7.0, 6.0};

    const auto [normalized, params] = fit_transform(train);
    // Population std of (1,2,3) is sqrt(2/3); standardized endpoints follow.
    CHECK(normalized.features(0, 0) ==
          doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(normalized.features(1, 0) == doctest::Approx(0.0));
    CHECK(normalized.features(2, 0) ==
          doctest::Approx(1.224744871391589).epsilon(1e-12));
    CHECK(params.target_mean == doctest::Approx(6.0));
    CHECK(normalized.targets[0] == doctest::Approx(-1.0));
    CHECK(normalized.targets[1] == doctest::Approx(1.0));
    CHECK(normalized.targets[2] == doctest::Approx(0.0));

    SUBCASE("idempotent on already-standardized data") {
        const auto [twice, params2] = fit_transform(normalized);
        for (int n = 0; n < 3; ++n) {
            CHECK(twice.features(n, 0) ==
                  doctest::Approx(normalized.features(n, 0)).epsilon(1e-12));
        }
        (void)params2;
    }
    SUBCASE("mean and variance invariants on random data") {
        Rng rng(404);
        Dataset random;
        random.features = Matrix(64, 3);
        for (int n = 0; n < 64; ++n)
            for (int m = 0; m < 3; ++m)
                random.features(n, m) = rng.uniform(-5.0, 9.0);
        random.targets.assign(64, 0.0);
        for (double& t : random.targets) t = rng.uniform(0.0, 4.0);

        const auto [standardized, stats] = fit_transform(random);
        (void)stats;
        for (int m = 0; m < 3; ++m) {
            double mean = 0.0;
            for (int n = 0; n < 64; ++n) mean += standardized.features(n, m);
            mean /= 64.0;
            double var = 0.0;
            for (int n = 0; n < 64; ++n) {
                const double d = standardized.features(n, m) - mean;
                var += d * d;
            }
            var /= 64.0;
            CHECK(std::abs(mean) < 1e-10);
            CHECK(std::abs(var - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("constant features") {
    Dataset train;
    train.features = Matrix(3, 2);
    for (int n = 0; n < 3; ++n) {
        train.features(n, 0) = 4.0; // constant
        train.features(n, 1) = n;
    }
    train.targets = {0.0, 1.0, 2.0};

    CHECK_THROWS_AS(fit_transform(train), DataError);

    const auto [reduced, params] = fit_transform(train, true);
    CHECK(reduced.num_features() == 1);
    CHECK(params.kept_columns == std::vector<int>{1});

    // apply_preprocessing selects the same surviving columns.
    Dataset other;
    other.features = Matrix(1, 2);
    other.features(0, 0) = 99.0;
    other.features(0, 1) = 1.0;
    other.targets = {5.0};
    const Dataset mapped = apply_preprocessing(params, other);
    CHECK(mapped.num_features() == 1);
    CHECK(mapped.features(0, 0) ==
          doctest::Approx((1.0 - 1.0) / params.feature_stds[0]));
}

TEST_CASE("apply_preprocessing uses training statistics only") {
    Dataset train;
    train.features = Matrix(4, 1);
    for (int n = 0; n < 4; ++n) train.features(n, 0) = n; // mean 1.5
    train.targets = {0.0, 0.0, 0.0, 0.0};
    const auto [unused, params] = fit_transform(train);
    (void)unused;

    Dataset test;
    test.features = Matrix(2, 1);
    test.features(0, 0) = 100.0;
    test.features(1, 0) = 101.0;
    test.targets = {1.0, 2.0};
    const Dataset mapped = apply_preprocessing(params, test);

    // Far from standardized: the training mean, not the test mean, was used.
    CHECK(mapped.features(0, 0) > 50.0);
    CHECK(mapped.features(1, 0) - mapped.features(0, 0) ==
          doctest::Approx(1.0 / params.feature_stds[0]));
    CHECK(mapped.targets[0] == doctest::Approx(1.0 - params.target_mean));
}

TEST_CASE("split_indices") {
    SUBCASE("sizes follow round(fraction * n)") {
        const auto [train_idx, test_idx] = split_indices(10, SplitSpec{0.7, 3});
        CHECK(train_idx.size() == 7);
        CHECK(test_idx.size() == 3);
    }
    SUBCASE("partition property") {
        const auto [train_idx, test_idx] = split_indices(23, SplitSpec{0.7, 9});
        std::vector<bool> seen(23, false);
        for (const int i : train_idx) {
            CHECK(!seen[static_cast<std::size_t>(i)]);
            seen[static_cast<std::size_t>(i)] = true;
        }
        for (const int i : test_idx) {
            CHECK(!seen[static_cast<std::size_t>(i)]);
            seen[static_cast<std::size_t>(i)] = true;
        }
        for (const bool s : seen) CHECK(s);
    }
    SUBCASE("deterministic per seed") {
        const auto first = split_indices(50, SplitSpec{0.7, 42});
        const auto second = split_indices(50, SplitSpec{0.7, 42});
        CHECK(first.first == second.first);
        CHECK(first.second == second.second);
        const auto other = split_indices(50, SplitSpec{0.7, 43});
        CHECK(first.first != other.first);
    }
    SUBCASE("degenerate sizes still leave both sides nonempty") {
        const auto tiny = split_indices(2, SplitSpec{0.99, 1});
        CHECK(tiny.first.size() == 1);
        CHECK(tiny.second.size() == 1);
    }
}

TEST_CASE("subset keeps rows aligned with targets") {
    Dataset data;
    data.features = Matrix(4, 2);
    for (int n = 0; n < 4; ++n) {
        data.features(n, 0) = n;
        data.features(n, 1) = 10.0 * n;
    }
    data.targets = {0.0, 1.0, 2.0, 3.0};
    const Dataset picked = subset(data, std::vector<int>{3, 1});
    CHECK(picked.num_samples() == 2);
    CHECK(picked.features(0, 1) == 30.0);
    CHECK(picked.targets == std::vector<double>{3.0, 1.0});
}
