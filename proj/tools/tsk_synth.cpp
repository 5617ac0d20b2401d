// Writes the built-in synthetic regression tasks to CSV, handy for trying
// the CLI without hunting down a dataset.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsk/dataset.hpp"
#include "tsk/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic regression CSVs"};

    std::string task = "blobs";
    std::string out_path;
    bool header = false;
    tsk::BlobSpec spec;
    app.add_option("--task", task, "linear: y = 2*x1 - x2; blobs: per-cluster affine response")
        ->check(CLI::IsMember({"linear", "blobs"}));
    app.add_option("--samples", spec.samples, "Sample count");
    app.add_option("--features", spec.features, "Feature count (blobs task)");
    app.add_option("--blobs", spec.blobs, "Cluster count (blobs task)");
    app.add_option("--noise", spec.noise, "Target noise std (blobs task)");
    app.add_option("--seed", spec.seed, "Generator seed");
    app.add_option("--out", out_path, "Output CSV path")->required();
    app.add_flag("--header", header, "Write a header row");

    CLI11_PARSE(app, argc, argv);

    try {
        const tsk::Dataset data = task == "linear"
                                      ? tsk::make_linear_dataset(spec.samples, spec.seed)
                                      : tsk::make_blob_dataset(spec);
        tsk::save_csv(data, out_path, header);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
