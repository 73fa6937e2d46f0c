#pragma once

#include "gsum/harness.hpp"

namespace gsum {

// Effective run configuration: built-in defaults, overridden by a JSON
// config file, overridden again by command-line flags. The CLI echoes the
// result into the output directory.
struct RunConfig {
    uint64_t seed = 1;
    std::string out_dir = "out";
    std::string data_dir;  // empty = compiled-in data directory
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    GuidanceKind kind = GuidanceKind::sentences;
    Regime train_regime = Regime::oracle;
    Regime test_regime = Regime::automatic;
    GSumConfig model;  // vocab_size is filled from the corpus at train time
    GuidanceConfig guidance;
    OptimSettings optim;
    GSumModel::BeamParams beam;
    int max_steps = 2000;
    int eval_every = 200;
    int vocab_min_freq = 1;
    int vocab_max_size = 20000;
    bool log_val_rouge = false;

    static RunConfig defaults();
    // Defaults overridden by the file's fields (missing fields keep their
    // defaults; unknown fields are rejected).
    static RunConfig from_file(const std::string& path);
    void merge_json_text(const std::string& text, const std::string& origin);

    std::string to_json_text() const;
    void echo(const std::string& path) const;

    ExperimentSpec to_spec() const;
};

}  // namespace gsum
