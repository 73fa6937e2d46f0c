#include "gsum/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gsum {

using nlohmann::json;

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.model.d_model = 64;
    cfg.model.n_heads = 4;
    cfg.model.d_ff = 128;
    cfg.model.n_enc = 2;
    cfg.model.n_dec = 2;
    cfg.model.dropout_rate = 0.1;
    return cfg;
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& into) {
    if (auto it = obj.find(key); it != obj.end()) into = it->get<T>();
}

void check_known(const json& obj, std::initializer_list<const char*> known,
                 const std::string& origin, const std::string& section) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw std::invalid_argument(origin + ": unknown key \"" + key + "\" in " +
                                        section);
    }
}

}  // namespace

void RunConfig::merge_json_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(origin + ": " + e.what());
    }
    check_known(root,
                {"seed", "out_dir", "data_dir", "corpus", "guidance_kind", "train_regime",
                 "test_regime", "model", "guidance", "optim", "beam", "train"},
                origin, "config");
    take(root, "seed", seed);
    take(root, "out_dir", out_dir);
    take(root, "data_dir", data_dir);
    if (auto it = root.find("corpus"); it != root.end()) {
        check_known(*it, {"train", "valid", "test"}, origin, "corpus");
        take(*it, "train", train_path);
        take(*it, "valid", valid_path);
        take(*it, "test", test_path);
    }
    if (auto it = root.find("guidance_kind"); it != root.end())
        kind = guidance_kind_from_string(it->get<std::string>());
    if (auto it = root.find("train_regime"); it != root.end())
        train_regime = regime_from_string(it->get<std::string>());
    if (auto it = root.find("test_regime"); it != root.end())
        test_regime = regime_from_string(it->get<std::string>());
    if (auto it = root.find("model"); it != root.end()) {
        check_known(*it,
                    {"d_model", "n_heads", "d_ff", "n_enc", "n_dec", "max_src_len",
                     "max_guid_len", "max_tgt_len", "dropout", "label_smoothing"},
                    origin, "model");
        take(*it, "d_model", model.d_model);
        take(*it, "n_heads", model.n_heads);
        take(*it, "d_ff", model.d_ff);
        take(*it, "n_enc", model.n_enc);
        take(*it, "n_dec", model.n_dec);
        take(*it, "max_src_len", model.max_src_len);
        take(*it, "max_guid_len", model.max_guid_len);
        take(*it, "max_tgt_len", model.max_tgt_len);
        take(*it, "dropout", model.dropout_rate);
        take(*it, "label_smoothing", model.label_smoothing);
    }
    if (auto it = root.find("guidance"); it != root.end()) {
        check_known(*it,
                    {"n_ext", "n_rel", "n_kw", "k_retrieve", "window", "damping", "tol",
                     "max_iters", "k1", "b", "greedy_mode"},
                    origin, "guidance");
        take(*it, "n_ext", guidance.n_ext);
        take(*it, "n_rel", guidance.n_rel);
        take(*it, "n_kw", guidance.n_kw);
        take(*it, "k_retrieve", guidance.k_retrieve);
        take(*it, "window", guidance.textrank.window);
        take(*it, "damping", guidance.textrank.damping);
        take(*it, "tol", guidance.textrank.tol);
        take(*it, "max_iters", guidance.textrank.max_iters);
        take(*it, "k1", guidance.bm25.k1);
        take(*it, "b", guidance.bm25.b);
        if (auto mode = it->find("greedy_mode"); mode != it->end()) {
            const auto name = mode->get<std::string>();
            if (name == "improve")
                guidance.greedy_mode = GreedyMode::improve;
            else if (name == "literal")
                guidance.greedy_mode = GreedyMode::literal;
            else
                throw std::invalid_argument(origin + ": unknown greedy_mode \"" + name + "\"");
        }
    }
    if (auto it = root.find("optim"); it != root.end()) {
        check_known(*it, {"lr", "beta1", "beta2", "eps", "batch_size"}, origin, "optim");
        take(*it, "lr", optim.lr);
        take(*it, "beta1", optim.beta1);
        take(*it, "beta2", optim.beta2);
        take(*it, "eps", optim.eps);
        take(*it, "batch_size", optim.batch_size);
    }
    if (auto it = root.find("beam"); it != root.end()) {
        check_known(*it, {"beam", "max_len", "length_alpha", "block_repeat_trigram"}, origin,
                    "beam");
        take(*it, "beam", beam.beam);
        take(*it, "max_len", beam.max_len);
        take(*it, "length_alpha", beam.length_alpha);
        take(*it, "block_repeat_trigram", beam.block_repeat_trigram);
    }
    if (auto it = root.find("train"); it != root.end()) {
        check_known(*it,
                    {"max_steps", "eval_every", "vocab_min_freq", "vocab_max_size",
                     "log_val_rouge"},
                    origin, "train");
        take(*it, "max_steps", max_steps);
        take(*it, "eval_every", eval_every);
        take(*it, "vocab_min_freq", vocab_min_freq);
        take(*it, "vocab_max_size", vocab_max_size);
        take(*it, "log_val_rouge", log_val_rouge);
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    RunConfig cfg = defaults();
    cfg.merge_json_text(ss.str(), path);
    return cfg;
}

std::string RunConfig::to_json_text() const {
    json root;
    root["seed"] = seed;
    root["out_dir"] = out_dir;
    root["data_dir"] = data_dir;
    root["corpus"] = {{"train", train_path}, {"valid", valid_path}, {"test", test_path}};
    root["guidance_kind"] = to_string(kind);
    root["train_regime"] = to_string(train_regime);
    root["test_regime"] = to_string(test_regime);
    root["model"] = {{"d_model", model.d_model},
                     {"n_heads", model.n_heads},
                     {"d_ff", model.d_ff},
                     {"n_enc", model.n_enc},
                     {"n_dec", model.n_dec},
                     {"max_src_len", model.max_src_len},
                     {"max_guid_len", model.max_guid_len},
                     {"max_tgt_len", model.max_tgt_len},
                     {"dropout", model.dropout_rate},
                     {"label_smoothing", model.label_smoothing}};
    root["guidance"] = {{"n_ext", guidance.n_ext},
                        {"n_rel", guidance.n_rel},
                        {"n_kw", guidance.n_kw},
                        {"k_retrieve", guidance.k_retrieve},
                        {"window", guidance.textrank.window},
                        {"damping", guidance.textrank.damping},
                        {"tol", guidance.textrank.tol},
                        {"max_iters", guidance.textrank.max_iters},
                        {"k1", guidance.bm25.k1},
                        {"b", guidance.bm25.b},
                        {"greedy_mode",
                         guidance.greedy_mode == GreedyMode::improve ? "improve" : "literal"}};
    root["optim"] = {{"lr", optim.lr},
                     {"beta1", optim.beta1},
                     {"beta2", optim.beta2},
                     {"eps", optim.eps},
                     {"batch_size", optim.batch_size}};
    root["beam"] = {{"beam", beam.beam},
                    {"max_len", beam.max_len},
                    {"length_alpha", beam.length_alpha},
                    {"block_repeat_trigram", beam.block_repeat_trigram}};
    root["train"] = {{"max_steps", max_steps},
                     {"eval_every", eval_every},
                     {"vocab_min_freq", vocab_min_freq},
                     {"vocab_max_size", vocab_max_size},
                     {"log_val_rouge", log_val_rouge}};
    return root.dump(2) + "\n";
}

void RunConfig::echo(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("config echo: cannot open " + path);
    f << to_json_text();
}

ExperimentSpec RunConfig::to_spec() const {
    ExperimentSpec spec;
    spec.guidance_kind = kind;
    spec.train_regime = train_regime;
    spec.test_regime = test_regime;
    spec.train_path = train_path;
    spec.valid_path = valid_path;
    spec.test_path = test_path;
    spec.model = model;
    spec.guidance = guidance;
    spec.optim = optim;
    spec.beam = beam;
    spec.seed = seed;
    spec.max_steps = max_steps;
    spec.eval_every = eval_every;
    spec.vocab_min_freq = vocab_min_freq;
    spec.vocab_max_size = vocab_max_size;
    spec.log_val_rouge = log_val_rouge;
    return spec;
}

}  // namespace gsum
