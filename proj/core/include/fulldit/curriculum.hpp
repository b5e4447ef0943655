#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fulldit/diffusion.hpp"
#include "fulldit/model.hpp"
#include "fulldit/rng.hpp"
#include "fulldit/tokenizer.hpp"

namespace fulldit::curriculum {

struct StageSpec {
    std::string name;
    std::set<std::string> conditions;          // subset of {camera, identity, depth}
    size_t steps = 0;
    std::map<std::string, double> mixture;     // dataset group -> weight
    double lr_scale = 1.0;
};

struct TrainStagePlan {
    std::vector<StageSpec> stages;
    double learning_rate = 1e-5;
    size_t batch_size = 8;

    // positive step budgets, nested (monotone) condition sets, usable mixtures
    void validate() const;
    size_t total_steps() const;
};

struct DropoutPolicy {
    double camera = 0.1, identity = 0.1, depth = 0.1;
    double text_null = 0.1;
    void validate() const;
};

struct StagePoint {
    size_t stage_index = 0;
    const StageSpec* stage = nullptr;
};

// Deterministic stage lookup for a global step; EmptyPlan on empty plans,
// out_of_range past the total budget.
StagePoint stage_at(const TrainStagePlan& plan, size_t global_step);

// One training example: clean video tokens plus whatever condition
// annotations the sample carries.
struct TrainSample {
    tok::TokenFragment video;  // clean x1 token block
    std::optional<tok::TokenFragment> camera;
    std::optional<tok::TokenFragment> identity;
    std::optional<tok::TokenFragment> depth;
    std::vector<int32_t> text_ids;
    std::string group;
    bool quality = false;
};

struct Dataset {
    std::vector<TrainSample> samples;
    std::map<std::string, std::vector<size_t>> by_group;  // includes "quality"

    void index();  // rebuilds by_group from samples
};

// Conditions drawn for one training step (post stage gating and dropout).
struct BatchItem {
    size_t sample_index = 0;
    std::optional<tok::TokenFragment> camera, identity, depth;
    std::vector<int32_t> text_ids;
    double t = 0.0;
    uint64_t noise_seed = 0;
};

// Independently drops each present condition with its probability and
// replaces text with the null token with text_null probability. Video tokens
// and the loss mask are never touched.
void apply_dropout(BatchItem& item, const DropoutPolicy& policy, Rng& rng);

struct StepRecord {
    size_t step = 0;
    std::string stage;
    double loss = 0.0;
    double lr = 0.0;
    std::vector<std::string> enabled_conditions;
};

std::string step_record_json(const StepRecord& rec);  // one JSON-lines record

struct AdamState {
    std::map<std::string, Tensorf> m, v;
    size_t step = 0;
};

void save_optimizer(const std::filesystem::path& path, const AdamState& state);
AdamState load_optimizer(const std::filesystem::path& path);

struct TrainOptions {
    diffusion::FlowConfig flow;
    model::ModelConfig model_cfg;
    DropoutPolicy dropout;
    uint64_t seed = 0;
    size_t start_step = 0;                      // resume point
    std::filesystem::path checkpoint_dir;       // empty = no checkpoints
    std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
    model::ModelParams params;
    AdamState adam;
    std::vector<StepRecord> log;
};

// Runs the staged curriculum: per step, sample the batch from the stage
// mixture, apply dropout, draw t and noise, regress the flow-matching
// velocity on video tokens, and take one Adam step. Deterministic in
// (plan, seed, dataset); per-sample work runs in parallel workers and the
// gradient reduction is ordered.
TrainResult train(const TrainStagePlan& plan, model::ModelParams params, const Dataset& dataset,
                  const TrainOptions& options, AdamState adam = {});

}  // namespace fulldit::curriculum
