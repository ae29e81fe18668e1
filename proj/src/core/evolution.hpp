// Copyright 2026 The netevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "core/dataset.hpp"
#include "core/domain_adapt.hpp"
#include "core/model.hpp"

namespace netevo::evo {

/// Variable-length genotype: one gene per hidden layer, the gene value is the
/// layer width, the length is the depth.
struct Chromosome {
    std::vector<int> widths;

    bool operator==(const Chromosome& other) const = default;
};

/// The two search objectives of one individual: validation classification
/// accuracy (maximize) and trainable parameter count (minimize).
struct FitnessRecord {
    double ca = 0.0;
    long long params = 0;
};

struct EvoConfig {
    int population_size = 100;
    double crossover_prob = 0.8;
    double mutation_prob = 0.2;
    int max_generations = 20;
    int depth_min = 1;
    int depth_max = 8;
    int width_min = 4;
    int width_max = 400;
    double sbx_eta = 15.0;
    adapt::AdaptConfig adapt;
    nn::TrainConfig optimizer;       // line-search/memory knobs for fine-tuning
    double widen_noise_std = 1e-5;   // symmetry breaking applied inside fitness evaluation
    int final_finetune_iters = 200;  // extra budget for the returned best model; 0 disables
    std::uint64_t seed = 0;
    bool fitness_cache = false;
    int worker_count = 1;
};

void validate(const EvoConfig& cfg);

struct GenerationReport {
    int generation = 0;
    std::vector<Chromosome> individuals;
    std::vector<FitnessRecord> records;
    std::vector<int> ranks;  // 1 = best front
    int best_index = 0;
    Chromosome best;
    double best_ca = 0.0;
    double best_so_far_ca = 0.0;     // cumulative max across the run
    std::vector<int> front;          // indices of the rank-1 members
};

// ---------------------------------------------------------------------------
// Population and genetic operators
// ---------------------------------------------------------------------------

/// Uniform random depth in [depth_min, depth_max], then that many uniform
/// random widths in [width_min, width_max].
std::vector<Chromosome> init_population(const EvoConfig& cfg, Rng& rng);

Chromosome random_chromosome(const EvoConfig& cfg, Rng& rng);

nn::Architecture decode(const Chromosome& c, int input_dim, int num_classes);

/// Pareto dominance: no worse in both objectives and strictly better in one.
bool dominates(const FitnessRecord& a, const FitnessRecord& b);

/// Front index per individual (1 = non-dominated), by repeated peeling.
std::vector<int> nondominated_sort(const std::vector<FitnessRecord>& records);

/// NSGA-II crowding distance, computed within each front: boundary members of
/// each objective get +infinity, interior members sum normalized neighbor
/// gaps; an objective with zero range across the front contributes 0.
std::vector<double> crowding_distance(const std::vector<FitnessRecord>& records,
                                      const std::vector<int>& ranks);

/// Admits whole fronts in rank order while they fit; the front at the cut is
/// ordered by descending crowding distance (ties: lower index first) and
/// truncated. Returns the selected indices, exactly n_select of them.
std::vector<int> select_parents(const std::vector<FitnessRecord>& records,
                                const std::vector<int>& ranks,
                                const std::vector<double>& distances, int n_select);

/// Single-point depth crossover with explicit prefix lengths k1 in [1, len1]
/// and k2 in [1, len2]: children are prefix(p1,k1)+suffix(p2,k2) and
/// prefix(p2,k2)+suffix(p1,k1), clamped into the configured depth range by
/// truncating tail genes or appending random ones.
std::pair<Chromosome, Chromosome> depth_crossover_at(const Chromosome& p1, const Chromosome& p2,
                                                     int k1, int k2, const EvoConfig& cfg,
                                                     Rng& rng);

/// Same with uniformly drawn cut points.
std::pair<Chromosome, Chromosome> depth_crossover(const Chromosome& p1, const Chromosome& p2,
                                                  const EvoConfig& cfg, Rng& rng);

/// Simulated-binary-crossover children of one gene pair for a given spread
/// factor beta, rounded to the nearest integer and clamped to the width range.
std::pair<int, int> sbx_gene(int g1, int g2, double beta, const EvoConfig& cfg);

/// Spread factor for a uniform draw u under distribution index eta.
double sbx_beta(double u, double eta);

/// Gene-wise SBX over the shared prefix of the two chromosomes; trailing genes
/// of the longer parent pass through unchanged.
std::pair<Chromosome, Chromosome> sbx_common(const Chromosome& p1, const Chromosome& p2,
                                             const EvoConfig& cfg, Rng& rng);

/// Offspring generation: a random crossover_prob fraction of members is paired
/// and recombined (depth crossover then SBX) in place; then a fresh random
/// population overwrites a random mutation_prob fraction of positions.
std::vector<Chromosome> crossover_mutation(const std::vector<Chromosome>& population,
                                           const EvoConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Fitness evaluation and the main loop
// ---------------------------------------------------------------------------

struct EvalHooks {
    // Test-only: returning true makes the individual count as diverged.
    std::function<bool(std::size_t index)> force_divergence;
};

struct CachedFitness {
    FitnessRecord record;
    std::shared_ptr<const nn::DnnModel> model;
};

using FitnessCache = std::map<std::vector<int>, CachedFitness>;

struct EvalResult {
    std::vector<FitnessRecord> records;
    std::shared_ptr<const nn::DnnModel> best_model;
    std::size_t best_index = 0;
};

/// Evaluates every chromosome: decode, transform the teacher onto the decoded
/// architecture, fine-tune the combined cost, then score validation accuracy.
/// Individuals whose training produces non-finite values get accuracy 0 and a
/// maximal parameter sentinel instead of aborting the generation. Evaluations
/// run on cfg.worker_count threads; each individual draws from its own stream
/// derived from (seed, generation, index), so results do not depend on the
/// worker count.
EvalResult eval_fitness(const std::vector<Chromosome>& population, const nn::DnnModel& teacher,
                        const data::LabeledDataset& source,
                        const data::LabeledDataset& target_train,
                        const data::LabeledDataset& target_val, const EvoConfig& cfg,
                        int generation, FitnessCache* cache = nullptr,
                        const EvalHooks& hooks = {});

struct EvolveResult {
    nn::DnnModel best_model;
    std::vector<GenerationReport> reports;
};

/// The full search loop: initial population, generation-0 evaluation and
/// binary tournament on rank, then max_generations rounds of combine-evaluate-
/// rank-crowd-select-recombine with the running best model handed to the next
/// generation as the transfer teacher.
EvolveResult evolve(const nn::DnnModel& teacher, const data::LabeledDataset& source,
                    const data::LabeledDataset& target_train,
                    const data::LabeledDataset& target_val, const EvoConfig& cfg,
                    const EvalHooks& hooks = {});

/// Reports serialized as a JSON array; identical runs produce identical bytes.
std::string reports_to_json(const std::vector<GenerationReport>& reports);

}  // namespace netevo::evo
