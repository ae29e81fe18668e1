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

#include "core/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "json.hpp"

#include "core/log.hpp"
#include "core/net2net.hpp"

namespace netevo::evo {

void validate(const EvoConfig& cfg) {
    if (cfg.population_size < 2 || cfg.population_size % 2 != 0) {
        throw ValueError("evo config: population_size must be even and >= 2");
    }
    if (cfg.crossover_prob < 0.0 || cfg.crossover_prob > 1.0) {
        throw ValueError("evo config: crossover_prob must be in [0, 1]");
    }
    if (cfg.mutation_prob < 0.0 || cfg.mutation_prob > 1.0) {
        throw ValueError("evo config: mutation_prob must be in [0, 1]");
    }
    if (cfg.max_generations < 0) throw ValueError("evo config: max_generations must be >= 0");
    if (cfg.depth_min < 1 || cfg.depth_min > cfg.depth_max) {
        throw ValueError("evo config: depth range invalid");
    }
    if (cfg.width_min < 1 || cfg.width_min > cfg.width_max) {
        throw ValueError("evo config: width range invalid");
    }
    if (!(cfg.sbx_eta > 0.0)) throw ValueError("evo config: sbx_eta must be > 0");
    if (cfg.widen_noise_std < 0.0) throw ValueError("evo config: widen_noise_std must be >= 0");
    if (cfg.final_finetune_iters < 0) {
        throw ValueError("evo config: final_finetune_iters must be >= 0");
    }
    if (cfg.worker_count < 1) throw ValueError("evo config: worker_count must be >= 1");
    adapt::validate(cfg.adapt);
    nn::validate(cfg.optimizer);
}

Chromosome random_chromosome(const EvoConfig& cfg, Rng& rng) {
    const int depth = rng.uniform_int(cfg.depth_min, cfg.depth_max);
    Chromosome c;
    c.widths.reserve(static_cast<std::size_t>(depth));
    for (int i = 0; i < depth; ++i) {
        c.widths.push_back(rng.uniform_int(cfg.width_min, cfg.width_max));
    }
    return c;
}

std::vector<Chromosome> init_population(const EvoConfig& cfg, Rng& rng) {
    if (cfg.population_size < 1) throw ValueError("init_population: population_size must be >= 1");
    if (cfg.depth_min < 1 || cfg.depth_min > cfg.depth_max || cfg.width_min < 1 ||
        cfg.width_min > cfg.width_max) {
        throw ValueError("init_population: invalid depth/width ranges");
    }
    std::vector<Chromosome> population;
    population.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) {
        population.push_back(random_chromosome(cfg, rng));
    }
    return population;
}

nn::Architecture decode(const Chromosome& c, int input_dim, int num_classes) {
    nn::Architecture arch{input_dim, c.widths, num_classes};
    nn::validate(arch);
    return arch;
}

bool dominates(const FitnessRecord& a, const FitnessRecord& b) {
    return a.ca >= b.ca && a.params <= b.params && (a.ca > b.ca || a.params < b.params);
}

std::vector<int> nondominated_sort(const std::vector<FitnessRecord>& records) {
    const std::size_t n = records.size();
    if (n == 0) throw ValueError("nondominated_sort: empty record list");

    std::vector<int> dominated_count(n, 0);
    std::vector<std::vector<int>> dominated_by(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(records[i], records[j])) {
                dominated_by[i].push_back(static_cast<int>(j));
                ++dominated_count[j];
            } else if (dominates(records[j], records[i])) {
                dominated_by[j].push_back(static_cast<int>(i));
                ++dominated_count[i];
            }
        }
    }

    std::vector<int> ranks(n, 0);
    std::vector<int> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (dominated_count[i] == 0) current.push_back(static_cast<int>(i));
    }
    int rank = 1;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            ranks[static_cast<std::size_t>(i)] = rank;
            for (int j : dominated_by[static_cast<std::size_t>(i)]) {
                if (--dominated_count[j] == 0) next.push_back(j);
            }
        }
        current = std::move(next);
        ++rank;
    }
    return ranks;
}

std::vector<double> crowding_distance(const std::vector<FitnessRecord>& records,
                                      const std::vector<int>& ranks) {
    const std::size_t n = records.size();
    if (ranks.size() != n) throw ValueError("crowding_distance: ranks/records size mismatch");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n, 0.0);

    const int max_rank = n == 0 ? 0 : *std::max_element(ranks.begin(), ranks.end());
    for (int rank = 1; rank <= max_rank; ++rank) {
        std::vector<int> front;
        for (std::size_t i = 0; i < n; ++i) {
            if (ranks[i] == rank) front.push_back(static_cast<int>(i));
        }
        if (front.empty()) continue;
        if (front.size() <= 2) {
            for (int i : front) distance[static_cast<std::size_t>(i)] = kInf;
            continue;
        }
        for (int objective = 0; objective < 2; ++objective) {
            auto value = [&](int i) {
                return objective == 0 ? records[static_cast<std::size_t>(i)].ca
                                      : static_cast<double>(records[static_cast<std::size_t>(i)].params);
            };
            std::vector<int> order = front;
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return value(a) < value(b); });
            distance[static_cast<std::size_t>(order.front())] = kInf;
            distance[static_cast<std::size_t>(order.back())] = kInf;
            const double range = value(order.back()) - value(order.front());
            if (range <= 0.0) continue;
            for (std::size_t k = 1; k + 1 < order.size(); ++k) {
                distance[static_cast<std::size_t>(order[k])] +=
                    (value(order[k + 1]) - value(order[k - 1])) / range;
            }
        }
    }
    return distance;
}

std::vector<int> select_parents(const std::vector<FitnessRecord>& records,
                                const std::vector<int>& ranks,
                                const std::vector<double>& distances, int n_select) {
    const std::size_t n = records.size();
    if (ranks.size() != n || distances.size() != n) {
        throw ValueError("select_parents: input size mismatch");
    }
    if (static_cast<int>(n) < n_select) {
        throw ValueError("select_parents: cannot select " + std::to_string(n_select) +
                         " from " + std::to_string(n));
    }

    std::vector<int> selected;
    selected.reserve(static_cast<std::size_t>(n_select));
    const int max_rank = *std::max_element(ranks.begin(), ranks.end());
    for (int rank = 1; rank <= max_rank && static_cast<int>(selected.size()) < n_select; ++rank) {
        std::vector<int> front;
        for (std::size_t i = 0; i < n; ++i) {
            if (ranks[i] == rank) front.push_back(static_cast<int>(i));
        }
        const int room = n_select - static_cast<int>(selected.size());
        if (static_cast<int>(front.size()) <= room) {
            selected.insert(selected.end(), front.begin(), front.end());
        } else {
            // Ties in crowding distance resolve to the lower original index.
            std::stable_sort(front.begin(), front.end(), [&](int a, int b) {
                return distances[static_cast<std::size_t>(a)] >
                       distances[static_cast<std::size_t>(b)];
            });
            selected.insert(selected.end(), front.begin(), front.begin() + room);
        }
    }
    return selected;
}

namespace {

Chromosome clamp_depth(Chromosome c, const EvoConfig& cfg, Rng& rng) {
    if (static_cast<int>(c.widths.size()) > cfg.depth_max) {
        c.widths.resize(static_cast<std::size_t>(cfg.depth_max));
    }
    while (static_cast<int>(c.widths.size()) < cfg.depth_min) {
        c.widths.push_back(rng.uniform_int(cfg.width_min, cfg.width_max));
    }
    return c;
}

}  // namespace

std::pair<Chromosome, Chromosome> depth_crossover_at(const Chromosome& p1, const Chromosome& p2,
                                                     int k1, int k2, const EvoConfig& cfg,
                                                     Rng& rng) {
    const int len1 = static_cast<int>(p1.widths.size());
    const int len2 = static_cast<int>(p2.widths.size());
    if (len1 < 1 || len2 < 1) throw ValueError("depth_crossover: empty parent");
    if (k1 < 1 || k1 > len1 || k2 < 1 || k2 > len2) {
        throw ValueError("depth_crossover: cut point out of range");
    }

    Chromosome c1;
    c1.widths.assign(p1.widths.begin(), p1.widths.begin() + k1);
    c1.widths.insert(c1.widths.end(), p2.widths.begin() + k2, p2.widths.end());
    Chromosome c2;
    c2.widths.assign(p2.widths.begin(), p2.widths.begin() + k2);
    c2.widths.insert(c2.widths.end(), p1.widths.begin() + k1, p1.widths.end());

    return {clamp_depth(std::move(c1), cfg, rng), clamp_depth(std::move(c2), cfg, rng)};
}

std::pair<Chromosome, Chromosome> depth_crossover(const Chromosome& p1, const Chromosome& p2,
                                                  const EvoConfig& cfg, Rng& rng) {
    const int k1 = rng.uniform_int(1, static_cast<int>(p1.widths.size()));
    const int k2 = rng.uniform_int(1, static_cast<int>(p2.widths.size()));
    return depth_crossover_at(p1, p2, k1, k2, cfg, rng);
}

double sbx_beta(double u, double eta) {
    if (u <= 0.5) return std::pow(2.0 * u, 1.0 / (eta + 1.0));
    return std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
}

std::pair<int, int> sbx_gene(int g1, int g2, double beta, const EvoConfig& cfg) {
    const double c1 = 0.5 * ((1.0 + beta) * g1 + (1.0 - beta) * g2);
    const double c2 = 0.5 * ((1.0 - beta) * g1 + (1.0 + beta) * g2);
    const auto clamp = [&](double v) {
        const long long r = std::llround(v);
        return static_cast<int>(std::clamp<long long>(r, cfg.width_min, cfg.width_max));
    };
    return {clamp(c1), clamp(c2)};
}

std::pair<Chromosome, Chromosome> sbx_common(const Chromosome& p1, const Chromosome& p2,
                                             const EvoConfig& cfg, Rng& rng) {
    Chromosome c1 = p1;
    Chromosome c2 = p2;
    const std::size_t shared = std::min(p1.widths.size(), p2.widths.size());
    for (std::size_t g = 0; g < shared; ++g) {
        const double beta = sbx_beta(rng.uniform(), cfg.sbx_eta);
        std::tie(c1.widths[g], c2.widths[g]) = sbx_gene(p1.widths[g], p2.widths[g], beta, cfg);
    }
    return {std::move(c1), std::move(c2)};
}

std::vector<Chromosome> crossover_mutation(const std::vector<Chromosome>& population,
                                           const EvoConfig& cfg, Rng& rng) {
    const int n = static_cast<int>(population.size());
    std::vector<Chromosome> out = population;

    // Crossover pool: a random crossover_prob share of positions, paired off in
    // shuffle order; an odd leftover passes through unchanged.
    const int pool_size =
        static_cast<int>(std::llround(cfg.crossover_prob * static_cast<double>(n)));
    const std::vector<int> pool = rng.permutation(n);
    for (int t = 0; t + 1 < pool_size; t += 2) {
        const int i = pool[static_cast<std::size_t>(t)];
        const int j = pool[static_cast<std::size_t>(t + 1)];
        auto [a, b] = depth_crossover(out[static_cast<std::size_t>(i)],
                                      out[static_cast<std::size_t>(j)], cfg, rng);
        std::tie(a, b) = sbx_common(a, b, cfg, rng);
        out[static_cast<std::size_t>(i)] = std::move(a);
        out[static_cast<std::size_t>(j)] = std::move(b);
    }

    // Mutation: fresh chromosomes replace a random mutation_prob share of
    // positions, each position taking the fresh individual with its own index.
    EvoConfig fresh_cfg = cfg;
    fresh_cfg.population_size = n;
    const std::vector<Chromosome> fresh = init_population(fresh_cfg, rng);
    const int mutate_count =
        static_cast<int>(std::llround(cfg.mutation_prob * static_cast<double>(n)));
    const std::vector<int> positions = rng.permutation(n);
    for (int t = 0; t < mutate_count; ++t) {
        const int idx = positions[static_cast<std::size_t>(t)];
        out[static_cast<std::size_t>(idx)] = fresh[static_cast<std::size_t>(idx)];
    }
    return out;
}

namespace {

constexpr long long kDivergedParams = std::numeric_limits<long long>::max();

struct IndividualOutcome {
    FitnessRecord record;
    std::shared_ptr<const nn::DnnModel> model;  // null when training diverged
};

IndividualOutcome evaluate_individual(const Chromosome& chromosome, const nn::DnnModel& teacher,
                                      const data::LabeledDataset& source,
                                      const data::LabeledDataset& target_train,
                                      const data::LabeledDataset& target_val,
                                      const EvoConfig& cfg, int generation, std::size_t index,
                                      const EvalHooks& hooks) {
    const nn::Architecture arch =
        decode(chromosome, static_cast<int>(source.dim()), source.num_classes);
    const long long params = nn::param_count(arch);

    if (hooks.force_divergence && hooks.force_divergence(index)) {
        return IndividualOutcome{{0.0, kDivergedParams}, nullptr};
    }

    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(generation),
                     static_cast<std::uint64_t>(index)));
    try {
        const net2net::TransformResult student = net2net::transform_to_architecture(
            teacher, arch, rng, net2net::WidenOptions{cfg.widen_noise_std});
        const adapt::FinetuneResult tuned =
            adapt::finetune(student.model, source, target_train, cfg.adapt, cfg.optimizer);
        if (!tuned.loss_history.empty() && !std::isfinite(tuned.loss_history.back())) {
            return IndividualOutcome{{0.0, kDivergedParams}, nullptr};
        }
        const double ca =
            nn::classification_accuracy(tuned.model, target_val.features, target_val.labels);
        if (!std::isfinite(ca)) {
            return IndividualOutcome{{0.0, kDivergedParams}, nullptr};
        }
        return IndividualOutcome{{ca, params},
                                 std::make_shared<const nn::DnnModel>(std::move(tuned.model))};
    } catch (const NumericError&) {
        return IndividualOutcome{{0.0, kDivergedParams}, nullptr};
    }
}

bool better_fitness(const FitnessRecord& a, const FitnessRecord& b) {
    if (a.ca != b.ca) return a.ca > b.ca;
    return a.params < b.params;
}

}  // namespace

EvalResult eval_fitness(const std::vector<Chromosome>& population, const nn::DnnModel& teacher,
                        const data::LabeledDataset& source,
                        const data::LabeledDataset& target_train,
                        const data::LabeledDataset& target_val, const EvoConfig& cfg,
                        int generation, FitnessCache* cache, const EvalHooks& hooks) {
    const std::size_t n = population.size();
    if (n == 0) throw ValueError("eval_fitness: empty population");

    std::vector<IndividualOutcome> outcomes(n);
    std::vector<bool> resolved(n, false);
    if (cache != nullptr) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto hit = cache->find(population[i].widths);
            if (hit != cache->end()) {
                outcomes[i] = IndividualOutcome{hit->second.record, hit->second.model};
                resolved[i] = true;
            }
        }
    }

    const int workers = std::min<int>(cfg.worker_count, static_cast<int>(n));
    std::atomic<std::size_t> cursor{0};
    auto run = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) break;
            if (resolved[i]) continue;
            outcomes[i] = evaluate_individual(population[i], teacher, source, target_train,
                                              target_val, cfg, generation, i, hooks);
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    if (cache != nullptr) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!resolved[i] && outcomes[i].model != nullptr) {
                cache->emplace(population[i].widths,
                               CachedFitness{outcomes[i].record, outcomes[i].model});
            }
        }
    }

    EvalResult result;
    result.records.reserve(n);
    for (const auto& outcome : outcomes) result.records.push_back(outcome.record);
    result.best_index = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (better_fitness(result.records[i], result.records[result.best_index])) {
            result.best_index = i;
        }
    }
    result.best_model = outcomes[result.best_index].model;
    if (result.best_model == nullptr) {
        // Every individual diverged; hand the teacher forward unchanged.
        log_warn("eval_fitness: all individuals diverged in generation " +
                 std::to_string(generation));
        result.best_model = std::make_shared<const nn::DnnModel>(teacher);
    }
    return result;
}

namespace {

GenerationReport make_report(int generation, const std::vector<Chromosome>& population,
                             const EvalResult& eval, const std::vector<int>& ranks,
                             double& best_so_far) {
    GenerationReport report;
    report.generation = generation;
    report.individuals = population;
    report.records = eval.records;
    report.ranks = ranks;
    report.best_index = static_cast<int>(eval.best_index);
    report.best = population[eval.best_index];
    report.best_ca = eval.records[eval.best_index].ca;
    best_so_far = std::max(best_so_far, report.best_ca);
    report.best_so_far_ca = best_so_far;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] == 1) report.front.push_back(static_cast<int>(i));
    }
    return report;
}

}  // namespace

EvolveResult evolve(const nn::DnnModel& teacher, const data::LabeledDataset& source,
                    const data::LabeledDataset& target_train,
                    const data::LabeledDataset& target_val, const EvoConfig& cfg,
                    const EvalHooks& hooks) {
    validate(cfg);
    nn::validate(teacher);
    if (teacher.arch.input_dim != source.dim() || teacher.arch.num_classes != source.num_classes) {
        throw ShapeError("evolve: teacher shape does not match the source dataset");
    }

    Rng rng(cfg.seed);
    FitnessCache cache;
    FitnessCache* cache_ptr = cfg.fitness_cache ? &cache : nullptr;

    EvolveResult result;
    double best_so_far = -std::numeric_limits<double>::infinity();

    std::vector<Chromosome> parents = init_population(cfg, rng);
    EvalResult eval = eval_fitness(parents, teacher, source, target_train, target_val, cfg, 0,
                                   cache_ptr, hooks);
    std::vector<int> ranks = nondominated_sort(eval.records);
    result.reports.push_back(make_report(0, parents, eval, ranks, best_so_far));

    // Generation 0 parents come from a binary tournament on rank alone;
    // crowding distances do not exist yet at this point of the loop.
    std::vector<Chromosome> selected;
    selected.reserve(parents.size());
    for (std::size_t k = 0; k < parents.size(); ++k) {
        const int i = rng.uniform_int(0, static_cast<int>(parents.size()) - 1);
        const int j = rng.uniform_int(0, static_cast<int>(parents.size()) - 1);
        int winner;
        if (ranks[static_cast<std::size_t>(i)] != ranks[static_cast<std::size_t>(j)]) {
            winner = ranks[static_cast<std::size_t>(i)] < ranks[static_cast<std::size_t>(j)] ? i : j;
        } else {
            winner = rng.uniform() < 0.5 ? i : j;
        }
        selected.push_back(parents[static_cast<std::size_t>(winner)]);
    }
    parents = std::move(selected);
    std::vector<Chromosome> offspring = crossover_mutation(parents, cfg, rng);
    std::shared_ptr<const nn::DnnModel> current_teacher = eval.best_model;

    for (int generation = 1; generation <= cfg.max_generations; ++generation) {
        std::vector<Chromosome> combined = parents;
        combined.insert(combined.end(), offspring.begin(), offspring.end());

        eval = eval_fitness(combined, *current_teacher, source, target_train, target_val, cfg,
                            generation, cache_ptr, hooks);
        ranks = nondominated_sort(eval.records);
        const std::vector<double> distances = crowding_distance(eval.records, ranks);
        const std::vector<int> chosen =
            select_parents(eval.records, ranks, distances, cfg.population_size);
        result.reports.push_back(make_report(generation, combined, eval, ranks, best_so_far));

        parents.clear();
        parents.reserve(chosen.size());
        for (int idx : chosen) parents.push_back(combined[static_cast<std::size_t>(idx)]);
        offspring = crossover_mutation(parents, cfg, rng);
        current_teacher = eval.best_model;
    }

    nn::DnnModel best = *current_teacher;
    if (cfg.final_finetune_iters > 0) {
        adapt::AdaptConfig final_cfg = cfg.adapt;
        final_cfg.finetune_iters = cfg.final_finetune_iters;
        best = adapt::finetune(best, source, target_train, final_cfg, cfg.optimizer).model;
    }
    result.best_model = std::move(best);
    return result;
}

std::string reports_to_json(const std::vector<GenerationReport>& reports) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& report : reports) {
        nlohmann::json individuals = nlohmann::json::array();
        for (std::size_t i = 0; i < report.individuals.size(); ++i) {
            individuals.push_back({{"widths", report.individuals[i].widths},
                                   {"ca", report.records[i].ca},
                                   {"params", report.records[i].params},
                                   {"rank", report.ranks[i]}});
        }
        doc.push_back({{"generation", report.generation},
                       {"individuals", std::move(individuals)},
                       {"best_index", report.best_index},
                       {"best_widths", report.best.widths},
                       {"best_ca", report.best_ca},
                       {"best_so_far_ca", report.best_so_far_ca},
                       {"front", report.front}});
    }
    return doc.dump();
}

}  // namespace netevo::evo
