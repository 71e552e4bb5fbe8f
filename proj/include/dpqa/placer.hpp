#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dpqa/arch.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"
#include "dpqa/rng.hpp"
#include "dpqa/scheduler.hpp"

namespace dpqa {

/// A gate endpoint pair with its placement-cost weight.
struct WeightedGate {
    int q0 = 0;
    int q1 = 0;
    double weight = 1.0;
};

/// Weight of a gate whose stage lies `stages_ahead` stages past the stage
/// being placed: 1, 0.9, 0.8, ... floored at 0.1.
inline double dynamic_gate_weight(int stages_ahead) {
    return std::max(0.1, 1.0 - 0.1 * static_cast<double>(stages_ahead));
}

/// Exploration region bound (inclusive max site index per axis).
inline int exploration_bound(int n_qubits, int configured_sites) {
    const int derived = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_qubits)))) + 4;
    return configured_sites > 0 ? std::max(derived, configured_sites - 1) : derived;
}

inline constexpr Site kUnplaced{-1, -1};

/// Total weighted Euclidean gate length of a placement, in micrometers.
inline double placement_cost(const std::vector<Site>& site_of, const std::vector<WeightedGate>& gates,
                             double pitch_um) {
    double cost = 0.0;
    for (const auto& g : gates) {
        if (g.q0 < 0 || g.q1 < 0 || g.q0 >= static_cast<int>(site_of.size()) ||
            g.q1 >= static_cast<int>(site_of.size()) || site_of[g.q0] == kUnplaced ||
            site_of[g.q1] == kUnplaced) {
            throw std::invalid_argument("placement_cost: gate endpoint is unplaced");
        }
        cost += g.weight * site_distance_um(site_of[g.q0], site_of[g.q1], pitch_um);
    }
    return cost;
}

/// Row-major fill over `width` columns starting at row 0: qubit i sits at
/// (i % width, i / width).
inline std::vector<Site> trivial_placement(int n_qubits, int width, int height) {
    if (width < 1 || height < 1 || n_qubits > width * height) {
        throw std::invalid_argument("trivial_placement: region too small");
    }
    std::vector<Site> out(n_qubits);
    for (int q = 0; q < n_qubits; ++q) out[q] = Site{q % width, q / width};
    return out;
}

struct PlacerParams {
    int max_iterations = 50000;
    double initial_uphill_acceptance = 0.85;  // target acceptance of an average uphill move
    double termination_ratio = 1e-4;          // stop once T < ratio * T_initial
    double pseudo_greedy_scale = 100.0;       // temperature divisor during rounds 2..k
    int pseudo_greedy_rounds = 7;             // k: last round of the pseudo-greedy phase
    int moves_per_round = 0;                  // 0: max(64, number of movable qubits)
    double relocate_fraction = 0.5;           // relocate-to-vacancy vs. swap
    // Re-annealing between stages also prices the relocation leg itself: each
    // displaced qubit is pulled toward its current position by a pseudo-net of
    // this weight (its gate partner sits exactly there). 0 disables the pull.
    double relocation_pull = 1.0;
};

namespace detail {

/// Annealing state over one site region. Only `movable` qubits are touched;
/// all other qubits act as fixed obstacles.
class AnnealState {
  public:
    AnnealState(std::vector<Site> site_of, std::vector<int> movable, int x_bound, int y_bound,
                const std::vector<WeightedGate>& gates, double pitch_um)
        : site_of_(std::move(site_of)),
          movable_(std::move(movable)),
          width_(x_bound + 1),
          height_(y_bound + 1),
          pitch_(pitch_um) {
        occupant_.assign(static_cast<std::size_t>(width_) * height_, -1);
        for (std::size_t q = 0; q < site_of_.size(); ++q) {
            const Site s = site_of_[q];
            if (s == kUnplaced) continue;
            if (s.x < 0 || s.y < 0 || s.x >= width_ || s.y >= height_) {
                throw std::invalid_argument("anneal: site outside the exploration region");
            }
            int& cell = occupant_[index(s)];
            if (cell != -1) throw std::invalid_argument("anneal: two qubits share a site");
            cell = static_cast<int>(q);
        }
        for (std::size_t i = 0; i < occupant_.size(); ++i) {
            if (occupant_[i] == -1) {
                vacancy_pos_.push_back(static_cast<int>(i));
            }
        }
        vacancy_index_.assign(occupant_.size(), -1);
        for (std::size_t vi = 0; vi < vacancy_pos_.size(); ++vi) {
            vacancy_index_[vacancy_pos_[vi]] = static_cast<int>(vi);
        }

        incident_.assign(site_of_.size(), {});
        for (const auto& g : gates) {
            incident_[g.q0].push_back({g.q1, g.weight});
            incident_[g.q1].push_back({g.q0, g.weight});
        }
        is_movable_.assign(site_of_.size(), 0);
        for (const int q : movable_) is_movable_[q] = 1;
    }

    int index(Site s) const { return s.y * width_ + s.x; }
    Site site_at(int idx) const { return Site{idx % width_, idx / width_}; }

    double qubit_cost(int q, Site at) const {
        double c = 0.0;
        for (const auto& [other, w] : incident_[q]) {
            c += w * site_distance_um(at, site_of_[other], pitch_);
        }
        return c;
    }

    double full_cost() const {
        double c = 0.0;
        for (const int q : movable_) c += qubit_cost(q, site_of_[q]);
        // gates between two movable qubits were counted twice
        for (const int q : movable_) {
            for (const auto& [other, w] : incident_[q]) {
                if (is_movable_[other] && other > q) {
                    c -= w * site_distance_um(site_of_[q], site_of_[other], pitch_);
                }
            }
        }
        return c;
    }

    bool has_vacancy() const { return !vacancy_pos_.empty(); }
    int n_movable() const { return static_cast<int>(movable_.size()); }
    const std::vector<Site>& sites() const { return site_of_; }
    const std::vector<int>& movable() const { return movable_; }

    double relocate_delta(int q, int vac_idx) const {
        return qubit_cost(q, site_at(vac_idx)) - qubit_cost(q, site_of_[q]);
    }

    void relocate(int q, int vac_idx) {
        const int old_idx = index(site_of_[q]);
        occupant_[old_idx] = -1;
        occupant_[vac_idx] = q;
        site_of_[q] = site_at(vac_idx);
        // vacancy list: vac_idx becomes occupied, old_idx becomes vacant
        const int vi = vacancy_index_[vac_idx];
        vacancy_pos_[vi] = old_idx;
        vacancy_index_[old_idx] = vi;
        vacancy_index_[vac_idx] = -1;
    }

    double swap_delta(int qa, int qb) const {
        const Site sa = site_of_[qa];
        const Site sb = site_of_[qb];
        double before = qubit_cost(qa, sa) + qubit_cost(qb, sb);
        double after = 0.0;
        for (const auto& [other, w] : incident_[qa]) {
            const Site so = (other == qb) ? sa : site_of_[other];
            after += w * site_distance_um(sb, so, pitch_);
        }
        for (const auto& [other, w] : incident_[qb]) {
            const Site so = (other == qa) ? sb : site_of_[other];
            after += w * site_distance_um(sa, so, pitch_);
        }
        return after - before;
    }

    void swap(int qa, int qb) {
        std::swap(occupant_[index(site_of_[qa])], occupant_[index(site_of_[qb])]);
        std::swap(site_of_[qa], site_of_[qb]);
    }

    int vacancy(std::size_t i) const { return vacancy_pos_[i]; }
    std::size_t n_vacancies() const { return vacancy_pos_.size(); }

  private:
    std::vector<Site> site_of_;
    std::vector<int> movable_;
    int width_;
    int height_;
    double pitch_;
    std::vector<int> occupant_;
    std::vector<int> vacancy_pos_;
    std::vector<int> vacancy_index_;
    std::vector<std::vector<std::pair<int, double>>> incident_;
    std::vector<char> is_movable_;
};

}  // namespace detail

/// Fast-SA anneal over the movable qubits: round 1 explores near-randomly at
/// a temperature calibrated to the requested uphill acceptance, rounds
/// 2..k run pseudo-greedy at a sharply reduced temperature, and later rounds
/// hill-climb with the temperature tracking the average uphill cost. State
/// transitions relocate a qubit to a vacant site or swap two qubits. Returns
/// the best placement visited; never worse than the input.
inline std::vector<Site> anneal_placement(const std::vector<Site>& initial, const std::vector<int>& movable,
                                          const std::vector<WeightedGate>& gates, int x_bound, int y_bound,
                                          const PlacerParams& params, std::uint64_t seed) {
    detail::AnnealState state(initial, movable, x_bound, y_bound, gates, 1.0);
    if (movable.empty() || gates.empty()) return initial;
    if (!state.has_vacancy() && state.n_movable() < 2) return initial;

    std::mt19937_64 rng(seed);
    const int moves_per_round =
        params.moves_per_round > 0 ? params.moves_per_round : std::max(64, state.n_movable());

    double cost = state.full_cost();
    double best_cost = cost;
    std::vector<Site> best = state.sites();

    // Calibrate the starting temperature from the average uphill magnitude of
    // random probe transitions.
    double uphill_sum = 0.0;
    int uphill_count = 0;
    {
        std::mt19937_64 probe_rng(derive_seed(seed, 0x70726f6265ULL));
        for (int i = 0; i < moves_per_round; ++i) {
            double delta = 0.0;
            const bool can_relocate = state.has_vacancy();
            const bool relocate = can_relocate && (state.n_movable() < 2 ||
                                                   uniform01(probe_rng) < params.relocate_fraction);
            if (relocate) {
                const int q = state.movable()[uniform_below(probe_rng, state.movable().size())];
                const int vac = state.vacancy(uniform_below(probe_rng, state.n_vacancies()));
                delta = state.relocate_delta(q, vac);
            } else {
                const std::size_t a = uniform_below(probe_rng, state.movable().size());
                std::size_t b = uniform_below(probe_rng, state.movable().size() - 1);
                if (b >= a) ++b;
                delta = state.swap_delta(state.movable()[a], state.movable()[b]);
            }
            if (delta > 0.0) {
                uphill_sum += delta;
                ++uphill_count;
            }
        }
    }
    const double avg_uphill = uphill_count > 0 ? uphill_sum / uphill_count : 1.0;
    const double t_initial = avg_uphill / std::log(1.0 / params.initial_uphill_acceptance);
    double temperature = t_initial;

    int iterations = 0;
    for (int round = 1; iterations < params.max_iterations; ++round) {
        double round_uphill_sum = 0.0;
        int round_uphill_count = 0;
        for (int i = 0; i < moves_per_round && iterations < params.max_iterations; ++i, ++iterations) {
            const bool can_relocate = state.has_vacancy();
            const bool can_swap = state.n_movable() >= 2;
            const bool relocate =
                can_relocate && (!can_swap || uniform01(rng) < params.relocate_fraction);

            if (relocate) {
                const int q = state.movable()[uniform_below(rng, state.movable().size())];
                const int vac = state.vacancy(uniform_below(rng, state.n_vacancies()));
                const double delta = state.relocate_delta(q, vac);
                if (delta > 0.0) {
                    round_uphill_sum += delta;
                    ++round_uphill_count;
                }
                if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature)) {
                    state.relocate(q, vac);
                    cost += delta;
                }
            } else {
                const std::size_t a = uniform_below(rng, state.movable().size());
                std::size_t b = uniform_below(rng, state.movable().size() - 1);
                if (b >= a) ++b;
                const int qa = state.movable()[a];
                const int qb = state.movable()[b];
                const double delta = state.swap_delta(qa, qb);
                if (delta > 0.0) {
                    round_uphill_sum += delta;
                    ++round_uphill_count;
                }
                if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature)) {
                    state.swap(qa, qb);
                    cost += delta;
                }
            }
            if (cost < best_cost) {
                best_cost = cost;
                best = state.sites();
            }
        }
        // resync against incremental drift
        cost = state.full_cost();
        if (cost < best_cost) {
            best_cost = cost;
            best = state.sites();
        }

        const double round_avg =
            round_uphill_count > 0 ? round_uphill_sum / round_uphill_count : 0.0;
        const int n = round + 1;
        if (n <= params.pseudo_greedy_rounds) {
            temperature = t_initial * round_avg / (n * params.pseudo_greedy_scale);
        } else {
            temperature = t_initial * round_avg / n;
        }
        if (temperature < params.termination_ratio * t_initial) break;
    }
    return best;
}

/// Per-stage qubit-to-site maps plus dynamic-mode diagnostics.
struct Placement {
    std::vector<std::vector<Site>> per_stage;
    /// Dynamic mode: transitions where re-annealing was infeasible and the
    /// stage fell back to reversing the previous moves.
    std::vector<int> fallback_transitions;

    const Site& at(int stage, int qubit) const { return per_stage[stage][qubit]; }
};

namespace detail {

inline std::vector<Site> random_injective_placement(int n_qubits, int x_bound, int y_bound,
                                                    std::mt19937_64& rng) {
    const int n_sites = (x_bound + 1) * (y_bound + 1);
    if (n_sites < n_qubits) throw std::invalid_argument("placement: region cannot hold the qubits");
    std::vector<int> cells(n_sites);
    std::iota(cells.begin(), cells.end(), 0);
    // Fisher-Yates prefix shuffle
    for (int i = 0; i < n_qubits; ++i) {
        const std::size_t j = i + uniform_below(rng, static_cast<std::uint64_t>(n_sites - i));
        std::swap(cells[i], cells[j]);
    }
    std::vector<Site> out(n_qubits);
    for (int q = 0; q < n_qubits; ++q) out[q] = Site{cells[q] % (x_bound + 1), cells[q] / (x_bound + 1)};
    return out;
}

inline std::vector<WeightedGate> stage_weighted_gates(const SlicedCircuit& circuit,
                                                      const Schedule& schedule, int from_stage,
                                                      bool dynamic_weights) {
    std::vector<WeightedGate> gates;
    for (std::size_t si = 0; si < circuit.slices.size(); ++si) {
        for (std::size_t gi = 0; gi < circuit.slices[si].gates.size(); ++gi) {
            const int stage = schedule.stage_by_slice[si][gi];
            if (stage < from_stage) continue;
            const Gate& g = circuit.slices[si].gates[gi];
            const double w = dynamic_weights ? dynamic_gate_weight(stage - from_stage) : 1.0;
            gates.push_back({g.q0, g.q1, w});
        }
    }
    return gates;
}

}  // namespace detail

/// One annealed map shared by every stage; all gate weights are 1 and the
/// router later reverses each stage's movements.
inline Placement place_static(const SlicedCircuit& circuit, const Schedule& schedule,
                              const ArchConfig& arch, const PlacerParams& params, std::uint64_t seed) {
    const int xb = exploration_bound(circuit.n_qubits, arch.cols_max);
    const int yb = exploration_bound(circuit.n_qubits, arch.rows_max);
    std::mt19937_64 rng(derive_seed(seed, 0x696e6974ULL));
    std::vector<Site> initial = detail::random_injective_placement(circuit.n_qubits, xb, yb, rng);
    std::vector<int> movable(circuit.n_qubits);
    std::iota(movable.begin(), movable.end(), 0);
    const auto gates = detail::stage_weighted_gates(circuit, schedule, 0, false);
    std::vector<Site> placed =
        anneal_placement(initial, movable, gates, xb, yb, params, derive_seed(seed, 0x616e6e31ULL));
    Placement out;
    out.per_stage.assign(std::max(1, schedule.n_stages), placed);
    return out;
}

/// Row-major placement shared by every stage (no optimization).
inline Placement place_trivial(const SlicedCircuit& circuit, const Schedule& schedule) {
    const int width = static_cast<int>(std::floor(std::sqrt(static_cast<double>(circuit.n_qubits)))) + 4;
    std::vector<Site> placed = trivial_placement(circuit.n_qubits, width, width);
    Placement out;
    out.per_stage.assign(std::max(1, schedule.n_stages), placed);
    return out;
}

/// Stage-by-stage dynamic placement driver. Stage 0 is a globally annealed
/// map under decaying gate weights; afterwards, advance(s, movers) re-anneals
/// exactly the qubits that moved for stage s into the vacant sites, weighting
/// the remaining schedule relative to stage s + 1.
class DynamicPlacer {
  public:
    DynamicPlacer(const SlicedCircuit& circuit, const Schedule& schedule, const ArchConfig& arch,
                  const PlacerParams& params, std::uint64_t seed)
        : circuit_(circuit),
          schedule_(schedule),
          params_(params),
          seed_(seed),
          x_bound_(exploration_bound(circuit.n_qubits, arch.cols_max)),
          y_bound_(exploration_bound(circuit.n_qubits, arch.rows_max)) {
        std::mt19937_64 rng(derive_seed(seed, 0x696e6974ULL));
        std::vector<Site> initial =
            detail::random_injective_placement(circuit.n_qubits, x_bound_, y_bound_, rng);
        std::vector<int> movable(circuit.n_qubits);
        std::iota(movable.begin(), movable.end(), 0);
        const auto gates = detail::stage_weighted_gates(circuit, schedule, 0, true);
        placement_.per_stage.push_back(anneal_placement(initial, movable, gates, x_bound_, y_bound_,
                                                        params, derive_seed(seed, 0x616e6e31ULL)));
    }

    const std::vector<Site>& stage_sites(int stage) const { return placement_.per_stage.at(stage); }

    /// Computes the placement for stage s + 1 given the qubits that were
    /// relocated for stage s. Their stage-s sites are treated as vacated.
    /// movers[i] must be an endpoint of the i-th gate of stage s.
    void advance(int stage, const std::vector<int>& movers) {
        const std::vector<Site>& current = placement_.per_stage.at(stage);
        if (stage + 1 >= schedule_.n_stages) {
            throw std::invalid_argument("DynamicPlacer::advance: no subsequent stage");
        }
        std::vector<Site> next = current;  // movers keep their vacated home sites initially
        auto gates = detail::stage_weighted_gates(circuit_, schedule_, stage + 1, true);
        if (params_.relocation_pull > 0.0) {
            const std::vector<Gate>& stage_gates = schedule_.gates_by_stage.at(stage);
            if (movers.size() != stage_gates.size()) {
                throw std::invalid_argument("DynamicPlacer::advance: one mover per stage gate required");
            }
            for (std::size_t i = 0; i < movers.size(); ++i) {
                const Gate& g = stage_gates[i];
                const int partner = g.q0 == movers[i] ? g.q1 : g.q0;
                gates.push_back({movers[i], partner, params_.relocation_pull});
            }
        }
        std::vector<Site> annealed =
            anneal_placement(next, movers, gates, x_bound_, y_bound_, params_,
                             derive_seed(seed_, 0x61647600ULL + static_cast<std::uint64_t>(stage)));
        placement_.per_stage.push_back(std::move(annealed));
    }

    void record_fallback(int stage) { placement_.fallback_transitions.push_back(stage); }

    Placement take() && { return std::move(placement_); }
    const Placement& placement() const { return placement_; }

  private:
    const SlicedCircuit& circuit_;
    const Schedule& schedule_;
    PlacerParams params_;
    std::uint64_t seed_;
    int x_bound_;
    int y_bound_;
    Placement placement_;
};

/// Standalone dynamic placement: the relocated endpoint of each gate is the
/// lower qubit id. The compilation pipeline instead drives DynamicPlacer with
/// the endpoints actually chosen by the router.
inline Placement place_dynamic(const SlicedCircuit& circuit, const Schedule& schedule,
                               const ArchConfig& arch, const PlacerParams& params, std::uint64_t seed) {
    DynamicPlacer placer(circuit, schedule, arch, params, seed);
    for (int s = 0; s + 1 < schedule.n_stages; ++s) {
        std::vector<int> movers;
        for (const Gate& g : schedule.gates_by_stage[s]) movers.push_back(std::min(g.q0, g.q1));
        placer.advance(s, movers);
    }
    Placement out = std::move(placer).take();
    if (out.per_stage.empty()) out.per_stage.emplace_back();
    return out;
}

}  // namespace dpqa
